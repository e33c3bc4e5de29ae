#include "chor/ast.hpp"

#include <algorithm>
#include <sstream>

namespace chor {

std::string Diagnostic::format(const std::string& file) const {
    std::ostringstream os;
    if (!file.empty()) os << file << ':';
    os << span.line << ':' << span.column << ": error[" << rule << "]: " << message;
    return os.str();
}

bool has_rule(const Diagnostics& ds, const std::string& rule) {
    return std::any_of(ds.begin(), ds.end(), [&](const Diagnostic& d) { return d.rule == rule; });
}

// ===========================================================================
// Declarations
// ===========================================================================

const Port* ComponentDecl::find_port(std::string_view local) const {
    for (const auto& p : ports)
        if (p.local_name() == local) return &p;
    return nullptr;
}

const VarDecl* ComponentDecl::find_var(std::string_view name) const {
    for (const auto& v : vars)
        if (v.var.id.name == name) return &v;
    return nullptr;
}

const ComponentDecl* SystemDecl::find(std::string_view id) const {
    for (const auto& c : components)
        if (c.id == id) return &c;
    return nullptr;
}

int SystemDecl::order(std::string_view id) const {
    for (std::size_t i = 0; i < components.size(); ++i)
        if (components[i].id == id) return static_cast<int>(i);
    return -1;
}

const Port* SystemDecl::find_port(std::string_view qualified) const {
    auto dot = qualified.find('.');
    if (dot == std::string_view::npos) return nullptr;
    auto c = find(qualified.substr(0, dot));
    return c ? c->find_port(qualified.substr(dot + 1)) : nullptr;
}

std::optional<DataType> SystemDecl::var_type(const VarId& v) const {
    auto c = find(v.owner);
    if (!c) return std::nullopt;
    auto d = c->find_var(v.name);
    if (!d) return std::nullopt;
    return d->var.dtype;
}

Valuation SystemDecl::initial_valuation() const {
    Valuation out;
    for (const auto& c : components)
        for (const auto& v : c.vars) out.set(v.var.id, v.init);
    return out;
}

TypeEnv SystemDecl::type_env() const {
    TypeEnv env;
    for (const auto& c : components)
        for (const auto& v : c.vars) env[v.var.id] = v.var.dtype;
    return env;
}

std::set<VarId> SystemDecl::user_variables() const {
    std::set<VarId> out;
    for (const auto& c : components)
        for (const auto& v : c.vars) out.insert(v.var.id);
    return out;
}

std::vector<std::string> SystemDecl::ordered(const CompSet& s) const {
    std::vector<std::string> out(s.begin(), s.end());
    std::stable_sort(out.begin(), out.end(), [&](const std::string& a, const std::string& b) {
        int oa = order(a), ob = order(b);
        if (oa != ob) return oa < ob;
        return a < b;
    });
    return out;
}

// ===========================================================================
// Builders
// ===========================================================================

namespace {

Chor node(decltype(ChorNode::node) n, SourceSpan sp) {
    return std::make_shared<ChorNode>(ChorNode{std::move(n), sp});
}

} // namespace

Chor make_nil(SourceSpan sp) { return node(Nil{}, sp); }

Chor make_comm(GuardedSend send, std::vector<Receive> rcvs, SourceSpan sp) {
    DataType dt = send.port.dtype;
    return node(Comm{std::move(send), std::move(rcvs), dt, false}, sp);
}

Chor make_branch(std::string master, std::vector<Continuation> conts, SourceSpan sp) {
    return node(Branch{std::move(master), std::move(conts)}, sp);
}

Chor make_loop(GuardedSend cond, Chor body, SourceSpan sp) { return node(Loop{std::move(cond), std::move(body)}, sp); }
Chor make_seq(Chor a, Chor b, SourceSpan sp) { return node(Seq{std::move(a), std::move(b)}, sp); }
Chor make_par(Chor a, Chor b, SourceSpan sp) { return node(Par{std::move(a), std::move(b)}, sp); }

// ===========================================================================
// Equality
// ===========================================================================

namespace {

bool send_equal(const GuardedSend& a, const GuardedSend& b) {
    return a.port == b.port && expr_equal(a.guard, b.guard) && update_equal(a.update, b.update);
}

} // namespace

bool chor_equal(const Chor& a, const Chor& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b->node);
            if constexpr (std::is_same_v<T, Nil>) {
                return true;
            } else if constexpr (std::is_same_v<T, Comm>) {
                if (!send_equal(x.send, y.send) || x.dtype != y.dtype || x.annotated != y.annotated) return false;
                if (x.rcvs.size() != y.rcvs.size()) return false;
                for (std::size_t i = 0; i < x.rcvs.size(); ++i)
                    if (!(x.rcvs[i].port == y.rcvs[i].port) || !update_equal(x.rcvs[i].update, y.rcvs[i].update))
                        return false;
                return true;
            } else if constexpr (std::is_same_v<T, Branch>) {
                if (x.master != y.master || x.conts.size() != y.conts.size()) return false;
                for (std::size_t i = 0; i < x.conts.size(); ++i)
                    if (!send_equal(x.conts[i].send, y.conts[i].send) || !chor_equal(x.conts[i].body, y.conts[i].body))
                        return false;
                return true;
            } else if constexpr (std::is_same_v<T, Loop>) {
                return send_equal(x.cond, y.cond) && chor_equal(x.body, y.body);
            } else if constexpr (std::is_same_v<T, Seq>) {
                return chor_equal(x.first, y.first) && chor_equal(x.second, y.second);
            } else {
                return chor_equal(x.left, y.left) && chor_equal(x.right, y.right);
            }
        },
        a->node);
}

// ===========================================================================
// C, start, end
// ===========================================================================

namespace {

void merge(CompSet& into, const CompSet& from) { into.insert(from.begin(), from.end()); }

} // namespace

CompSet participants(const Chor& ch) {
    CompSet out;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Comm>) {
                out.insert(n.send.port.owner);
                for (const auto& r : n.rcvs) out.insert(r.port.owner);
            } else if constexpr (std::is_same_v<T, Branch>) {
                out.insert(n.master);
                for (const auto& c : n.conts) {
                    out.insert(c.send.port.owner);
                    merge(out, participants(c.body));
                }
            } else if constexpr (std::is_same_v<T, Loop>) {
                out.insert(n.cond.port.owner);
                merge(out, participants(n.body));
            } else if constexpr (std::is_same_v<T, Seq>) {
                merge(out, participants(n.first));
                merge(out, participants(n.second));
            } else if constexpr (std::is_same_v<T, Par>) {
                merge(out, participants(n.left));
                merge(out, participants(n.right));
            }
        },
        ch->node);
    return out;
}

CompSet start_set(const Chor& ch) {
    return std::visit(
        [&](const auto& n) -> CompSet {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Nil>) return {};
            else if constexpr (std::is_same_v<T, Comm>) return {n.send.port.owner};
            else if constexpr (std::is_same_v<T, Branch>) return {n.master};
            else if constexpr (std::is_same_v<T, Loop>) return {n.cond.port.owner};
            else if constexpr (std::is_same_v<T, Seq>) return start_set(n.first);
            else {
                CompSet out = start_set(n.left);
                merge(out, start_set(n.right));
                return out;
            }
        },
        ch->node);
}

CompSet end_set(const Chor& ch) {
    return std::visit(
        [&](const auto& n) -> CompSet {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Nil>) {
                return {};
            } else if constexpr (std::is_same_v<T, Comm>) {
                if (n.send.port.ctype == PortType::AsyncSend) return {n.send.port.owner};
                CompSet out;
                for (const auto& r : n.rcvs) out.insert(r.port.owner);
                return out;
            } else if constexpr (std::is_same_v<T, Branch>) {
                // C of the continuation list: the choosing ports and every branch body
                CompSet out;
                for (const auto& c : n.conts) {
                    out.insert(c.send.port.owner);
                    merge(out, participants(c.body));
                }
                return out;
            } else if constexpr (std::is_same_v<T, Loop>) {
                return {n.cond.port.owner};
            } else if constexpr (std::is_same_v<T, Seq>) {
                return end_set(n.second);
            } else {
                CompSet out = end_set(n.left);
                merge(out, end_set(n.right));
                return out;
            }
        },
        ch->node);
}

std::set<std::string> ports_of(const Chor& ch) {
    std::set<std::string> out;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Comm>) {
                out.insert(n.send.port.id);
                for (const auto& r : n.rcvs) out.insert(r.port.id);
            } else if constexpr (std::is_same_v<T, Branch>) {
                for (const auto& c : n.conts) {
                    out.insert(c.send.port.id);
                    auto sub = ports_of(c.body);
                    out.insert(sub.begin(), sub.end());
                }
            } else if constexpr (std::is_same_v<T, Loop>) {
                out.insert(n.cond.port.id);
                auto sub = ports_of(n.body);
                out.insert(sub.begin(), sub.end());
            } else if constexpr (std::is_same_v<T, Seq>) {
                auto a = ports_of(n.first), b = ports_of(n.second);
                out.insert(a.begin(), a.end());
                out.insert(b.begin(), b.end());
            } else if constexpr (std::is_same_v<T, Par>) {
                auto a = ports_of(n.left), b = ports_of(n.right);
                out.insert(a.begin(), a.end());
                out.insert(b.begin(), b.end());
            }
        },
        ch->node);
    return out;
}

std::size_t node_count(const Chor& ch) {
    return std::visit(
        [&](const auto& n) -> std::size_t {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Branch>) {
                std::size_t k = 1;
                for (const auto& c : n.conts) k += node_count(c.body);
                return k;
            } else if constexpr (std::is_same_v<T, Loop>) {
                return 1 + node_count(n.body);
            } else if constexpr (std::is_same_v<T, Seq>) {
                return 1 + node_count(n.first) + node_count(n.second);
            } else if constexpr (std::is_same_v<T, Par>) {
                return 1 + node_count(n.left) + node_count(n.right);
            } else {
                return 1;
            }
        },
        ch->node);
}

} // namespace chor
