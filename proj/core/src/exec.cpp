#include "chor/exec.hpp"
#include "chor/lang.hpp"

#include <deque>
#include <random>
#include <sstream>
#include <unordered_map>

namespace chor {

namespace {

Term mk(decltype(TermNode::node) n) { return std::make_shared<TermNode>(TermNode{std::move(n)}); }

const Chor& nil_node() {
    static const Chor n = make_nil();
    return n;
}

std::string ptr_key(const void* p) {
    std::ostringstream os;
    os << p;
    return os.str();
}

void key_into(const Term& t, std::string& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TAst>) {
                if (std::holds_alternative<Nil>(n.ch->node)) {
                    out += "N";
                } else {
                    out += "A";
                    out += ptr_key(n.ch.get());
                }
            } else if constexpr (std::is_same_v<T, TResidual>) {
                out += "R";
                out += ptr_key(n.comm.get());
                for (auto i : n.pending) out += "," + std::to_string(i);
            } else if constexpr (std::is_same_v<T, TSeq>) {
                out += "S(";
                key_into(n.first, out);
                out += ";";
                key_into(n.second, out);
                out += ")";
            } else {
                out += "P(";
                key_into(n.left, out);
                out += "|";
                key_into(n.right, out);
                out += ")";
            }
        },
        t->node);
}

std::string one_line(std::string s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (c == '\n' || c == ' ') {
            space = true;
            continue;
        }
        if (space && !out.empty()) out += ' ';
        space = false;
        out += c;
    }
    return out;
}

} // namespace

Term term_of(const Chor& ch) { return mk(TAst{ch}); }

std::string term_str(const Term& t) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TAst>) {
                return one_line(pretty(n.ch));
            } else if constexpr (std::is_same_v<T, TResidual>) {
                const auto& c = std::get<Comm>(n.comm->node);
                std::string out = "{";
                for (std::size_t k = 0; k < n.pending.size(); ++k) {
                    const auto& r = c.rcvs[n.pending[k]];
                    out += (k ? ", " : "") + r.port.id + "[" + render(r.update, r.port.owner) + "]";
                }
                return out + "}";
            } else if constexpr (std::is_same_v<T, TSeq>) {
                return "(" + term_str(n.first) + " ; " + term_str(n.second) + ")";
            } else {
                return "(" + term_str(n.left) + " || " + term_str(n.right) + ")";
            }
        },
        t->node);
}

std::string ChorConfig::key() const {
    std::string out;
    if (term_) key_into(term_, out);
    else out = "F";
    out += "|";
    for (const auto& [k, v] : sigma_) {
        out += v.str();
        out += ',';
    }
    return out;
}

std::string ChorConfig::str() const {
    if (!term_) return "final " + sigma_.str();
    return "(" + term_str(term_) + ", " + sigma_.str() + ")";
}

std::string ChorLabel::str() const {
    if (ports.empty()) return "tau";
    std::string out = "{";
    bool first = true;
    for (const auto& p : ports) {
        out += (first ? "" : ", ") + p;
        first = false;
    }
    return out + "}";
}

// ===========================================================================
// Rules
// ===========================================================================

namespace {

struct Raw {
    ChorLabel label;
    Term next;   // null means final
    Valuation sigma;
    std::vector<Rule> rules;
    CompSet footprint;
};

bool holds(const Expr& g, const Valuation& s) { return eval(g, s).as_bool(); }

Raw make_raw(ChorLabel l, Term next, Valuation s, Rule r, CompSet fp) {
    return Raw{std::move(l), std::move(next), std::move(s), {r}, std::move(fp)};
}

std::vector<Raw> steps(const Term& t, const Valuation& s);

// Owners of pending receives when t holds nothing else; nullopt otherwise.
std::optional<CompSet> pending_owners(const Term& t) {
    if (auto r = std::get_if<TResidual>(&t->node)) {
        const auto& c = std::get<Comm>(r->comm->node);
        CompSet out;
        for (auto i : r->pending) out.insert(c.rcvs[i].port.owner);
        return out;
    }
    auto pair = [](const Term& a, const Term& b) -> std::optional<CompSet> {
        auto x = pending_owners(a);
        if (!x) return std::nullopt;
        auto y = pending_owners(b);
        if (!y) return std::nullopt;
        x->insert(y->begin(), y->end());
        return x;
    };
    if (auto q = std::get_if<TSeq>(&t->node)) return pair(q->first, q->second);
    if (auto p = std::get_if<TPar>(&t->node)) return pair(p->left, p->right);
    return std::nullopt;
}

std::vector<Raw> seq_steps(const Term& first, const Term& second, const Valuation& s) {
    std::vector<Raw> out;
    for (auto& r : steps(first, s)) {
        if (!r.next) {
            r.next = second;
            r.rules.push_back(Rule::Sequential2);
        } else {
            r.next = mk(TSeq{r.next, second});
            r.rules.push_back(Rule::Sequential1);
        }
        out.push_back(std::move(r));
    }
    // An asynchronous send is complete once emitted: the continuation may run
    // as long as it does not touch a component that still has to receive.
    if (auto owners = pending_owners(first)) {
        for (auto& r : steps(second, s)) {
            bool blocked = false;
            for (const auto& c : r.footprint)
                if (owners->count(c)) blocked = true;
            if (blocked) continue;
            r.next = r.next ? mk(TSeq{first, r.next}) : first;
            r.rules.push_back(Rule::SequentialPending);
            out.push_back(std::move(r));
        }
    }
    return out;
}

std::vector<Raw> par_steps(const Term& left, const Term& right, const Valuation& s) {
    std::vector<Raw> out;
    for (auto& r : steps(left, s)) {
        if (!r.next) {
            r.next = right;
            r.rules.push_back(Rule::Parallel3);
        } else {
            r.next = mk(TPar{r.next, right});
            r.rules.push_back(Rule::Parallel1);
        }
        out.push_back(std::move(r));
    }
    for (auto& r : steps(right, s)) {
        if (!r.next) {
            r.next = left;
            r.rules.push_back(Rule::Parallel4);
        } else {
            r.next = mk(TPar{left, r.next});
            r.rules.push_back(Rule::Parallel2);
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<Raw> ast_steps(const Chor& ch, const Valuation& s) {
    std::vector<Raw> out;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Nil>) {
                out.push_back(make_raw({}, nullptr, s, Rule::Nil, {}));
            } else if constexpr (std::is_same_v<T, Comm>) {
                if (!holds(n.send.guard, s)) return;
                std::vector<Port> rports;
                CompSet fp{n.send.port.owner};
                for (const auto& r : n.rcvs) {
                    rports.push_back(r.port);
                    fp.insert(r.port.owner);
                }
                Valuation t = transfer(s, n.send.port, rports);
                if (n.send.port.ctype == PortType::SyncSend) {
                    ChorLabel l{{n.send.port.id}};
                    for (const auto& r : n.rcvs) {
                        l.ports.insert(r.port.id);
                        t = apply_update(r.update, t);
                    }
                    t = apply_update(n.send.update, t);
                    out.push_back(make_raw(std::move(l), nullptr, std::move(t), Rule::SynchSendRcv, std::move(fp)));
                } else {
                    t = apply_update(n.send.update, t);
                    std::vector<std::size_t> idx(n.rcvs.size());
                    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
                    out.push_back(make_raw(ChorLabel{{n.send.port.id}}, mk(TResidual{ch, std::move(idx)}),
                                           std::move(t), Rule::AsynchSendRcv1, std::move(fp)));
                }
            } else if constexpr (std::is_same_v<T, Branch>) {
                for (const auto& c : n.conts) {
                    if (!holds(c.send.guard, s)) continue;
                    out.push_back(make_raw(ChorLabel{{c.send.port.id}}, term_of(c.body), apply_update(c.send.update, s),
                                           Rule::MasterBranching, {n.master}));
                }
            } else if constexpr (std::is_same_v<T, Loop>) {
                if (holds(n.cond.guard, s)) {
                    out.push_back(make_raw(ChorLabel{{n.cond.port.id}}, mk(TSeq{term_of(n.body), term_of(ch)}),
                                           apply_update(n.cond.update, s), Rule::IterativeTT, {n.cond.port.owner}));
                } else {
                    out.push_back(make_raw({}, nullptr, s, Rule::IterativeFF, {n.cond.port.owner}));
                }
            } else if constexpr (std::is_same_v<T, Seq>) {
                out = seq_steps(term_of(n.first), term_of(n.second), s);
            } else {
                out = par_steps(term_of(n.left), term_of(n.right), s);
            }
        },
        ch->node);
    return out;
}

std::vector<Raw> steps(const Term& t, const Valuation& s) {
    return std::visit(
        [&](const auto& n) -> std::vector<Raw> {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TAst>) {
                return ast_steps(n.ch, s);
            } else if constexpr (std::is_same_v<T, TResidual>) {
                std::vector<Raw> out;
                const auto& c = std::get<Comm>(n.comm->node);
                for (std::size_t k = 0; k < n.pending.size(); ++k) {
                    const Receive& r = c.rcvs[n.pending[k]];
                    std::vector<std::size_t> rest = n.pending;
                    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
                    Term next = rest.empty() ? term_of(nil_node()) : mk(TResidual{n.comm, std::move(rest)});
                    out.push_back(make_raw(ChorLabel{{r.port.id}}, std::move(next), apply_update(r.update, s),
                                           Rule::AsynchSendRcv2, {r.port.owner}));
                }
                return out;
            } else if constexpr (std::is_same_v<T, TSeq>) {
                return seq_steps(n.first, n.second, s);
            } else {
                return par_steps(n.left, n.right, s);
            }
        },
        t->node);
}

} // namespace

std::vector<ChorStep> chor_steps(const ChorConfig& c) {
    std::vector<ChorStep> out;
    if (c.is_final()) return out;
    for (auto& r : steps(c.term(), c.sigma())) {
        for (Rule rule : r.rules) coverage::hit(rule);
        ChorConfig next = r.next ? ChorConfig::running(r.next, std::move(r.sigma)) : ChorConfig::final_state(std::move(r.sigma));
        out.push_back(ChorStep{std::move(r.label), std::move(next), std::move(r.rules), std::move(r.footprint)});
    }
    return out;
}

// ===========================================================================
// Exploration
// ===========================================================================

ChorExploreResult explore(const Chor& ch, const Valuation& sigma0, ExploreLimits limits) {
    ChorExploreResult res;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<ChorConfig> configs;
    std::vector<std::size_t> depth;
    std::deque<std::size_t> queue;

    auto intern = [&](ChorConfig c, std::size_t d) -> std::optional<std::size_t> {
        std::string k = c.key();
        auto it = index.find(k);
        if (it != index.end()) return it->second;
        if (configs.size() >= limits.max_configs) {
            res.truncated = true;
            return std::nullopt;
        }
        std::size_t id = configs.size();
        index.emplace(std::move(k), id);
        res.graph.nodes.push_back(c.str());
        configs.push_back(std::move(c));
        depth.push_back(d);
        queue.push_back(id);
        return id;
    };

    intern(ChorConfig::running(term_of(ch), sigma0), 0);
    while (!queue.empty()) {
        std::size_t id = queue.front();
        queue.pop_front();
        const ChorConfig cur = configs[id];
        if (cur.is_final()) {
            res.finals.insert(cur.sigma());
            res.graph.terminals.insert(id);
            continue;
        }
        auto succ = chor_steps(cur);
        if (succ.empty()) {
            res.deadlocks.push_back(cur);
            res.graph.deadlocks.insert(id);
            continue;
        }
        if (depth[id] >= limits.max_depth) {
            res.truncated = true;
            continue;
        }
        for (auto& st : succ) {
            auto dst = intern(std::move(st.next), depth[id] + 1);
            if (dst) res.graph.edges.push_back({id, *dst, st.label.str()});
        }
    }
    res.configs = configs.size();
    return res;
}

ChorTrace random_trace(const Chor& ch, const Valuation& sigma0, std::uint64_t seed, std::size_t max_steps) {
    ChorTrace tr;
    std::mt19937_64 rng(seed);
    ChorConfig cur = ChorConfig::running(term_of(ch), sigma0);
    for (std::size_t n = 0;; ++n) {
        if (cur.is_final()) break;
        auto succ = chor_steps(cur);
        if (succ.empty()) {
            tr.deadlock = true;
            break;
        }
        if (n >= max_steps) {
            tr.truncated = true;
            break;
        }
        std::size_t pick = succ.size() == 1 ? 0 : static_cast<std::size_t>(rng() % succ.size());
        tr.labels.push_back(succ[pick].label);
        cur = std::move(succ[pick].next);
    }
    tr.terminal = cur;
    return tr;
}

} // namespace chor
