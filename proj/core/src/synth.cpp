#include "chor/synth.hpp"

#include <algorithm>
#include <set>

namespace chor {

namespace {

int next(SynthContext& ctx, const std::string& cls) { return ++ctx.counters[cls]; }

AtomicComponent& comp(SynthContext& ctx, const std::string& id) {
    auto c = ctx.system.find(id);
    if (!c) throw SynthError("unknown component " + id);
    return *c;
}

std::string fresh_location(SynthContext& ctx, const std::string& id) {
    std::string l = "L" + id + "_" + std::to_string(next(ctx, "loc:" + id));
    comp(ctx, id).locations.insert(l);
    return l;
}

// Synthetic variable that receives control values of type t.
std::string control_var(SynthContext& ctx, const std::string& id, DataType t) {
    std::string name = "$ctl_" + std::string(to_string(t));
    auto& c = comp(ctx, id);
    for (const auto& v : c.vars)
        if (v.var.id.name == name) return name;
    c.vars.push_back({Variable{VarId{id, name}, t}, Value::default_for(t)});
    return name;
}

Port control_port(SynthContext& ctx, const std::string& owner, const std::string& name, DataType t, PortType ct) {
    Port p;
    p.id = owner + "." + name;
    p.owner = owner;
    p.dtype = t;
    p.ctype = ct;
    if (ct != PortType::Internal) p.var = control_var(ctx, owner, t);
    return p;
}

void register_port(SynthContext& ctx, const Port& p) { comp(ctx, p.owner).ports[p.id] = p; }

void checked(SynthContext& ctx) {
    ++ctx.steps;
    assert_context_unique(ctx);
    ++ctx.invariant_checks;
}

// Every participant moves from its context to a fresh location.
void add_comm(SynthContext& ctx, const Port& snd, const Expr& g, const Update& f,
              const std::vector<std::pair<Port, Update>>& rcvs) {
    register_port(ctx, snd);
    std::string src = ctx.context.at(snd.owner);
    std::string dst = fresh_location(ctx, snd.owner);
    comp(ctx, snd.owner).transitions.push_back({src, snd.id, g, f, dst});
    ctx.context[snd.owner] = dst;
    Interaction a{snd.id, {}};
    for (const auto& [r, fr] : rcvs) {
        register_port(ctx, r);
        std::string rs = ctx.context.at(r.owner);
        std::string rd = fresh_location(ctx, r.owner);
        comp(ctx, r.owner).transitions.push_back({rs, r.id, expr_true(), fr, rd});
        ctx.context[r.owner] = rd;
        a.receivers.push_back(r.id);
    }
    std::sort(a.receivers.begin(), a.receivers.end());
    ctx.system.gamma.push_back(std::move(a));
    checked(ctx);
}

void add_local(SynthContext& ctx, const Port& p, const Expr& g, const Update& f) {
    register_port(ctx, p);
    std::string src = ctx.context.at(p.owner);
    std::string dst = fresh_location(ctx, p.owner);
    comp(ctx, p.owner).transitions.push_back({src, p.id, g, f, dst});
    ctx.context[p.owner] = dst;
    checked(ctx);
}

Port local_copy(SynthContext& ctx, const Port& p) {
    Port q = fresh_copy(ctx, p);
    q.ctype = PortType::Internal;
    q.var.reset();
    return q;
}

std::vector<std::string> in_order(const SynthContext& ctx, const CompSet& s) {
    std::vector<std::string> out;
    for (const auto& c : ctx.system.components)
        if (s.count(c.id)) out.push_back(c.id);
    return out;
}

std::string transition_key(const Transition& t) {
    return t.src + "|" + t.port + "|" + t.dst + "|" + render(t.guard) + "|" + render(t.update);
}

} // namespace

bool is_control_port(const std::string& port_id) { return port_id.find('@') != std::string::npos; }

bool is_epsilon_port(const std::string& port_id) {
    auto dot = port_id.find('.');
    return port_id.compare(dot == std::string::npos ? 0 : dot + 1, 4, "eps@") == 0;
}

SynthContext init_skeleton(const SystemDecl& decl) {
    SynthContext ctx;
    for (const auto& d : decl.components) {
        AtomicComponent c;
        c.id = d.id;
        c.vars = d.vars;
        c.initial = "L" + d.id + "_0";
        c.locations.insert(c.initial);
        ctx.counters["loc:" + d.id] = 0;
        ctx.context[d.id] = c.initial;
        ctx.system.components.push_back(std::move(c));
    }
    assert_context_unique(ctx);
    ++ctx.invariant_checks;
    return ctx;
}

void assert_context_unique(const SynthContext& ctx) {
    if (ctx.context.size() != ctx.system.components.size())
        throw SynthError("context does not cover every component exactly once");
    for (const auto& c : ctx.system.components) {
        auto it = ctx.context.find(c.id);
        if (it == ctx.context.end()) throw SynthError("component " + c.id + " has no context");
        if (!c.locations.count(it->second))
            throw SynthError("context of " + c.id + " is " + it->second + ", which is not one of its locations");
    }
}

Port fresh_copy(SynthContext& ctx, const Port& p) {
    Port q = p;
    q.id = p.id + "#" + std::to_string(next(ctx, "copy:" + p.id));
    return q;
}

SynthContext synth_comm(SynthContext ctx, const GuardedSend& send, const std::vector<Receive>& rcvs) {
    Port snd = fresh_copy(ctx, send.port);
    std::vector<std::pair<Port, Update>> rs;
    for (const auto& r : rcvs) rs.emplace_back(fresh_copy(ctx, r.port), r.update);
    add_comm(ctx, snd, send.guard, send.update, rs);
    return ctx;
}

SynthContext synth_union(const std::vector<SynthContext>& branches, const CompSet& joined) {
    if (branches.empty()) throw SynthError("union of no branches");
    SynthContext out = branches.front();
    std::set<std::string> seen_t;
    for (auto& c : out.system.components)
        for (const auto& t : c.transitions) seen_t.insert(c.id + "|" + transition_key(t));
    std::set<Interaction> seen_a(out.system.gamma.begin(), out.system.gamma.end());

    for (std::size_t b = 1; b < branches.size(); ++b) {
        const SynthContext& br = branches[b];
        for (const auto& bc : br.system.components) {
            AtomicComponent& oc = comp(out, bc.id);
            for (const auto& v : bc.vars) {
                bool have = std::any_of(oc.vars.begin(), oc.vars.end(),
                                        [&](const VarDecl& x) { return x.var.id == v.var.id; });
                if (!have) oc.vars.push_back(v);
            }
            for (const auto& [pid, p] : bc.ports) oc.ports.emplace(pid, p);
            oc.locations.insert(bc.locations.begin(), bc.locations.end());
            for (const auto& t : bc.transitions)
                if (seen_t.insert(bc.id + "|" + transition_key(t)).second) oc.transitions.push_back(t);
        }
        for (const auto& a : br.system.gamma)
            if (seen_a.insert(a).second) out.system.gamma.push_back(a);
        for (const auto& [k, v] : br.counters) out.counters[k] = std::max(out.counters[k], v);
        out.steps = std::max(out.steps, br.steps);
        out.invariant_checks += br.invariant_checks;
        for (const auto& [cid, loc] : br.context)
            if (!joined.count(cid) && out.context.at(cid) != loc)
                throw SynthError("branches disagree on the context of non-joined component " + cid);
    }
    if (!joined.empty()) {
        int k = next(out, "eps");
        for (const auto& id : in_order(out, joined)) {
            Port eps = control_port(out, id, "eps@" + std::to_string(k), DataType::Bool, PortType::Internal);
            register_port(out, eps);
            std::string lu = fresh_location(out, id);
            std::set<std::string> sources;
            for (const auto& br : branches) sources.insert(br.context.at(id));
            for (const auto& src : sources) comp(out, id).transitions.push_back({src, eps.id, expr_true(), {}, lu});
            out.context[id] = lu;
        }
    }
    checked(out);
    return out;
}

SynthContext synth_branch(SynthContext ctx, const Branch& b) {
    CompSet all;
    for (const auto& c : b.conts) {
        all.insert(c.send.port.owner);
        auto p = participants(c.body);
        all.insert(p.begin(), p.end());
    }
    all.insert(b.master);
    CompSet k = all;
    k.erase(b.master);

    std::vector<SynthContext> results;
    std::map<std::string, int> counters = ctx.counters;
    std::size_t steps = ctx.steps;
    for (const auto& cont : b.conts) {
        SynthContext c = ctx;
        c.counters = counters;
        c.steps = steps;
        c.invariant_checks = 0;
        if (!k.empty()) {
            int n = next(c, "br");
            Port snd = fresh_copy(c, cont.send.port);
            std::vector<std::pair<Port, Update>> rs;
            for (const auto& j : in_order(c, k))
                rs.emplace_back(control_port(c, j, "br@" + std::to_string(n), snd.dtype, PortType::Recv), Update{});
            add_comm(c, snd, cont.send.guard, cont.send.update, rs);
        } else {
            add_local(c, local_copy(c, cont.send.port), cont.send.guard, cont.send.update);
        }
        c = synth(std::move(c), cont.body);
        counters = c.counters;
        steps = c.steps;
        results.push_back(std::move(c));
    }
    std::size_t before = ctx.invariant_checks;
    SynthContext out = synth_union(results, all);
    out.invariant_checks += before;
    return out;
}

SynthContext synth_loop(SynthContext ctx, const Loop& l) {
    const std::string master = l.cond.port.owner;
    CompSet k = participants(l.body);
    k.erase(master);
    CompSet members = k;
    members.insert(master);
    const std::map<std::string, std::string> before = ctx.context;

    if (!k.empty()) {
        int n = next(ctx, "cont");
        Port snd = fresh_copy(ctx, l.cond.port);
        std::vector<std::pair<Port, Update>> rs;
        for (const auto& j : in_order(ctx, k))
            rs.emplace_back(control_port(ctx, j, "cont@" + std::to_string(n), snd.dtype, PortType::Recv), Update{});
        add_comm(ctx, snd, l.cond.guard, l.cond.update, rs);
    } else {
        add_local(ctx, local_copy(ctx, l.cond.port), l.cond.guard, l.cond.update);
    }
    ctx = synth(std::move(ctx), l.body);

    // back-edges to the loop head
    int e = next(ctx, "eps");
    for (const auto& j : in_order(ctx, members)) {
        Port eps = control_port(ctx, j, "eps@" + std::to_string(e), DataType::Bool, PortType::Internal);
        register_port(ctx, eps);
        comp(ctx, j).transitions.push_back({ctx.context.at(j), eps.id, expr_true(), {}, before.at(j)});
    }

    // break: master decides on the negated condition, the others follow
    int b = next(ctx, "brk");
    std::string name = "brk@" + std::to_string(b);
    Expr not_g = negate(l.cond.guard);
    if (!k.empty()) {
        Port snd = control_port(ctx, master, name, DataType::Bool, PortType::SyncSend);
        register_port(ctx, snd);
        Interaction a{snd.id, {}};
        std::string lc = fresh_location(ctx, master);
        comp(ctx, master).transitions.push_back({before.at(master), snd.id, not_g, {}, lc});
        ctx.context[master] = lc;
        for (const auto& j : in_order(ctx, k)) {
            Port r = control_port(ctx, j, name, DataType::Bool, PortType::Recv);
            register_port(ctx, r);
            std::string lj = fresh_location(ctx, j);
            comp(ctx, j).transitions.push_back({before.at(j), r.id, expr_true(), {}, lj});
            ctx.context[j] = lj;
            a.receivers.push_back(r.id);
        }
        std::sort(a.receivers.begin(), a.receivers.end());
        ctx.system.gamma.push_back(std::move(a));
    } else {
        Port p = control_port(ctx, master, name, DataType::Bool, PortType::Internal);
        register_port(ctx, p);
        std::string lc = fresh_location(ctx, master);
        comp(ctx, master).transitions.push_back({before.at(master), p.id, not_g, {}, lc});
        ctx.context[master] = lc;
    }
    checked(ctx);
    return ctx;
}

SynthContext synth_seq(SynthContext ctx, const Seq& s) {
    ctx = synth(std::move(ctx), s.first);
    CompSet ends = end_set(s.first);
    if (!ends.empty()) {
        auto ordered = in_order(ctx, ends);
        const std::string i = ordered.front();
        CompSet j = ends;
        auto st = start_set(s.second);
        j.insert(st.begin(), st.end());
        j.erase(i);
        if (!j.empty()) {
            int n = next(ctx, "cs");
            Port snd = control_port(ctx, i, "cs@" + std::to_string(n), DataType::Bool, PortType::SyncSend);
            std::vector<std::pair<Port, Update>> rs;
            for (const auto& r : in_order(ctx, j))
                rs.emplace_back(control_port(ctx, r, "cr@" + std::to_string(n), DataType::Bool, PortType::Recv),
                                Update{});
            add_comm(ctx, snd, expr_true(), Update{}, rs);
        }
    }
    return synth(std::move(ctx), s.second);
}

SynthContext synth_par(SynthContext ctx, const Par& p) {
    ctx = synth(std::move(ctx), p.left);
    return synth(std::move(ctx), p.right);
}

SynthContext synth(SynthContext ctx, const Chor& ch) {
    return std::visit(
        [&](const auto& n) -> SynthContext {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Nil>) return std::move(ctx);
            else if constexpr (std::is_same_v<T, Comm>) return synth_comm(std::move(ctx), n.send, n.rcvs);
            else if constexpr (std::is_same_v<T, Branch>) return synth_branch(std::move(ctx), n);
            else if constexpr (std::is_same_v<T, Loop>) return synth_loop(std::move(ctx), n);
            else if constexpr (std::is_same_v<T, Seq>) return synth_seq(std::move(ctx), n);
            else return synth_par(std::move(ctx), n);
        },
        ch->node);
}

SynthResult synthesize_traced(const SystemDecl& decl, const Chor& ch) {
    SynthContext ctx = synth(init_skeleton(decl), ch);
    assert_context_unique(ctx);
    for (auto& c : ctx.system.components) c.end = ctx.context.at(c.id);
    Diagnostics ds = check_structure(ctx.system);
    if (!ds.empty()) throw SynthError("synthesized system fails structural check: " + ds.front().message);
    return SynthResult{std::move(ctx.system), ctx.steps, ctx.invariant_checks + 1};
}

CompositeSystem synthesize(const SystemDecl& decl, const Chor& ch) { return synthesize_traced(decl, ch).system; }

} // namespace chor
