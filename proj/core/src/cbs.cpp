#include "chor/cbs.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>

namespace chor {

const Port* AtomicComponent::find_port(const std::string& pid) const {
    auto it = ports.find(pid);
    return it == ports.end() ? nullptr : &it->second;
}

std::vector<const Transition*> AtomicComponent::outgoing(const std::string& loc) const {
    std::vector<const Transition*> out;
    for (const auto& t : transitions)
        if (t.src == loc) out.push_back(&t);
    return out;
}

std::string Interaction::str() const {
    std::string out = send + " -> {";
    for (std::size_t i = 0; i < receivers.size(); ++i) out += (i ? ", " : " ") + receivers[i];
    return out + " }";
}

const AtomicComponent* CompositeSystem::find(const std::string& id) const {
    for (const auto& c : components)
        if (c.id == id) return &c;
    return nullptr;
}

AtomicComponent* CompositeSystem::find(const std::string& id) {
    for (auto& c : components)
        if (c.id == id) return &c;
    return nullptr;
}

const Port* CompositeSystem::find_port(const std::string& id) const {
    auto dot = id.find('.');
    if (dot == std::string::npos) return nullptr;
    auto c = find(id.substr(0, dot));
    return c ? c->find_port(id) : nullptr;
}

std::vector<const Interaction*> CompositeSystem::interactions_of(const std::string& port) const {
    std::vector<const Interaction*> out;
    for (const auto& a : gamma)
        if (a.send == port || std::find(a.receivers.begin(), a.receivers.end(), port) != a.receivers.end())
            out.push_back(&a);
    return out;
}

Valuation CompositeSystem::initial_valuation() const {
    Valuation v;
    for (const auto& c : components)
        for (const auto& d : c.vars) v.set(d.var.id, d.init);
    return v;
}

std::set<VarId> CompositeSystem::user_variables() const {
    std::set<VarId> out;
    for (const auto& c : components)
        for (const auto& d : c.vars)
            if (!is_control_variable(d.var.id)) out.insert(d.var.id);
    return out;
}

std::size_t CompositeSystem::location_count() const {
    std::size_t n = 0;
    for (const auto& c : components) n += c.locations.size();
    return n;
}

std::size_t CompositeSystem::transition_count() const {
    std::size_t n = 0;
    for (const auto& c : components) n += c.transitions.size();
    return n;
}

std::string SysState::key() const {
    std::string out;
    for (const auto& l : locations) {
        out += l;
        out += ',';
    }
    out += '|';
    for (const auto& [k, v] : valuation) {
        out += v.str();
        out += ',';
    }
    out += '|';
    for (const auto& [p, q] : buffers) {
        out += p;
        out += '[';
        for (const auto& v : q) {
            out += v.str();
            out += ',';
        }
        out += ']';
    }
    return out;
}

std::string SysState::str() const {
    std::string out = "<";
    for (std::size_t i = 0; i < locations.size(); ++i) out += (i ? ", " : "") + locations[i];
    out += "> " + valuation.str();
    for (const auto& [p, q] : buffers) {
        out += " " + p + "=[";
        for (std::size_t i = 0; i < q.size(); ++i) out += (i ? ", " : "") + q[i].str();
        out += "]";
    }
    return out;
}

SysState initial_state(const CompositeSystem& sys) {
    SysState s;
    for (const auto& c : sys.components) s.locations.push_back(c.initial);
    s.valuation = sys.initial_valuation();
    return s;
}

std::string SysStep::label() const {
    if (interaction) return interaction->str();
    return "tau(" + port + ")";
}

// ===========================================================================
// Semantics
// ===========================================================================

namespace {

// Lookup tables built once per system.
class View {
public:
    explicit View(const CompositeSystem& sys) : sys_(sys) {
        for (std::size_t i = 0; i < sys.components.size(); ++i) {
            const auto& c = sys.components[i];
            comp_index_[c.id] = i;
            for (const auto& t : c.transitions) out_[i][t.src].push_back(&t);
            for (const auto& [pid, p] : c.ports) ports_[pid] = &p;
        }
        for (const auto& a : sys.gamma) by_sender_[a.send].push_back(&a);
    }

    const std::vector<const Transition*>& outgoing(std::size_t comp, const std::string& loc) const {
        static const std::vector<const Transition*> none;
        auto it = out_.find(comp);
        if (it == out_.end()) return none;
        auto jt = it->second.find(loc);
        return jt == it->second.end() ? none : jt->second;
    }

    const Port* port(const std::string& id) const {
        auto it = ports_.find(id);
        return it == ports_.end() ? nullptr : it->second;
    }

    const std::vector<const Interaction*>& sent_by(const std::string& port) const {
        static const std::vector<const Interaction*> none;
        auto it = by_sender_.find(port);
        return it == by_sender_.end() ? none : it->second;
    }

    std::size_t index(const std::string& comp) const { return comp_index_.at(comp); }

    std::vector<SysStep> steps(const SysState& s) const;

private:
    const CompositeSystem& sys_;
    std::unordered_map<std::string, std::size_t> comp_index_;
    std::unordered_map<std::size_t, std::unordered_map<std::string, std::vector<const Transition*>>> out_;
    std::unordered_map<std::string, const Port*> ports_;
    std::unordered_map<std::string, std::vector<const Interaction*>> by_sender_;
};

bool enabled(const Transition& t, const Valuation& v) { return eval(t.guard, v).as_bool(); }

// Receive with value d: bind the port variable, then run the update.
Valuation receive(const Port& p, const Transition& t, Valuation v, const Value& d) {
    if (auto x = p.var_id()) v.rebind(*x, d);
    return apply_update(t.update, v);
}

std::vector<SysStep> View::steps(const SysState& s) const {
    std::vector<SysStep> out;
    const Valuation& v = s.valuation;
    for (std::size_t i = 0; i < sys_.components.size(); ++i) {
        const auto& comp = sys_.components[i];
        for (const Transition* t : outgoing(i, s.locations[i])) {
            const Port* p = port(t->port);
            if (!p) continue;
            if (p->ctype == PortType::Internal) {
                if (!enabled(*t, v)) continue;
                SysStep st;
                st.component = comp.id;
                st.port = p->id;
                st.rule = Rule::Internal;
                st.next = s;
                st.next.valuation = apply_update(t->update, v);
                st.next.locations[i] = t->dst;
                out.push_back(std::move(st));
            } else if (p->ctype == PortType::Recv) {
                auto buf = s.buffers.find(p->id);
                if (buf == s.buffers.end() || !enabled(*t, v)) continue;
                SysStep st;
                st.component = comp.id;
                st.port = p->id;
                st.rule = Rule::Recv;
                st.next = s;
                auto& q = st.next.buffers[p->id];
                Value d = q.front();
                q.pop_front();
                if (q.empty()) st.next.buffers.erase(p->id);
                st.next.valuation = receive(*p, *t, v, d);
                st.next.locations[i] = t->dst;
                out.push_back(std::move(st));
            } else {
                if (!enabled(*t, v)) continue;
                const Value d = p->var_id() ? v.at(*p->var_id()) : Value();
                for (const Interaction* a : sent_by(p->id)) {
                    if (p->ctype == PortType::AsyncSend) {
                        SysStep st;
                        st.interaction = *a;
                        st.rule = Rule::AsynchSend;
                        st.next = s;
                        st.next.valuation = apply_update(t->update, v);
                        st.next.locations[i] = t->dst;
                        for (const auto& r : a->receivers) st.next.buffers[r].push_back(d);
                        out.push_back(std::move(st));
                        continue;
                    }
                    // every receiver needs an empty buffer and an enabled transition
                    std::vector<std::pair<std::size_t, std::vector<const Transition*>>> choices;
                    bool ok = true;
                    for (const auto& r : a->receivers) {
                        const Port* rp = port(r);
                        if (!rp || s.buffers.count(r)) {
                            ok = false;
                            break;
                        }
                        std::size_t j = index(rp->owner);
                        std::vector<const Transition*> en;
                        for (const Transition* rt : outgoing(j, s.locations[j]))
                            if (rt->port == r && enabled(*rt, v)) en.push_back(rt);
                        if (en.empty()) {
                            ok = false;
                            break;
                        }
                        choices.emplace_back(j, std::move(en));
                    }
                    if (!ok) continue;
                    std::vector<std::size_t> pick(choices.size(), 0);
                    while (true) {
                        SysStep st;
                        st.interaction = *a;
                        st.rule = Rule::SynchSend;
                        st.next = s;
                        Valuation nv = apply_update(t->update, v);
                        st.next.locations[i] = t->dst;
                        for (std::size_t k = 0; k < choices.size(); ++k) {
                            const Transition* rt = choices[k].second[pick[k]];
                            nv = receive(*port(rt->port), *rt, std::move(nv), d);
                            st.next.locations[choices[k].first] = rt->dst;
                        }
                        st.next.valuation = std::move(nv);
                        out.push_back(std::move(st));
                        std::size_t k = 0;
                        while (k < pick.size() && ++pick[k] == choices[k].second.size()) pick[k++] = 0;
                        if (k == pick.size()) break;
                    }
                }
            }
        }
    }
    for (const auto& st : out) coverage::hit(st.rule);
    return out;
}

} // namespace

std::vector<SysStep> sys_steps(const CompositeSystem& sys, const SysState& s) { return View(sys).steps(s); }

bool is_terminal(const CompositeSystem& sys, const SysState& s) {
    if (!s.buffers_empty()) return false;
    for (std::size_t i = 0; i < sys.components.size(); ++i) {
        const auto& e = sys.components[i].end;
        if (!e || *e != s.locations[i]) return false;
    }
    return true;
}

std::set<Valuation> SysExploreResult::terminal_valuations() const {
    std::set<Valuation> out;
    for (const auto& s : terminals) out.insert(s.valuation);
    return out;
}

SysExploreResult sys_explore(const CompositeSystem& sys, const SysState& s0, ExploreLimits limits) {
    SysExploreResult res;
    View view(sys);
    std::unordered_map<std::string, std::size_t> index;
    std::vector<SysState> states;
    std::vector<std::size_t> depth;
    std::deque<std::size_t> queue;

    auto intern = [&](SysState s, std::size_t d) -> std::optional<std::size_t> {
        std::string k = s.key();
        auto it = index.find(k);
        if (it != index.end()) return it->second;
        if (states.size() >= limits.max_configs) {
            res.truncated = true;
            return std::nullopt;
        }
        std::size_t id = states.size();
        index.emplace(std::move(k), id);
        res.graph.nodes.push_back(s.str());
        states.push_back(std::move(s));
        depth.push_back(d);
        queue.push_back(id);
        return id;
    };

    intern(s0, 0);
    while (!queue.empty()) {
        std::size_t id = queue.front();
        queue.pop_front();
        auto succ = view.steps(states[id]);
        if (succ.empty()) {
            if (is_terminal(sys, states[id])) {
                res.terminals.push_back(states[id]);
                res.graph.terminals.insert(id);
            } else {
                res.deadlocks.push_back(states[id]);
                res.graph.deadlocks.insert(id);
            }
            continue;
        }
        if (depth[id] >= limits.max_depth) {
            res.truncated = true;
            continue;
        }
        for (auto& st : succ) {
            std::string label = st.label();
            auto dst = intern(std::move(st.next), depth[id] + 1);
            if (dst) res.graph.edges.push_back({id, *dst, std::move(label)});
        }
    }
    res.states = states.size();
    return res;
}

// ===========================================================================
// Structural checks
// ===========================================================================

Diagnostics check_structure(const CompositeSystem& sys) {
    Diagnostics out;
    auto report = [&](std::string rule, std::string msg) { out.push_back(Diagnostic{{}, std::move(rule), std::move(msg)}); };

    std::map<std::string, int> uses;
    for (const auto& a : sys.gamma) {
        const Port* s = sys.find_port(a.send);
        if (!s) {
            report("unknown-port", "interaction " + a.str() + " refers to unknown port " + a.send);
            continue;
        }
        ++uses[a.send];
        if (!is_send(s->ctype)) report("interaction-kind", "interaction " + a.str() + " is not triggered by a send port");
        if (a.receivers.empty()) report("interaction-kind", "interaction " + a.str() + " has no receivers");
        std::set<std::string> owners;
        for (const auto& r : a.receivers) {
            const Port* rp = sys.find_port(r);
            if (!rp) {
                report("unknown-port", "interaction " + a.str() + " refers to unknown port " + r);
                continue;
            }
            ++uses[r];
            if (rp->ctype != PortType::Recv) report("interaction-kind", r + " in " + a.str() + " is not a receive port");
            if (rp->dtype != s->dtype) report("dtype-mismatch", "interaction " + a.str() + " mixes data types");
            if (rp->owner == s->owner || !owners.insert(rp->owner).second)
                report("interaction-owners", "interaction " + a.str() + " repeats component " + rp->owner);
        }
    }

    for (const auto& c : sys.components) {
        if (!c.locations.count(c.initial)) report("unknown-location", c.id + " has unknown initial location " + c.initial);
        if (c.end && !c.locations.count(*c.end)) report("unknown-location", c.id + " has unknown end location " + *c.end);
        for (const auto& [pid, p] : c.ports) {
            if (p.owner != c.id) report("port-ownership", pid + " is listed on " + c.id + " but owned by " + p.owner);
            int n = uses.count(pid) ? uses[pid] : 0;
            if (p.ctype == PortType::Internal) {
                if (n) report("internal-in-interaction", "internal port " + pid + " appears in an interaction");
            } else if (n > 1) {
                report("port-conflict", pid + " appears in " + std::to_string(n) + " interactions");
            } else if (n == 0) {
                report("port-unconnected", pid + " appears in no interaction");
            }
        }
        std::map<std::string, std::pair<bool, bool>> kinds;   // location -> (sends, receives)
        for (const auto& t : c.transitions) {
            if (!c.locations.count(t.src) || !c.locations.count(t.dst))
                report("unknown-location", c.id + " has a transition on " + t.port + " between unknown locations");
            const Port* p = c.find_port(t.port);
            if (!p) {
                report("unknown-port", c.id + " has a transition on unknown port " + t.port);
                continue;
            }
            if (is_send(p->ctype)) kinds[t.src].first = true;
            if (p->ctype == PortType::Recv) kinds[t.src].second = true;
            for (const auto& v : vars_of(t.guard))
                if (v.owner != c.id) report("locality", c.id + " guard on " + t.port + " reads " + v.qualified());
            for (const auto& v : t.update.reads())
                if (v.owner != c.id) report("locality", c.id + " update on " + t.port + " reads " + v.qualified());
            for (const auto& v : t.update.writes())
                if (v.owner != c.id) report("locality", c.id + " update on " + t.port + " writes " + v.qualified());
        }
        for (const auto& [loc, k] : kinds)
            if (k.first && k.second)
                report("mixed-location", c.id + " location " + loc + " has outgoing send and receive transitions");
    }
    return out;
}

// ===========================================================================
// Serialization
// ===========================================================================

namespace {

std::string port_line(const Port& p) {
    std::string out = "port " + p.id + ": " + std::string(to_string(p.ctype)) + " of " + std::string(to_string(p.dtype));
    if (p.var) out += " binds " + *p.var;
    return out;
}

std::string transition_line(const Transition& t, const std::string& owner) {
    return "transition " + t.src + " -> " + t.dst + " on " + t.port + " [" + render(t.guard, owner) + ", " +
           render(t.update, owner) + "]";
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

} // namespace

std::string serialize(const CompositeSystem& sys) {
    std::ostringstream os;
    os << "system\n";
    std::vector<const AtomicComponent*> comps;
    for (const auto& c : sys.components) comps.push_back(&c);
    std::sort(comps.begin(), comps.end(), [](auto a, auto b) { return a->id < b->id; });
    for (const auto* c : comps) {
        os << "component " << c->id << "\n";
        std::vector<std::string> lines;
        for (const auto& v : c->vars)
            lines.push_back("var " + v.var.id.name + ": " + std::string(to_string(v.var.dtype)) + " = " + v.init.str());
        std::sort(lines.begin(), lines.end());
        for (const auto& l : lines) os << "  " << l << "\n";
        for (const auto& [pid, p] : c->ports) os << "  " << port_line(p) << "\n";
        for (const auto& l : c->locations) {
            os << "  location " << l;
            if (l == c->initial) os << " initial";
            if (c->end && l == *c->end) os << " end";
            os << "\n";
        }
        lines.clear();
        for (const auto& t : c->transitions) lines.push_back(transition_line(t, c->id));
        std::sort(lines.begin(), lines.end());
        for (const auto& l : lines) os << "  " << l << "\n";
        os << "end\n";
    }
    std::vector<std::string> inter;
    for (const auto& a : sys.gamma) inter.push_back("interaction " + a.str());
    std::sort(inter.begin(), inter.end());
    for (const auto& l : inter) os << l << "\n";
    return os.str();
}

std::string to_dot(const CompositeSystem& sys) {
    std::ostringstream os;
    os << "digraph system {\n  rankdir=LR;\n  node [shape=circle, fontsize=10];\n";
    std::size_t k = 0;
    for (const auto& c : sys.components) {
        os << "  subgraph cluster_" << k++ << " {\n    label=\"" << dot_escape(c.id) << "\";\n";
        for (const auto& l : c.locations) {
            os << "    \"" << dot_escape(c.id + "::" + l) << "\" [label=\"" << dot_escape(l) << "\"";
            if (c.end && *c.end == l) os << ", shape=doublecircle";
            if (l == c.initial) os << ", style=bold";
            os << "];\n";
        }
        std::vector<std::string> lines;
        for (const auto& t : c.transitions) {
            std::string label = t.port;
            if (!is_literal_true(t.guard)) label += " [" + render(t.guard, c.id) + "]";
            lines.push_back("    \"" + dot_escape(c.id + "::" + t.src) + "\" -> \"" + dot_escape(c.id + "::" + t.dst) +
                            "\" [label=\"" + dot_escape(label) + "\"];\n");
        }
        std::sort(lines.begin(), lines.end());
        for (const auto& l : lines) os << l;
        os << "  }\n";
    }
    os << "  subgraph cluster_gamma {\n    label=\"interactions\";\n    node [shape=box];\n";
    std::vector<std::string> inter;
    for (const auto& a : sys.gamma) inter.push_back(a.str());
    std::sort(inter.begin(), inter.end());
    for (std::size_t i = 0; i < inter.size(); ++i)
        os << "    a" << i << " [label=\"" << dot_escape(inter[i]) << "\"];\n";
    os << "  }\n}\n";
    return os.str();
}

std::string Lts::to_dot(std::string_view name) const {
    std::ostringstream os;
    os << "digraph \"" << dot_escape(std::string(name)) << "\" {\n  node [shape=box, fontsize=9];\n";
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        os << "  n" << i << " [label=\"" << dot_escape(nodes[i]) << "\"";
        if (terminals.count(i)) os << ", peripheries=2";
        if (deadlocks.count(i)) os << ", color=red";
        if (i == 0) os << ", style=bold";
        os << "];\n";
    }
    for (const auto& e : edges)
        os << "  n" << e.src << " -> n" << e.dst << " [label=\"" << dot_escape(e.label) << "\"];\n";
    os << "}\n";
    return os.str();
}

} // namespace chor
