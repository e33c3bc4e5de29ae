#include "chor/verify.hpp"

#include "chor/exec.hpp"
#include "chor/synth.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace chor {

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::Equivalent: return "equivalent";
    case Verdict::Mismatch: return "mismatch";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::string EquivReport::str() const {
    std::ostringstream os;
    os << "verdict: " << to_string(verdict) << (truncated ? " (exploration truncated)" : "") << "\n";
    os << "choreography: " << chor_configs << " configurations, " << chor_finals.size() << " final valuations, "
       << chor_deadlocks.size() << " deadlocks\n";
    os << "system: " << sys_states << " states, " << sys_finals.size() << " final valuations, " << sys_deadlocks.size()
       << " deadlocks\n";
    for (const auto& v : only_chor) os << "only in choreography: " << v.str() << "\n";
    for (const auto& v : only_sys) os << "only in system: " << v.str() << "\n";
    for (const auto& d : chor_deadlocks) os << "choreography deadlock: " << d << "\n";
    for (const auto& d : sys_deadlocks) os << "system deadlock: " << d << "\n";
    return os.str();
}

EquivReport equiv_check(const SystemDecl& decl, const Chor& ch, const CompositeSystem& sys, ExploreLimits limits) {
    EquivReport r;
    auto cr = explore(ch, decl.initial_valuation(), limits);
    auto sr = sys_explore(sys, initial_state(sys), limits);
    const auto dom = decl.user_variables();

    r.chor_finals = cr.finals;
    for (const auto& v : sr.terminal_valuations()) r.sys_finals.insert(v.without_control().restrict_to(dom));
    std::set_difference(r.chor_finals.begin(), r.chor_finals.end(), r.sys_finals.begin(), r.sys_finals.end(),
                        std::back_inserter(r.only_chor));
    std::set_difference(r.sys_finals.begin(), r.sys_finals.end(), r.chor_finals.begin(), r.chor_finals.end(),
                        std::back_inserter(r.only_sys));
    for (const auto& d : cr.deadlocks) r.chor_deadlocks.push_back(d.str());
    for (const auto& d : sr.deadlocks) r.sys_deadlocks.push_back(d.str());
    r.chor_configs = cr.configs;
    r.sys_states = sr.states;
    r.truncated = cr.truncated || sr.truncated;

    // A deadlock is a witness even in a partial exploration; differing final
    // sets are not.
    if (!r.chor_deadlocks.empty() || !r.sys_deadlocks.empty()) r.verdict = Verdict::Mismatch;
    else if (r.truncated) r.verdict = Verdict::Inconclusive;
    else if (r.only_chor.empty() && r.only_sys.empty()) r.verdict = Verdict::Equivalent;
    else r.verdict = Verdict::Mismatch;
    return r;
}

Diagnostics invariant_suite(const CompositeSystem& sys) {
    Diagnostics out = check_structure(sys);
    auto report = [&](std::string rule, std::string msg) { out.push_back(Diagnostic{{}, std::move(rule), std::move(msg)}); };

    for (const auto& c : sys.components) {
        if (!c.end) report("end-location", c.id + " has no end location");
        else if (!c.outgoing(*c.end).empty()) report("end-location", c.id + " end location " + *c.end + " has outgoing transitions");

        for (const auto& t : c.transitions) {
            const Port* p = c.find_port(t.port);
            if (p && p->ctype == PortType::Recv && !is_literal_true(t.guard))
                report("receive-guard", c.id + " receive transition on " + t.port + " is guarded by " + render(t.guard, c.id));
        }

        // Cycles must pass through an epsilon transition.
        std::map<std::string, std::vector<std::string>> succ;
        for (const auto& t : c.transitions)
            if (!is_epsilon_port(t.port)) succ[t.src].push_back(t.dst);
        std::map<std::string, int> color;
        std::function<bool(const std::string&)> dfs = [&](const std::string& l) {
            color[l] = 1;
            for (const auto& n : succ[l]) {
                if (color[n] == 1) return true;
                if (color[n] == 0 && dfs(n)) return true;
            }
            color[l] = 2;
            return false;
        };
        for (const auto& l : c.locations)
            if (color[l] == 0 && dfs(l)) {
                report("cycle-without-epsilon", c.id + " has a cycle through " + l + " with no epsilon transition");
                break;
            }
    }
    return out;
}

std::string_view to_string(Mutation m) {
    switch (m) {
    case Mutation::DropEpsilon: return "drop-epsilon";
    case Mutation::SwapBreakGuards: return "swap-break-guards";
    case Mutation::MergeCopies: return "merge-copies";
    case Mutation::DropInteraction: return "drop-interaction";
    case Mutation::UnmarkEnd: return "unmark-end";
    }
    return "?";
}

std::optional<Mutation> parse_mutation(std::string_view s) {
    for (Mutation m : kAllMutations)
        if (to_string(m) == s) return m;
    return std::nullopt;
}

namespace {

bool is_break_port(const std::string& id) { return id.find(".brk@") != std::string::npos; }

// Base of a copy or generated control port: "S.R#2" -> "S.R", "S.br@3" -> "S.br".
std::string copy_base(const std::string& id) {
    auto pos = id.find_first_of("#@");
    return pos == std::string::npos ? id : id.substr(0, pos);
}

std::optional<CompositeSystem> drop_epsilon(CompositeSystem sys) {
    // Prefer a loop back-edge: its target offers a break transition.
    for (int pass = 0; pass < 2; ++pass) {
        for (auto& c : sys.components) {
            for (auto it = c.transitions.begin(); it != c.transitions.end(); ++it) {
                if (!is_epsilon_port(it->port)) continue;
                bool back = false;
                for (const auto* o : c.outgoing(it->dst)) back = back || is_break_port(o->port);
                if (pass == 0 && !back) continue;
                c.transitions.erase(it);
                return sys;
            }
        }
    }
    return std::nullopt;
}

std::optional<CompositeSystem> swap_break_guards(CompositeSystem sys) {
    for (auto& c : sys.components) {
        for (auto& brk : c.transitions) {
            if (!is_break_port(brk.port) || is_literal_true(brk.guard)) continue;
            for (auto& other : c.transitions) {
                if (&other == &brk || other.src != brk.src || is_break_port(other.port)) continue;
                std::swap(brk.guard, other.guard);
                return sys;
            }
        }
    }
    return std::nullopt;
}

std::optional<CompositeSystem> merge_copies(CompositeSystem sys) {
    for (auto& c : sys.components) {
        for (const auto& loc : c.locations) {
            auto out = c.outgoing(loc);
            for (std::size_t i = 0; i < out.size(); ++i) {
                for (std::size_t j = i + 1; j < out.size(); ++j) {
                    const std::string keep = out[i]->port, gone = out[j]->port;
                    const Port* p = c.find_port(keep);
                    if (keep == gone || !p || p->ctype != PortType::Recv || copy_base(keep) != copy_base(gone)) continue;
                    for (auto& t : c.transitions)
                        if (t.port == gone) t.port = keep;
                    c.ports.erase(gone);
                    for (auto& a : sys.gamma) {
                        std::replace(a.receivers.begin(), a.receivers.end(), gone, keep);
                        std::sort(a.receivers.begin(), a.receivers.end());
                    }
                    return sys;
                }
            }
        }
    }
    return std::nullopt;
}

std::optional<CompositeSystem> drop_interaction(CompositeSystem sys) {
    if (sys.gamma.empty()) return std::nullopt;
    auto it = std::min_element(sys.gamma.begin(), sys.gamma.end(),
                               [](const Interaction& a, const Interaction& b) { return a.str() < b.str(); });
    sys.gamma.erase(it);
    return sys;
}

std::optional<CompositeSystem> unmark_end(CompositeSystem sys) {
    for (auto& c : sys.components)
        if (c.end) {
            c.end.reset();
            return sys;
        }
    return std::nullopt;
}

} // namespace

std::optional<CompositeSystem> mutate(const CompositeSystem& sys, Mutation m) {
    switch (m) {
    case Mutation::DropEpsilon: return drop_epsilon(sys);
    case Mutation::SwapBreakGuards: return swap_break_guards(sys);
    case Mutation::MergeCopies: return merge_copies(sys);
    case Mutation::DropInteraction: return drop_interaction(sys);
    case Mutation::UnmarkEnd: return unmark_end(sys);
    }
    return std::nullopt;
}

} // namespace chor
