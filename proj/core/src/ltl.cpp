#include "chor/promela.hpp"
#include "chor/synth.hpp"
#include "chor/verify.hpp"

#include <set>
#include <sstream>

namespace chor {

namespace {

std::string joined(const std::vector<std::string>& xs, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? std::string(sep) : std::string()) + xs[i];
    return out;
}

std::string parenthesized_join(const std::vector<std::string>& xs, std::string_view sep) {
    if (xs.size() == 1) return xs.front();
    std::vector<std::string> ps;
    for (const auto& x : xs) ps.push_back("(" + x + ")");
    return joined(ps, sep);
}

// "Comp.port" naming a declared port or one of its copies.
std::string resolve(const CompositeSystem& sys, const std::string& name) {
    auto dot = name.find('.');
    if (dot == std::string::npos) throw LtlError("port '" + name + "' must be written as Component.port");
    const AtomicComponent* c = sys.find(name.substr(0, dot));
    if (!c) throw LtlError("unknown component in '" + name + "'");
    for (const auto& [pid, p] : c->ports)
        if (port_base(pid) == name) return name;
    throw LtlError("component " + c->id + " has no port '" + name.substr(dot + 1) + "'");
}

std::string atom(const std::string& port) {
    return currport_var(port.substr(0, port.find('.'))) + " == " + port_symbol(port);
}

} // namespace

std::vector<std::string> inferred_end_ports(const AtomicComponent& c) {
    if (!c.end) return {};
    std::set<std::string> reach{*c.end};
    std::vector<std::string> todo{*c.end};
    std::set<std::string> ports;
    while (!todo.empty()) {
        std::string l = todo.back();
        todo.pop_back();
        for (const auto& t : c.transitions) {
            if (t.dst != l) continue;
            if (is_epsilon_port(t.port)) {
                if (reach.insert(t.src).second) todo.push_back(t.src);
            } else {
                ports.insert(port_base(t.port));
            }
        }
    }
    return {ports.begin(), ports.end()};
}

std::string emit_ltl(const CompositeSystem& sys, const LtlSelection& sel) {
    std::ostringstream os;

    if (sel.termination) {
        std::vector<std::string> any, all;
        for (const auto& c : sys.components) {
            std::vector<std::string> ends;
            auto ov = sel.end_ports.find(c.id);
            if (ov != sel.end_ports.end()) ends.push_back(resolve(sys, c.id + "." + ov->second));
            else ends = inferred_end_ports(c);
            if (ends.empty()) continue;
            std::vector<std::string> atoms;
            for (const auto& e : ends) atoms.push_back(atom(e));
            std::string a = atoms.size() == 1 ? atoms.front() : "(" + parenthesized_join(atoms, " || ") + ")";
            any.push_back(a);
            all.push_back(a);
        }
        for (const auto& [comp, port] : sel.end_ports)
            if (!sys.find(comp)) throw LtlError("unknown component '" + comp + "' in end-port override");
        if (!any.empty())
            os << "termination : [] ((" << parenthesized_join(any, " || ") << ") -> <> ("
               << parenthesized_join(all, " && ") << "))\n";
    }

    if (sel.livelock) os << "livelock : ! ([] <> (" << atom(resolve(sys, *sel.livelock)) << "))\n";

    if (!sel.unique.empty()) {
        std::vector<std::string> conj;
        for (const auto& u : sel.unique) {
            std::string a = atom(resolve(sys, u));
            conj.push_back("[] ((" + a + ") -> X [] ! (" + a + "))");
        }
        os << "uniqueness : " << parenthesized_join(conj, " && ") << "\n";
    }

    if (!sel.transactions.empty()) {
        std::vector<std::string> conj;
        for (const auto& [guarded, trigger] : sel.transactions)
            conj.push_back("[] (! (" + atom(resolve(sys, guarded)) + ") U (" + atom(resolve(sys, trigger)) + "))");
        os << "transaction : " << parenthesized_join(conj, " && ") << "\n";
    }
    return os.str();
}

} // namespace chor
