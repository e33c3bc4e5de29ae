#include "chor/lang.hpp"

#include <sstream>

namespace chor {

namespace {

std::string pad(int n) { return std::string(static_cast<std::size_t>(n), ' '); }

std::string guarded(const GuardedSend& g) {
    return g.port.id + "[" + render(g.guard, g.port.owner) + ", " + render(g.update, g.port.owner) + "]";
}

// Binding strength: 0 = parallel, 1 = sequence, 2 = atom.
int level(const Chor& ch) {
    if (std::holds_alternative<Par>(ch->node)) return 0;
    if (std::holds_alternative<Seq>(ch->node)) return 1;
    return 2;
}

std::string term(const Chor& ch, int ind);

std::string operand(const Chor& ch, int min_level, int ind) {
    std::string t = term(ch, ind);
    return level(ch) < min_level ? "(" + t + ")" : t;
}

std::string term(const Chor& ch, int ind) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Nil>) {
                return "nil";
            } else if constexpr (std::is_same_v<T, Comm>) {
                std::string out = guarded(n.send) + " -> { ";
                for (std::size_t i = 0; i < n.rcvs.size(); ++i) {
                    if (i) out += ", ";
                    out += n.rcvs[i].port.id + "[" + render(n.rcvs[i].update, n.rcvs[i].port.owner) + "]";
                }
                out += " }";
                if (n.annotated) out += " : <" + std::string(to_string(n.dtype)) + ">";
                return out;
            } else if constexpr (std::is_same_v<T, Branch>) {
                std::string out = "choice " + n.master + " {";
                for (std::size_t i = 0; i < n.conts.size(); ++i) {
                    out += "\n" + pad(ind + 2) + (i ? "| " : "") + guarded(n.conts[i].send) + " =>\n" + pad(ind + 6) +
                           term(n.conts[i].body, ind + 6);
                }
                return out + "\n" + pad(ind) + "}";
            } else if constexpr (std::is_same_v<T, Loop>) {
                return "while (" + guarded(n.cond) + ") {\n" + pad(ind + 4) + term(n.body, ind + 4) + "\n" + pad(ind) +
                       "}";
            } else if constexpr (std::is_same_v<T, Seq>) {
                return operand(n.first, 2, ind) + " ;\n" + pad(ind) + operand(n.second, 1, ind);
            } else {
                return operand(n.left, 1, ind) + "\n" + pad(ind) + "|| " + term(n.right, ind + 3);
            }
        },
        ch->node);
}

} // namespace

std::string pretty(const SystemDecl& decl) {
    std::ostringstream os;
    for (const auto& c : decl.components) {
        os << "comp " << c.id << " {\n";
        for (const auto& v : c.vars)
            os << "    var " << v.var.id.name << ": " << to_string(v.var.dtype) << " = " << v.init.str() << ";\n";
        for (const auto& p : c.ports) {
            os << "    port " << p.local_name() << ": " << to_string(p.ctype) << " of " << to_string(p.dtype);
            if (p.var) os << " binds " << *p.var;
            os << ";\n";
        }
        os << "}\n\n";
    }
    return os.str();
}

std::string pretty(const Chor& ch) { return term(ch, 0); }

std::string pretty(const Program& p) {
    return pretty(p.decl) + "choreography " + p.name + " =\n    " + term(p.main, 4) + "\n";
}

} // namespace chor
