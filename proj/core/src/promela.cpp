#include "chor/promela.hpp"

#include "chor/synth.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>
#include <sstream>

namespace chor {

std::string promela_ident(std::string_view s) {
    std::string out;
    for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front()))) out.insert(out.begin(), '_');
    return out;
}

std::string currport_var(std::string_view component) { return "currPort_" + promela_ident(component); }

std::string port_symbol(std::string_view port_id) { return "P_" + promela_ident(port_base(port_id)); }

std::string location_symbol(std::string_view component, std::string_view location) {
    return promela_ident(std::string(component) + "_" + std::string(location));
}

std::string channel_name(std::string_view recv_port_id) { return "ch_" + promela_ident(recv_port_id); }

std::string ack_channel_name(std::string_view recv_port_id) { return "ack_" + promela_ident(recv_port_id); }

std::map<std::string, int> port_symbol_codes(const CompositeSystem& sys) {
    std::set<std::string> syms;
    for (const auto& c : sys.components)
        for (const auto& [pid, p] : c.ports)
            if (!is_epsilon_port(pid)) syms.insert(port_symbol(pid));
    std::map<std::string, int> out;
    int k = 0;
    for (const auto& s : syms) out[s] = ++k;
    return out;
}

namespace {

const char* kMacros = "#define recv(ch) ch?value\n"
                      "#define recvAck(ch) ch?(_)\n"
                      "#define send(ch) ch!value\n"
                      "#define sendAck(ch) ch!ack\n"
                      "#define synchRecv(ch) ch?value; sendAck(ch)\n";

std::string type_name(DataType t) { return t == DataType::Bool ? "bool" : "int"; }

std::string var_name(const VarId& v) {
    if (is_control_variable(v)) return "c_" + promela_ident(v.name.substr(std::string("$ctl_").size()));
    return "v_" + promela_ident(v.name);
}

class Emitter {
public:
    Emitter(const CompositeSystem& sys, PromelaOptions opts) : sys_(sys), opts_(opts) {
        for (const auto& c : sys.components) {
            for (const auto& v : c.vars) {
                if (v.var.dtype == DataType::Str) note_string_type(c.id + "." + v.var.id.name);
                collect(v.init);
            }
            for (const auto& [pid, p] : c.ports)
                if (p.dtype == DataType::Str) note_string_type(pid);
            for (const auto& t : c.transitions) {
                collect(t.guard);
                for (const auto& a : t.update.assignments) collect(a.rhs);
            }
        }
        int k = 0;
        for (const auto& s : strings_) codes_[s] = ++k;
        for (const auto& a : sys.gamma) {
            for (const auto& r : a.receivers) sender_of_[r] = &a;
        }
    }

    std::string channels() const {
        std::ostringstream os;
        for (const auto& a : sorted_gamma()) {
            const Port* s = sys_.find_port(a.send);
            if (!s) continue;
            bool sync = s->ctype == PortType::SyncSend;
            for (const auto& r : a.receivers) {
                os << "chan " << channel_name(r) << " = [" << (sync ? std::string("0") : std::string("MAX_LEN"))
                   << "] of { " << type_name(s->dtype) << " };\n";
                if (sync && !opts_.paper_ack_encoding) os << "chan " << ack_channel_name(r) << " = [0] of { bit };\n";
            }
        }
        return os.str();
    }

    std::string process(const AtomicComponent& c) const {
        std::ostringstream os;
        auto order = location_order(c);
        os << "proctype " << promela_ident(c.id) << "() {\n";
        os << "  int currentLocation = " << location_symbol(c.id, c.initial) << ";\n";
        os << "  int value;\n";
        os << "  int ack = 1;\n";
        std::vector<const VarDecl*> vars;
        for (const auto& v : c.vars) vars.push_back(&v);
        std::sort(vars.begin(), vars.end(), [](auto* a, auto* b) { return var_name(a->var.id) < var_name(b->var.id); });
        for (const auto* v : vars)
            os << "  " << type_name(v->var.dtype) << " " << var_name(v->var.id) << " = " << literal(v->init) << ";\n";
        os << "  do\n";
        os << "  :: if\n";
        for (const auto& loc : order) {
            auto out = c.outgoing(loc);
            const std::string cond = "(currentLocation == " + location_symbol(c.id, loc) + ")";
            if (out.empty()) {
                // a location without successors other than the end one blocks
                os << "     :: " << cond << " -> " << (c.end && *c.end == loc ? "break" : "false") << "\n";
                continue;
            }
            if (out.size() == 1) {
                auto alt = alternative(c, *out.front(), true);
                os << "     :: " << cond;
                if (!alt.guard.empty()) os << " && " << alt.guard;
                os << " -> " << join(alt.body) << "\n";
                continue;
            }
            os << "     :: " << cond << " ->\n";
            os << "        if\n";
            for (const auto* t : out) {
                auto alt = alternative(c, *t, false);
                std::vector<std::string> body = alt.body;
                std::string head = alt.guard.empty() ? "true" : alt.guard;
                if (alt.head_is_statement) {
                    head = body.front();
                    body.erase(body.begin());
                }
                os << "        :: " << head << " -> " << join(body) << "\n";
            }
            os << "        fi\n";
        }
        os << "     fi\n";
        os << "  od\n";
        os << "}\n";
        return os.str();
    }

    std::string model() const {
        std::ostringstream os;
        os << "/* generated by chorc */\n\n";
        os << "#define MAX_LEN " << opts_.max_len << "\n\n";
        os << kMacros << "\n";
        if (!codes_.empty()) {
            os << "/* string codes\n";
            for (const auto& [s, k] : codes_) os << "   " << k << " = " << Value(s).str() << "\n";
            os << "*/\n\n";
        }
        for (const auto& [sym, k] : port_symbol_codes(sys_)) os << "#define " << sym << " " << k << "\n";
        os << "\n";
        for (const auto& c : sys_.components) {
            int k = 0;
            for (const auto& loc : location_order(c)) os << "#define " << location_symbol(c.id, loc) << " " << k++ << "\n";
        }
        os << "\n" << channels() << "\n";
        for (const auto& c : sys_.components) os << "int " << currport_var(c.id) << " = 0;\n";
        os << "\n";
        for (const auto& c : sys_.components) os << process(c) << "\n";
        os << "init {\n  atomic {\n";
        for (const auto& c : sys_.components) os << "    run " << promela_ident(c.id) << "();\n";
        os << "  }\n}\n";
        if (!opts_.inline_ltl.empty()) os << "\n" << ltl_blocks(opts_.inline_ltl);
        return os.str();
    }

private:
    struct Alt {
        std::string guard;               // empty when always enabled
        std::vector<std::string> body;   // statements
        bool head_is_statement = false;  // first body statement blocks (a channel read)
    };

    const CompositeSystem& sys_;
    PromelaOptions opts_;
    std::set<std::string> strings_;
    std::map<std::string, int> codes_;
    std::map<std::string, const Interaction*> sender_of_;

    void note_string_type(const std::string& what) {
        if (opts_.strict) throw PromelaError("string data on " + what + " is not supported in strict mode");
    }

    void collect(const Value& v) {
        if (v.is_str()) strings_.insert(v.as_str());
    }

    void collect(const Expr& e) {
        if (!e) return;
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, ExprLit>) collect(n.value);
                else if constexpr (std::is_same_v<T, ExprUnary>) collect(n.arg);
                else if constexpr (std::is_same_v<T, ExprBinary>) {
                    collect(n.lhs);
                    collect(n.rhs);
                }
            },
            e->node);
    }

    std::vector<Interaction> sorted_gamma() const {
        std::vector<Interaction> g = sys_.gamma;
        std::sort(g.begin(), g.end());
        return g;
    }

    std::string literal(const Value& v) const {
        if (v.is_int()) return std::to_string(v.as_int());
        if (v.is_bool()) return v.as_bool() ? "true" : "false";
        if (v.is_str()) return std::to_string(codes_.at(v.as_str()));
        return "0";
    }

    std::string expr(const Expr& e) const {
        if (!e) return "true";
        return std::visit(
            [&](const auto& n) -> std::string {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, ExprLit>) return literal(n.value);
                else if constexpr (std::is_same_v<T, ExprVar>) return var_name(n.var);
                else if constexpr (std::is_same_v<T, ExprUnary>)
                    return std::string(n.op == UnOp::Not ? "!" : "-") + "(" + expr(n.arg) + ")";
                else return "(" + expr(n.lhs) + " " + std::string(to_string(n.op)) + " " + expr(n.rhs) + ")";
            },
            e->node);
    }

    std::vector<std::string> updates(const Update& f) const {
        std::vector<std::string> out;
        for (const auto& a : f.assignments) out.push_back(var_name(a.target) + " = " + expr(a.rhs));
        return out;
    }

    static std::string join(const std::vector<std::string>& xs) {
        std::string out;
        for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "; " : "") + xs[i];
        return out.empty() ? "skip" : out;
    }

    Alt alternative(const AtomicComponent& c, const Transition& t, bool single) const {
        Alt alt;
        const Port* p = c.find_port(t.port);
        if (!is_literal_true(t.guard)) alt.guard = expr(t.guard);
        auto finish = [&](std::vector<std::string>& body) {
            auto up = updates(t.update);
            body.insert(body.end(), up.begin(), up.end());
            if (!is_epsilon_port(t.port)) body.push_back(currport_var(c.id) + " = " + port_symbol(t.port));
            body.push_back("currentLocation = " + location_symbol(c.id, t.dst));
        };
        if (!p || p->ctype == PortType::Internal) {
            finish(alt.body);
            return alt;
        }
        if (is_send(p->ctype)) {
            if (auto x = p->var_id()) alt.body.push_back("value = " + var_name(*x));
            bool sync = p->ctype == PortType::SyncSend;
            for (const auto& a : sorted_gamma()) {
                if (a.send != p->id) continue;
                for (const auto& r : a.receivers) alt.body.push_back("send(" + channel_name(r) + ")");
                if (sync)
                    for (const auto& r : a.receivers)
                        alt.body.push_back("recvAck(" +
                                           (opts_.paper_ack_encoding ? channel_name(r) : ack_channel_name(r)) + ")");
            }
            finish(alt.body);
            return alt;
        }
        // receive
        auto it = sender_of_.find(p->id);
        const Port* s = it == sender_of_.end() ? nullptr : sys_.find_port(it->second->send);
        bool sync = s && s->ctype == PortType::SyncSend;
        if (sync && opts_.paper_ack_encoding && single) {
            alt.body.push_back("synchRecv(" + channel_name(p->id) + ")");
        } else {
            alt.body.push_back("recv(" + channel_name(p->id) + ")");
            if (sync)
                alt.body.push_back("sendAck(" +
                                   (opts_.paper_ack_encoding ? channel_name(p->id) : ack_channel_name(p->id)) + ")");
        }
        alt.head_is_statement = true;
        if (auto x = p->var_id()) alt.body.push_back(var_name(*x) + " = value");
        finish(alt.body);
        return alt;
    }

    // Initial location first, then breadth-first along transitions.
    static std::vector<std::string> location_order(const AtomicComponent& c) {
        std::vector<std::string> out;
        std::set<std::string> seen;
        std::deque<std::string> q;
        if (c.locations.count(c.initial)) {
            q.push_back(c.initial);
            seen.insert(c.initial);
        }
        while (!q.empty()) {
            std::string l = q.front();
            q.pop_front();
            out.push_back(l);
            for (const auto* t : c.outgoing(l))
                if (seen.insert(t->dst).second) q.push_back(t->dst);
        }
        for (const auto& l : c.locations)
            if (seen.insert(l).second) out.push_back(l);
        return out;
    }
};

} // namespace

std::string ltl_blocks(std::string_view ltl_file) {
    std::ostringstream os;
    std::istringstream in{std::string(ltl_file)};
    std::string line;
    while (std::getline(in, line)) {
        auto colon = line.find(" : ");
        if (colon == std::string::npos) continue;
        os << "ltl " << promela_ident(line.substr(0, colon)) << " { " << line.substr(colon + 3) << " }\n";
    }
    return os.str();
}

std::string emit_channels(const CompositeSystem& sys, std::size_t max_len) {
    PromelaOptions o;
    o.max_len = max_len;
    return Emitter(sys, o).channels();
}

std::string emit_process(const CompositeSystem& sys, const std::string& component, const PromelaOptions& opts) {
    const AtomicComponent* c = sys.find(component);
    if (!c) throw PromelaError("unknown component " + component);
    return Emitter(sys, opts).process(*c);
}

std::string emit_model(const CompositeSystem& sys, const PromelaOptions& opts) { return Emitter(sys, opts).model(); }

} // namespace chor
