#include "chor/model.hpp"

#include <sstream>

namespace chor {

std::string_view to_string(DataType t) {
    switch (t) {
    case DataType::Int: return "int";
    case DataType::Bool: return "bool";
    case DataType::Str: return "str";
    }
    return "?";
}

std::optional<DataType> parse_datatype(std::string_view s) {
    if (s == "int") return DataType::Int;
    if (s == "bool") return DataType::Bool;
    if (s == "str") return DataType::Str;
    return std::nullopt;
}

Value Value::default_for(DataType t) {
    switch (t) {
    case DataType::Int: return Value(std::int64_t{0});
    case DataType::Bool: return Value(false);
    case DataType::Str: return Value(std::string{});
    }
    return Value();
}

std::int64_t Value::as_int() const {
    if (auto p = std::get_if<std::int64_t>(&v_)) return *p;
    throw TypeError("expected int value, got " + str());
}

bool Value::as_bool() const {
    if (auto p = std::get_if<bool>(&v_)) return *p;
    throw TypeError("expected bool value, got " + str());
}

const std::string& Value::as_str() const {
    if (auto p = std::get_if<std::string>(&v_)) return *p;
    throw TypeError("expected str value, got " + str());
}

std::optional<DataType> Value::type() const {
    if (is_int()) return DataType::Int;
    if (is_bool()) return DataType::Bool;
    if (is_str()) return DataType::Str;
    return std::nullopt;
}

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    out += '"';
    return out;
}

} // namespace

std::string Value::str() const {
    if (is_neutral()) return "_|_";
    if (is_int()) return std::to_string(as_int());
    if (is_bool()) return as_bool() ? "true" : "false";
    return quote(as_str());
}

bool is_control_variable(const VarId& v) {
    return !v.name.empty() && v.name.front() == '$';
}

// ===========================================================================
// Valuation
// ===========================================================================

const Value& Valuation::at(const VarId& v) const {
    auto it = map_.find(v);
    if (it == map_.end()) throw EvalError("unbound variable " + v.qualified());
    return it->second;
}

void Valuation::rebind(const VarId& v, Value val) {
    auto it = map_.find(v);
    if (it == map_.end()) throw EvalError("assignment to undeclared variable " + v.qualified());
    it->second = std::move(val);
}

std::set<VarId> Valuation::domain() const {
    std::set<VarId> out;
    for (const auto& [k, _] : map_) out.insert(k);
    return out;
}

Valuation Valuation::restrict_to(const std::set<VarId>& dom) const {
    Valuation out;
    for (const auto& [k, val] : map_)
        if (dom.count(k)) out.map_.emplace(k, val);
    return out;
}

Valuation Valuation::without_control() const {
    Valuation out;
    for (const auto& [k, val] : map_)
        if (!is_control_variable(k)) out.map_.emplace(k, val);
    return out;
}

std::string Valuation::str() const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& [k, val] : map_) {
        if (!first) os << ", ";
        first = false;
        os << k.qualified() << "=" << val.str();
    }
    os << '}';
    return os.str();
}

// ===========================================================================
// Expressions
// ===========================================================================

std::string_view to_string(BinOp op) {
    switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    }
    return "?";
}

Expr lit(Value v) { return std::make_shared<ExprNode>(ExprNode{ExprLit{std::move(v)}}); }
Expr var(VarId v) { return std::make_shared<ExprNode>(ExprNode{ExprVar{std::move(v)}}); }
Expr unary(UnOp op, Expr a) { return std::make_shared<ExprNode>(ExprNode{ExprUnary{op, std::move(a)}}); }
Expr binary(BinOp op, Expr l, Expr r) {
    return std::make_shared<ExprNode>(ExprNode{ExprBinary{op, std::move(l), std::move(r)}});
}
Expr expr_true() { return lit(Value(true)); }
Expr negate(Expr e) { return unary(UnOp::Not, std::move(e)); }

bool is_literal_true(const Expr& e) {
    if (!e) return true;
    auto l = std::get_if<ExprLit>(&e->node);
    return l && l->value == Value(true);
}

bool expr_equal(const Expr& a, const Expr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->node.index() != b->node.index()) return false;
    if (auto x = std::get_if<ExprLit>(&a->node)) return x->value == std::get<ExprLit>(b->node).value;
    if (auto x = std::get_if<ExprVar>(&a->node)) return x->var == std::get<ExprVar>(b->node).var;
    if (auto x = std::get_if<ExprUnary>(&a->node)) {
        const auto& y = std::get<ExprUnary>(b->node);
        return x->op == y.op && expr_equal(x->arg, y.arg);
    }
    const auto& x = std::get<ExprBinary>(a->node);
    const auto& y = std::get<ExprBinary>(b->node);
    return x.op == y.op && expr_equal(x.lhs, y.lhs) && expr_equal(x.rhs, y.rhs);
}

namespace {

void collect_vars(const Expr& e, std::set<VarId>& out) {
    if (!e) return;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ExprVar>) out.insert(n.var);
            else if constexpr (std::is_same_v<T, ExprUnary>) collect_vars(n.arg, out);
            else if constexpr (std::is_same_v<T, ExprBinary>) {
                collect_vars(n.lhs, out);
                collect_vars(n.rhs, out);
            }
        },
        e->node);
}

std::string render_var(const VarId& v, std::string_view scope) {
    return v.owner == scope ? v.name : v.qualified();
}

} // namespace

std::set<VarId> vars_of(const Expr& e) {
    std::set<VarId> out;
    collect_vars(e, out);
    return out;
}

std::string render(const Expr& e, std::string_view scope) {
    if (!e) return "true";
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ExprLit>) return n.value.str();
            else if constexpr (std::is_same_v<T, ExprVar>) return render_var(n.var, scope);
            else if constexpr (std::is_same_v<T, ExprUnary>) {
                std::string a = render(n.arg, scope);
                // "-3" lexes as a literal, so negation of a literal keeps parentheses
                auto l = std::get_if<ExprLit>(&n.arg->node);
                bool atomic = !std::holds_alternative<ExprBinary>(n.arg->node) &&
                              !(n.op == UnOp::Neg && l && l->value.is_int());
                std::string inner = atomic ? a : "(" + a + ")";
                return (n.op == UnOp::Not ? "!" : "-") + inner;
            } else {
                auto side = [&](const Expr& s) {
                    std::string r = render(s, scope);
                    return std::holds_alternative<ExprBinary>(s->node) ? "(" + r + ")" : r;
                };
                return side(n.lhs) + " " + std::string(to_string(n.op)) + " " + side(n.rhs);
            }
        },
        e->node);
}

Value eval(const Expr& e, const Valuation& v) {
    if (!e) return Value(true);
    return std::visit(
        [&](const auto& n) -> Value {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ExprLit>) return n.value;
            else if constexpr (std::is_same_v<T, ExprVar>) return v.at(n.var);
            else if constexpr (std::is_same_v<T, ExprUnary>) {
                Value a = eval(n.arg, v);
                if (n.op == UnOp::Not) return Value(!a.as_bool());
                return Value(-a.as_int());
            } else {
                if (n.op == BinOp::And) {
                    if (!eval(n.lhs, v).as_bool()) return Value(false);
                    return Value(eval(n.rhs, v).as_bool());
                }
                if (n.op == BinOp::Or) {
                    if (eval(n.lhs, v).as_bool()) return Value(true);
                    return Value(eval(n.rhs, v).as_bool());
                }
                Value a = eval(n.lhs, v);
                Value b = eval(n.rhs, v);
                switch (n.op) {
                case BinOp::Eq: return Value(a == b);
                case BinOp::Ne: return Value(a != b);
                case BinOp::Lt: return Value(a.as_int() < b.as_int());
                case BinOp::Le: return Value(a.as_int() <= b.as_int());
                case BinOp::Gt: return Value(a.as_int() > b.as_int());
                case BinOp::Ge: return Value(a.as_int() >= b.as_int());
                case BinOp::Add: return Value(a.as_int() + b.as_int());
                case BinOp::Sub: return Value(a.as_int() - b.as_int());
                case BinOp::Mul: return Value(a.as_int() * b.as_int());
                case BinOp::Div:
                    if (b.as_int() == 0) throw EvalError("division by zero");
                    return Value(a.as_int() / b.as_int());
                case BinOp::Mod:
                    if (b.as_int() == 0) throw EvalError("modulo by zero");
                    return Value(a.as_int() % b.as_int());
                default: break;
                }
                throw EvalError("bad operator");
            }
        },
        e->node);
}

DataType typecheck(const Expr& e, const TypeEnv& env) {
    if (!e) return DataType::Bool;
    return std::visit(
        [&](const auto& n) -> DataType {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ExprLit>) {
                auto t = n.value.type();
                if (!t) throw TypeError("neutral literal in expression");
                return *t;
            } else if constexpr (std::is_same_v<T, ExprVar>) {
                auto it = env.find(n.var);
                if (it == env.end()) throw TypeError("unknown variable " + n.var.qualified());
                return it->second;
            } else if constexpr (std::is_same_v<T, ExprUnary>) {
                DataType a = typecheck(n.arg, env);
                DataType want = n.op == UnOp::Not ? DataType::Bool : DataType::Int;
                if (a != want)
                    throw TypeError(std::string(n.op == UnOp::Not ? "'!'" : "unary '-'") + " expects " +
                                    std::string(to_string(want)) + ", got " + std::string(to_string(a)));
                return want;
            } else {
                DataType a = typecheck(n.lhs, env);
                DataType b = typecheck(n.rhs, env);
                std::string op(to_string(n.op));
                switch (n.op) {
                case BinOp::Eq:
                case BinOp::Ne:
                    if (a != b)
                        throw TypeError("'" + op + "' compares " + std::string(to_string(a)) + " with " +
                                        std::string(to_string(b)));
                    return DataType::Bool;
                case BinOp::And:
                case BinOp::Or:
                    if (a != DataType::Bool || b != DataType::Bool) throw TypeError("'" + op + "' expects bool operands");
                    return DataType::Bool;
                case BinOp::Lt:
                case BinOp::Le:
                case BinOp::Gt:
                case BinOp::Ge:
                    if (a != DataType::Int || b != DataType::Int) throw TypeError("'" + op + "' expects int operands");
                    return DataType::Bool;
                default:
                    if (a != DataType::Int || b != DataType::Int) throw TypeError("'" + op + "' expects int operands");
                    return DataType::Int;
                }
            }
        },
        e->node);
}

// ===========================================================================
// Updates
// ===========================================================================

std::set<VarId> Update::reads() const {
    std::set<VarId> out;
    for (const auto& a : assignments) collect_vars(a.rhs, out);
    return out;
}

std::set<VarId> Update::writes() const {
    std::set<VarId> out;
    for (const auto& a : assignments) out.insert(a.target);
    return out;
}

bool update_equal(const Update& a, const Update& b) {
    if (a.assignments.size() != b.assignments.size()) return false;
    for (std::size_t i = 0; i < a.assignments.size(); ++i) {
        if (a.assignments[i].target != b.assignments[i].target) return false;
        if (!expr_equal(a.assignments[i].rhs, b.assignments[i].rhs)) return false;
    }
    return true;
}

std::string render(const Update& f, std::string_view scope) {
    if (f.is_skip()) return "skip";
    std::string out;
    for (std::size_t i = 0; i < f.assignments.size(); ++i) {
        if (i) out += "; ";
        out += render_var(f.assignments[i].target, scope) + " := " + render(f.assignments[i].rhs, scope);
    }
    return out;
}

Valuation apply_update(const Update& f, const Valuation& v) {
    Valuation out = v;
    for (const auto& a : f.assignments) {
        Value val = eval(a.rhs, out);
        const Value& old = out.at(a.target);
        if (!old.is_neutral() && val.type() != old.type())
            throw TypeError("assignment changes type of " + a.target.qualified());
        out.rebind(a.target, std::move(val));
    }
    return out;
}

Valuation override_with(const Valuation& hi, const Valuation& lo) {
    Valuation out = lo;
    for (const auto& [k, val] : hi)
        if (lo.contains(k)) out.rebind(k, val);
    return out;
}

// ===========================================================================
// Ports
// ===========================================================================

std::string_view to_string(PortType t) {
    switch (t) {
    case PortType::SyncSend: return "ss";
    case PortType::AsyncSend: return "as";
    case PortType::Recv: return "r";
    case PortType::Internal: return "in";
    }
    return "?";
}

std::optional<PortType> parse_porttype(std::string_view s) {
    if (s == "ss") return PortType::SyncSend;
    if (s == "as") return PortType::AsyncSend;
    if (s == "r") return PortType::Recv;
    if (s == "in") return PortType::Internal;
    return std::nullopt;
}

std::optional<VarId> Port::var_id() const {
    if (!var) return std::nullopt;
    return VarId{owner, *var};
}

std::string port_base(std::string_view id) {
    auto pos = id.find('#');
    return std::string(pos == std::string_view::npos ? id : id.substr(0, pos));
}

std::string Port::base() const { return port_base(id); }

std::string Port::local_name() const {
    auto pos = id.find('.');
    return pos == std::string::npos ? id : id.substr(pos + 1);
}

Valuation transfer(const Valuation& s, const Port& snd, const std::vector<Port>& rcvs) {
    if (rcvs.empty()) return s;
    if (!is_send(snd.ctype)) throw TypeError("transfer from non-send port " + snd.id);
    auto sv = snd.var_id();
    if (!sv) throw TypeError("send port " + snd.id + " has no bound variable");
    const Value d = s.at(*sv);
    if (d.is_neutral()) throw EvalError("neutral value transferred from " + snd.id);
    Valuation out = s;
    for (const auto& r : rcvs) {
        if (r.ctype != PortType::Recv) throw TypeError("transfer to non-receive port " + r.id);
        if (r.dtype != snd.dtype) throw TypeError("dtype mismatch between " + snd.id + " and " + r.id);
        auto rv = r.var_id();
        if (!rv) throw TypeError("receive port " + r.id + " has no bound variable");
        out.rebind(*rv, d);
    }
    return out;
}

} // namespace chor
