#pragma once

// Values, variables, expressions, update functions and valuations shared by
// the choreography interpreter and the component semantics.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace chor {

enum class DataType { Int, Bool, Str };

std::string_view to_string(DataType t);
std::optional<DataType> parse_datatype(std::string_view s);

// The neutral element delivered to internal-port transitions.
struct Neutral {
    auto operator<=>(const Neutral&) const = default;
};

class Value {
public:
    Value() : v_(Neutral{}) {}
    Value(std::int64_t i) : v_(i) {}
    Value(int i) : v_(static_cast<std::int64_t>(i)) {}
    Value(bool b) : v_(b) {}
    Value(std::string s) : v_(std::move(s)) {}
    Value(const char* s) : v_(std::string(s)) {}

    static Value neutral() { return Value(); }
    static Value default_for(DataType t);

    bool is_neutral() const { return std::holds_alternative<Neutral>(v_); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
    bool is_bool() const { return std::holds_alternative<bool>(v_); }
    bool is_str() const { return std::holds_alternative<std::string>(v_); }

    std::int64_t as_int() const;
    bool as_bool() const;
    const std::string& as_str() const;

    // Type of a non-neutral value.
    std::optional<DataType> type() const;
    bool has_type(DataType t) const { return type() == t; }

    // Literal rendering: 3, true, "abc", _|_ for neutral.
    std::string str() const;

    bool operator==(const Value&) const = default;
    auto operator<=>(const Value& o) const { return v_ <=> o.v_; }

private:
    std::variant<Neutral, std::int64_t, bool, std::string> v_;
};

struct VarId {
    std::string owner;
    std::string name;

    std::string qualified() const { return owner + "." + name; }
    bool operator==(const VarId&) const = default;
    auto operator<=>(const VarId&) const = default;
};

struct Variable {
    VarId id;
    DataType dtype = DataType::Int;
};

// Variables whose name starts with '$' are generated by synthesis.
bool is_control_variable(const VarId& v);

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TypeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Total map from a declared variable set to values.
class Valuation {
public:
    Valuation() = default;

    bool contains(const VarId& v) const { return map_.count(v) != 0; }
    const Value& at(const VarId& v) const;
    void set(const VarId& v, Value val) { map_[v] = std::move(val); }
    // Rebinds an existing key; throws if v is outside the domain.
    void rebind(const VarId& v, Value val);
    std::size_t size() const { return map_.size(); }
    bool empty() const { return map_.empty(); }

    auto begin() const { return map_.begin(); }
    auto end() const { return map_.end(); }

    std::set<VarId> domain() const;
    Valuation restrict_to(const std::set<VarId>& dom) const;
    Valuation without_control() const;

    std::string str() const;

    bool operator==(const Valuation&) const = default;
    auto operator<=>(const Valuation& o) const { return map_ <=> o.map_; }

private:
    std::map<VarId, Value> map_;
};

enum class UnOp { Not, Neg };
enum class BinOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

std::string_view to_string(BinOp op);

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprLit {
    Value value;
};
struct ExprVar {
    VarId var;
};
struct ExprUnary {
    UnOp op;
    Expr arg;
};
struct ExprBinary {
    BinOp op;
    Expr lhs;
    Expr rhs;
};

struct ExprNode {
    std::variant<ExprLit, ExprVar, ExprUnary, ExprBinary> node;
};

Expr lit(Value v);
Expr var(VarId v);
Expr unary(UnOp op, Expr a);
Expr binary(BinOp op, Expr l, Expr r);
Expr expr_true();
Expr negate(Expr e);

bool is_literal_true(const Expr& e);
bool expr_equal(const Expr& a, const Expr& b);
std::set<VarId> vars_of(const Expr& e);

// Renders with full parenthesization of nested binaries; variables are
// printed unqualified when their owner equals `scope`.
std::string render(const Expr& e, std::string_view scope = {});

Value eval(const Expr& e, const Valuation& v);

// Type of e given a lookup for variable types; throws TypeError.
using TypeEnv = std::map<VarId, DataType>;
DataType typecheck(const Expr& e, const TypeEnv& env);

struct Assignment {
    VarId target;
    Expr rhs;
};

// Ordered assignment list; empty means skip.
struct Update {
    std::vector<Assignment> assignments;

    bool is_skip() const { return assignments.empty(); }
    std::set<VarId> reads() const;
    std::set<VarId> writes() const;
};

bool update_equal(const Update& a, const Update& b);
std::string render(const Update& f, std::string_view scope = {});

Valuation apply_update(const Update& f, const Valuation& v);

// Bindings of hi win on lo's domain; keys of hi outside lo's domain are dropped.
Valuation override_with(const Valuation& hi, const Valuation& lo);

enum class PortType { SyncSend, AsyncSend, Recv, Internal };

std::string_view to_string(PortType t);
std::optional<PortType> parse_porttype(std::string_view s);
inline bool is_send(PortType t) { return t == PortType::SyncSend || t == PortType::AsyncSend; }

struct Port {
    std::string id;                 // system-wide unique, "Owner.name" or "Owner.name#k"
    std::string owner;
    std::optional<std::string> var; // bound variable name, absent for internal ports
    DataType dtype = DataType::Bool;
    PortType ctype = PortType::Internal;

    std::optional<VarId> var_id() const;
    // Port id without copy suffix: "P1.s#2" -> "P1.s".
    std::string base() const;
    // Name part without owner: "P1.s#2" -> "s#2".
    std::string local_name() const;

    bool operator==(const Port&) const = default;
};

std::string port_base(std::string_view id);

Valuation transfer(const Valuation& s, const Port& snd, const std::vector<Port>& rcvs);

} // namespace chor
