#pragma once

// Choreography AST and the system declaration it is written against.

#include "chor/diagnostic.hpp"
#include "chor/model.hpp"

#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace chor {

using CompSet = std::set<std::string>;

struct VarDecl {
    Variable var;
    Value init;
};

struct ComponentDecl {
    std::string id;
    std::vector<VarDecl> vars;
    std::vector<Port> ports;
    SourceSpan span;

    const Port* find_port(std::string_view local) const;
    const VarDecl* find_var(std::string_view name) const;
};

struct SystemDecl {
    std::vector<ComponentDecl> components;

    const ComponentDecl* find(std::string_view id) const;
    // Declaration index, or -1.
    int order(std::string_view id) const;
    const Port* find_port(std::string_view qualified) const;
    std::optional<DataType> var_type(const VarId& v) const;

    Valuation initial_valuation() const;
    TypeEnv type_env() const;
    std::set<VarId> user_variables() const;
    // Members of s sorted by declaration order.
    std::vector<std::string> ordered(const CompSet& s) const;
};

struct GuardedSend {
    Port port;
    Expr guard;
    Update update;
    SourceSpan span;
};

struct Receive {
    Port port;
    Update update;
    SourceSpan span;
};

struct ChorNode;
using Chor = std::shared_ptr<const ChorNode>;

struct Nil {};

struct Comm {
    GuardedSend send;
    std::vector<Receive> rcvs;
    DataType dtype = DataType::Int;
    bool annotated = false;   // written with an explicit ": <type>"
};

struct Continuation {
    GuardedSend send;
    Chor body;
};

struct Branch {
    std::string master;
    std::vector<Continuation> conts;
};

struct Loop {
    GuardedSend cond;
    Chor body;
};

struct Seq {
    Chor first;
    Chor second;
};

struct Par {
    Chor left;
    Chor right;
};

struct ChorNode {
    std::variant<Nil, Comm, Branch, Loop, Seq, Par> node;
    SourceSpan span;
};

struct Program {
    SystemDecl decl;
    std::string name = "main";
    Chor main;
};

Chor make_nil(SourceSpan sp = {});
Chor make_comm(GuardedSend send, std::vector<Receive> rcvs, SourceSpan sp = {});
Chor make_branch(std::string master, std::vector<Continuation> conts, SourceSpan sp = {});
Chor make_loop(GuardedSend cond, Chor body, SourceSpan sp = {});
Chor make_seq(Chor a, Chor b, SourceSpan sp = {});
Chor make_par(Chor a, Chor b, SourceSpan sp = {});

// Structural equality ignoring source spans.
bool chor_equal(const Chor& a, const Chor& b);

CompSet participants(const Chor& ch);
CompSet start_set(const Chor& ch);
CompSet end_set(const Chor& ch);

// Every port id (declared, not copies) occurring in ch.
std::set<std::string> ports_of(const Chor& ch);

// Preorder node count.
std::size_t node_count(const Chor& ch);

} // namespace chor
