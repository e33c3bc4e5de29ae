#pragma once

// Component-based model: atomic components, interactions, composite
// semantics and structural checks.

#include "chor/ast.hpp"
#include "chor/coverage.hpp"
#include "chor/diagnostic.hpp"
#include "chor/lts.hpp"
#include "chor/model.hpp"

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace chor {

struct Transition {
    std::string src;
    std::string port;
    Expr guard;
    Update update;
    std::string dst;
};

struct AtomicComponent {
    std::string id;
    std::vector<VarDecl> vars;
    std::map<std::string, Port> ports;
    std::set<std::string> locations;
    std::vector<Transition> transitions;
    std::string initial;
    std::optional<std::string> end;

    const Port* find_port(const std::string& id) const;
    std::vector<const Transition*> outgoing(const std::string& loc) const;
};

struct Interaction {
    std::string send;
    std::vector<std::string> receivers;   // sorted

    std::string str() const;
    bool operator==(const Interaction&) const = default;
    auto operator<=>(const Interaction&) const = default;
};

struct CompositeSystem {
    std::vector<AtomicComponent> components;
    std::vector<Interaction> gamma;

    const AtomicComponent* find(const std::string& id) const;
    AtomicComponent* find(const std::string& id);
    const Port* find_port(const std::string& id) const;
    // Interactions whose sender or one of whose receivers is `port`.
    std::vector<const Interaction*> interactions_of(const std::string& port) const;

    Valuation initial_valuation() const;
    std::set<VarId> user_variables() const;
    std::size_t location_count() const;
    std::size_t transition_count() const;
};

struct SysState {
    std::vector<std::string> locations;   // per component, in system order
    Valuation valuation;
    std::map<std::string, std::deque<Value>> buffers;   // nonempty receive buffers only

    bool buffers_empty() const { return buffers.empty(); }
    std::string key() const;
    std::string str() const;
    bool operator==(const SysState&) const = default;
};

SysState initial_state(const CompositeSystem& sys);

struct SysStep {
    std::optional<Interaction> interaction;   // absent for tau steps
    std::string component;                    // stepping component for tau steps
    std::string port;                         // fired port for tau steps
    Rule rule = Rule::Internal;
    SysState next;

    std::string label() const;
};

std::vector<SysStep> sys_steps(const CompositeSystem& sys, const SysState& s);

struct SysExploreResult {
    std::vector<SysState> terminals;
    std::vector<SysState> deadlocks;
    Lts graph;
    bool truncated = false;
    std::size_t states = 0;

    std::set<Valuation> terminal_valuations() const;
};

bool is_terminal(const CompositeSystem& sys, const SysState& s);

SysExploreResult sys_explore(const CompositeSystem& sys, const SysState& s0, ExploreLimits limits = {});

Diagnostics check_structure(const CompositeSystem& sys);

// Canonical text form, stable under reordering of the in-memory containers.
std::string serialize(const CompositeSystem& sys);
std::string to_dot(const CompositeSystem& sys);

} // namespace chor
