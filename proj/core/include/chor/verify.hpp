#pragma once

// Correctness oracle, structural invariant suite, mutation operators and
// LTL property templates.

#include "chor/ast.hpp"
#include "chor/cbs.hpp"
#include "chor/lts.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chor {

enum class Verdict { Equivalent, Mismatch, Inconclusive };

std::string_view to_string(Verdict v);

struct EquivReport {
    Verdict verdict = Verdict::Inconclusive;
    std::set<Valuation> chor_finals;
    std::set<Valuation> sys_finals;   // projected onto declared variables
    std::vector<Valuation> only_chor;
    std::vector<Valuation> only_sys;
    std::vector<std::string> chor_deadlocks;
    std::vector<std::string> sys_deadlocks;
    std::size_t chor_configs = 0;
    std::size_t sys_states = 0;
    bool truncated = false;

    std::string str() const;
};

EquivReport equiv_check(const SystemDecl& decl, const Chor& ch, const CompositeSystem& sys, ExploreLimits limits = {});

// Structural checks plus the shape guarantees of synthesized systems.
// Rules: one-port-one-interaction, mixed-location, receive-guard,
// end-location, cycle-without-epsilon, and everything check_structure reports.
Diagnostics invariant_suite(const CompositeSystem& sys);

enum class Mutation { DropEpsilon, SwapBreakGuards, MergeCopies, DropInteraction, UnmarkEnd };

inline constexpr Mutation kAllMutations[] = {Mutation::DropEpsilon, Mutation::SwapBreakGuards, Mutation::MergeCopies,
                                             Mutation::DropInteraction, Mutation::UnmarkEnd};

std::string_view to_string(Mutation m);
std::optional<Mutation> parse_mutation(std::string_view s);

// nullopt when the system offers no site for the mutation.
std::optional<CompositeSystem> mutate(const CompositeSystem& sys, Mutation m);

class LtlError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct LtlSelection {
    bool termination = false;
    std::map<std::string, std::string> end_ports;   // component -> port name, overrides inference
    std::optional<std::string> livelock;            // Comp.port
    std::vector<std::string> unique;                // Comp.port
    // (guarded, trigger): guarded may not fire before trigger does.
    std::vector<std::pair<std::string, std::string>> transactions;

    bool empty() const { return !termination && !livelock && unique.empty() && transactions.empty(); }
};

// Qualified base names of the ports through which the component reaches its
// end location, ignoring epsilon hops. Empty when there are none.
std::vector<std::string> inferred_end_ports(const AtomicComponent& c);

// One `name : formula` line per property, in SPIN syntax over the currPort
// observables of the Promela model.
std::string emit_ltl(const CompositeSystem& sys, const LtlSelection& sel);

} // namespace chor
