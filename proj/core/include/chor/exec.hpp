#pragma once

// Reference interpreter for the choreography semantics.

#include "chor/ast.hpp"
#include "chor/coverage.hpp"
#include "chor/lts.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace chor {

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

struct TAst {
    Chor ch;
};
// Receives left behind by an asynchronous send; indexes into the Comm node.
struct TResidual {
    Chor comm;
    std::vector<std::size_t> pending;
};
struct TSeq {
    Term first;
    Term second;
};
struct TPar {
    Term left;
    Term right;
};

struct TermNode {
    std::variant<TAst, TResidual, TSeq, TPar> node;
};

Term term_of(const Chor& ch);
// Readable single-line rendering.
std::string term_str(const Term& t);

class ChorConfig {
public:
    static ChorConfig running(Term t, Valuation s) { return ChorConfig(std::move(t), std::move(s)); }
    static ChorConfig final_state(Valuation s) { return ChorConfig(nullptr, std::move(s)); }

    bool is_final() const { return term_ == nullptr; }
    const Term& term() const { return term_; }
    const Valuation& sigma() const { return sigma_; }

    // Memoization key; structural on terms except that source AST nodes are
    // compared by identity.
    std::string key() const;
    std::string str() const;

private:
    ChorConfig(Term t, Valuation s) : term_(std::move(t)), sigma_(std::move(s)) {}
    Term term_;
    Valuation sigma_;
};

// Empty port set is tau.
struct ChorLabel {
    std::set<std::string> ports;

    bool is_tau() const { return ports.empty(); }
    std::string str() const;
    bool operator==(const ChorLabel&) const = default;
    auto operator<=>(const ChorLabel&) const = default;
};

struct ChorStep {
    ChorLabel label;
    ChorConfig next;
    std::vector<Rule> rules;   // derivation, innermost rule first
    CompSet footprint;         // components whose state the step reads or writes
};

// Successors of a running configuration; empty for final ones.
std::vector<ChorStep> chor_steps(const ChorConfig& c);

struct ChorExploreResult {
    std::set<Valuation> finals;
    std::vector<ChorConfig> deadlocks;
    Lts graph;
    bool truncated = false;
    std::size_t configs = 0;
};

ChorExploreResult explore(const Chor& ch, const Valuation& sigma0, ExploreLimits limits = {});

struct ChorTrace {
    std::vector<ChorLabel> labels;
    std::optional<ChorConfig> terminal;
    bool truncated = false;   // max_steps exhausted
    bool deadlock = false;
};

ChorTrace random_trace(const Chor& ch, const Valuation& sigma0, std::uint64_t seed, std::size_t max_steps);

} // namespace chor
