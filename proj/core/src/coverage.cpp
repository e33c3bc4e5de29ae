#include "chor/coverage.hpp"

#include <array>
#include <atomic>

namespace chor {

std::string_view rule_name(Rule r) {
    switch (r) {
    case Rule::Nil: return "nil";
    case Rule::SynchSendRcv: return "synch-sendrcv";
    case Rule::AsynchSendRcv1: return "asynch-sendrcv-1";
    case Rule::AsynchSendRcv2: return "asynch-sendrcv-2";
    case Rule::MasterBranching: return "master-branching";
    case Rule::IterativeTT: return "iterative-tt";
    case Rule::IterativeFF: return "iterative-ff";
    case Rule::Sequential1: return "sequential-1";
    case Rule::Sequential2: return "sequential-2";
    case Rule::Parallel1: return "parallel-1";
    case Rule::Parallel2: return "parallel-2";
    case Rule::Parallel3: return "parallel-3";
    case Rule::Parallel4: return "parallel-4";
    case Rule::SequentialPending: return "sequential-pending";
    case Rule::SynchSend: return "synch-send";
    case Rule::AsynchSend: return "asynch-send";
    case Rule::Recv: return "recv";
    case Rule::Internal: return "internal";
    }
    return "?";
}

const std::vector<Rule>& choreography_rules() {
    static const std::vector<Rule> rules = {
        Rule::Nil,         Rule::SynchSendRcv, Rule::AsynchSendRcv1, Rule::AsynchSendRcv2, Rule::MasterBranching,
        Rule::IterativeTT, Rule::IterativeFF,  Rule::Sequential1,    Rule::Sequential2,    Rule::Parallel1,
        Rule::Parallel2,   Rule::Parallel3,    Rule::Parallel4,
    };
    return rules;
}

const std::vector<Rule>& composite_rules() {
    static const std::vector<Rule> rules = {Rule::SynchSend, Rule::AsynchSend, Rule::Recv, Rule::Internal};
    return rules;
}

namespace coverage {

namespace {

std::array<std::atomic<std::uint64_t>, kRuleCount>& counters() {
    static std::array<std::atomic<std::uint64_t>, kRuleCount> c{};
    return c;
}

} // namespace

void hit(Rule r) { counters()[static_cast<std::size_t>(r)].fetch_add(1, std::memory_order_relaxed); }

std::uint64_t count(Rule r) { return counters()[static_cast<std::size_t>(r)].load(std::memory_order_relaxed); }

std::map<Rule, std::uint64_t> snapshot() {
    std::map<Rule, std::uint64_t> out;
    for (std::size_t i = 0; i < kRuleCount; ++i) out[static_cast<Rule>(i)] = counters()[i].load();
    return out;
}

void reset() {
    for (auto& c : counters()) c.store(0);
}

} // namespace coverage

} // namespace chor
