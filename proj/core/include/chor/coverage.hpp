#pragma once

// Rule-tag instrumentation for both operational semantics.

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

namespace chor {

enum class Rule {
    // choreography semantics
    Nil,
    SynchSendRcv,
    AsynchSendRcv1,
    AsynchSendRcv2,
    MasterBranching,
    IterativeTT,
    IterativeFF,
    Sequential1,
    Sequential2,
    Parallel1,
    Parallel2,
    Parallel3,
    Parallel4,
    // right operand of a sequence advancing while the left one only holds
    // residual receives
    SequentialPending,
    // composite-system semantics
    SynchSend,
    AsynchSend,
    Recv,
    Internal,
};

inline constexpr std::size_t kRuleCount = 18;

std::string_view rule_name(Rule r);

// Choreography rules and composite rules; SequentialPending is
// an extension and not part of either list.
const std::vector<Rule>& choreography_rules();
const std::vector<Rule>& composite_rules();

namespace coverage {

void hit(Rule r);
std::uint64_t count(Rule r);
std::map<Rule, std::uint64_t> snapshot();
void reset();

} // namespace coverage

} // namespace chor
