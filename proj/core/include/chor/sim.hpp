#pragma once

// Concurrent execution of a composite system: one unit per component running
// the generated-component loop over bounded FIFO queues.

#include "chor/cbs.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace chor {

enum class Outcome { Completed, Deadlock, StepLimit };

std::string_view to_string(Outcome o);

struct TraceEvent {
    std::size_t step = 0;
    std::string component;
    std::string port;
    Value value;   // neutral for internal transitions
};

struct RunOptions {
    std::uint64_t seed = 0;
    std::size_t max_steps = 100000;
    std::size_t queue_capacity = 8;
    // Free-running threads instead of the deterministic stepper.
    bool threaded = false;
};

struct RunResult {
    Outcome outcome = Outcome::Deadlock;
    std::vector<std::string> locations;   // per component, in system order
    Valuation valuation;
    std::vector<TraceEvent> trace;
    std::size_t units = 0;
    std::size_t steps = 0;

    // One JSON object per line: {"step","component","port","value"}.
    std::string trace_jsonl() const;
};

RunResult run(const CompositeSystem& sys, const RunOptions& opts = {});

} // namespace chor
