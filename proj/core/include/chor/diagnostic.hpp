#pragma once

#include <string>
#include <vector>

namespace chor {

struct SourceSpan {
    int line = 0;
    int column = 0;
};

struct Diagnostic {
    SourceSpan span;
    std::string rule;    // short stable code, e.g. "parallel-independence"
    std::string message;

    // "file:line:col: error[rule]: message"
    std::string format(const std::string& file = "") const;
};

using Diagnostics = std::vector<Diagnostic>;

bool has_rule(const Diagnostics& ds, const std::string& rule);

} // namespace chor
