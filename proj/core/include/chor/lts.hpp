#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace chor {

struct LtsEdge {
    std::size_t src = 0;
    std::size_t dst = 0;
    std::string label;
};

// Explored graph; node 0 is the initial configuration.
struct Lts {
    std::vector<std::string> nodes;
    std::vector<LtsEdge> edges;
    std::set<std::size_t> terminals;
    std::set<std::size_t> deadlocks;

    std::string to_dot(std::string_view name) const;
};

struct ExploreLimits {
    std::size_t max_configs = 200000;
    std::size_t max_depth = 10000;
};

} // namespace chor
