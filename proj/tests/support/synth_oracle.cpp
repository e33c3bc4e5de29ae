#include "synth_oracle.hpp"

#include "chor/lang.hpp"

#include <type_traits>

namespace chortest {

// Interaction count predicted from the choreography alone: one per
// communication, one notification per continuation and two loop control
// interactions when other components take part, one sequencing
// synchronisation when the hand-over involves at least two components.
std::size_t expected_interactions(const chor::Chor& ch) {
    using namespace chor;
    return std::visit(
        [](const auto& n) -> std::size_t {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Nil>) {
                return 0;
            } else if constexpr (std::is_same_v<T, Comm>) {
                return 1;
            } else if constexpr (std::is_same_v<T, Branch>) {
                CompSet others;
                for (const auto& c : n.conts) {
                    others.insert(c.send.port.owner);
                    for (const auto& p : participants(c.body)) others.insert(p);
                }
                others.erase(n.master);
                std::size_t total = 0;
                for (const auto& c : n.conts) total += (others.empty() ? 0 : 1) + expected_interactions(c.body);
                return total;
            } else if constexpr (std::is_same_v<T, Loop>) {
                CompSet others = participants(n.body);
                others.erase(n.cond.port.owner);
                return (others.empty() ? 0 : 2) + expected_interactions(n.body);
            } else if constexpr (std::is_same_v<T, Seq>) {
                CompSet ends = end_set(n.first);
                CompSet hand = ends;
                for (const auto& s : start_set(n.second)) hand.insert(s);
                std::size_t sync = !ends.empty() && hand.size() >= 2 ? 1 : 0;
                return expected_interactions(n.first) + sync + expected_interactions(n.second);
            } else {
                return expected_interactions(n.left) + expected_interactions(n.right);
            }
        },
        ch->node);
}

} // namespace chortest
