#pragma once

// Choreography to controller-free composite system.

#include "chor/ast.hpp"
#include "chor/cbs.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace chor {

class SynthError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct SynthContext {
    CompositeSystem system;
    std::map<std::string, std::string> context;   // component -> current location
    std::map<std::string, int> counters;          // name class -> last issued index
    std::size_t steps = 0;                         // transformation steps applied
    std::size_t invariant_checks = 0;
};

SynthContext init_skeleton(const SystemDecl& decl);

// Throws SynthError unless every component has exactly one current location
// that exists in its automaton.
void assert_context_unique(const SynthContext& ctx);

Port fresh_copy(SynthContext& ctx, const Port& p);

SynthContext synth_comm(SynthContext ctx, const GuardedSend& send, const std::vector<Receive>& rcvs);
// Joins `joined` components of branches grown from one base.
SynthContext synth_union(const std::vector<SynthContext>& branches, const CompSet& joined);
SynthContext synth_branch(SynthContext ctx, const Branch& b);
SynthContext synth_loop(SynthContext ctx, const Loop& l);
SynthContext synth_seq(SynthContext ctx, const Seq& s);
SynthContext synth_par(SynthContext ctx, const Par& p);
SynthContext synth(SynthContext ctx, const Chor& ch);

struct SynthResult {
    CompositeSystem system;
    std::size_t steps = 0;
    std::size_t invariant_checks = 0;
};

SynthResult synthesize_traced(const SystemDecl& decl, const Chor& ch);
CompositeSystem synthesize(const SystemDecl& decl, const Chor& ch);

// Name classes of generated control ports.
bool is_control_port(const std::string& port_id);
bool is_epsilon_port(const std::string& port_id);

} // namespace chor
