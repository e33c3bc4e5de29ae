#include "chor/exec.hpp"
#include "chor/lang.hpp"
#include "chor/sim.hpp"
#include "chor/synth.hpp"
#include "chor/verify.hpp"

#include "chor_gen.hpp"
#include "corpus.hpp"

#include <gtest/gtest.h>

using namespace chor;

namespace {

struct Case {
    std::uint64_t seed;
    int depth;
};

class RandomProgram : public ::testing::TestWithParam<Case> {};

constexpr std::size_t kPerShard = 25;

void PrintTo(const Case& c, std::ostream* os) { *os << "seed base " << c.seed << ", depth " << c.depth; }

std::string shard_name(const ::testing::TestParamInfo<Case>& info) {
    return "shard" + std::to_string(info.param.seed) + "_depth" + std::to_string(info.param.depth);
}

} // namespace

// Each shard runs kPerShard generated programs through the whole pipeline.
TEST_P(RandomProgram, PipelineInvariants) {
    const auto [base, depth] = GetParam();
    for (std::uint64_t k = 0; k < kPerShard; ++k) {
        std::uint64_t seed = base * kPerShard + k;
        std::mt19937_64 rng(seed);
        chortest::GenOptions g;
        g.depth = depth;
        auto src = chortest::gen_program(rng, g);
        auto p = chortest::load_source(src);
        SCOPED_TRACE("seed " + std::to_string(seed) + "\n" + src);

        auto sys = synthesize(p.decl, p.main);
        auto ds = invariant_suite(sys);
        ASSERT_TRUE(ds.empty()) << ds.front().format();

        auto rep = equiv_check(p.decl, p.main, sys, {200000, 10000});
        if (rep.truncated) continue;
        ASSERT_EQ(rep.verdict, Verdict::Equivalent) << rep.str();

        // projected finals only bind declared variables
        auto declared = p.decl.initial_valuation().domain();
        for (const auto& v : rep.sys_finals) EXPECT_EQ(v.domain(), declared);

        auto terms = sys_explore(sys, initial_state(sys)).terminal_valuations();
        for (std::uint64_t s = 0; s < 3; ++s) {
            RunOptions opts;
            opts.seed = s;
            opts.queue_capacity = 2;
            auto r = run(sys, opts);
            ASSERT_EQ(r.outcome, Outcome::Completed) << s;
            EXPECT_TRUE(terms.count(r.valuation)) << s;
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Depth4, RandomProgram,
                         ::testing::Values(Case{0, 4}, Case{1, 4}, Case{2, 4}, Case{3, 4}, Case{4, 4}, Case{5, 4},
                                           Case{6, 4}, Case{7, 4}),
                         shard_name);
INSTANTIATE_TEST_SUITE_P(Depth6, RandomProgram, ::testing::Values(Case{100, 6}, Case{101, 6}, Case{102, 6}),
                         shard_name);

TEST(Property, PrinterRoundTripPreservesSemantics) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed);
        auto p = chortest::load_source(chortest::gen_program(rng));
        auto again = chortest::load_source(chortest::gen_declaration() + "choreography g = " + pretty(p.main) + "\n");
        auto a = explore(p.main, p.decl.initial_valuation());
        auto b = explore(again.main, again.decl.initial_valuation());
        EXPECT_EQ(a.finals, b.finals) << seed;
    }
}
