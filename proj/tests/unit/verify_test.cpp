#include "chor/synth.hpp"
#include "chor/verify.hpp"

#include "corpus.hpp"

#include <gtest/gtest.h>

using namespace chor;

namespace {

struct Entry {
    std::string file;
    Program program;
    CompositeSystem system;
};

const std::vector<Entry>& corpus() {
    static const std::vector<Entry> entries = [] {
        std::vector<Entry> out;
        for (const auto& f : chortest::corpus_files()) {
            auto p = chortest::load_program(f);
            auto sys = synthesize(p.decl, p.main);
            out.push_back({f, std::move(p), std::move(sys)});
        }
        return out;
    }();
    return entries;
}

const Entry& entry(const std::string& suffix) {
    for (const auto& e : corpus())
        if (e.file.size() >= suffix.size() && e.file.compare(e.file.size() - suffix.size(), suffix.size(), suffix) == 0)
            return e;
    throw std::runtime_error("no corpus entry " + suffix);
}

} // namespace

TEST(Equiv, CorpusIsEquivalent) {
    for (const auto& e : corpus()) {
        auto rep = equiv_check(e.program.decl, e.program.main, e.system);
        EXPECT_EQ(rep.verdict, Verdict::Equivalent) << e.file << "\n" << rep.str();
        EXPECT_FALSE(rep.chor_finals.empty()) << e.file;
        EXPECT_EQ(rep.chor_finals, rep.sys_finals) << e.file;
    }
}

TEST(Equiv, NondeterministicFinalsAllReproduced) {
    const auto& e = entry("branch_nondet.chor");
    auto rep = equiv_check(e.program.decl, e.program.main, e.system);
    EXPECT_EQ(rep.chor_finals.size(), 2u);
    EXPECT_EQ(rep.sys_finals.size(), 2u);
}

TEST(Equiv, TruncationIsInconclusive) {
    const auto& e = entry("producer_consumer.chor");
    auto rep = equiv_check(e.program.decl, e.program.main, e.system, {20, 10000});
    EXPECT_TRUE(rep.truncated);
    EXPECT_EQ(rep.verdict, Verdict::Inconclusive);
}

TEST(Equiv, DifferentFinalsMismatch) {
    const auto& e = entry("regress/sync_comm.chor");
    auto sys = e.system;
    sys.components.front().vars.front().init = Value(50);
    auto rep = equiv_check(e.program.decl, e.program.main, sys);
    EXPECT_EQ(rep.verdict, Verdict::Mismatch);
    EXPECT_EQ(rep.only_chor.size(), 1u);
    EXPECT_EQ(rep.only_sys.size(), 1u);
    EXPECT_NE(rep.str().find("mismatch"), std::string::npos);
}

TEST(Equiv, VerdictNames) {
    EXPECT_EQ(to_string(Verdict::Equivalent), "equivalent");
    EXPECT_EQ(to_string(Verdict::Mismatch), "mismatch");
    EXPECT_EQ(to_string(Verdict::Inconclusive), "inconclusive");
}

TEST(Mutation, NamesRoundTrip) {
    for (auto m : kAllMutations) EXPECT_EQ(parse_mutation(to_string(m)), m);
    EXPECT_FALSE(parse_mutation("nope").has_value());
}

TEST(Mutation, EachFlipsSomeCorpusVerdict) {
    for (auto m : kAllMutations) {
        std::size_t sites = 0, flips = 0;
        for (const auto& e : corpus()) {
            auto mutated = mutate(e.system, m);
            if (!mutated) continue;
            ++sites;
            auto rep = equiv_check(e.program.decl, e.program.main, *mutated, {20000, 10000});
            if (rep.verdict != Verdict::Equivalent) ++flips;
        }
        EXPECT_GT(sites, 0u) << to_string(m);
        EXPECT_GT(flips, 0u) << to_string(m);
    }
}

TEST(Mutation, SitesAndEffects) {
    const auto& sync = entry("regress/sync_comm.chor");
    EXPECT_FALSE(mutate(sync.system, Mutation::DropEpsilon).has_value());
    EXPECT_FALSE(mutate(sync.system, Mutation::SwapBreakGuards).has_value());
    EXPECT_FALSE(mutate(sync.system, Mutation::MergeCopies).has_value());

    auto dropped = mutate(sync.system, Mutation::DropInteraction);
    ASSERT_TRUE(dropped);
    EXPECT_TRUE(dropped->gamma.empty());
    EXPECT_TRUE(has_rule(invariant_suite(*dropped), "port-unconnected"));

    auto unmarked = mutate(sync.system, Mutation::UnmarkEnd);
    ASSERT_TRUE(unmarked);
    EXPECT_FALSE(unmarked->components.front().end.has_value());
    EXPECT_TRUE(has_rule(invariant_suite(*unmarked), "end-location"));

    const auto& loop = entry("regress/loop_multi.chor");
    auto no_eps = mutate(loop.system, Mutation::DropEpsilon);
    ASSERT_TRUE(no_eps);
    EXPECT_EQ(no_eps->transition_count() + 1, loop.system.transition_count());

    auto swapped = mutate(loop.system, Mutation::SwapBreakGuards);
    ASSERT_TRUE(swapped);
    EXPECT_NE(serialize(*swapped), serialize(loop.system));

    const auto& branch = entry("regress/branch_two_way.chor");
    auto merged = mutate(branch.system, Mutation::MergeCopies);
    ASSERT_TRUE(merged);
    EXPECT_TRUE(has_rule(invariant_suite(*merged), "port-conflict"));
}

TEST(Invariants, CleanOnCorpus) {
    for (const auto& e : corpus()) {
        auto ds = invariant_suite(e.system);
        EXPECT_TRUE(ds.empty()) << e.file << ": " << (ds.empty() ? "" : ds.front().format());
    }
}

TEST(Invariants, DetectsGuardedReceiveAndBareCycle) {
    const auto& loop = entry("regress/loop_multi.chor");
    auto guarded = loop.system;
    for (auto& c : guarded.components) {
        auto it = std::find_if(c.transitions.begin(), c.transitions.end(), [&](const Transition& t) {
            return c.find_port(t.port)->ctype == PortType::Recv;
        });
        if (it != c.transitions.end()) {
            it->guard = lit(false);
            break;
        }
    }
    EXPECT_TRUE(has_rule(invariant_suite(guarded), "receive-guard"));

    auto bare = loop.system;
    bool done = false;
    for (auto& c : bare.components) {
        for (auto& t : c.transitions) {
            if (!is_epsilon_port(t.port)) continue;
            auto name = t.port;
            Port p = c.ports.at(name);
            c.ports.erase(name);
            p.id = c.id + ".loop";
            c.ports.emplace(p.id, p);
            for (auto& u : c.transitions)
                if (u.port == name) u.port = p.id;
            done = true;
            break;
        }
        if (done) break;
    }
    ASSERT_TRUE(done);
    EXPECT_TRUE(has_rule(invariant_suite(bare), "cycle-without-epsilon"));
}
