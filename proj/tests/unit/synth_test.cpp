#include "chor/lang.hpp"
#include "chor/synth.hpp"
#include "chor/verify.hpp"

#include "chor_gen.hpp"
#include "corpus.hpp"
#include "synth_oracle.hpp"

#include <gtest/gtest.h>

#include <regex>

using namespace chor;

namespace {

Program load(const std::string& rel) { return chortest::load_program(chortest::corpus_path(rel)); }

CompositeSystem synth_file(const std::string& rel) {
    auto p = load(rel);
    return synthesize(p.decl, p.main);
}

std::string strip_indices(const std::string& s) { return std::regex_replace(s, std::regex("([#@])[0-9]+"), "$1"); }

// Shape of a system with copy and control indices erased.
struct Signature {
    std::map<std::string, std::size_t> locations;
    std::multiset<std::string> transitions;
    std::multiset<std::string> interactions;
    bool operator==(const Signature&) const = default;
};

Signature signature(const CompositeSystem& sys) {
    Signature out;
    for (const auto& c : sys.components) {
        out.locations[c.id] = c.locations.size();
        for (const auto& t : c.transitions)
            out.transitions.insert(strip_indices(t.port) + "[" + render(t.guard, c.id) + "," + render(t.update, c.id) + "]");
    }
    for (const auto& a : sys.gamma) out.interactions.insert(strip_indices(a.str()));
    return out;
}

std::size_t non_epsilon_ports(const AtomicComponent& c) {
    std::size_t n = 0;
    for (const auto& [id, p] : c.ports)
        if (!is_epsilon_port(id)) ++n;
    return n;
}

} // namespace

TEST(Synth, NilGivesSkeleton) {
    auto sys = synth_file("regress/nil.chor");
    ASSERT_EQ(sys.components.size(), 1u);
    const auto& a = sys.components.front();
    EXPECT_EQ(a.locations.size(), 1u);
    EXPECT_TRUE(a.transitions.empty());
    EXPECT_EQ(a.end, a.initial);
    EXPECT_TRUE(sys.gamma.empty());
}

TEST(Synth, SyncCommExactShape) {
    const std::string expected = R"(system
component A
  var x: int = 3
  port A.s#1: ss of int binds x
  location LA_0 initial
  location LA_1 end
  transition LA_0 -> LA_1 on A.s#1 [x > 0, x := x - 1]
end
component B
  var y: int = 0
  var z: int = 0
  port B.r#1: r of int binds y
  location LB_0 initial
  location LB_1 end
  transition LB_0 -> LB_1 on B.r#1 [true, z := y * 2]
end
interaction A.s#1 -> { B.r#1 }
)";
    EXPECT_EQ(serialize(synth_file("regress/sync_comm.chor")), expected);
}

TEST(Synth, FreshCopiesCountPerBasePort) {
    auto p = load("regress/sync_comm.chor");
    auto ctx = init_skeleton(p.decl);
    const Port* s = p.decl.find_port("A.s");
    EXPECT_EQ(fresh_copy(ctx, *s).id, "A.s#1");
    EXPECT_EQ(fresh_copy(ctx, *s).id, "A.s#2");
    const Port* r = p.decl.find_port("B.r");
    EXPECT_EQ(fresh_copy(ctx, *r).id, "B.r#1");
}

TEST(Synth, PortReuseGetsDistinctCopies) {
    auto sys = synth_file("regress/port_reuse.chor");
    EXPECT_TRUE(check_structure(sys).empty());
    std::set<std::string> sends;
    for (const auto& a : sys.gamma) EXPECT_TRUE(sends.insert(a.send).second) << a.send;
}

TEST(Synth, LocalBranchUsesInternalCopies) {
    auto sys = synth_file("regress/branch_local.chor");
    // only the trailing communication needs an interaction
    EXPECT_EQ(sys.gamma.size(), 1u);
    const auto* a = sys.find("A");
    std::size_t internal = 0;
    for (const auto& [id, p] : a->ports)
        if (p.ctype == PortType::Internal && !is_epsilon_port(id)) ++internal;
    EXPECT_EQ(internal, 2u);
}

TEST(Synth, MasterOnlyLoopHasNoControlInteractions) {
    auto sys = synth_file("regress/loop_master_only.chor");
    for (const auto& a : sys.gamma) EXPECT_FALSE(is_control_port(a.send)) << a.str();
    EXPECT_TRUE(invariant_suite(sys).empty());
}

TEST(Synth, ProducerConsumerShape) {
    auto sys = synth_file("producer_consumer.chor");
    const auto* p1 = sys.find("P1");
    ASSERT_NE(p1, nullptr);
    EXPECT_EQ(p1->locations.size(), 6u);
    EXPECT_EQ(non_epsilon_ports(*p1), 5u);
    std::set<std::string> bases;
    for (const auto& [id, p] : p1->ports)
        if (!is_epsilon_port(id)) bases.insert(strip_indices(p.local_name()));
    EXPECT_EQ(bases, (std::set<std::string>{"cond#", "brk@", "cs@", "ack#", "s#"}));
    // two pairs that never interact with each other
    for (const auto& a : sys.gamma) {
        std::set<std::string> owners{sys.find_port(a.send)->owner};
        for (const auto& r : a.receivers) owners.insert(sys.find_port(r)->owner);
        bool left = owners == std::set<std::string>{"P1", "C1"};
        bool right = owners == std::set<std::string>{"P2", "C2"};
        EXPECT_TRUE(left || right) << a.str();
    }
}

TEST(Synth, InteractionCountMatchesStructuralOracle) {
    for (const auto& f : chortest::corpus_files()) {
        auto p = chortest::load_program(f);
        EXPECT_EQ(synthesize(p.decl, p.main).gamma.size(), chortest::expected_interactions(p.main)) << f;
    }
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        std::mt19937_64 rng(seed);
        auto p = chortest::load_source(chortest::gen_program(rng));
        EXPECT_EQ(synthesize(p.decl, p.main).gamma.size(), chortest::expected_interactions(p.main)) << seed;
    }
}

TEST(Synth, BuyingInteractionCountIsPinned) {
    auto p = load("buying.chor");
    auto sys = synthesize(p.decl, p.main);
    EXPECT_EQ(chortest::expected_interactions(p.main), 21u);
    EXPECT_EQ(sys.gamma.size(), 21u);
}

TEST(Synth, ContextCheckedAfterEveryStep) {
    for (const auto& f : chortest::corpus_files()) {
        auto p = chortest::load_program(f);
        auto r = synthesize_traced(p.decl, p.main);
        // one check per step, plus one on the skeleton and one on the result
        EXPECT_EQ(r.invariant_checks, r.steps + 2) << f;
    }
}

TEST(Synth, ContextUniquenessViolationsThrow) {
    auto p = load("regress/sync_comm.chor");
    auto ctx = init_skeleton(p.decl);
    EXPECT_NO_THROW(assert_context_unique(ctx));
    auto missing = ctx;
    missing.context.erase("A");
    EXPECT_THROW(assert_context_unique(missing), SynthError);
    auto dangling = ctx;
    dangling.context["A"] = "LA_99";
    EXPECT_THROW(assert_context_unique(dangling), SynthError);
}

TEST(Synth, UnionRejectsDivergentUnjoinedComponent) {
    auto p = load("regress/sync_comm.chor");
    auto a = init_skeleton(p.decl);
    auto b = a;
    b.system.find("A")->locations.insert("LA_9");
    b.context["A"] = "LA_9";
    EXPECT_THROW(synth_union({a, b}, CompSet{"B"}), SynthError);
    EXPECT_NO_THROW(synth_union({a, b}, CompSet{"A"}));
}

TEST(Synth, Deterministic) {
    for (const auto& f : chortest::corpus_files()) {
        auto p = chortest::load_program(f);
        EXPECT_EQ(serialize(synthesize(p.decl, p.main)), serialize(synthesize(p.decl, p.main))) << f;
    }
}

TEST(Synth, ParallelCommutesUpToIndexRenaming) {
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        std::mt19937_64 rng(seed);
        auto p = chortest::load_source(chortest::gen_program(rng));
        const auto* par = std::get_if<Par>(&p.main->node);
        if (!par) continue;
        ++checked;
        auto lr = synthesize(p.decl, p.main);
        auto rl = synthesize(p.decl, make_par(par->right, par->left));
        EXPECT_EQ(signature(lr), signature(rl)) << seed;
    }
    EXPECT_GT(checked, 10u);
}

TEST(Synth, ControlPortClassification) {
    EXPECT_TRUE(is_control_port("A.br@3"));
    EXPECT_FALSE(is_control_port("A.s#3"));
    EXPECT_TRUE(is_epsilon_port("A.eps@1"));
    EXPECT_FALSE(is_epsilon_port("A.brk@1"));
}
