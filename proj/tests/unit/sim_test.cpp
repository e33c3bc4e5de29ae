#include "chor/sim.hpp"
#include "chor/synth.hpp"
#include "chor/verify.hpp"

#include "corpus.hpp"

#include <nlohmann/json.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace chor;

namespace {

struct Entry {
    std::string file;
    CompositeSystem system;
    std::set<Valuation> terminals;
};

const std::vector<Entry>& corpus() {
    static const std::vector<Entry> entries = [] {
        std::vector<Entry> out;
        for (const auto& f : chortest::corpus_files()) {
            auto p = chortest::load_program(f);
            auto sys = synthesize(p.decl, p.main);
            auto terms = sys_explore(sys, initial_state(sys)).terminal_valuations();
            out.push_back({f, std::move(sys), std::move(terms)});
        }
        return out;
    }();
    return entries;
}

CompositeSystem synth_file(const std::string& rel) {
    auto p = chortest::load_program(chortest::corpus_path(rel));
    return synthesize(p.decl, p.main);
}

bool at_end(const CompositeSystem& sys, const RunResult& r) {
    if (r.locations.size() != sys.components.size()) return false;
    for (std::size_t i = 0; i < sys.components.size(); ++i)
        if (sys.components[i].end != r.locations[i]) return false;
    return true;
}

} // namespace

TEST(Sim, OutcomeNames) {
    EXPECT_EQ(to_string(Outcome::Completed), "completed");
    EXPECT_EQ(to_string(Outcome::Deadlock), "deadlock");
    EXPECT_EQ(to_string(Outcome::StepLimit), "step-limit");
}

TEST(Sim, CorpusCompletesIntoReachableTerminal) {
    for (const auto& e : corpus()) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            RunOptions opts;
            opts.seed = seed;
            auto r = run(e.system, opts);
            ASSERT_EQ(r.outcome, Outcome::Completed) << e.file << " seed " << seed;
            EXPECT_TRUE(at_end(e.system, r)) << e.file;
            EXPECT_EQ(r.units, e.system.components.size());
            EXPECT_TRUE(e.terminals.count(r.valuation)) << e.file << " seed " << seed << "\n" << r.valuation.str();
        }
    }
}

TEST(Sim, SameSeedSameTrace) {
    auto sys = synth_file("buying.chor");
    RunOptions opts;
    opts.seed = 42;
    auto a = run(sys, opts), b = run(sys, opts);
    EXPECT_EQ(a.trace_jsonl(), b.trace_jsonl());
    EXPECT_EQ(a.steps, b.steps);
}

TEST(Sim, SeedsReachEveryNondeterministicFinal) {
    const auto& e = *std::find_if(corpus().begin(), corpus().end(),
                                  [](const Entry& x) { return x.file.find("branch_nondet") != std::string::npos; });
    std::set<Valuation> seen;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RunOptions opts;
        opts.seed = seed;
        seen.insert(run(e.system, opts).valuation);
    }
    EXPECT_EQ(seen, e.terminals);
    EXPECT_EQ(seen.size(), 2u);
}

TEST(Sim, TraceJsonlSchema) {
    auto sys = synth_file("regress/multicast.chor");
    auto r = run(sys);
    ASSERT_EQ(r.outcome, Outcome::Completed);
    ASSERT_FALSE(r.trace.empty());
    std::istringstream in(r.trace_jsonl());
    std::string line;
    std::size_t lines = 0, last = 0;
    while (std::getline(in, line)) {
        auto j = nlohmann::json::parse(line);
        ASSERT_TRUE(j.is_object());
        std::vector<std::string> keys;
        for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
        std::sort(keys.begin(), keys.end());
        EXPECT_EQ(keys, (std::vector<std::string>{"component", "port", "step", "value"}));
        EXPECT_TRUE(j["step"].is_number_unsigned());
        EXPECT_GE(j["step"].get<std::size_t>(), last);
        last = j["step"].get<std::size_t>();
        EXPECT_NE(sys.find(j["component"].get<std::string>()), nullptr);
        EXPECT_NE(sys.find_port(j["port"].get<std::string>()), nullptr);
        ++lines;
    }
    EXPECT_EQ(lines, r.trace.size());
}

TEST(Sim, TraceFollowsInteractions) {
    // every non-internal event belongs to a declared interaction
    auto sys = synth_file("buying.chor");
    auto r = run(sys);
    for (const auto& ev : r.trace) {
        const Port* p = sys.find_port(ev.port);
        ASSERT_NE(p, nullptr) << ev.port;
        EXPECT_EQ(p->owner, ev.component);
        if (p->ctype != PortType::Internal) EXPECT_FALSE(sys.interactions_of(ev.port).empty()) << ev.port;
    }
}

TEST(Sim, ThreadedModeReachesTerminal) {
    for (const auto& e : corpus()) {
        RunOptions opts;
        opts.threaded = true;
        opts.seed = 3;
        auto r = run(e.system, opts);
        ASSERT_EQ(r.outcome, Outcome::Completed) << e.file;
        EXPECT_TRUE(e.terminals.count(r.valuation)) << e.file;
    }
}

TEST(Sim, QueueCapacityOneStillCompletes) {
    for (const auto& e : corpus()) {
        RunOptions opts;
        opts.queue_capacity = 1;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            opts.seed = seed;
            auto r = run(e.system, opts);
            EXPECT_EQ(r.outcome, Outcome::Completed) << e.file;
            EXPECT_TRUE(e.terminals.count(r.valuation)) << e.file;
        }
    }
}

TEST(Sim, MissingInteractionDeadlocks) {
    auto sys = *mutate(synth_file("regress/sync_comm.chor"), Mutation::DropInteraction);
    for (bool threaded : {false, true}) {
        RunOptions opts;
        opts.threaded = threaded;
        auto r = run(sys, opts);
        EXPECT_EQ(r.outcome, Outcome::Deadlock) << threaded;
        EXPECT_TRUE(r.trace.empty());
    }
}

TEST(Sim, StepLimitStopsRun) {
    auto sys = synth_file("buying.chor");
    RunOptions opts;
    opts.max_steps = 5;
    auto r = run(sys, opts);
    EXPECT_EQ(r.outcome, Outcome::StepLimit);
    EXPECT_LE(r.steps, 5u);
}

TEST(Sim, EmptySystemCompletes) {
    CompositeSystem none;
    auto r = run(none);
    EXPECT_EQ(r.outcome, Outcome::Completed);
    EXPECT_EQ(r.units, 0u);
}
