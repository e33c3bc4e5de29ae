// chorc: command-line driver over the chor library.

#include "chor/exec.hpp"
#include "chor/lang.hpp"
#include "chor/promela.hpp"
#include "chor/sim.hpp"
#include "chor/synth.hpp"
#include "chor/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string input;
    std::string config;   // split layout: component file
    std::string output;
    std::string dot;
    std::string trace;
    std::string inline_ltl;
    std::string mutation;
    std::size_t max_configs = 200000;
    std::size_t max_depth = 10000;
    std::size_t max_steps = 100000;
    std::size_t max_chan_len = 8;
    std::uint64_t seed = 0;
    bool paper_ack = false;
    bool strict = false;
    bool threaded = false;
    bool system = false;
    bool termination = false;
    std::vector<std::string> end_ports;
    std::string livelock;
    std::vector<std::string> unique;
    std::vector<std::string> transactions;

    chor::ExploreLimits limits() const { return {max_configs, max_depth}; }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
}

void print(const chor::Diagnostics& ds, const std::string& file) {
    for (const auto& d : ds) std::cerr << d.format(file) << "\n";
}

// Parsed and well-formed program, or nullopt after printing diagnostics.
std::optional<chor::Program> load(const RunConfig& rc) {
    chor::ParseResult pr =
        rc.config.empty() ? chor::parse(read_file(rc.input)) : chor::parse_split(read_file(rc.config), read_file(rc.input));
    if (!pr.ok()) {
        print(pr.diagnostics, rc.input);
        return std::nullopt;
    }
    auto ds = chor::check_well_formed(pr.program->decl, pr.program->main);
    if (!ds.empty()) {
        print(ds, rc.input);
        return std::nullopt;
    }
    return pr.program;
}

std::optional<chor::CompositeSystem> build_system(const chor::Program& p, const RunConfig& rc) {
    chor::CompositeSystem sys = chor::synthesize(p.decl, p.main);
    if (rc.mutation.empty()) return sys;
    auto m = chor::parse_mutation(rc.mutation);
    if (!m) throw CLI::ValidationError("--mutate", "unknown mutation " + rc.mutation);
    auto mutated = chor::mutate(sys, *m);
    if (!mutated) {
        std::cerr << "no site for mutation " << rc.mutation << "\n";
        return std::nullopt;
    }
    return mutated;
}

int cmd_check(const RunConfig& rc) {
    auto p = load(rc);
    if (!p) return kFail;
    std::cout << rc.input << ": ok\n";
    return kOk;
}

int cmd_synth(const RunConfig& rc) {
    auto p = load(rc);
    if (!p) return kFail;
    auto sys = build_system(*p, rc);
    if (!sys) return kFail;
    write_output(rc.output, chor::serialize(*sys));
    if (!rc.dot.empty()) write_output(rc.dot, chor::to_dot(*sys));
    std::cerr << "components " << sys->components.size() << ", interactions " << sys->gamma.size()
              << ", locations " << sys->location_count() << ", transitions " << sys->transition_count() << "\n";
    return kOk;
}

int cmd_explore(const RunConfig& rc) {
    auto p = load(rc);
    if (!p) return kFail;
    std::ostringstream out;
    std::size_t deadlocks = 0;
    bool truncated = false;
    if (rc.system) {
        auto sys = build_system(*p, rc);
        if (!sys) return kFail;
        auto r = chor::sys_explore(*sys, chor::initial_state(*sys), rc.limits());
        out << "states " << r.states << "\n";
        for (const auto& v : r.terminal_valuations()) out << "final " << v.without_control().str() << "\n";
        for (const auto& d : r.deadlocks) out << "deadlock " << d.str() << "\n";
        deadlocks = r.deadlocks.size();
        truncated = r.truncated;
        if (!rc.dot.empty()) write_output(rc.dot, r.graph.to_dot("system"));
    } else {
        auto r = chor::explore(p->main, p->decl.initial_valuation(), rc.limits());
        out << "configs " << r.configs << "\n";
        for (const auto& v : r.finals) out << "final " << v.str() << "\n";
        for (const auto& d : r.deadlocks) out << "deadlock " << d.str() << "\n";
        deadlocks = r.deadlocks.size();
        truncated = r.truncated;
        if (!rc.dot.empty()) write_output(rc.dot, r.graph.to_dot(p->name));
    }
    if (truncated) out << "truncated\n";
    write_output(rc.output, out.str());
    return deadlocks ? kFail : kOk;
}

int cmd_equiv(const RunConfig& rc) {
    auto p = load(rc);
    if (!p) return kFail;
    auto sys = build_system(*p, rc);
    if (!sys) return kFail;
    auto rep = chor::equiv_check(p->decl, p->main, *sys, rc.limits());
    write_output(rc.output, rep.str());
    return rep.verdict == chor::Verdict::Equivalent ? kOk : kFail;
}

int cmd_simulate(const RunConfig& rc) {
    auto p = load(rc);
    if (!p) return kFail;
    auto sys = build_system(*p, rc);
    if (!sys) return kFail;
    chor::RunOptions opts;
    opts.seed = rc.seed;
    opts.max_steps = rc.max_steps;
    opts.queue_capacity = rc.max_chan_len;
    opts.threaded = rc.threaded;
    auto r = chor::run(*sys, opts);
    std::ostringstream out;
    out << "outcome " << chor::to_string(r.outcome) << "\n";
    out << "steps " << r.steps << "\n";
    out << "final " << r.valuation.without_control().str() << "\n";
    write_output(rc.output, out.str());
    if (!rc.trace.empty()) write_output(rc.trace, r.trace_jsonl());
    return r.outcome == chor::Outcome::Completed ? kOk : kFail;
}

int cmd_promela(const RunConfig& rc) {
    auto p = load(rc);
    if (!p) return kFail;
    auto sys = build_system(*p, rc);
    if (!sys) return kFail;
    chor::PromelaOptions opts;
    opts.max_len = rc.max_chan_len;
    opts.paper_ack_encoding = rc.paper_ack;
    opts.strict = rc.strict;
    if (!rc.inline_ltl.empty()) opts.inline_ltl = read_file(rc.inline_ltl);
    std::string model;
    try {
        model = chor::emit_model(*sys, opts);
    } catch (const chor::PromelaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFail;
    }
    auto ds = chor::validate_promela(model);
    if (!ds.empty()) {
        print(ds, "<promela>");
        return kFail;
    }
    write_output(rc.output, model);
    return kOk;
}

std::pair<std::string, std::string> split_once(const std::string& s, char sep, const std::string& flag) {
    auto at = s.find(sep);
    if (at == std::string::npos || at == 0 || at + 1 == s.size())
        throw CLI::ValidationError(flag, "expected A" + std::string(1, sep) + "B, got " + s);
    return {s.substr(0, at), s.substr(at + 1)};
}

int cmd_ltl(const RunConfig& rc) {
    auto p = load(rc);
    if (!p) return kFail;
    auto sys = build_system(*p, rc);
    if (!sys) return kFail;
    chor::LtlSelection sel;
    sel.termination = rc.termination;
    for (const auto& e : rc.end_ports) sel.end_ports.insert(split_once(e, '=', "--end-port"));
    if (!rc.livelock.empty()) sel.livelock = rc.livelock;
    sel.unique = rc.unique;
    for (const auto& t : rc.transactions) sel.transactions.push_back(split_once(t, ':', "--transaction"));
    if (sel.empty()) sel.termination = true;
    try {
        write_output(rc.output, chor::emit_ltl(*sys, sel));
    } catch (const chor::LtlError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"chorc: choreography compiler"};
    app.require_subcommand(1);
    RunConfig rc;

    auto common = [&](CLI::App* sub) {
        sub->add_option("file", rc.input, "choreography source")->required();
        sub->add_option("--config", rc.config, "component file for the split layout");
        sub->add_option("-o,--output", rc.output, "output path (default stdout)");
    };
    auto limits = [&](CLI::App* sub) {
        sub->add_option("--max-configs", rc.max_configs, "exploration bound on states")->check(CLI::PositiveNumber);
        sub->add_option("--max-depth", rc.max_depth, "exploration bound on depth")->check(CLI::PositiveNumber);
    };
    auto mutate = [&](CLI::App* sub) {
        sub->add_option("--mutate", rc.mutation,
                        "apply a mutation to the synthesized system: drop-epsilon, swap-break-guards, merge-copies, "
                        "drop-interaction, unmark-end");
    };

    auto* check = app.add_subcommand("check", "parse and check well-formedness");
    common(check);

    auto* synth = app.add_subcommand("synth", "synthesize the composite system");
    common(synth);
    synth->add_option("--emit-dot", rc.dot, "write the system as DOT");
    mutate(synth);

    auto* explore = app.add_subcommand("explore", "explore the choreography state space");
    common(explore);
    limits(explore);
    explore->add_option("--emit-dot", rc.dot, "write the explored LTS as DOT");
    explore->add_flag("--system", rc.system, "explore the synthesized system instead");
    mutate(explore);

    auto* equiv = app.add_subcommand("equiv", "compare choreography and synthesized system");
    common(equiv);
    limits(equiv);
    mutate(equiv);

    auto* simulate = app.add_subcommand("simulate", "run the synthesized components");
    common(simulate);
    simulate->add_option("--seed", rc.seed, "scheduler seed");
    simulate->add_option("--max-steps", rc.max_steps, "step bound")->check(CLI::PositiveNumber);
    simulate->add_option("--max-chan-len", rc.max_chan_len, "queue capacity")->check(CLI::PositiveNumber);
    simulate->add_option("--trace", rc.trace, "write the event trace as JSON lines");
    simulate->add_flag("--threaded", rc.threaded, "one thread per component");
    mutate(simulate);

    auto* promela = app.add_subcommand("promela", "emit a Promela model");
    common(promela);
    promela->add_option("--max-chan-len", rc.max_chan_len, "MAX_LEN")->check(CLI::PositiveNumber);
    promela->add_flag("--paper-ack-encoding", rc.paper_ack, "acks on the data channel, synchRecv at receive sites");
    promela->add_flag("--strict", rc.strict, "reject string data");
    promela->add_option("--inline-ltl", rc.inline_ltl, "property file to append as ltl blocks");
    mutate(promela);

    auto* ltl = app.add_subcommand("ltl", "emit LTL properties");
    common(ltl);
    ltl->add_flag("--termination", rc.termination, "termination property");
    ltl->add_option("--end-port", rc.end_ports, "Comp=port, overrides the inferred end port");
    ltl->add_option("--livelock", rc.livelock, "Comp.port that must not recur forever");
    ltl->add_option("--unique", rc.unique, "Comp.port that fires at most once");
    ltl->add_option("--transaction", rc.transactions, "Comp.a:Comp.b, a never before b");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*check) return cmd_check(rc);
        if (*synth) return cmd_synth(rc);
        if (*explore) return cmd_explore(rc);
        if (*equiv) return cmd_equiv(rc);
        if (*simulate) return cmd_simulate(rc);
        if (*promela) return cmd_promela(rc);
        if (*ltl) return cmd_ltl(rc);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFail;
    }
    return kUsage;
}
