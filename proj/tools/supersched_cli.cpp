// supersched: run, analyze, batch and generate real-time scheduling scenarios.
//
// Exit codes: 0 ran (deadline misses included), 2 invalid input, 3 I/O error.

#include <supersched/batch.hpp>
#include <supersched/generator.hpp>
#include <supersched/report.hpp>
#include <supersched/scenario_io.hpp>
#include <supersched/sim_engine.hpp>
#include <supersched/trace_io.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <iostream>

namespace fs = std::filesystem;
using namespace supersched;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kIo = 3;

fs::path default_out() {
    if (const char* env = std::getenv("SUPERSCHED_OUT_DIR"); env && *env) return env;
    return "out";
}

// "lo:hi[:step]" -> list
std::vector<Tick> parse_range(const std::string& text) {
    std::vector<Tick> parts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto colon = text.find(':', pos);
        if (colon == std::string::npos) colon = text.size();
        parts.push_back(std::stoull(text.substr(pos, colon - pos)));
        pos = colon + 1;
    }
    if (parts.empty() || parts.size() > 3) throw CLI::ValidationError("range", "expected lo:hi[:step]");
    const Tick lo = parts[0];
    const Tick hi = parts.size() > 1 ? parts[1] : lo;
    const Tick step = parts.size() > 2 ? parts[2] : 1;
    if (step == 0 || hi < lo) throw CLI::ValidationError("range", "expected lo <= hi and step > 0");
    std::vector<Tick> out;
    for (Tick t = lo; t <= hi; t += step) out.push_back(t);
    return out;
}

// "a,b,c" -> explicit period list; "lo:hi" -> uniform range
void apply_periods(GeneratorSpec& spec, const std::string& text) {
    if (text.find(',') != std::string::npos) {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            auto comma = text.find(',', pos);
            if (comma == std::string::npos) comma = text.size();
            spec.periods.push_back(std::stoull(text.substr(pos, comma - pos)));
            pos = comma + 1;
        }
        return;
    }
    auto range = parse_range(text);
    spec.period_min = range.front();
    spec.period_max = range.back();
}

struct RunOpts {
    std::string scenario;
    std::string out;
    std::string format = "jsonl";
    std::string report = "text";
    std::optional<std::uint64_t> seed;
    std::optional<Tick> until;
};

int cmd_run(const RunOpts& o) {
    Scenario sc = load_scenario(o.scenario);
    if (o.seed) sc.seed = *o.seed;
    if (o.until) sc.horizon = *o.until;
    for (const auto& n : sc.notes) std::cerr << "note: " << n << "\n";
    const auto format = *parse_trace_format(o.format);
    const fs::path out = o.out.empty() ? default_out() : fs::path(o.out);

    Simulator sim(sc);
    const Trace& trace = sim.run();
    const std::string trace_name = "trace." + std::string(to_string(format));
    emit_trace(trace, out / trace_name, format);
    emit_gantt(trace, out / "gantt.csv");
    RunReport report = make_report(sc, trace, trace_name);
    const std::string body = o.report == "json" ? report_json(report) : report_text(report);
    write_file(out / (o.report == "json" ? "report.json" : "report.txt"), body);
    std::cout << body;
    return kOk;
}

int cmd_analyze(const RunOpts& o) {
    Scenario sc = load_scenario(o.scenario);
    for (const auto& n : sc.notes) std::cerr << "note: " << n << "\n";
    const auto verdicts = analyze(sc);
    if (o.report == "json") {
        RunReport r;
        r.scenario = sc.name;
        r.seed = o.seed.value_or(sc.seed);
        r.mode = std::string(to_string(sc.mode));
        r.procs = sc.processors;
        r.n_tasks = sc.taskset.size();
        r.utilization = total_utilization(sc.taskset);
        r.verdicts = verdicts;
        r.notes = sc.notes;
        std::cout << report_json(r);
        return kOk;
    }
    std::cout << "scenario = " << sc.name << "\n";
    std::cout << "utilization = " << format_ratio(total_utilization(sc.taskset)) << "\n";
    std::cout << "hyperperiod = " << (sc.taskset.empty() ? 0 : hyperperiod(sc.taskset)) << "\n";
    std::cout << "horizon = " << effective_horizon(sc) << "\n";
    for (const auto& v : verdicts) {
        std::cout << "p" << v.proc << ".tasks = " << v.n_tasks << "\n";
        std::cout << "p" << v.proc << ".utilization = " << format_ratio(v.utilization) << "\n";
        std::cout << "p" << v.proc << ".ll_bound = "
                  << (v.n_tasks ? format_ratio(ll_bound(v.n_tasks)) : std::string("n/a")) << "\n";
        std::cout << "p" << v.proc << ".rm = " << to_string(v.rm) << "\n";
        std::cout << "p" << v.proc << ".edf = " << (v.edf ? "yes" : "no") << "\n";
    }
    return kOk;
}

struct BatchOpts {
    std::string scenario_dir;
    std::string scenario;
    std::string sweep;
    Tick ct_wcet = 0;
    std::optional<Tick> ct_window;
    std::size_t gen_n = 0;
    double gen_u = 0.5;
    std::string gen_periods = "10:100";
    std::uint32_t procs = 1;
    std::string mode = "edf";
    std::uint32_t reps = 1;
    unsigned threads = 0;
};

int cmd_batch(const RunOpts& o, const BatchOpts& b) {
    BatchSpec spec;
    spec.repetitions = b.reps;
    spec.seed = o.seed.value_or(0);
    spec.out_dir = o.out.empty() ? default_out() : fs::path(o.out);
    spec.format = *parse_trace_format(o.format);
    spec.threads = b.threads;
    if (!b.scenario_dir.empty()) {
        std::error_code ec;
        fs::directory_iterator it(b.scenario_dir, ec);
        if (ec) throw IoError(b.scenario_dir, ec.message());
        for (const auto& entry : it) {
            if (entry.path().extension() == ".scenario") spec.scenario_files.push_back(entry.path());
        }
        std::sort(spec.scenario_files.begin(), spec.scenario_files.end());
    }
    if (!b.sweep.empty()) {
        if (o.scenario.empty()) throw CLI::ValidationError("--sweep", "needs --scenario");
        if (b.ct_wcet == 0) throw CLI::ValidationError("--sweep", "needs --ct-wcet");
        ArrivalSweep s;
        s.base = load_scenario(o.scenario);
        s.arrivals = parse_range(b.sweep);
        s.wcet = b.ct_wcet;
        s.window = b.ct_window;
        spec.sweep = std::move(s);
    } else if (!o.scenario.empty()) {
        spec.scenario_files.push_back(o.scenario);
    }
    if (b.gen_n > 0) {
        GeneratedRuns g;
        g.gen.n = b.gen_n;
        g.gen.target_u = b.gen_u;
        apply_periods(g.gen, b.gen_periods);
        g.procs = b.procs;
        g.mode = *parse_sched_mode(b.mode);
        if (b.ct_wcet > 0) g.ct_wcet = b.ct_wcet;
        spec.generated = g;
    }
    auto result = run_batch(spec);
    std::cout << "runs = " << result.rows.size() + result.failures.size() << "\n";
    std::cout << "ok = " << result.rows.size() << "\n";
    std::cout << "failed = " << result.failures.size() << "\n";
    std::cout << "aggregate = " << (spec.out_dir / "aggregate.csv").string() << "\n";
    for (const auto& f : result.failures) std::cerr << "run " << f.run << " (" << f.scenario << "): " << f.error << "\n";
    return kOk;
}

struct GenOpts {
    std::size_t n = 4;
    double u = 0.5;
    std::string periods = "10:100";
    std::uint32_t procs = 1;
    std::string mode = "edf";
    double rm_share = 0;
    std::string name = "generated";
};

int cmd_generate(const RunOpts& o, const GenOpts& g) {
    GeneratorSpec spec;
    spec.n = g.n;
    spec.target_u = g.u;
    apply_periods(spec, g.periods);
    spec.rm_share = g.rm_share;
    Scenario sc;
    sc.name = g.name;
    sc.seed = o.seed.value_or(0);
    sc.mode = *parse_sched_mode(g.mode);
    sc.processors = g.procs;
    sc.taskset = generate_taskset(spec, sc.seed);
    if (o.until) sc.horizon = *o.until;
    const std::string text = format_scenario(sc);
    if (o.out.empty()) {
        std::cout << text;
    } else {
        write_file(o.out, text);
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tick-driven real-time scheduling simulator with critical-task super scheduler"};
    app.require_subcommand(1);

    RunOpts o;
    BatchOpts b;
    GenOpts g;
    auto format_check = CLI::IsMember({"jsonl", "csv"});
    auto report_check = CLI::IsMember({"text", "json"});
    auto mode_check = CLI::IsMember({"edf", "rm", "hybrid"});

    auto* run = app.add_subcommand("run", "simulate a scenario and write trace, Gantt data and report");
    run->add_option("--scenario", o.scenario, "scenario file")->required();
    run->add_option("--out", o.out, "output directory (default $SUPERSCHED_OUT_DIR or ./out)");
    run->add_option("--format", o.format, "trace format")->check(format_check);
    run->add_option("--report", o.report, "report format")->check(report_check);
    run->add_option("--seed", o.seed, "override the scenario seed");
    run->add_option("--until", o.until, "override the horizon (ticks)")->check(CLI::PositiveNumber);

    auto* analyze_cmd = app.add_subcommand("analyze", "schedulability verdicts without simulating");
    analyze_cmd->add_option("--scenario", o.scenario, "scenario file")->required();
    analyze_cmd->add_option("--report", o.report, "report format")->check(report_check);
    analyze_cmd->add_option("--seed", o.seed, "override the scenario seed");

    auto* batch = app.add_subcommand("batch", "run many scenarios and write an aggregate CSV");
    batch->add_option("--scenario-dir", b.scenario_dir, "directory of .scenario files");
    batch->add_option("--scenario", o.scenario, "single scenario (base of --sweep)");
    batch->add_option("--sweep", b.sweep, "critical arrival ticks lo:hi:step");
    batch->add_option("--ct-wcet", b.ct_wcet, "critical task wcet for --sweep or generated runs");
    batch->add_option("--ct-window", b.ct_window, "critical task relative deadline (default 2*wcet)");
    batch->add_option("--gen-n", b.gen_n, "generate runs with this many tasks each");
    batch->add_option("--gen-u", b.gen_u, "generated total utilization");
    batch->add_option("--gen-periods", b.gen_periods, "generated periods: range lo:hi or list a,b,c");
    batch->add_option("--procs", b.procs, "primary processors for generated runs");
    batch->add_option("--mode", b.mode, "scheduling mode for generated runs")->check(mode_check);
    batch->add_option("--reps", b.reps, "repetitions per source")->check(CLI::PositiveNumber);
    batch->add_option("--jobs", b.threads, "worker threads (0 = all cores)");
    batch->add_option("--out", o.out, "output directory");
    batch->add_option("--format", o.format, "trace format")->check(format_check);
    batch->add_option("--seed", o.seed, "master seed");

    auto* gen = app.add_subcommand("generate", "write a random scenario");
    gen->add_option("--n", g.n, "number of tasks")->check(CLI::PositiveNumber);
    gen->add_option("--u", g.u, "target total utilization");
    gen->add_option("--periods", g.periods, "periods: range lo:hi or list a,b,c");
    gen->add_option("--procs", g.procs, "primary processors");
    gen->add_option("--mode", g.mode, "scheduling mode")->check(mode_check);
    gen->add_option("--rm-share", g.rm_share, "fraction of tasks in the RM region");
    gen->add_option("--name", g.name, "scenario name");
    gen->add_option("--seed", o.seed, "generator seed");
    gen->add_option("--until", o.until, "horizon to record in the scenario");
    gen->add_option("--out", o.out, "scenario file to write (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalid;
    }

    try {
        if (*run) return cmd_run(o);
        if (*analyze_cmd) return cmd_analyze(o);
        if (*batch) return cmd_batch(o, b);
        if (*gen) return cmd_generate(o, g);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& i : e.issues()) std::cerr << "  " << i << "\n";
        return kInvalid;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::overflow_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    }
    return kOk;
}
