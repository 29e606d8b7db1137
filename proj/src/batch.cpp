#include <supersched/batch.hpp>

#include <supersched/scenario_io.hpp>
#include <supersched/sim_engine.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <functional>
#include <thread>
#include <variant>

namespace supersched {

namespace {

struct Work {
    std::string label;
    std::function<Scenario()> make;
};

std::string run_dir_name(std::size_t run, const std::string& name) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04zu-", run);
    std::string out = buf;
    for (char c : name) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out;
}

std::vector<Work> plan(const BatchSpec& spec) {
    std::vector<Work> work;
    for (const auto& path : spec.scenario_files) {
        for (std::uint32_t rep = 0; rep < spec.repetitions; ++rep) {
            work.push_back({path.stem().string(), [path] { return load_scenario(path); }});
        }
    }
    if (spec.generated) {
        const GeneratedRuns g = *spec.generated;
        for (std::uint32_t rep = 0; rep < spec.repetitions; ++rep) {
            const std::size_t index = work.size();
            const std::uint64_t seed = derive_seed(spec.seed, index);
            work.push_back({"gen" + std::to_string(rep), [g, seed, rep] {
                                Scenario sc;
                                sc.name = "gen" + std::to_string(rep);
                                sc.seed = seed;
                                sc.mode = g.mode;
                                sc.processors = g.procs;
                                sc.taskset = generate_taskset(g.gen, seed);
                                if (g.ct_wcet) {
                                    Rng rng(seed ^ 0x5bd1e995ULL);
                                    const Tick h = hyperperiod(sc.taskset);
                                    sc.critical_tasks.push_back(make_critical(1, *g.ct_wcet, rng.between(0, h - 1)));
                                }
                                if (auto issues = validate(sc); !issues.empty()) throw ValidationError(issues);
                                return sc;
                            }});
        }
    }
    if (spec.sweep) {
        const ArrivalSweep s = *spec.sweep;
        for (Tick arrival : s.arrivals) {
            for (std::uint32_t rep = 0; rep < spec.repetitions; ++rep) {
                const std::string name = s.base.name + "-at" + std::to_string(arrival);
                work.push_back({name, [s, arrival, name] {
                                    Scenario sc = s.base;
                                    sc.name = name;
                                    sc.critical_tasks = {make_critical(1, s.wcet, arrival, s.window)};
                                    return sc;
                                }});
            }
        }
    }
    return work;
}

using Outcome = std::variant<BatchRow, BatchFailure>;

Outcome execute(const BatchSpec& spec, std::size_t run, const Work& w) {
    try {
        Scenario sc = w.make();
        Simulator sim(sc);
        const Trace& trace = sim.run();
        BatchRow row;
        row.run = run;
        row.scenario = sc.name;
        row.seed = sc.seed;
        std::string trace_rel;
        if (!spec.out_dir.empty()) {
            const auto dir = std::filesystem::path("runs") / run_dir_name(run, sc.name);
            trace_rel = (dir / ("trace." + std::string(to_string(spec.format)))).generic_string();
            emit_trace(trace, spec.out_dir / trace_rel, spec.format);
            emit_gantt(trace, spec.out_dir / dir / "gantt.csv");
        }
        RunReport report = make_report(sc, trace, trace_rel);
        if (!spec.out_dir.empty()) {
            write_file(spec.out_dir / "runs" / run_dir_name(run, sc.name) / "report.json", report_json(report));
        }
        row.utilization = report.utilization;
        row.n_tasks = report.n_tasks;
        row.procs = report.procs;
        row.miss_rate = report.miss_rate;
        row.guarantee_ratio = report.metrics.guarantee_ratio;
        row.stability = report.stability_normalized;
        row.stability_raw = report.stability_raw;
        row.ct_met = report.ct_met;
        return row;
    } catch (const ValidationError& e) {
        std::string msg = e.what();
        for (const auto& i : e.issues()) msg += "; " + i;
        return BatchFailure{run, w.label, msg};
    } catch (const std::exception& e) {
        return BatchFailure{run, w.label, e.what()};
    }
}

std::string csv_text(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string aggregate_csv(const std::vector<BatchRow>& rows) {
    std::string out =
        "run,scenario,seed,utilization,n_tasks,procs,miss_rate,guarantee_ratio,stability,stable,stability_raw,stable_raw,ct_met\n";
    auto stab = [](const std::optional<Stability>& s) {
        if (!s) return std::string(",");
        return format_ratio(s->value) + "," + (s->stable ? "true" : "false");
    };
    for (const auto& r : rows) {
        out += std::to_string(r.run) + "," + csv_text(r.scenario) + "," + std::to_string(r.seed) + "," +
               format_ratio(r.utilization) + "," + std::to_string(r.n_tasks) + "," + std::to_string(r.procs) + "," +
               format_ratio(r.miss_rate) + "," + format_ratio(r.guarantee_ratio) + "," + stab(r.stability) + "," +
               stab(r.stability_raw) + "," + (r.ct_met ? (*r.ct_met ? "yes" : "no") : "") + "\n";
    }
    return out;
}

std::string failures_csv(const std::vector<BatchFailure>& failures) {
    std::string out = "run,scenario,error\n";
    for (const auto& f : failures) {
        out += std::to_string(f.run) + "," + csv_text(f.scenario) + "," + csv_text(f.error) + "\n";
    }
    return out;
}

BatchResult run_batch(const BatchSpec& spec) {
    const auto work = plan(spec);
    std::vector<std::optional<Outcome>> outcomes(work.size());
    unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(work.size(), 1)));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < work.size(); i = next++) {
            outcomes[i] = execute(spec, i, work[i]);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    BatchResult result;
    for (auto& o : outcomes) {
        if (auto* row = std::get_if<BatchRow>(&*o)) result.rows.push_back(std::move(*row));
        else result.failures.push_back(std::get<BatchFailure>(std::move(*o)));
    }
    if (!spec.out_dir.empty()) {
        write_file(spec.out_dir / "aggregate.csv", aggregate_csv(result.rows));
        write_file(spec.out_dir / "failures.csv", failures_csv(result.failures));
    }
    return result;
}

} // namespace supersched
