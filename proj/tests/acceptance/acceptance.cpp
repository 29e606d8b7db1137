// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Tolerances and sample sizes are pinned below.

#include "../test_support.hpp"

#include <supersched/analysis_metrics.hpp>
#include <supersched/batch.hpp>
#include <supersched/generator.hpp>
#include <supersched/report.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

using namespace supersched;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

constexpr int kEdfSets = 500;
constexpr double kEdfBudgetSeconds = 30.0;
constexpr int kRmSets = 500;
constexpr int kP1Scenarios = 1000;
constexpr int kZeroOverheadScenarios = 100;
constexpr double kExhaustiveBudgetSeconds = 60.0;
// exact-match tolerance for the stability boundary
constexpr double kStabilityTolerance = 0.0;

const fs::path kScenarios = fs::path(SUPERSCHED_SOURCE_DIR) / "scenarios";

struct Outcome {
    bool ok = true;
    std::ostringstream why;

    template <class T>
    Outcome& fail(const T& msg) {
        if (ok) why << msg;
        ok = false;
        return *this;
    }
};

int failures = 0;

void report(int n, const std::string& title, const Outcome& o, const std::string& summary) {
    std::printf("%s criterion %d: %s (%s)\n", o.ok ? "PASS" : "FAIL", n, title.c_str(),
                o.ok ? summary.c_str() : o.why.str().c_str());
    std::fflush(stdout);
    failures += o.ok ? 0 : 1;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

JobId J(TaskId t, std::uint32_t i = 1) {
    return JobId::periodic(t, i);
}

Task task(TaskId id, Tick c, Tick t, std::optional<Tick> d = std::nullopt) {
    Task x;
    x.id = id;
    x.wcet = c;
    x.period = t;
    x.deadline = d.value_or(t);
    return x;
}

// Divisors of 1200 up to 50 keep every hyperperiod at or below 1200.
const std::vector<Tick> kPeriods = {2, 3, 4, 5, 6, 8, 10, 12, 15, 16, 20, 24, 25, 30, 40, 48, 50};

void criterion_1() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1001);
    int sets = 0;
    while (sets < kEdfSets) {
        GeneratorSpec g;
        g.n = 1 + rng() % 6;
        g.periods = kPeriods;
        g.target_u = 0.05 + (rng() % 951) / 1000.0;
        TaskSet ts;
        try {
            ts = generate_taskset(g, rng());
        } catch (const ConfigError&) {
            continue;
        }
        if (compare_utilization(ts, 1, 1) > 0) continue;
        Scenario sc;
        sc.taskset = ts;
        sc.super_scheduler = false;
        sc.horizon = hyperperiod(ts);
        const auto tr = run(sc);
        if (miss_rate(tr) != 0.0) o.fail("miss in set " + std::to_string(sets) + ": " + format_scenario(sc));
        ++sets;
    }
    const double secs = seconds_since(t0);
    if (secs >= kEdfBudgetSeconds) o.fail("took " + std::to_string(secs) + " s");
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d sets, U <= 1, n <= 6, periods <= 50, all miss-free, %.2f s", sets, secs);
    report(1, "EDF meets every deadline when U <= 1", o, buf);
}

void criterion_2() {
    Outcome o;
    std::mt19937_64 rng(2002);
    int sets = 0;
    while (sets < kRmSets) {
        GeneratorSpec g;
        g.n = 1 + rng() % 6;
        g.periods = kPeriods;
        g.target_u = 0.05 + (rng() % 950) / 1000.0 * ll_bound(g.n);
        TaskSet ts;
        try {
            ts = generate_taskset(g, rng());
        } catch (const ConfigError&) {
            continue;
        }
        if (rm_schedulable(ts) != Verdict::Yes) continue;
        Scenario sc;
        sc.mode = SchedMode::RM;
        sc.taskset = ts;
        sc.horizon = hyperperiod(ts);
        if (count(run(sc), EventKind::Miss) != 0) o.fail("RM miss under the bound: " + format_scenario(sc));
        ++sets;
    }
    // constructed: above the bound, still EDF-feasible
    Scenario pair;
    pair.taskset.tasks = {task(1, 2, 5), task(2, 4, 7)};
    pair.horizon = hyperperiod(pair.taskset);
    const double u = total_utilization(pair.taskset);
    if (!(u > ll_bound(2) && u <= 1.0)) o.fail("constructed set is not in (bound, 1]");
    pair.mode = SchedMode::RM;
    const auto rm_misses = count(run(pair), EventKind::Miss);
    pair.mode = SchedMode::EDF;
    const auto edf_misses = count(run(pair), EventKind::Miss);
    if (rm_misses == 0) o.fail("constructed set has no RM miss");
    if (edf_misses != 0) o.fail("constructed set misses under EDF");
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d sets under the bound miss-free; {(2,5),(4,7)} U=%.4f: RM %zu miss, EDF %zu", sets,
                  u, rm_misses, edf_misses);
    report(2, "RM is safe under the utilization bound", o, buf);
}

Scenario random_multiproc(std::mt19937_64& rng, bool with_ct) {
    Scenario sc;
    sc.processors = 1 + static_cast<std::uint32_t>(rng() % 4);
    const int mode = static_cast<int>(rng() % 3);
    sc.mode = mode == 0 ? SchedMode::EDF : mode == 1 ? SchedMode::RM : SchedMode::Hybrid;
    GeneratorSpec g;
    g.n = 1 + rng() % (2 * sc.processors + 1);
    g.periods = {5, 10, 20, 25, 50, 100};
    g.target_u = std::min(0.2 + (rng() % 90) / 100.0 * sc.processors, 0.9 * static_cast<double>(g.n));
    g.tolerance = 0.1;
    g.rm_share = sc.mode == SchedMode::Hybrid ? 0.5 : 0.0;
    sc.taskset = generate_taskset(g, rng());
    if (sc.mode == SchedMode::RM) {
        const auto placement = resolve_placement(sc);
        for (ProcId p = 0; p < sc.processors; ++p) {
            TaskSet local;
            for (const auto& [id, at] : placement) {
                if (at == p) local.tasks.push_back(*sc.taskset.find(id));
            }
            if (!local.empty() && rm_schedulable(local) != Verdict::Yes) sc.mode = SchedMode::EDF;
        }
    }
    if (sc.mode == SchedMode::Hybrid) {
        const double a = 0.3 + (rng() % 5) / 10.0;
        sc.servers = ServerConfig{a, 1.0 - a, 10};
    }
    sc.miss_policy = rng() % 2 ? MissPolicy::Discard : MissPolicy::Demote;
    if (with_ct) {
        const Tick h = hyperperiod(sc.taskset);
        const Tick w = 1 + rng() % 40;
        sc.critical_tasks.push_back(make_critical(1, w, rng() % (2 * h), w + rng() % 30));
    }
    return sc;
}

void criterion_3() {
    Outcome o;
    std::mt19937_64 rng(3003);
    int runs = 0, postponed = 0, reassigned = 0;
    for (; runs < kP1Scenarios; ++runs) {
        Scenario sc;
        try {
            sc = random_multiproc(rng, true);
        } catch (const ConfigError&) {
            --runs;
            continue;
        }
        const auto& ct = sc.critical_tasks.front();
        if (ct.wcet > ct.abs_deadline - ct.arrival) o.fail("generator produced an infeasible CT");
        const auto tr = run(sc);
        const JobId id = ct.job_id();
        if (count(tr, EventKind::Complete, id) != 1 || count(tr, EventKind::Miss, id) != 0) {
            o.fail("CT missed in: " + format_scenario(sc));
        }
        const auto* a = first(tr, EventKind::Alter, id);
        if (a && a->detail.find("postponed=-") == std::string::npos) ++postponed;
        reassigned += std::any_of(tr.begin(), tr.end(), [](const TraceEvent& e) {
            return e.kind == EventKind::Reassign && e.detail.rfind("from ", 0) == 0;
        });
    }
    report(3, "a feasible critical task always completes", o,
           std::to_string(runs) + " scenarios, 1-4 processors, " + std::to_string(postponed) + " with a postponed job, " +
               std::to_string(reassigned) + " moved to another processor");
}

void criterion_4() {
    Outcome o;
    std::mt19937_64 rng(4004);
    int runs = 0, with_fault = 0;
    while (runs < kZeroOverheadScenarios) {
        Scenario on;
        try {
            on = random_multiproc(rng, false);
        } catch (const ConfigError&) {
            continue;
        }
        if (on.processors > 1 && rng() % 3 == 0) {
            on.backup_count = 1;
            on.faults = {{static_cast<ProcId>(rng() % on.processors), rng() % 50}};
            on.backup_slots = {{on.processors, 0, 100, {{on.taskset.tasks.front().id, std::nullopt}}}};
            ++with_fault;
        }
        Scenario off = on;
        off.super_scheduler = false;
        const auto a = run(on);
        const auto b = run(off);
        if (trace_to_jsonl(a) != trace_to_jsonl(b) || trace_to_csv(a) != trace_to_csv(b)) {
            o.fail("traces differ for: " + format_scenario(on));
        }
        ++runs;
    }
    report(4, "suspended super scheduler adds nothing to the trace", o,
           std::to_string(runs) + " CT-free scenarios byte-identical, " + std::to_string(with_fault) + " with a fault");
}

// Ten single-job tasks sharing deadline 10: seven of C=1, then three of
// C=`tail`. EDF runs them in id order.
Scenario ten_jobs(int ones, Tick tail) {
    Scenario sc;
    sc.horizon = 10;
    sc.super_scheduler = false;
    for (int i = 1; i <= 10; ++i) sc.taskset.tasks.push_back(task(static_cast<TaskId>(i), i <= ones ? 1 : tail, 10));
    return sc;
}

void criterion_5() {
    Outcome o;
    std::string summary;
    // by hand: 7 + 4 > 10, so jobs 8-10 miss; 8 + 3 > 10, so jobs 9-10 miss
    for (auto [ones, tail, misses, value, stable] :
         {std::tuple{7, Tick{4}, 3ULL, 0.7, false}, std::tuple{8, Tick{3}, 2ULL, 0.8, true}}) {
        const auto sc = ten_jobs(ones, tail);
        const auto tr = run(sc);
        const auto r = make_report(sc, tr);
        if (r.metrics.n_total != 10) o.fail("expected 10 jobs, got " + std::to_string(r.metrics.n_total));
        if (r.metrics.miss_n != misses) o.fail("expected " + std::to_string(misses) + " misses");
        const auto& s = *r.stability_normalized;
        if (std::abs(s.value - value) > kStabilityTolerance) o.fail("value " + format_ratio(s.value));
        if (s.stable != stable) o.fail("stable flag wrong at " + format_ratio(s.value));
        const auto text = report_text(r);
        const std::string want = "stability = " + format_ratio(value) + "\nstable = " + (stable ? "true" : "false") + "\n";
        if (text.find(want) == std::string::npos) o.fail("report lacks: " + want);
        if (!summary.empty()) summary += "; ";
        summary += std::to_string(misses) + " of 10 missed -> " + format_ratio(s.value) + " stable=" + (s.stable ? "true" : "false");
    }
    report(5, "stability boundary is strict at 0.7", o, summary);
}

// Four single-job tasks and one critical task that together overrun [0, 15].
Scenario overload_scenario() {
    return parse_scenario(R"(
name = overload_victim
horizon = 40
[task 1]
C = 3
T = 40
D = 10
[task 2]
C = 3
T = 40
D = 12
[task 3]
C = 3
T = 40
D = 14
[task 4]
C = 3
T = 40
D = 15
[critical 1]
wcet = 4
arrival = 2
deadline = 6
)");
}

std::size_t deadlines_met(const Trace& tr) {
    std::size_t met = 0;
    std::map<JobId, Tick> deadline;
    for (const auto& e : tr) {
        if (e.kind == EventKind::Release && e.job) deadline[*e.job] = *release_deadline(e);
        if (e.kind == EventKind::Complete && e.job && e.tick <= deadline.at(*e.job)) ++met;
    }
    return met;
}

void criterion_6() {
    Outcome o;
    const auto sc = overload_scenario();
    if (!is_overloaded(sc.taskset, sc.critical_tasks, 15, 1)) o.fail("scenario is not overloaded in [0, 15]");

    const auto tr = run(sc);
    std::vector<JobId> missed;
    for (const auto& e : tr) {
        if (e.kind == EventKind::Miss && e.job) missed.push_back(*e.job);
    }
    // lowest effective priority under EDF: the latest absolute deadline
    JobId lowest = J(1);
    Tick latest = 0;
    for (const auto& t : sc.taskset.tasks) {
        if (t.deadline > latest) {
            latest = t.deadline;
            lowest = J(t.id);
        }
    }
    if (missed != std::vector<JobId>{lowest}) o.fail("victims differ from {" + lowest.str() + "}");
    const auto* d = first(tr, EventKind::Discard, lowest);
    if (!d) o.fail("victim was not discarded");
    const std::size_t engine_met = deadlines_met(tr);

    // every (tick, live job) single-discard alternative
    std::size_t best = 0, tried = 0;
    for (Tick t = 0; t <= 15; ++t) {
        Simulator probe(sc);
        while (probe.state().now < t) probe.step();
        std::vector<JobId> live;
        for (const auto& j : probe.state().jobs) {
            if (!j.job.id.critical) live.push_back(j.job.id);
        }
        for (const auto& id : live) {
            Simulator alt(sc);
            while (alt.state().now < t) alt.step();
            alt.discard_job(id, "brute force");
            best = std::max(best, deadlines_met(alt.run()));
            ++tried;
        }
    }
    if (best > engine_met) o.fail("a single discard saves " + std::to_string(best) + " > " + std::to_string(engine_met));
    report(6, "overload sacrifices the lowest-priority job", o,
           "victim " + lowest.str() + ", " + std::to_string(engine_met) + " deadlines met; best of " +
               std::to_string(tried) + " single-discard alternatives meets " + std::to_string(best));
}

void criterion_7() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    // every multiset of up to three (C, T) tasks with T in {2..5}, 1 <= C <= T
    std::vector<std::pair<Tick, Tick>> kinds;
    for (Tick T = 2; T <= 5; ++T) {
        for (Tick C = 1; C <= T; ++C) kinds.push_back({C, T});
    }
    std::size_t sets = 0, ticks = 0, with_misses = 0;
    const std::size_t k = kinds.size();
    auto check = [&](std::vector<std::size_t> pick) {
        TaskSet ts;
        for (std::size_t i = 0; i < pick.size(); ++i) {
            ts.tasks.push_back(task(static_cast<TaskId>(i + 1), kinds[pick[i]].first, kinds[pick[i]].second));
        }
        const Tick h = hyperperiod(ts);
        if (h > 60) return;
        Scenario sc;
        sc.taskset = ts;
        sc.horizon = h;
        sc.super_scheduler = false;
        const auto tr = run(sc);
        if (occupancy(tr, 0, h) != reference_edf(ts, h)) o.fail("schedule differs: " + format_scenario(sc));
        with_misses += count(tr, EventKind::Miss) > 0;
        ++sets;
        ticks += h;
    };
    for (std::size_t a = 0; a < k; ++a) {
        check({a});
        for (std::size_t b = a; b < k; ++b) {
            check({a, b});
            for (std::size_t c = b; c < k; ++c) check({a, b, c});
        }
    }
    const double secs = seconds_since(t0);
    if (secs >= kExhaustiveBudgetSeconds) o.fail("took " + std::to_string(secs) + " s");
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu task sets, %zu ticks compared, %zu overloaded sets included, %.2f s", sets, ticks,
                  with_misses, secs);
    report(7, "engine matches an independent EDF reference", o, buf);
}

void criterion_8() {
    Outcome o;
    const auto single = run(load_scenario(kScenarios / "backup_single_fault.scenario"));
    const auto* c1 = first(single, EventKind::Complete, J(1));
    if (!first(single, EventKind::BackupActivate, J(1))) o.fail("(a) no backup activation");
    if (!c1 || c1->proc != 2) o.fail("(a) J1.1 did not complete on the backup");
    const auto* c2 = first(single, EventKind::Complete, J(2));
    if (!c2 || c2->proc != 1) o.fail("(a) J2.1 left its primary");

    const auto both = run(load_scenario(kScenarios / "backup_overload.scenario"));
    const std::size_t completed = count(both, EventKind::Complete, J(1)) + count(both, EventKind::Complete, J(2));
    if (completed != 1) o.fail("(b) " + std::to_string(completed) + " covered jobs completed");
    std::size_t taken = 0;
    for (const auto& e : both) taken += e.kind == EventKind::Discard && e.detail == "overloaded slot taken";
    if (taken != 1) o.fail("(b) expected one 'overloaded slot taken' discard");
    report(8, "one shared backup slot covers one fault, not two", o,
           "single fault: J1.1 completes on p2 at " + std::to_string(c1 ? c1->tick : 0) +
               "; double fault: one completes, one discarded as overloaded slot taken");
}

std::string batch_files(const fs::path& out, unsigned threads) {
    BatchSpec spec;
    for (const auto& e : fs::directory_iterator(kScenarios)) {
        if (e.path().extension() == ".scenario") spec.scenario_files.push_back(e.path());
    }
    std::sort(spec.scenario_files.begin(), spec.scenario_files.end());
    GeneratedRuns g;
    g.gen.n = 4;
    g.gen.target_u = 0.8;
    g.gen.periods = {10, 20, 25, 50, 100};
    g.procs = 2;
    g.ct_wcet = 8;
    spec.generated = g;
    spec.repetitions = 3;
    spec.seed = 9009;
    spec.out_dir = out;
    spec.threads = threads;
    run_batch(spec);
    std::string all;
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(out)) {
        if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) all += fs::relative(f, out).string() + "\n" + read_file(f);
    return all;
}

void criterion_9() {
    Outcome o;
    std::size_t scenarios = 0;
    for (const auto& e : fs::directory_iterator(kScenarios)) {
        if (e.path().extension() != ".scenario") continue;
        ++scenarios;
        auto once = [&] {
            const auto sc = load_scenario(e.path());
            const auto tr = run(sc);
            const auto r = make_report(sc, tr, "trace.jsonl");
            return trace_to_jsonl(tr) + trace_to_csv(tr) + gantt_csv(tr) + report_text(r) + report_json(r);
        };
        if (once() != once()) o.fail(e.path().filename().string() + " differs between runs");
    }
    const auto tmp = fs::temp_directory_path() / ("supersched-accept-" + std::to_string(std::random_device{}()));
    const auto a = batch_files(tmp / "a", 1);
    const auto b = batch_files(tmp / "b", 4);
    std::error_code ec;
    fs::remove_all(tmp, ec);
    if (a != b) o.fail("batch outputs differ between runs");
    report(9, "equal seeds give byte-identical outputs", o,
           std::to_string(scenarios) + " bundled scenarios twice; batch output trees identical at 1 and 4 threads");
}

void criterion_10() {
    Outcome o;
    const auto paper = load_scenario(kScenarios / "paper_fig3.scenario");
    bool warned = false;
    for (const auto& n : paper.notes) {
        warned |= n.find("utilization 7.67 exceeds capacity under (C,T,D) reading") != std::string::npos;
    }
    if (!warned) o.fail("paper_fig3.scenario loaded without the utilization warning");

    const auto sc = load_scenario(kScenarios / "fig3_corrected.scenario");
    const auto header = read_file(kScenarios / "fig3_corrected.scenario");
    if (header.rfind("#", 0) != 0) o.fail("corrected variant has no header comment");
    const auto tr = run(sc);
    const auto& ct = sc.critical_tasks.front();
    const auto* dispatch = first(tr, EventKind::Dispatch, ct.job_id());
    const auto* done = first(tr, EventKind::Complete, ct.job_id());
    const auto* alter = first(tr, EventKind::Alter, ct.job_id());
    if (!dispatch || dispatch->tick != ct.arrival) o.fail("CT not dispatched at its arrival");
    if (!done) o.fail("CT never completed");
    std::optional<JobId> victim;
    if (alter) {
        const auto pos = alter->detail.find("postponed=");
        victim = JobId::parse(alter->detail.substr(pos + 10, alter->detail.find(' ', pos) - pos - 10));
    }
    if (!victim) o.fail("no job was postponed");
    Tick resumed_at = 0, victim_done = 0, victim_deadline = 0;
    for (const auto& e : tr) {
        if (!victim || e.job != victim) continue;
        if (e.kind == EventKind::Dispatch && e.detail == "resume") resumed_at = e.tick;
        if (e.kind == EventKind::Complete) victim_done = e.tick;
        if (e.kind == EventKind::Release) victim_deadline = *release_deadline(e);
    }
    if (done && resumed_at != done->tick) o.fail("postponed job not resumed at CT completion");
    if (victim_done == 0 || victim_done > victim_deadline) o.fail("postponed job late");
    if (count(tr, EventKind::Miss) != 0) o.fail("corrected variant has misses");
    report(10, "four-task example packaging", o,
           "warning present; CT1 " + std::to_string(ct.arrival) + "->" + std::to_string(done ? done->tick : 0) + ", " +
               (victim ? victim->str() : "?") + " resumed at " + std::to_string(resumed_at) + ", done " +
               std::to_string(victim_done) + " <= " + std::to_string(victim_deadline));
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    return failures == 0 ? 0 : 1;
}
