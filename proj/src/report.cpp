#include <supersched/report.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace supersched {

using json = nlohmann::ordered_json;

std::string format_ratio(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

namespace {

// Rounded to the six decimals used in text output so both forms agree.
double r6(double x) {
    return std::round(x * 1e6) / 1e6;
}

} // namespace

std::vector<ProcVerdict> analyze(const Scenario& sc) {
    const auto placement = resolve_placement(sc);
    std::vector<ProcVerdict> out;
    for (ProcId p = 0; p < sc.processors; ++p) {
        TaskSet local;
        TaskSet rm_region;
        for (const auto& t : sc.taskset.tasks) {
            if (placement.at(t.id) != p) continue;
            local.tasks.push_back(t);
            if (sc.mode != SchedMode::Hybrid || t.region == Region::FixedRM) rm_region.tasks.push_back(t);
        }
        ProcVerdict v;
        v.proc = p;
        v.n_tasks = local.size();
        v.utilization = total_utilization(local);
        v.rm = rm_schedulable(rm_region);
        v.edf = edf_feasible(local);
        out.push_back(v);
    }
    return out;
}

std::optional<bool> critical_met(const Trace& trace) {
    std::set<JobId> released, completed, missed;
    for (const auto& ev : trace) {
        if (!ev.job || !ev.job->critical) continue;
        if (ev.kind == EventKind::Release) released.insert(*ev.job);
        if (ev.kind == EventKind::Complete) completed.insert(*ev.job);
        if (ev.kind == EventKind::Miss) missed.insert(*ev.job);
    }
    if (released.empty()) return std::nullopt;
    for (const auto& id : released) {
        if (!completed.contains(id) || missed.contains(id)) return false;
    }
    return true;
}

RunReport make_report(const Scenario& sc, const Trace& trace, std::string trace_path) {
    RunReport r;
    r.scenario = sc.name;
    r.seed = sc.seed;
    r.mode = std::string(to_string(sc.mode));
    r.procs = sc.processors;
    r.n_tasks = sc.taskset.size();
    r.utilization = total_utilization(sc.taskset);
    r.metrics = compute_metrics(trace);
    r.miss_rate = miss_rate(trace);
    if (r.metrics.n_total > 0) {
        r.stability_normalized = stability(r.metrics, StabilityForm::Normalized);
        r.stability_raw = stability(r.metrics, StabilityForm::Raw);
    }
    if (!sc.critical_tasks.empty()) r.ct_met = critical_met(trace).value_or(false);
    r.verdicts = analyze(sc);
    r.per_task_misses = per_task_misses(trace);
    r.notes = sc.notes;
    r.trace_path = std::move(trace_path);
    return r;
}

std::string report_text(const RunReport& r) {
    std::ostringstream o;
    auto opt = [](const std::optional<double>& x) { return x ? format_ratio(*x) : std::string("n/a"); };
    o << "scenario = " << r.scenario << "\n";
    o << "seed = " << r.seed << "\n";
    o << "mode = " << r.mode << "\n";
    o << "processors = " << r.procs << "\n";
    o << "tasks = " << r.n_tasks << "\n";
    o << "utilization = " << format_ratio(r.utilization) << "\n";
    o << "jobs = " << r.metrics.n_total << "\n";
    o << "misses = " << r.metrics.miss_n << "\n";
    o << "waited = " << r.metrics.waited_tx << "\n";
    o << "miss_rate = " << format_ratio(r.miss_rate) << "\n";
    o << "guarantee_ratio = " << format_ratio(r.metrics.guarantee_ratio) << "\n";
    o << "success_before = " << opt(r.metrics.success_before_x) << "\n";
    o << "success_after = " << opt(r.metrics.success_after_y) << "\n";
    if (r.stability_normalized) {
        o << "stability = " << format_ratio(r.stability_normalized->value) << "\n";
        o << "stable = " << (r.stability_normalized->stable ? "true" : "false") << "\n";
        o << "stability_raw = " << format_ratio(r.stability_raw->value) << "\n";
        o << "stable_raw = " << (r.stability_raw->stable ? "true" : "false") << "\n";
    } else {
        o << "stability = n/a\nstable = n/a\nstability_raw = n/a\nstable_raw = n/a\n";
    }
    o << "ct_met = " << (r.ct_met ? (*r.ct_met ? "yes" : "no") : "n/a") << "\n";
    for (const auto& v : r.verdicts) {
        o << "p" << v.proc << ".utilization = " << format_ratio(v.utilization) << "\n";
        o << "p" << v.proc << ".rm = " << to_string(v.rm) << "\n";
        o << "p" << v.proc << ".edf = " << (v.edf ? "yes" : "no") << "\n";
    }
    for (const auto& [task, n] : r.per_task_misses) o << "misses.T" << task << " = " << n << "\n";
    if (!r.trace_path.empty()) o << "trace = " << r.trace_path << "\n";
    return o.str();
}

std::string report_json(const RunReport& r) {
    auto opt = [](const std::optional<double>& x) { return x ? json(r6(*x)) : json(nullptr); };
    json j;
    j["scenario"] = r.scenario;
    j["seed"] = r.seed;
    j["mode"] = r.mode;
    j["processors"] = r.procs;
    j["tasks"] = r.n_tasks;
    j["utilization"] = r6(r.utilization);
    j["metrics"] = {
        {"jobs", r.metrics.n_total},
        {"misses", r.metrics.miss_n},
        {"waited", r.metrics.waited_tx},
        {"miss_rate", r6(r.miss_rate)},
        {"guarantee_ratio", r6(r.metrics.guarantee_ratio)},
        {"success_before", opt(r.metrics.success_before_x)},
        {"success_after", opt(r.metrics.success_after_y)},
    };
    if (r.stability_normalized) {
        j["stability"] = {
            {"normalized", {{"value", r6(r.stability_normalized->value)}, {"stable", r.stability_normalized->stable}}},
            {"raw", {{"value", r6(r.stability_raw->value)}, {"stable", r.stability_raw->stable}}},
        };
    } else {
        j["stability"] = nullptr;
    }
    j["ct_met"] = r.ct_met ? json(*r.ct_met) : json(nullptr);
    json verdicts = json::array();
    for (const auto& v : r.verdicts) {
        verdicts.push_back({{"proc", v.proc},
                            {"tasks", v.n_tasks},
                            {"utilization", r6(v.utilization)},
                            {"rm", to_string(v.rm)},
                            {"edf", v.edf}});
    }
    j["verdicts"] = verdicts;
    json misses = json::object();
    for (const auto& [task, n] : r.per_task_misses) misses["T" + std::to_string(task)] = n;
    j["per_task_misses"] = misses;
    j["notes"] = r.notes;
    j["trace"] = r.trace_path;
    return j.dump(2) + "\n";
}

} // namespace supersched
