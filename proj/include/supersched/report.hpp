#pragma once

#include <supersched/analysis_metrics.hpp>
#include <supersched/scenario.hpp>
#include <supersched/trace.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace supersched {

struct ProcVerdict {
    ProcId proc = 0;
    std::size_t n_tasks = 0;
    double utilization = 0;
    Verdict rm = Verdict::Yes;
    bool edf = true;
};

struct RunReport {
    std::string scenario;
    std::uint64_t seed = 0;
    std::string mode;
    std::uint32_t procs = 0;
    std::size_t n_tasks = 0;
    double utilization = 0;

    RunMetrics metrics;
    double miss_rate = 0;
    // Absent when no ordinary job was released.
    std::optional<Stability> stability_normalized;
    std::optional<Stability> stability_raw;
    // Absent when the scenario injects no critical task.
    std::optional<bool> ct_met;

    std::vector<ProcVerdict> verdicts;
    std::map<TaskId, std::uint64_t> per_task_misses;
    std::vector<std::string> notes;
    // Relative to the output directory.
    std::string trace_path;
};

// Verdicts per primary processor over the tasks placed there.
std::vector<ProcVerdict> analyze(const Scenario& sc);

RunReport make_report(const Scenario& sc, const Trace& trace, std::string trace_path = "");

// One "key = value" per line; ratios with six decimals.
std::string report_text(const RunReport& r);
std::string report_json(const RunReport& r);

// Every critical task completed with no Miss logged.
std::optional<bool> critical_met(const Trace& trace);

std::string format_ratio(double x);

} // namespace supersched
