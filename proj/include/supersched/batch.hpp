#pragma once

#include <supersched/generator.hpp>
#include <supersched/report.hpp>
#include <supersched/scenario.hpp>
#include <supersched/trace_io.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace supersched {

// Random scenarios: one generated task set per repetition.
struct GeneratedRuns {
    GeneratorSpec gen;
    std::uint32_t procs = 1;
    SchedMode mode = SchedMode::EDF;
    // When set, one critical task of this wcet arrives at a random tick
    // before the hyperperiod, with the default window.
    std::optional<Tick> ct_wcet;
};

// One base scenario re-run with a single critical task moved across arrivals.
struct ArrivalSweep {
    Scenario base;
    std::vector<Tick> arrivals;
    Tick wcet = 1;
    // Relative deadline; defaults to 2*wcet.
    std::optional<Tick> window;
};

struct BatchSpec {
    std::vector<std::filesystem::path> scenario_files;
    std::optional<GeneratedRuns> generated;
    std::optional<ArrivalSweep> sweep;
    std::uint32_t repetitions = 1;
    std::uint64_t seed = 0;
    // Nothing is written when empty.
    std::filesystem::path out_dir;
    TraceFormat format = TraceFormat::Jsonl;
    // 0 = hardware concurrency.
    unsigned threads = 0;
};

struct BatchRow {
    std::size_t run = 0;
    std::string scenario;
    std::uint64_t seed = 0;
    double utilization = 0;
    std::size_t n_tasks = 0;
    std::uint32_t procs = 0;
    double miss_rate = 0;
    double guarantee_ratio = 0;
    std::optional<Stability> stability;
    std::optional<Stability> stability_raw;
    std::optional<bool> ct_met;
};

struct BatchFailure {
    std::size_t run = 0;
    std::string scenario;
    std::string error;
};

struct BatchResult {
    std::vector<BatchRow> rows;
    std::vector<BatchFailure> failures;
};

// Runs every (source, repetition) pair, in parallel. A failing run is recorded
// and the rest continue. With an output directory: runs/<run>-<name>/ holds
// each trace and report, then aggregate.csv and failures.csv are written once.
BatchResult run_batch(const BatchSpec& spec);

std::string aggregate_csv(const std::vector<BatchRow>& rows);
std::string failures_csv(const std::vector<BatchFailure>& failures);

} // namespace supersched
