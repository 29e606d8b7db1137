#pragma once

#include <supersched/task_model.hpp>
#include <supersched/trace.hpp>

#include <map>
#include <optional>
#include <span>
#include <string>

namespace supersched {

// Liu-Layland rate-monotonic utilization bound n(2^(1/n) - 1).
double ll_bound(std::size_t n);

enum class Verdict : std::uint8_t { Yes, Unknown };

std::string_view to_string(Verdict v);

// Sufficient RM test: Yes when U <= ll_bound(n). Never answers "no".
Verdict rm_schedulable(const TaskSet& ts);

// U <= 1, boundary included.
bool edf_feasible(const TaskSet& ts);

// Periodic demand bound over [0, window): jobs whose absolute deadline is
// within the window.
Tick demand_bound(const TaskSet& ts, Tick window);

// Demand in the window (periodic demand bound plus critical wcets) exceeds
// procs * window. No online scheduler can then keep every deadline, and its
// competitive factor under overload is at most 0.25.
bool is_overloaded(const TaskSet& ts, std::span<const CriticalTask> cts, Tick window, std::uint32_t procs);

inline constexpr double kOverloadCompetitiveFactor = 0.25;
inline constexpr double kStabilityThreshold = 0.7;

struct RunMetrics {
    std::uint64_t n_total = 0;      // ordinary job instances released
    std::uint64_t miss_n = 0;       // ordinary jobs that missed
    std::uint64_t waited_tx = 0;    // ordinary jobs postponed by a critical arrival
    std::optional<double> success_before_x;
    std::optional<double> success_after_y;
    double guarantee_ratio = 1.0;
};

double miss_rate(const Trace& trace);
double guarantee_ratio(const Trace& trace);

struct SuccessRates {
    std::optional<double> x;
    std::optional<double> y;
};

// X: guarantee ratio over jobs with deadline <= first critical arrival.
// Y: over the rest, critical tasks included. Without critical arrivals X is
// the overall ratio and Y is empty.
SuccessRates success_rates(const Trace& trace);

RunMetrics compute_metrics(const Trace& trace);

enum class StabilityForm : std::uint8_t { Raw, Normalized };

struct Stability {
    double value = 0;
    bool stable = false;
};

// Raw: waited_tx - miss_n / n_total, as printed. Normalized: success rate
// (n_total - miss_n) / n_total. Stable iff value > 0.7, decided exactly.
Stability stability(const RunMetrics& m, StabilityForm form = StabilityForm::Normalized);

// Ordinary jobs that missed, per task id.
std::map<TaskId, std::uint64_t> per_task_misses(const Trace& trace);

} // namespace supersched
