#pragma once

#include <supersched/types.hpp>

#include <optional>
#include <string>
#include <vector>

namespace supersched {

// Hybrid partition membership: fixed-priority (rate monotonic) or
// dynamic-priority (earliest deadline first).
enum class Region : std::uint8_t { FixedRM, DynamicEDF };

std::string_view to_string(Region region);
std::optional<Region> parse_region(std::string_view text);

// Periodic task (C, T, D). Jobs are released synchronously at (j-1)*T.
struct Task {
    TaskId id = 0;
    Tick wcet = 1;
    Tick period = 1;
    Tick deadline = 1;
    Region region = Region::DynamicEDF;
    // Lower number = higher priority. Only meaningful for FixedRM after rm_assign.
    int base_priority = 0;

    double utilization() const { return static_cast<double>(wcet) / static_cast<double>(period); }
};

enum class JobState : std::uint8_t { Ready, Running, Postponed, Completed, Missed, Discarded };

std::string_view to_string(JobState state);

inline bool is_terminal(JobState s) {
    return s == JobState::Completed || s == JobState::Missed || s == JobState::Discarded;
}

struct Job {
    JobId id;
    Tick release = 0;
    Tick abs_deadline = 0;
    Tick wcet = 0;
    Tick remaining = 0;
    int effective_priority = 0;
    JobState state = JobState::Ready;
};

// One-shot catastrophic task injected at an arbitrary tick.
struct CriticalTask {
    std::uint32_t id = 0;
    Tick wcet = 1;
    Tick arrival = 0;
    Tick abs_deadline = 2;

    JobId job_id() const { return JobId::critical_task(id); }
};

// Relative deadline used when a scenario gives a critical task none.
inline Tick default_critical_window(Tick wcet) { return 2 * wcet; }

CriticalTask make_critical(std::uint32_t id, Tick wcet, Tick arrival,
                           std::optional<Tick> relative_deadline = std::nullopt);

struct TaskSet {
    std::vector<Task> tasks;
    // Enforce implicit deadlines (D = T).
    bool strict_mode = false;

    bool empty() const { return tasks.empty(); }
    std::size_t size() const { return tasks.size(); }
    const Task* find(TaskId id) const;
};

// Every invariant violation in the set, in task order. Empty when valid.
std::vector<std::string> validate(const TaskSet& ts);
std::vector<std::string> validate(const CriticalTask& ct);

// Sum of C/T. Computed from an exact rational when it fits in 64 bits.
double total_utilization(const TaskSet& ts);

// Exact comparison of the total utilization against num/den.
// Returns <0, 0, >0 like a three-way compare.
int compare_utilization(const TaskSet& ts, std::uint64_t num, std::uint64_t den);

// LCM of all periods. Throws std::overflow_error instead of wrapping and
// std::invalid_argument on an empty set.
Tick hyperperiod(const TaskSet& ts);
Tick lcm_checked(Tick a, Tick b);

// Jobs with t0 <= release < t1.
std::vector<Job> jobs_in_window(const Task& task, Tick t0, Tick t1);

} // namespace supersched
