#pragma once

#include <supersched/task_model.hpp>

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace supersched {

// Sizes of the two constant-utilization servers on one processor and the
// replenishment quantum. alpha sizes the EDF server, beta the RM server.
struct ServerConfig {
    double alpha = 0.5;
    double beta = 0.5;
    Tick quantum = 10;

    auto operator<=>(const ServerConfig&) const = default;
};

std::vector<std::string> validate(const ServerConfig& cfg);

enum class ServerKind : std::uint8_t { RM, EDF };

std::string_view to_string(ServerKind kind);

// Budget granted every `quantum` ticks to a server of size u: floor(q*u).
// Throws ConfigError when that is below one tick.
Tick server_budget(const ServerConfig& cfg, double u);

struct ServerBudgets {
    Tick rm = 0;
    Tick edf = 0;
};

// Rate-monotonic priorities: shorter period first, ties by ascending id.
// The result is a permutation of 0..n-1.
std::map<TaskId, int> rm_assign(const TaskSet& ts);

// Earliest absolute deadline; ties by earlier release then ascending id.
std::optional<JobId> edf_pick(std::span<const Job> ready, Tick now);

// Lowest effective_priority number; ties by earlier release then ascending id.
std::optional<JobId> rm_pick(std::span<const Job> ready);

struct HybridChoice {
    JobId job;
    ServerKind server;

    auto operator<=>(const HybridChoice&) const = default;
};

// Selects between the RM and EDF servers of one processor. Each server with
// budget left nominates its own best job; the earlier absolute deadline wins
// and the RM candidate wins ties.
std::optional<HybridChoice> hybrid_pick(std::span<const Job> rm_ready, std::span<const Job> edf_ready,
                                        ServerBudgets budgets, Tick now);

struct PriorityEntry {
    JobId job;
    int priority = 0;
    bool late = false;

    auto operator<=>(const PriorityEntry&) const = default;
};

// Jobs in strictly decreasing precedence; entries[i].priority == i.
struct PriorityOrder {
    std::vector<PriorityEntry> entries;

    static PriorityOrder from_jobs(std::span<const JobId> jobs);

    std::vector<JobId> jobs() const;
    std::optional<std::size_t> rank_of(const JobId& job) const;
    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }
    void renumber();

    bool operator==(const PriorityOrder&) const = default;
};

struct AlterResult {
    PriorityOrder order;
    std::vector<JobId> postponed;
};

// Priority alteration on critical arrival: the critical job takes rank 0 and
// the running job drops directly beneath it as Postponed. When a critical job
// already holds rank 0 the newcomer queues behind it and nothing is postponed.
// `running`, if given, must be the top-ranked ordinary job.
AlterResult priority_alter(const PriorityOrder& order, const CriticalTask& ct, std::optional<JobId> running);

// Moves `late` below every non-late job. Late jobs keep FIFO order of lateness,
// so the newly late job goes last.
PriorityOrder overrun_demote(const PriorityOrder& order, const JobId& late);

} // namespace supersched
