#pragma once

#include <supersched/sched_policies.hpp>
#include <supersched/task_model.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace supersched {

enum class SchedMode : std::uint8_t { EDF, RM, Hybrid };
enum class MissPolicy : std::uint8_t { Discard, Demote };

std::string_view to_string(SchedMode mode);
std::string_view to_string(MissPolicy policy);
std::optional<SchedMode> parse_sched_mode(std::string_view text);
std::optional<MissPolicy> parse_miss_policy(std::string_view text);

struct FaultSpec {
    ProcId proc = 0;
    Tick tick = 0;

    auto operator<=>(const FaultSpec&) const = default;
};

// One entry of a backup slot's coverage: a single job ("J<task>.<j>") or,
// with no index, whichever job of the task is live when its primary fails.
struct SlotCover {
    TaskId task = 0;
    std::optional<std::uint32_t> index;

    bool covers(const JobId& job) const {
        return !job.critical && job.owner == task && (!index || *index == job.index);
    }
    std::string str() const;

    auto operator<=>(const SlotCover&) const = default;
};

struct BackupSlotSpec {
    ProcId backup_proc = 0;
    Tick start = 0;
    Tick end = 0;
    std::vector<SlotCover> covers;

    bool operator==(const BackupSlotSpec&) const = default;
};

// Complete simulation input. Processors 0..processors-1 are primaries,
// followed by backup_count backups.
struct Scenario {
    std::string name = "unnamed";
    SchedMode mode = SchedMode::EDF;
    TaskSet taskset;
    std::map<TaskId, ProcId> placement;
    std::uint32_t processors = 1;
    std::uint32_t backup_count = 0;
    ServerConfig servers;
    std::map<ProcId, ServerConfig> server_overrides;
    std::vector<CriticalTask> critical_tasks;
    std::vector<FaultSpec> faults;
    std::vector<BackupSlotSpec> backup_slots;
    MissPolicy miss_policy = MissPolicy::Discard;
    Tick ctx_cost = 0;
    std::optional<Tick> horizon;
    std::uint64_t seed = 0;
    bool super_scheduler = true;

    // Loader diagnostics (defaults filled, capacity warnings). Not part of equality.
    std::vector<std::string> notes;

    std::uint32_t total_processors() const { return processors + backup_count; }
    bool is_backup(ProcId p) const { return p >= processors && p < total_processors(); }
    const ServerConfig& servers_for(ProcId p) const;

    bool operator==(const Scenario& o) const;
};

// Every violation of every contained invariant.
std::vector<std::string> validate(const Scenario& sc);

// Default horizon: hyperperiod, doubled when critical tasks are injected.
Tick effective_horizon(const Scenario& sc);

// Task -> primary processor. Explicit placements are kept; the rest go
// first-fit (task order, capacity 1.0) and fall back to the least loaded.
std::map<TaskId, ProcId> resolve_placement(const Scenario& sc);

// Capacity warnings that do not block a run.
std::vector<std::string> capacity_warnings(const Scenario& sc);

} // namespace supersched
