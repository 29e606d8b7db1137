#pragma once

#include <supersched/scenario.hpp>
#include <supersched/sched_policies.hpp>
#include <supersched/super_scheduler.hpp>
#include <supersched/trace.hpp>

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace supersched {

enum class ProcRole : std::uint8_t { Primary, Backup };

struct Processor {
    ProcId id = 0;
    ProcRole role = ProcRole::Primary;
    std::optional<Tick> failed_at;
    std::optional<JobId> current;
    // Ranking installed by the last priority alteration on this processor.
    PriorityOrder local_order;

    ServerConfig servers;
    ServerBudgets budgets;
    std::optional<ServerKind> charging;
    // Context-switch ticks left before the current job makes progress.
    Tick switch_left = 0;
    std::optional<JobId> last_run;

    bool failed() const { return failed_at.has_value(); }
};

// How a job ranks beyond its scheduling policy, highest first.
//   Apex: the active critical task.
//   Resumed: postponed by a critical task and now resuming (LIFO).
//   Normal: regular policy (EDF, RM or the hybrid servers).
//   Migrated: reassigned job, runs only when nothing above is runnable.
//   Late: missed its deadline under demote-on-miss (FIFO).
enum class Standing : std::uint8_t { Apex, Resumed, Normal, Migrated, Late };

struct ActiveJob {
    Job job;
    Region region = Region::DynamicEDF;
    ProcId home = 0;
    ProcId proc = 0;
    Standing standing = Standing::Normal;
    // Order among Resumed, Migrated and Late jobs.
    std::uint64_t seq = 0;
    bool resume_pending = false;
};

struct BackupSlot {
    ProcId backup_proc = 0;
    Tick start = 0;
    Tick end = 0;
    std::vector<SlotCover> covers;
    std::optional<JobId> used_by;

    bool covers_job(const JobId& job) const;
};

struct SimState {
    Tick now = 0;
    std::vector<Processor> processors;
    // Non-terminal jobs only, ordered by JobId.
    std::vector<ActiveJob> jobs;
    std::deque<CriticalTask> critical_queue;
    std::vector<BackupSlot> slots;
    std::vector<FaultSpec> pending_faults;
    SuperState super;
    std::uint64_t next_seq = 0;

    ActiveJob* find(const JobId& id);
    const ActiveJob* find(const JobId& id) const;
};

// Deterministic tick-driven multiprocessor simulator. Value type: copies are
// independent simulations (reassignment admission runs on a copy).
class Simulator {
public:
    // Validates the scenario; throws ValidationError listing every violation.
    explicit Simulator(Scenario scenario);

    // Advances exactly one tick.
    void step();
    // Steps to the horizon, then drains jobs still in flight.
    const Trace& run();
    // Stepping this far drains everything; jobs left are discarded.
    Tick cutoff() const { return cutoff_; }
    Tick horizon() const { return horizon_; }

    // Schedules a crash-stop fault. Throws std::invalid_argument for an unknown
    // processor, a processor already failed or scheduled to fail, or a past tick.
    void inject_fault(ProcId proc, Tick at);
    // Moves a job off its failed processor onto a covering backup slot, or
    // discards it ("no backup" / "overloaded slot taken").
    void activate_backup(const JobId& job);
    // Offers each postponed job to the other live processors, first fit by id.
    void reassign_tasks(std::span<const JobId> displaced);
    // Drops a live job. Used by overload experiments.
    void discard_job(const JobId& job, std::string detail);

    const SimState& state() const noexcept { return state_; }
    const Trace& trace() const noexcept { return trace_; }
    const Scenario& scenario() const noexcept;

    // Hooks used by the super scheduler.
    SimState& mutable_state() noexcept { return state_; }
    void log(TraceEvent ev);
    // Job the processor would dispatch this tick with no critical override.
    std::optional<JobId> top_candidate(ProcId proc) const;
    // All runnable jobs on the processor, best first, `top_candidate` leading.
    PriorityOrder processor_order(ProcId proc) const;
    void admit_job(ActiveJob job);
    // Removes a job, logging Miss first when `missed`.
    void retire(const JobId& job, EventKind kind, std::string detail, bool missed = false);
    bool probing() const noexcept { return probe_; }
    // Tick stamped on events emitted by the current phase: `now` while
    // releasing and dispatching, `now + 1` for completions and misses.
    Tick stamp() const noexcept { return stamp_; }

private:
    struct Config;
    struct Pick {
        JobId job;
        std::optional<ServerKind> server;
    };
    struct ProbeTag {};

    Simulator(const Simulator& other, ProbeTag);

    void begin_tick();
    void finish_tick();

    void release_jobs();
    void replenish_servers();
    void apply_faults();
    void deliver_critical();
    void dispatch();
    void execute();
    void complete_jobs();
    void police_deadlines();
    void discard_remaining(std::string detail);

    std::optional<Pick> choose(const Processor& p, const Directive* directive) const;
    bool admits(const ActiveJob& job, ProcId target) const;

    std::shared_ptr<const Config> config_;
    SimState state_;
    Trace trace_;
    Tick horizon_ = 0;
    Tick cutoff_ = 0;
    bool probe_ = false;
    Tick stamp_ = 0;
};

// Runs a validated copy of the scenario to completion.
Trace run(const Scenario& scenario);

} // namespace supersched
