#pragma once

#include <supersched/task_model.hpp>

#include <deque>
#include <map>
#include <optional>
#include <vector>

namespace supersched {

class Simulator;
struct SimState;

// Precomputed fixed-priority schedule for one major cycle: one frame per
// tick, each naming the job that runs (or idle).
struct ScheduleTable {
    struct Entry {
        std::size_t frame = 0;
        std::optional<JobId> job;

        bool operator==(const Entry&) const = default;
    };

    std::vector<Entry> entries;
    std::size_t cursor = 0;

    std::size_t n_entries() const { return entries.size(); }
    std::optional<JobId> current() const;
    // K = (K + 1) mod N
    void advance();
};

// Offline RM simulation of `ts` over one hyperperiod on a single processor.
// Throws ConfigError when the set fails the Liu-Layland admission test.
ScheduleTable build_schedule_table(const TaskSet& ts);

enum class SuperMode : std::uint8_t { Suspended, Active };

struct SuperState {
    SuperMode mode = SuperMode::Suspended;
    std::optional<CriticalTask> active_ct;
    std::optional<ProcId> active_proc;
    // Jobs displaced by the active critical task, most recent last.
    std::vector<JobId> postponed_stack;
    std::map<ProcId, ScheduleTable> tables;
};

// What step() must honour this tick.
struct Directive {
    bool pass_through = true;
    std::optional<ProcId> proc;
    std::optional<JobId> forced;

    bool operator==(const Directive&) const = default;
};

Directive tick_hook(const SimState& state, const SuperState& super);

// Live primary whose top candidate has the latest deadline (idle counts as
// later than any deadline); ties go to the lowest id.
std::optional<ProcId> choose_critical_target(const Simulator& sim);

// Priority alteration on `ct`'s arrival: pick the processor whose running job
// has the latest deadline, put `ct` on top there, postpone the displaced job
// and offer it to the other processors.
void on_critical_arrival(Simulator& sim, const CriticalTask& ct);

// Active critical task finished (or was dropped): suspend and resume the
// postponed jobs in LIFO order on their home processors.
void on_critical_complete(Simulator& sim);

// Activates queued critical tasks while none is active, and re-places the
// active one if its processor failed.
void service_critical_queue(Simulator& sim);

} // namespace supersched
