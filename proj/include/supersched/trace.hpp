#pragma once

#include <supersched/types.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace supersched {

// Declaration order is the fixed intra-tick order of the trace.
enum class EventKind : std::uint8_t {
    Release,
    Fault,
    BackupActivate,
    Alter,
    Reassign,
    Preempt,
    Dispatch,
    ServerReplenish,
    Complete,
    Miss,
    Discard,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

// Events that carry no job use this sentinel proc/job.
inline constexpr ProcId kNoProc = static_cast<ProcId>(-1);

struct TraceEvent {
    Tick tick = 0;
    ProcId proc = kNoProc;
    EventKind kind = EventKind::Release;
    std::optional<JobId> job;
    std::string detail;

    bool operator==(const TraceEvent&) const = default;
};

// Append-only event log kept in (tick, kind) order; events with equal tick
// and kind keep their insertion order.
class Trace {
public:
    void record(TraceEvent ev);

    const std::vector<TraceEvent>& events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }
    bool empty() const noexcept { return events_.empty(); }
    auto begin() const { return events_.begin(); }
    auto end() const { return events_.end(); }

    bool operator==(const Trace&) const = default;

private:
    std::vector<TraceEvent> events_;
};

// Release events carry "deadline=<abs>" so metrics can be computed from the
// trace alone.
std::string release_detail(Tick abs_deadline);
std::optional<Tick> release_deadline(const TraceEvent& ev);

} // namespace supersched
