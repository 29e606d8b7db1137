#include <supersched/trace.hpp>

#include <algorithm>
#include <array>
#include <charconv>

namespace supersched {

namespace {

constexpr std::array<std::string_view, 11> kKindNames = {
    "Release", "Fault", "BackupActivate", "Alter", "Reassign", "Preempt",
    "Dispatch", "ServerReplenish", "Complete", "Miss", "Discard",
};

constexpr std::string_view kDeadlinePrefix = "deadline=";

} // namespace

std::string_view to_string(EventKind kind) {
    return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == text) return static_cast<EventKind>(i);
    }
    return std::nullopt;
}

void Trace::record(TraceEvent ev) {
    auto later = [](const TraceEvent& a, const TraceEvent& b) {
        return a.tick < b.tick || (a.tick == b.tick && a.kind < b.kind);
    };
    // Nearly all events arrive in order; scan back from the end.
    auto pos = events_.end();
    while (pos != events_.begin() && later(ev, *(pos - 1))) {
        --pos;
    }
    events_.insert(pos, std::move(ev));
}

std::string release_detail(Tick abs_deadline) {
    return std::string(kDeadlinePrefix) + std::to_string(abs_deadline);
}

std::optional<Tick> release_deadline(const TraceEvent& ev) {
    if (ev.kind != EventKind::Release || !ev.detail.starts_with(kDeadlinePrefix)) return std::nullopt;
    std::string_view rest = std::string_view(ev.detail).substr(kDeadlinePrefix.size());
    Tick v = 0;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
    if (ec != std::errc{}) return std::nullopt;
    return v;
}

} // namespace supersched
