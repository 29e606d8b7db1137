#pragma once

#include <supersched/trace.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace supersched {

enum class TraceFormat : std::uint8_t { Jsonl, Csv };

std::string_view to_string(TraceFormat f);
std::optional<TraceFormat> parse_trace_format(std::string_view text);

// One object per line: {"t","proc","kind","id","detail"}. proc and id are
// null for events that carry none.
std::string trace_to_jsonl(const Trace& trace);
// Header "t,proc,kind,id,detail" then one row per event; empty cells for
// absent proc/id.
std::string trace_to_csv(const Trace& trace);
// Inverse of trace_to_jsonl. Throws std::invalid_argument naming the line.
Trace parse_trace_jsonl(std::string_view text);

void emit_trace(const Trace& trace, const std::filesystem::path& path, TraceFormat format);

// Maximal run of one job on one processor. `kind` is the event that ended it.
struct GanttSegment {
    ProcId proc = 0;
    JobId job;
    Tick start = 0;
    Tick end = 0;
    std::string kind;

    bool operator==(const GanttSegment&) const = default;
};

// Segments sorted by (proc, start); adjacent pieces of the same job merged.
std::vector<GanttSegment> gantt_segments(const Trace& trace);
std::string gantt_csv(const Trace& trace);
void emit_gantt(const Trace& trace, const std::filesystem::path& path);

} // namespace supersched
