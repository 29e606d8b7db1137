#include <supersched/trace_io.hpp>

#include <supersched/scenario_io.hpp>

#include <json.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>

namespace supersched {

using json = nlohmann::ordered_json;

std::string_view to_string(TraceFormat f) {
    return f == TraceFormat::Jsonl ? "jsonl" : "csv";
}

std::optional<TraceFormat> parse_trace_format(std::string_view text) {
    if (text == "jsonl") return TraceFormat::Jsonl;
    if (text == "csv") return TraceFormat::Csv;
    return std::nullopt;
}

std::string trace_to_jsonl(const Trace& trace) {
    std::string out;
    for (const auto& ev : trace) {
        json j;
        j["t"] = ev.tick;
        j["proc"] = ev.proc == kNoProc ? json(nullptr) : json(ev.proc);
        j["kind"] = to_string(ev.kind);
        j["id"] = ev.job ? json(ev.job->str()) : json(nullptr);
        j["detail"] = ev.detail;
        out += j.dump();
        out += '\n';
    }
    return out;
}

namespace {

std::string csv_cell(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string trace_to_csv(const Trace& trace) {
    std::string out = "t,proc,kind,id,detail\n";
    for (const auto& ev : trace) {
        out += std::to_string(ev.tick) + ",";
        if (ev.proc != kNoProc) out += std::to_string(ev.proc);
        out += ",";
        out += to_string(ev.kind);
        out += ",";
        if (ev.job) out += ev.job->str();
        out += "," + csv_cell(ev.detail) + "\n";
    }
    return out;
}

Trace parse_trace_jsonl(std::string_view text) {
    Trace trace;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        auto fail = [&](const std::string& why) {
            throw std::invalid_argument("trace line " + std::to_string(line_no) + ": " + why);
        };
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) fail("not a JSON object");
        TraceEvent ev;
        try {
            ev.tick = j.at("t").get<Tick>();
            ev.proc = j.at("proc").is_null() ? kNoProc : j.at("proc").get<ProcId>();
            auto kind = parse_event_kind(j.at("kind").get<std::string>());
            if (!kind) fail("unknown kind");
            ev.kind = *kind;
            if (!j.at("id").is_null()) {
                ev.job = JobId::parse(j.at("id").get<std::string>());
                if (!ev.job) fail("bad job id");
            }
            ev.detail = j.at("detail").get<std::string>();
        } catch (const json::exception& e) {
            fail(e.what());
        }
        trace.record(std::move(ev));
    }
    return trace;
}

void emit_trace(const Trace& trace, const std::filesystem::path& path, TraceFormat format) {
    write_file(path, format == TraceFormat::Jsonl ? trace_to_jsonl(trace) : trace_to_csv(trace));
}

std::vector<GanttSegment> gantt_segments(const Trace& trace) {
    std::vector<GanttSegment> raw;
    // proc -> open segment
    std::map<ProcId, GanttSegment> open;
    auto close = [&](ProcId p, Tick t, EventKind why) {
        auto it = open.find(p);
        if (it == open.end()) return;
        it->second.end = t;
        it->second.kind = std::string(to_string(why));
        if (it->second.end > it->second.start) raw.push_back(it->second);
        open.erase(it);
    };
    // Within a tick, segment ends are applied before new dispatches: a job that
    // completes at t and its successor dispatched at t share the boundary.
    const auto& events = trace.events();
    for (std::size_t i = 0; i < events.size();) {
        std::size_t j = i;
        while (j < events.size() && events[j].tick == events[i].tick) ++j;
        for (std::size_t k = i; k < j; ++k) {
            const auto& ev = events[k];
            switch (ev.kind) {
            case EventKind::Preempt:
            case EventKind::Complete:
            case EventKind::Discard:
                if (auto it = open.find(ev.proc); it != open.end() && ev.job && it->second.job == *ev.job) {
                    close(ev.proc, ev.tick, ev.kind);
                }
                break;
            case EventKind::Fault: close(ev.proc, ev.tick, ev.kind); break;
            default: break;
            }
        }
        for (std::size_t k = i; k < j; ++k) {
            const auto& ev = events[k];
            if (ev.kind != EventKind::Dispatch) continue;
            close(ev.proc, ev.tick, EventKind::Preempt);
            open[ev.proc] = GanttSegment{ev.proc, *ev.job, ev.tick, ev.tick, ""};
        }
        i = j;
    }
    Tick last = trace.empty() ? 0 : trace.events().back().tick;
    while (!open.empty()) close(open.begin()->first, last, EventKind::Discard);

    std::sort(raw.begin(), raw.end(), [](const GanttSegment& a, const GanttSegment& b) {
        return std::tie(a.proc, a.start) < std::tie(b.proc, b.start);
    });
    std::vector<GanttSegment> out;
    for (auto& s : raw) {
        if (!out.empty() && out.back().proc == s.proc && out.back().job == s.job && out.back().end == s.start) {
            out.back().end = s.end;
            out.back().kind = s.kind;
        } else {
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::string gantt_csv(const Trace& trace) {
    std::string out = "proc,job_or_ct,start,end,kind\n";
    for (const auto& s : gantt_segments(trace)) {
        out += "p" + std::to_string(s.proc) + "," + s.job.str() + "," + std::to_string(s.start) + "," +
               std::to_string(s.end) + "," + s.kind + "\n";
    }
    return out;
}

void emit_gantt(const Trace& trace, const std::filesystem::path& path) {
    write_file(path, gantt_csv(trace));
}

} // namespace supersched
