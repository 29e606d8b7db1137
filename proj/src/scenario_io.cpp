#include <supersched/scenario_io.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace supersched {

ParseError::ParseError(std::string origin, std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(origin + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line), column_(column) {}

IoError::IoError(const std::filesystem::path& path, const std::string& what)
    : std::runtime_error(path.string() + ": " + what), path_(path) {}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError(path, "read failed");
    return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError(path.parent_path(), ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError(path, "write failed");
}

namespace {

struct Value {
    std::string text;
    std::size_t line = 0;
    std::size_t col = 0;
};

struct Section {
    std::string kind;
    std::optional<Value> arg;
    std::size_t line = 0;
    std::map<std::string, Value> keys;
};

const std::map<std::string, std::set<std::string>, std::less<>> kKeys = {
    {"", {"name", "mode", "processors", "backups", "miss_policy", "strict", "ctx_cost", "horizon", "seed",
          "super_scheduler"}},
    {"servers", {"alpha", "beta", "quantum"}},
    {"task", {"C", "T", "D", "region", "proc"}},
    {"critical", {"wcet", "arrival", "deadline"}},
    {"fault", {"proc", "tick"}},
    {"backup_slot", {"proc", "start", "end", "covers"}},
};

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r';
}

// [first, last) of s with surrounding blanks removed.
std::pair<std::size_t, std::size_t> trim_range(std::string_view s, std::size_t first, std::size_t last) {
    while (first < last && is_space(s[first])) ++first;
    while (last > first && is_space(s[last - 1])) --last;
    return {first, last};
}

class Parser {
public:
    Parser(std::string_view text, std::string_view origin) : text_(text), origin_(origin) {}

    std::vector<Section> run() {
        std::vector<Section> out(1);
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text_.size()) {
            std::size_t eol = text_.find('\n', pos);
            if (eol == std::string_view::npos) eol = text_.size();
            ++line_no;
            line(text_.substr(pos, eol - pos), line_no, out);
            pos = eol + 1;
        }
        return out;
    }

    [[noreturn]] void fail(std::size_t line, std::size_t col, const std::string& msg) const {
        throw ParseError(std::string(origin_), line, col, msg);
    }

private:
    void line(std::string_view s, std::size_t n, std::vector<Section>& out) {
        std::size_t end = s.find('#');
        if (end == std::string_view::npos) end = s.size();
        auto [a, b] = trim_range(s, 0, end);
        if (a == b) return;
        if (s[a] == '[') {
            if (s[b - 1] != ']') fail(n, b + 1, "expected ']' to close section header");
            auto [ka, kb] = trim_range(s, a + 1, b - 1);
            std::size_t split = ka;
            while (split < kb && !is_space(s[split])) ++split;
            Section sec;
            sec.kind = std::string(s.substr(ka, split - ka));
            sec.line = n;
            if (sec.kind.empty() || !kKeys.contains(sec.kind)) {
                fail(n, ka + 1, "unknown section '" + sec.kind + "'");
            }
            auto [va, vb] = trim_range(s, split, kb);
            if (va < vb) sec.arg = Value{std::string(s.substr(va, vb - va)), n, va + 1};
            out.push_back(std::move(sec));
            return;
        }
        std::size_t eq = s.find('=', a);
        if (eq == std::string_view::npos || eq >= b) fail(n, a + 1, "expected 'key = value'");
        auto [ka, kb] = trim_range(s, a, eq);
        auto [va, vb] = trim_range(s, eq + 1, b);
        if (ka == kb) fail(n, a + 1, "missing key before '='");
        std::string key(s.substr(ka, kb - ka));
        Section& sec = out.back();
        const auto& allowed = kKeys.find(sec.kind)->second;
        if (!allowed.contains(key)) {
            fail(n, ka + 1, "unknown key '" + key + "'" + (sec.kind.empty() ? "" : " in [" + sec.kind + "]"));
        }
        if (sec.keys.contains(key)) fail(n, ka + 1, "duplicate key '" + key + "'");
        if (va == vb) fail(n, eq + 2, "missing value for '" + key + "'");
        sec.keys.emplace(key, Value{std::string(s.substr(va, vb - va)), n, va + 1});
    }

    std::string_view text_;
    std::string_view origin_;
};

class Reader {
public:
    explicit Reader(const Parser& p) : p_(p) {}

    std::uint64_t u64(const Value& v) const {
        std::uint64_t out = 0;
        auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
        if (ec != std::errc{} || ptr != v.text.data() + v.text.size()) {
            p_.fail(v.line, v.col, "expected a non-negative integer, got '" + v.text + "'");
        }
        return out;
    }

    std::uint32_t u32(const Value& v) const {
        auto x = u64(v);
        if (x > UINT32_MAX) p_.fail(v.line, v.col, "value out of range: " + v.text);
        return static_cast<std::uint32_t>(x);
    }

    double real(const Value& v) const {
        double out = 0;
        auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
        if (ec != std::errc{} || ptr != v.text.data() + v.text.size()) {
            p_.fail(v.line, v.col, "expected a number, got '" + v.text + "'");
        }
        return out;
    }

    bool boolean(const Value& v) const {
        if (v.text == "true" || v.text == "yes" || v.text == "on") return true;
        if (v.text == "false" || v.text == "no" || v.text == "off") return false;
        p_.fail(v.line, v.col, "expected true or false, got '" + v.text + "'");
    }

    template <class T, class F>
    T parsed(const Value& v, F fn, const char* what) const {
        auto r = fn(v.text);
        if (!r) p_.fail(v.line, v.col, std::string("unknown ") + what + " '" + v.text + "'");
        return *r;
    }

    std::vector<SlotCover> covers(const Value& v) const {
        std::vector<SlotCover> out;
        std::string_view s = v.text;
        std::size_t pos = 0;
        while (pos <= s.size()) {
            std::size_t comma = s.find(',', pos);
            if (comma == std::string_view::npos) comma = s.size();
            auto [a, b] = trim_range(s, pos, comma);
            std::string_view item = s.substr(a, b - a);
            SlotCover c;
            bool ok = false;
            if (item.size() > 1 && item[0] == 'T') {
                auto [ptr, ec] = std::from_chars(item.data() + 1, item.data() + item.size(), c.task);
                ok = ec == std::errc{} && ptr == item.data() + item.size();
            } else if (auto id = JobId::parse(item); id && !id->critical) {
                c.task = id->owner;
                c.index = id->index;
                ok = true;
            }
            if (!ok) p_.fail(v.line, v.col + a, "expected a job (J<task>.<n>) or task (T<task>), got '" + std::string(item) + "'");
            out.push_back(c);
            pos = comma + 1;
        }
        return out;
    }

private:
    const Parser& p_;
};

std::string format_real(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

} // namespace

Scenario parse_scenario(std::string_view text, std::string_view origin) {
    Parser parser(text, origin);
    const auto sections = parser.run();
    Reader rd(parser);
    Scenario sc;
    std::vector<std::string> issues;
    std::vector<std::string> notes;

    auto get = [](const Section& s, const char* key) -> const Value* {
        auto it = s.keys.find(key);
        return it == s.keys.end() ? nullptr : &it->second;
    };
    const Section& head = sections.front();
    if (auto v = get(head, "name")) sc.name = v->text;
    if (auto v = get(head, "mode")) sc.mode = rd.parsed<SchedMode>(*v, parse_sched_mode, "mode");
    if (auto v = get(head, "processors")) sc.processors = rd.u32(*v);
    if (auto v = get(head, "backups")) sc.backup_count = rd.u32(*v);
    if (auto v = get(head, "miss_policy")) sc.miss_policy = rd.parsed<MissPolicy>(*v, parse_miss_policy, "miss policy");
    if (auto v = get(head, "strict")) sc.taskset.strict_mode = rd.boolean(*v);
    if (auto v = get(head, "ctx_cost")) sc.ctx_cost = rd.u64(*v);
    if (auto v = get(head, "horizon")) sc.horizon = rd.u64(*v);
    if (auto v = get(head, "seed")) sc.seed = rd.u64(*v);
    if (auto v = get(head, "super_scheduler")) sc.super_scheduler = rd.boolean(*v);

    for (std::size_t i = 1; i < sections.size(); ++i) {
        const Section& s = sections[i];
        const std::string where = "[" + s.kind + "] at line " + std::to_string(s.line);
        auto need_arg = [&] {
            if (!s.arg) parser.fail(s.line, 2, "[" + s.kind + "] needs an id, e.g. [" + s.kind + " 1]");
            return rd.u32(*s.arg);
        };
        auto no_arg = [&] {
            if (s.arg) parser.fail(s.arg->line, s.arg->col, "[" + s.kind + "] takes no id");
        };
        auto required = [&](const char* key, const std::string& who) -> const Value* {
            const Value* v = get(s, key);
            if (!v) issues.push_back(who + ": missing " + key);
            return v;
        };

        if (s.kind == "servers") {
            ServerConfig cfg;
            if (auto v = get(s, "alpha")) cfg.alpha = rd.real(*v);
            if (auto v = get(s, "beta")) cfg.beta = rd.real(*v);
            if (auto v = get(s, "quantum")) cfg.quantum = rd.u64(*v);
            if (s.arg) {
                const auto p = rd.u32(*s.arg);
                if (!sc.server_overrides.emplace(p, cfg).second) {
                    parser.fail(s.arg->line, s.arg->col, "servers for processor " + s.arg->text + " given twice");
                }
            } else {
                sc.servers = cfg;
            }
        } else if (s.kind == "task") {
            Task t;
            t.id = need_arg();
            const std::string who = "task " + std::to_string(t.id);
            auto c = required("C", who);
            auto p = required("T", who);
            if (c) t.wcet = rd.u64(*c);
            if (p) t.period = rd.u64(*p);
            if (auto d = get(s, "D")) {
                t.deadline = rd.u64(*d);
            } else {
                t.deadline = t.period;
                if (p) notes.push_back(who + ": D defaulted to T = " + std::to_string(t.period));
            }
            if (auto r = get(s, "region")) t.region = rd.parsed<Region>(*r, parse_region, "region");
            if (auto pr = get(s, "proc")) sc.placement[t.id] = rd.u32(*pr);
            if (c && p) sc.taskset.tasks.push_back(t);
        } else if (s.kind == "critical") {
            const auto id = need_arg();
            const std::string who = "critical " + std::to_string(id);
            auto w = required("wcet", who);
            auto a = required("arrival", who);
            if (!w || !a) continue;
            std::optional<Tick> rel;
            if (auto d = get(s, "deadline")) rel = rd.u64(*d);
            auto ct = make_critical(id, rd.u64(*w), rd.u64(*a), rel);
            if (!rel) {
                notes.push_back(who + ": deadline defaulted to 2*wcet = " + std::to_string(ct.abs_deadline - ct.arrival) +
                                " (absolute " + std::to_string(ct.abs_deadline) + ")");
            }
            sc.critical_tasks.push_back(ct);
        } else if (s.kind == "fault") {
            no_arg();
            auto p = required("proc", "fault " + where);
            auto t = required("tick", "fault " + where);
            if (p && t) sc.faults.push_back({rd.u32(*p), rd.u64(*t)});
        } else if (s.kind == "backup_slot") {
            no_arg();
            const std::string who = "backup slot " + where;
            auto p = required("proc", who);
            auto e = required("end", who);
            auto c = required("covers", who);
            if (!p || !e || !c) continue;
            BackupSlotSpec slot;
            slot.backup_proc = rd.u32(*p);
            slot.end = rd.u64(*e);
            if (auto st = get(s, "start")) slot.start = rd.u64(*st);
            slot.covers = rd.covers(*c);
            sc.backup_slots.push_back(std::move(slot));
        }
    }

    for (auto& i : validate(sc)) issues.push_back(std::move(i));
    if (!issues.empty()) throw ValidationError(std::move(issues));

    if (!sc.horizon) {
        notes.push_back("horizon defaulted to " + std::to_string(effective_horizon(sc)) +
                        (sc.critical_tasks.empty() ? " (hyperperiod)" : " (twice the hyperperiod)"));
    }
    for (auto& w : capacity_warnings(sc)) notes.push_back("warning: " + w);
    sc.notes = std::move(notes);
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    return parse_scenario(read_file(path), path.string());
}

std::string format_scenario(const Scenario& sc) {
    std::ostringstream o;
    o << "name = " << sc.name << "\n";
    o << "mode = " << to_string(sc.mode) << "\n";
    o << "processors = " << sc.processors << "\n";
    o << "backups = " << sc.backup_count << "\n";
    o << "miss_policy = " << to_string(sc.miss_policy) << "\n";
    o << "strict = " << (sc.taskset.strict_mode ? "true" : "false") << "\n";
    o << "ctx_cost = " << sc.ctx_cost << "\n";
    if (sc.horizon) o << "horizon = " << *sc.horizon << "\n";
    o << "seed = " << sc.seed << "\n";
    o << "super_scheduler = " << (sc.super_scheduler ? "true" : "false") << "\n";

    auto servers = [&](const ServerConfig& c) {
        o << "alpha = " << format_real(c.alpha) << "\n";
        o << "beta = " << format_real(c.beta) << "\n";
        o << "quantum = " << c.quantum << "\n";
    };
    o << "\n[servers]\n";
    servers(sc.servers);
    for (const auto& [p, c] : sc.server_overrides) {
        o << "\n[servers " << p << "]\n";
        servers(c);
    }
    for (const auto& t : sc.taskset.tasks) {
        o << "\n[task " << t.id << "]\n";
        o << "C = " << t.wcet << "\nT = " << t.period << "\nD = " << t.deadline << "\n";
        o << "region = " << to_string(t.region) << "\n";
        if (auto it = sc.placement.find(t.id); it != sc.placement.end()) o << "proc = " << it->second << "\n";
    }
    for (const auto& ct : sc.critical_tasks) {
        o << "\n[critical " << ct.id << "]\n";
        o << "wcet = " << ct.wcet << "\narrival = " << ct.arrival << "\ndeadline = " << (ct.abs_deadline - ct.arrival)
          << "\n";
    }
    for (const auto& f : sc.faults) {
        o << "\n[fault]\nproc = " << f.proc << "\ntick = " << f.tick << "\n";
    }
    for (const auto& s : sc.backup_slots) {
        o << "\n[backup_slot]\nproc = " << s.backup_proc << "\nstart = " << s.start << "\nend = " << s.end
          << "\ncovers = ";
        for (std::size_t i = 0; i < s.covers.size(); ++i) o << (i ? ", " : "") << s.covers[i].str();
        o << "\n";
    }
    return o.str();
}

void save_scenario(const Scenario& sc, const std::filesystem::path& path) {
    write_file(path, format_scenario(sc));
}

} // namespace supersched
