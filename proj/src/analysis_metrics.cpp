#include <supersched/analysis_metrics.hpp>

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace supersched {

double ll_bound(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("ll_bound needs at least one task");
    }
    const double k = static_cast<double>(n);
    return k * std::expm1(std::log(2.0) / k);
}

std::string_view to_string(Verdict v) {
    return v == Verdict::Yes ? "yes" : "unknown";
}

Verdict rm_schedulable(const TaskSet& ts) {
    if (ts.empty()) return Verdict::Yes;
    return total_utilization(ts) <= ll_bound(ts.size()) ? Verdict::Yes : Verdict::Unknown;
}

bool edf_feasible(const TaskSet& ts) {
    return compare_utilization(ts, 1, 1) <= 0;
}

Tick demand_bound(const TaskSet& ts, Tick window) {
    Tick demand = 0;
    for (const auto& t : ts.tasks) {
        if (window < t.deadline || t.period == 0) continue;
        Tick jobs = (window - t.deadline) / t.period + 1;
        Tick add = 0;
        if (__builtin_mul_overflow(jobs, t.wcet, &add) || __builtin_add_overflow(demand, add, &demand)) {
            return std::numeric_limits<Tick>::max();
        }
    }
    return demand;
}

bool is_overloaded(const TaskSet& ts, std::span<const CriticalTask> cts, Tick window, std::uint32_t procs) {
    if (window == 0) {
        throw std::invalid_argument("overload window must be positive");
    }
    unsigned __int128 demand = demand_bound(ts, window);
    for (const auto& ct : cts) demand += ct.wcet;
    return demand > static_cast<unsigned __int128>(procs) * window;
}

namespace {

struct JobOutcome {
    std::optional<Tick> deadline;
    std::optional<Tick> completed;
    bool missed = false;
};

// Per-job release/completion/miss facts, in JobId order.
std::map<JobId, JobOutcome> outcomes(const Trace& trace) {
    std::map<JobId, JobOutcome> out;
    for (const auto& ev : trace) {
        if (!ev.job) continue;
        switch (ev.kind) {
        case EventKind::Release: out[*ev.job].deadline = release_deadline(ev); break;
        case EventKind::Complete: out[*ev.job].completed = ev.tick; break;
        case EventKind::Miss: out[*ev.job].missed = true; break;
        default: break;
        }
    }
    return out;
}

bool met(const JobOutcome& o) {
    return o.deadline && o.completed && *o.completed <= *o.deadline && !o.missed;
}

std::optional<Tick> first_critical_arrival(const Trace& trace) {
    for (const auto& ev : trace) {
        if (ev.kind == EventKind::Release && ev.job && ev.job->critical) return ev.tick;
    }
    return std::nullopt;
}

std::uint64_t count_postponed(const Trace& trace) {
    static constexpr std::string_view kKey = "postponed=";
    std::set<JobId> waited;
    for (const auto& ev : trace) {
        if (ev.kind != EventKind::Alter) continue;
        auto pos = ev.detail.find(kKey);
        if (pos == std::string::npos) continue;
        std::string_view rest = std::string_view(ev.detail).substr(pos + kKey.size());
        rest = rest.substr(0, rest.find(' '));
        while (!rest.empty()) {
            auto comma = rest.find(',');
            auto id = JobId::parse(rest.substr(0, comma));
            if (id && !id->critical) waited.insert(*id);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
    }
    return waited.size();
}

} // namespace

double miss_rate(const Trace& trace) {
    std::uint64_t released = 0;
    std::uint64_t missed = 0;
    for (const auto& ev : trace) {
        if (!ev.job || ev.job->critical) continue;
        if (ev.kind == EventKind::Release) ++released;
        if (ev.kind == EventKind::Miss) ++missed;
    }
    return released == 0 ? 0.0 : static_cast<double>(missed) / static_cast<double>(released);
}

double guarantee_ratio(const Trace& trace) {
    std::uint64_t arrived = 0;
    std::uint64_t ok = 0;
    for (const auto& [id, o] : outcomes(trace)) {
        if (!o.deadline) continue;
        ++arrived;
        if (met(o)) ++ok;
    }
    return arrived == 0 ? 1.0 : static_cast<double>(ok) / static_cast<double>(arrived);
}

SuccessRates success_rates(const Trace& trace) {
    auto split = first_critical_arrival(trace);
    std::uint64_t before = 0, before_ok = 0, after = 0, after_ok = 0;
    for (const auto& [id, o] : outcomes(trace)) {
        if (!o.deadline) continue;
        const bool early = !split || (!id.critical && *o.deadline <= *split);
        (early ? before : after) += 1;
        if (met(o)) (early ? before_ok : after_ok) += 1;
    }
    SuccessRates r;
    if (before > 0) r.x = static_cast<double>(before_ok) / static_cast<double>(before);
    if (split && after > 0) r.y = static_cast<double>(after_ok) / static_cast<double>(after);
    return r;
}

RunMetrics compute_metrics(const Trace& trace) {
    RunMetrics m;
    for (const auto& ev : trace) {
        if (!ev.job || ev.job->critical) continue;
        if (ev.kind == EventKind::Release) ++m.n_total;
        if (ev.kind == EventKind::Miss) ++m.miss_n;
    }
    m.waited_tx = count_postponed(trace);
    auto rates = success_rates(trace);
    m.success_before_x = rates.x;
    m.success_after_y = rates.y;
    m.guarantee_ratio = guarantee_ratio(trace);
    return m;
}

Stability stability(const RunMetrics& m, StabilityForm form) {
    if (m.n_total == 0) {
        throw std::invalid_argument("stability needs at least one scheduled job");
    }
    using Wide = __int128;
    const Wide n = m.n_total;
    const Wide miss = m.miss_n;
    Stability s;
    if (form == StabilityForm::Normalized) {
        s.value = static_cast<double>(m.n_total - m.miss_n) / static_cast<double>(m.n_total);
        // (n - miss) / n > 7/10
        s.stable = 10 * (n - miss) > 7 * n;
    } else {
        const Wide waited = m.waited_tx;
        s.value = static_cast<double>(m.waited_tx) - static_cast<double>(m.miss_n) / static_cast<double>(m.n_total);
        // waited - miss / n > 7/10
        s.stable = 10 * (waited * n - miss) > 7 * n;
    }
    return s;
}

std::map<TaskId, std::uint64_t> per_task_misses(const Trace& trace) {
    std::map<TaskId, std::uint64_t> out;
    for (const auto& ev : trace) {
        if (ev.kind == EventKind::Miss && ev.job && !ev.job->critical) ++out[ev.job->owner];
    }
    return out;
}

} // namespace supersched
