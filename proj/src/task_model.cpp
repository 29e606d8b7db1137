#include <supersched/task_model.hpp>

#include <charconv>
#include <numeric>
#include <set>
#include <sstream>

namespace supersched {

std::string JobId::str() const {
    if (critical) {
        return "CT" + std::to_string(owner);
    }
    return "J" + std::to_string(owner) + "." + std::to_string(index);
}

namespace {

std::optional<std::uint32_t> parse_u32(std::string_view s) {
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        return std::nullopt;
    }
    return v;
}

std::string join_issues(const std::vector<std::string>& issues) {
    std::ostringstream os;
    os << issues.size() << " validation error(s)";
    for (const auto& i : issues) {
        os << "\n  - " << i;
    }
    return os.str();
}

} // namespace

std::optional<JobId> JobId::parse(std::string_view text) {
    if (text.starts_with("CT")) {
        auto id = parse_u32(text.substr(2));
        if (!id) return std::nullopt;
        return JobId::critical_task(*id);
    }
    if (text.starts_with("J")) {
        auto body = text.substr(1);
        auto dot = body.find('.');
        if (dot == std::string_view::npos) return std::nullopt;
        auto task = parse_u32(body.substr(0, dot));
        auto index = parse_u32(body.substr(dot + 1));
        if (!task || !index || *index == 0) return std::nullopt;
        return JobId::periodic(*task, *index);
    }
    return std::nullopt;
}

ValidationError::ValidationError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

std::string_view to_string(Region region) {
    return region == Region::FixedRM ? "rm" : "edf";
}

std::optional<Region> parse_region(std::string_view text) {
    if (text == "rm" || text == "FixedRM") return Region::FixedRM;
    if (text == "edf" || text == "DynamicEDF") return Region::DynamicEDF;
    return std::nullopt;
}

std::string_view to_string(JobState state) {
    switch (state) {
    case JobState::Ready: return "Ready";
    case JobState::Running: return "Running";
    case JobState::Postponed: return "Postponed";
    case JobState::Completed: return "Completed";
    case JobState::Missed: return "Missed";
    case JobState::Discarded: return "Discarded";
    }
    return "?";
}

CriticalTask make_critical(std::uint32_t id, Tick wcet, Tick arrival, std::optional<Tick> relative_deadline) {
    return CriticalTask{id, wcet, arrival, arrival + relative_deadline.value_or(default_critical_window(wcet))};
}

const Task* TaskSet::find(TaskId id) const {
    for (const auto& t : tasks) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

std::vector<std::string> validate(const TaskSet& ts) {
    std::vector<std::string> issues;
    std::set<TaskId> seen;
    for (const auto& t : ts.tasks) {
        const std::string who = "task " + std::to_string(t.id);
        if (!seen.insert(t.id).second) issues.push_back(who + ": duplicate id");
        if (t.wcet == 0) issues.push_back(who + ": wcet must be positive");
        if (t.period == 0) issues.push_back(who + ": period must be positive");
        if (t.deadline == 0) issues.push_back(who + ": deadline must be positive");
        if (t.wcet > 0 && t.deadline > 0 && t.wcet > t.deadline) issues.push_back(who + ": C > D");
        if (ts.strict_mode && t.deadline != t.period) {
            issues.push_back(who + ": strict mode requires D = T");
        }
    }
    return issues;
}

std::vector<std::string> validate(const CriticalTask& ct) {
    std::vector<std::string> issues;
    const std::string who = "critical " + std::to_string(ct.id);
    if (ct.wcet == 0) issues.push_back(who + ": wcet must be positive");
    if (ct.abs_deadline <= ct.arrival) issues.push_back(who + ": deadline must be after arrival");
    else if (ct.wcet > ct.abs_deadline - ct.arrival) issues.push_back(who + ": wcet exceeds deadline window");
    return issues;
}

namespace {

struct Fraction {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
};

// Exact sum of C/T, or nullopt when an intermediate overflows.
std::optional<Fraction> exact_sum(const TaskSet& ts) {
    Fraction acc;
    for (const auto& t : ts.tasks) {
        if (t.period == 0) return std::nullopt;
        std::uint64_t g = std::gcd(t.wcet, t.period);
        std::uint64_t n = t.wcet / g;
        std::uint64_t d = t.period / g;
        std::uint64_t l = 0;
        std::uint64_t lhs = 0;
        std::uint64_t rhs = 0;
        if (__builtin_mul_overflow(acc.den / std::gcd(acc.den, d), d, &l)) return std::nullopt;
        if (__builtin_mul_overflow(acc.num, l / acc.den, &lhs)) return std::nullopt;
        if (__builtin_mul_overflow(n, l / d, &rhs)) return std::nullopt;
        if (__builtin_add_overflow(lhs, rhs, &acc.num)) return std::nullopt;
        acc.den = l;
        std::uint64_t r = std::gcd(acc.num, acc.den);
        if (r > 1) {
            acc.num /= r;
            acc.den /= r;
        }
    }
    return acc;
}

} // namespace

double total_utilization(const TaskSet& ts) {
    if (auto f = exact_sum(ts)) {
        return static_cast<double>(f->num) / static_cast<double>(f->den);
    }
    long double sum = 0;
    for (const auto& t : ts.tasks) {
        sum += static_cast<long double>(t.wcet) / static_cast<long double>(t.period);
    }
    return static_cast<double>(sum);
}

int compare_utilization(const TaskSet& ts, std::uint64_t num, std::uint64_t den) {
    if (auto f = exact_sum(ts)) {
        auto lhs = static_cast<unsigned __int128>(f->num) * den;
        auto rhs = static_cast<unsigned __int128>(num) * f->den;
        return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
    }
    long double u = 0;
    for (const auto& t : ts.tasks) {
        u += static_cast<long double>(t.wcet) / static_cast<long double>(t.period);
    }
    long double target = static_cast<long double>(num) / static_cast<long double>(den);
    return u < target ? -1 : (u > target ? 1 : 0);
}

Tick lcm_checked(Tick a, Tick b) {
    if (a == 0 || b == 0) {
        throw std::invalid_argument("lcm of zero period");
    }
    Tick g = std::gcd(a, b);
    Tick out = 0;
    if (__builtin_mul_overflow(a / g, b, &out)) {
        throw std::overflow_error("hyperperiod overflows the tick type");
    }
    return out;
}

Tick hyperperiod(const TaskSet& ts) {
    if (ts.tasks.empty()) {
        throw std::invalid_argument("hyperperiod of an empty task set");
    }
    Tick h = 1;
    for (const auto& t : ts.tasks) {
        h = lcm_checked(h, t.period);
    }
    return h;
}

std::vector<Job> jobs_in_window(const Task& task, Tick t0, Tick t1) {
    std::vector<Job> out;
    if (t1 <= t0 || task.period == 0) return out;
    // first j (1-based) with (j-1)*T >= t0
    Tick first = (t0 + task.period - 1) / task.period;
    for (Tick k = first; k * task.period < t1; ++k) {
        Job j;
        j.id = JobId::periodic(task.id, static_cast<std::uint32_t>(k + 1));
        j.release = k * task.period;
        j.abs_deadline = j.release + task.deadline;
        j.wcet = task.wcet;
        j.remaining = task.wcet;
        j.effective_priority = task.base_priority;
        j.state = JobState::Ready;
        out.push_back(j);
    }
    return out;
}

} // namespace supersched
