#include <supersched/generator.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>

namespace supersched {

std::uint64_t Rng::between(std::uint64_t lo, std::uint64_t hi) {
    if (lo >= hi) return lo;
    const std::uint64_t span = hi - lo;
    if (span == std::numeric_limits<std::uint64_t>::max()) return eng_();
    const std::uint64_t range = span + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x;
    do {
        x = eng_();
    } while (x >= limit);
    return lo + x % range;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

std::optional<std::vector<double>> uunifast_discard(Rng& rng, std::size_t n, double u) {
    for (int tries = 0; tries < 1000; ++tries) {
        std::vector<double> out(n);
        double sum = u;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double next = sum * std::pow(rng.unit(), 1.0 / static_cast<double>(n - i - 1));
            out[i] = sum - next;
            sum = next;
        }
        out[n - 1] = sum;
        if (std::all_of(out.begin(), out.end(), [](double x) { return x <= 1.0; })) return out;
    }
    return std::nullopt;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

} // namespace

TaskSet generate_taskset(const GeneratorSpec& spec, std::uint64_t seed) {
    if (spec.n == 0) throw ConfigError("generator needs at least one task");
    if (!(spec.target_u > 0)) throw ConfigError("target utilization must be positive");
    std::vector<Tick> periods = spec.periods;
    if (periods.empty()) {
        if (spec.period_min == 0 || spec.period_min > spec.period_max) {
            throw ConfigError("period range must satisfy 0 < min <= max");
        }
    } else if (std::find(periods.begin(), periods.end(), Tick{0}) != periods.end()) {
        throw ConfigError("periods must be positive");
    }
    const Tick longest = periods.empty() ? spec.period_max : *std::max_element(periods.begin(), periods.end());
    const double n = static_cast<double>(spec.n);
    // Every task costs at least 1/T_max and at most 1.
    if (n / static_cast<double>(longest) > spec.target_u + spec.tolerance) {
        throw ConfigError("target utilization " + fmt(spec.target_u) + " too small for " + std::to_string(spec.n) +
                          " tasks: C < 1 for every period choice");
    }
    if (n < spec.target_u - spec.tolerance) {
        throw ConfigError("target utilization " + fmt(spec.target_u) + " needs more than " + std::to_string(spec.n) +
                          " tasks");
    }

    Rng rng(seed);
    constexpr int kAttempts = 100000;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        auto drawn = uunifast_discard(rng, spec.n, std::min(spec.target_u, n));
        if (!drawn) continue;
        const auto& shares = *drawn;
        TaskSet ts;
        for (std::size_t i = 0; i < spec.n; ++i) {
            Task t;
            t.id = static_cast<TaskId>(i + 1);
            t.period = periods.empty() ? rng.between(spec.period_min, spec.period_max)
                                       : periods[rng.between(0, periods.size() - 1)];
            const double c = std::round(shares[i] * static_cast<double>(t.period));
            t.wcet = std::clamp<Tick>(static_cast<Tick>(std::max(c, 1.0)), 1, t.period);
            t.deadline = t.period;
            ts.tasks.push_back(t);
        }
        if (std::abs(total_utilization(ts) - spec.target_u) > spec.tolerance) continue;
        if (spec.rm_share > 0) {
            std::vector<std::size_t> idx(spec.n);
            std::iota(idx.begin(), idx.end(), 0);
            std::stable_sort(idx.begin(), idx.end(),
                             [&](std::size_t a, std::size_t b) { return ts.tasks[a].period < ts.tasks[b].period; });
            const auto k = static_cast<std::size_t>(std::lround(spec.rm_share * n));
            for (std::size_t i = 0; i < std::min(k, spec.n); ++i) ts.tasks[idx[i]].region = Region::FixedRM;
        }
        return ts;
    }
    throw ConfigError("could not reach utilization " + fmt(spec.target_u) + " within " + fmt(spec.tolerance) +
                      " after " + std::to_string(kAttempts) + " draws");
}

TaskSet generate_taskset(std::size_t n, double target_u, Tick period_min, Tick period_max, std::uint64_t seed) {
    GeneratorSpec spec;
    spec.n = n;
    spec.target_u = target_u;
    spec.period_min = period_min;
    spec.period_max = period_max;
    return generate_taskset(spec, seed);
}

} // namespace supersched
