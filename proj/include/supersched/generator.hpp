#pragma once

#include <supersched/task_model.hpp>

#include <cstdint>
#include <random>
#include <vector>

namespace supersched {

// mt19937_64 with hand-rolled draws: the std distributions are
// implementation-defined, which would make seeded output differ across
// standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }
    // Uniform in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    // Uniform integer in [lo, hi], rejection sampled.
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi);

private:
    std::mt19937_64 eng_;
};

// Seed of run `index` in a batch keyed by `master` (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct GeneratorSpec {
    std::size_t n = 4;
    double target_u = 0.5;
    Tick period_min = 10;
    Tick period_max = 100;
    // When non-empty, periods are drawn uniformly from this list instead.
    std::vector<Tick> periods;
    double tolerance = 0.02;
    // Fraction of tasks (shortest periods first) placed in the RM region.
    double rm_share = 0.0;
};

// UUniFast-discard utilizations, uniform periods, C = max(1, round(u*T)),
// D = T; redrawn until the total lands within the tolerance of target_u.
// Throws ConfigError when the target is out of reach for n integer tasks.
TaskSet generate_taskset(const GeneratorSpec& spec, std::uint64_t seed);
TaskSet generate_taskset(std::size_t n, double target_u, Tick period_min, Tick period_max, std::uint64_t seed);

} // namespace supersched
