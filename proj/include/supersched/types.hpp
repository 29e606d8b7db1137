#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace supersched {

// Simulated time. One tick executes one unit of work on one processor.
using Tick = std::uint64_t;
using TaskId = std::uint32_t;
using ProcId = std::uint32_t;

// Identifies either the j-th job of a periodic task ("J<task>.<j>") or a
// critical task instance ("CT<id>").
struct JobId {
    bool critical = false;
    std::uint32_t owner = 0;
    std::uint32_t index = 1;

    static JobId periodic(TaskId task, std::uint32_t index) { return {false, task, index}; }
    static JobId critical_task(std::uint32_t id) { return {true, id, 1}; }

    std::string str() const;
    static std::optional<JobId> parse(std::string_view text);

    auto operator<=>(const JobId&) const = default;
};

// Raised when a scenario or task set violates its invariants. Carries every
// violation found, not just the first one.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> issues);

    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    std::vector<std::string> issues_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace supersched
