#include <supersched/scenario.hpp>

#include <algorithm>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>
#include <tuple>

namespace supersched {

std::string_view to_string(SchedMode mode) {
    switch (mode) {
    case SchedMode::EDF: return "edf";
    case SchedMode::RM: return "rm";
    case SchedMode::Hybrid: return "hybrid";
    }
    return "?";
}

std::string_view to_string(MissPolicy policy) {
    return policy == MissPolicy::Discard ? "discard" : "demote";
}

std::optional<SchedMode> parse_sched_mode(std::string_view text) {
    if (text == "edf") return SchedMode::EDF;
    if (text == "rm") return SchedMode::RM;
    if (text == "hybrid") return SchedMode::Hybrid;
    return std::nullopt;
}

std::optional<MissPolicy> parse_miss_policy(std::string_view text) {
    if (text == "discard") return MissPolicy::Discard;
    if (text == "demote" || text == "demote-on-miss") return MissPolicy::Demote;
    return std::nullopt;
}

std::string SlotCover::str() const {
    if (index) return JobId::periodic(task, *index).str();
    return "T" + std::to_string(task);
}

const ServerConfig& Scenario::servers_for(ProcId p) const {
    auto it = server_overrides.find(p);
    return it == server_overrides.end() ? servers : it->second;
}

bool Scenario::operator==(const Scenario& o) const {
    auto tasks_equal = [](const TaskSet& a, const TaskSet& b) {
        if (a.strict_mode != b.strict_mode || a.tasks.size() != b.tasks.size()) return false;
        for (std::size_t i = 0; i < a.tasks.size(); ++i) {
            const auto& x = a.tasks[i];
            const auto& y = b.tasks[i];
            if (std::tie(x.id, x.wcet, x.period, x.deadline, x.region) !=
                std::tie(y.id, y.wcet, y.period, y.deadline, y.region)) {
                return false;
            }
        }
        return true;
    };
    auto cts_equal = [](const std::vector<CriticalTask>& a, const std::vector<CriticalTask>& b) {
        return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](const CriticalTask& x, const CriticalTask& y) {
            return std::tie(x.id, x.wcet, x.arrival, x.abs_deadline) == std::tie(y.id, y.wcet, y.arrival, y.abs_deadline);
        });
    };
    return name == o.name && mode == o.mode && tasks_equal(taskset, o.taskset) && placement == o.placement &&
           processors == o.processors && backup_count == o.backup_count && servers == o.servers &&
           server_overrides == o.server_overrides && cts_equal(critical_tasks, o.critical_tasks) &&
           faults == o.faults && backup_slots == o.backup_slots && miss_policy == o.miss_policy &&
           ctx_cost == o.ctx_cost && horizon == o.horizon && seed == o.seed && super_scheduler == o.super_scheduler;
}

std::vector<std::string> validate(const Scenario& sc) {
    std::vector<std::string> issues = validate(sc.taskset);
    auto add = [&](std::string s) { issues.push_back(std::move(s)); };

    if (sc.processors == 0) add("at least one primary processor is required");

    if (sc.mode == SchedMode::Hybrid) {
        for (const auto& i : validate(sc.servers)) add("servers: " + i);
        for (const auto& [p, cfg] : sc.server_overrides) {
            if (p >= sc.processors) add("server override for unknown primary processor " + std::to_string(p));
            for (const auto& i : validate(cfg)) add("servers on processor " + std::to_string(p) + ": " + i);
        }
    }

    for (const auto& [task, proc] : sc.placement) {
        if (!sc.taskset.find(task)) add("placement names unknown task " + std::to_string(task));
        if (proc >= sc.processors) {
            add("task " + std::to_string(task) + ": placed on processor " + std::to_string(proc) +
                " which is not a primary");
        }
    }

    std::set<std::uint32_t> ct_ids;
    for (const auto& ct : sc.critical_tasks) {
        if (!ct_ids.insert(ct.id).second) add("critical " + std::to_string(ct.id) + ": duplicate id");
        for (auto& i : validate(ct)) add(std::move(i));
    }

    std::set<ProcId> faulted;
    for (const auto& f : sc.faults) {
        if (f.proc >= sc.total_processors()) add("fault on unknown processor " + std::to_string(f.proc));
        if (!faulted.insert(f.proc).second) add("double fault on processor " + std::to_string(f.proc));
    }

    auto placement = sc.processors > 0 ? resolve_placement(sc) : std::map<TaskId, ProcId>{};
    for (std::size_t s = 0; s < sc.backup_slots.size(); ++s) {
        const auto& slot = sc.backup_slots[s];
        const std::string who = "backup slot " + std::to_string(s);
        if (!sc.is_backup(slot.backup_proc)) {
            add(who + ": processor " + std::to_string(slot.backup_proc) + " is not a backup processor");
        }
        if (slot.start >= slot.end) add(who + ": window must satisfy start < end");
        if (slot.covers.empty()) add(who + ": covers no job");
        std::set<TaskId> tasks;
        std::set<ProcId> primaries;
        for (const auto& c : slot.covers) {
            if (!sc.taskset.find(c.task)) {
                add(who + ": covers unknown task " + std::to_string(c.task));
                continue;
            }
            if (!tasks.insert(c.task).second) add(who + ": covers task " + std::to_string(c.task) + " twice");
            auto it = placement.find(c.task);
            if (it != placement.end() && !primaries.insert(it->second).second) {
                add(who + ": covered jobs must run on distinct primary processors");
            }
        }
    }

    if (sc.horizon && *sc.horizon == 0) add("horizon must be positive");
    if (!sc.horizon && sc.taskset.empty()) add("horizon is required when the task set is empty");
    if (!sc.taskset.empty()) {
        try {
            Tick h = hyperperiod(sc.taskset);
            if (!sc.horizon && !sc.critical_tasks.empty() && h > std::numeric_limits<Tick>::max() / 2) {
                add("default horizon overflows the tick type");
            }
        } catch (const std::overflow_error& e) {
            if (!sc.horizon) add(e.what());
        } catch (const std::invalid_argument&) {
            // zero periods are already reported
        }
    }
    return issues;
}

Tick effective_horizon(const Scenario& sc) {
    if (sc.horizon) return *sc.horizon;
    Tick h = hyperperiod(sc.taskset);
    return sc.critical_tasks.empty() ? h : 2 * h;
}

std::map<TaskId, ProcId> resolve_placement(const Scenario& sc) {
    std::map<TaskId, ProcId> out;
    std::vector<double> load(std::max<std::uint32_t>(sc.processors, 1), 0.0);
    for (const auto& t : sc.taskset.tasks) {
        auto it = sc.placement.find(t.id);
        if (it != sc.placement.end() && it->second < load.size()) {
            out[t.id] = it->second;
            load[it->second] += t.utilization();
        }
    }
    for (const auto& t : sc.taskset.tasks) {
        if (out.contains(t.id)) continue;
        std::optional<ProcId> chosen;
        for (ProcId p = 0; p < load.size(); ++p) {
            if (load[p] + t.utilization() <= 1.0 + 1e-12) {
                chosen = p;
                break;
            }
        }
        if (!chosen) {
            chosen = static_cast<ProcId>(std::min_element(load.begin(), load.end()) - load.begin());
        }
        out[t.id] = *chosen;
        load[*chosen] += t.utilization();
    }
    return out;
}

std::vector<std::string> capacity_warnings(const Scenario& sc) {
    std::vector<std::string> out;
    const double u = total_utilization(sc.taskset);
    if (u > static_cast<double>(sc.processors) + 1e-12) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "utilization %.2f exceeds capacity under (C,T,D) reading (%u primary processor%s)",
                      u, sc.processors, sc.processors == 1 ? "" : "s");
        out.emplace_back(buf);
    }
    if (!sc.critical_tasks.empty() && validate(sc).empty()) {
        Tick h = 0;
        try {
            h = effective_horizon(sc);
        } catch (const std::exception&) {
            return out;
        }
        for (const auto& ct : sc.critical_tasks) {
            if (ct.arrival >= h) {
                out.push_back("critical " + std::to_string(ct.id) + " arrives at " + std::to_string(ct.arrival) +
                              ", past the horizon " + std::to_string(h) + "; it is never released");
            }
        }
    }
    return out;
}

} // namespace supersched
