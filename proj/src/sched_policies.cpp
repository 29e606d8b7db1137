#include <supersched/sched_policies.hpp>

#include <algorithm>
#include <cmath>
#include <tuple>

namespace supersched {

std::vector<std::string> validate(const ServerConfig& cfg) {
    std::vector<std::string> issues;
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) issues.push_back("server alpha must lie in (0,1)");
    if (!(cfg.beta > 0.0 && cfg.beta < 1.0)) issues.push_back("server beta must lie in (0,1)");
    if (cfg.alpha + cfg.beta > 1.0 + 1e-12) issues.push_back("server alpha + beta must not exceed 1");
    if (cfg.quantum == 0) issues.push_back("server quantum must be positive");
    if (issues.empty()) {
        for (double u : {cfg.alpha, cfg.beta}) {
            try {
                server_budget(cfg, u);
            } catch (const ConfigError& e) {
                issues.emplace_back(e.what());
            }
        }
    }
    return issues;
}

std::string_view to_string(ServerKind kind) {
    return kind == ServerKind::RM ? "rm" : "edf";
}

Tick server_budget(const ServerConfig& cfg, double u) {
    if (!(u > 0.0 && u <= 1.0)) {
        throw ConfigError("server size must lie in (0,1]");
    }
    // 1e-9 absorbs representation error such as 100 * 0.29 = 28.999...
    double raw = static_cast<double>(cfg.quantum) * u + 1e-9;
    if (raw < 1.0) {
        throw ConfigError("quantum too coarse for server size");
    }
    return static_cast<Tick>(std::floor(raw));
}

std::map<TaskId, int> rm_assign(const TaskSet& ts) {
    std::vector<const Task*> order;
    order.reserve(ts.tasks.size());
    for (const auto& t : ts.tasks) order.push_back(&t);
    std::sort(order.begin(), order.end(), [](const Task* a, const Task* b) {
        return std::tie(a->period, a->id) < std::tie(b->period, b->id);
    });
    std::map<TaskId, int> out;
    int next = 0;
    for (const Task* t : order) out[t->id] = next++;
    return out;
}

std::optional<JobId> edf_pick(std::span<const Job> ready, Tick /*now*/) {
    const Job* best = nullptr;
    for (const auto& j : ready) {
        if (!best || std::tie(j.abs_deadline, j.release, j.id) < std::tie(best->abs_deadline, best->release, best->id)) {
            best = &j;
        }
    }
    if (!best) return std::nullopt;
    return best->id;
}

std::optional<JobId> rm_pick(std::span<const Job> ready) {
    const Job* best = nullptr;
    for (const auto& j : ready) {
        if (!best ||
            std::tie(j.effective_priority, j.release, j.id) < std::tie(best->effective_priority, best->release, best->id)) {
            best = &j;
        }
    }
    if (!best) return std::nullopt;
    return best->id;
}

std::optional<HybridChoice> hybrid_pick(std::span<const Job> rm_ready, std::span<const Job> edf_ready,
                                        ServerBudgets budgets, Tick now) {
    auto find = [](std::span<const Job> jobs, const JobId& id) -> const Job& {
        return *std::find_if(jobs.begin(), jobs.end(), [&](const Job& j) { return j.id == id; });
    };
    std::optional<JobId> rm = budgets.rm > 0 ? rm_pick(rm_ready) : std::nullopt;
    std::optional<JobId> edf = budgets.edf > 0 ? edf_pick(edf_ready, now) : std::nullopt;
    if (rm && edf) {
        if (find(edf_ready, *edf).abs_deadline < find(rm_ready, *rm).abs_deadline) {
            return HybridChoice{*edf, ServerKind::EDF};
        }
        return HybridChoice{*rm, ServerKind::RM};
    }
    if (rm) return HybridChoice{*rm, ServerKind::RM};
    if (edf) return HybridChoice{*edf, ServerKind::EDF};
    return std::nullopt;
}

PriorityOrder PriorityOrder::from_jobs(std::span<const JobId> jobs) {
    PriorityOrder o;
    for (const auto& j : jobs) o.entries.push_back({j, 0, false});
    o.renumber();
    return o;
}

std::vector<JobId> PriorityOrder::jobs() const {
    std::vector<JobId> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.job);
    return out;
}

std::optional<std::size_t> PriorityOrder::rank_of(const JobId& job) const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].job == job) return i;
    }
    return std::nullopt;
}

void PriorityOrder::renumber() {
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i].priority = static_cast<int>(i);
}

AlterResult priority_alter(const PriorityOrder& order, const CriticalTask& ct, std::optional<JobId> running) {
    const JobId cid = ct.job_id();
    if (order.rank_of(cid)) {
        throw std::invalid_argument(cid.str() + " is already ranked");
    }
    AlterResult out;
    out.order = order;
    auto& e = out.order.entries;

    // Critical jobs already ranked keep the apex; the newcomer queues behind them.
    auto first_ordinary = std::find_if(e.begin(), e.end(), [](const PriorityEntry& p) { return !p.job.critical; });
    const bool apex_taken = first_ordinary != e.begin();

    if (running && !running->critical && !apex_taken) {
        if (first_ordinary == e.end() || first_ordinary->job != *running) {
            throw std::invalid_argument("running job " + running->str() + " is not the top-ranked job");
        }
        out.postponed.push_back(*running);
    }
    e.insert(first_ordinary, PriorityEntry{cid, 0, false});
    out.order.renumber();
    return out;
}

PriorityOrder overrun_demote(const PriorityOrder& order, const JobId& late) {
    PriorityOrder out = order;
    auto& e = out.entries;
    auto it = std::find_if(e.begin(), e.end(), [&](const PriorityEntry& p) { return p.job == late; });
    if (it == e.end() || it->late) {
        return out;
    }
    PriorityEntry moved = *it;
    moved.late = true;
    e.erase(it);
    e.push_back(moved);
    out.renumber();
    return out;
}

} // namespace supersched
