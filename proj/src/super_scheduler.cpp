#include <supersched/super_scheduler.hpp>

#include <supersched/analysis_metrics.hpp>
#include <supersched/sched_policies.hpp>
#include <supersched/sim_engine.hpp>

#include <algorithm>
#include <cstdio>
#include <limits>

namespace supersched {

std::optional<JobId> ScheduleTable::current() const {
    if (entries.empty()) return std::nullopt;
    return entries[cursor].job;
}

void ScheduleTable::advance() {
    if (entries.empty()) return;
    cursor = (cursor + 1) % entries.size();
}

ScheduleTable build_schedule_table(const TaskSet& ts) {
    ScheduleTable table;
    if (ts.empty()) return table;
    if (rm_schedulable(ts) != Verdict::Yes) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "RM region utilization %.4f exceeds bound %.4f", total_utilization(ts),
                      ll_bound(ts.size()));
        throw ConfigError(buf);
    }
    const Tick h = hyperperiod(ts);
    const auto prio = rm_assign(ts);
    std::vector<Job> ready;
    table.entries.reserve(h);
    for (Tick t = 0; t < h; ++t) {
        for (const auto& task : ts.tasks) {
            if (t % task.period != 0) continue;
            ready.push_back(Job{JobId::periodic(task.id, static_cast<std::uint32_t>(t / task.period + 1)), t,
                                t + task.deadline, task.wcet, task.wcet, prio.at(task.id), JobState::Ready});
        }
        auto pick = rm_pick(ready);
        table.entries.push_back({static_cast<std::size_t>(t), pick});
        if (pick) {
            auto it = std::find_if(ready.begin(), ready.end(), [&](const Job& j) { return j.id == *pick; });
            if (--it->remaining == 0) ready.erase(it);
        }
    }
    return table;
}

Directive tick_hook(const SimState& state, const SuperState& super) {
    (void)state;
    if (super.mode == SuperMode::Suspended || !super.active_ct || !super.active_proc) return {};
    return Directive{false, super.active_proc, super.active_ct->job_id()};
}

std::optional<ProcId> choose_critical_target(const Simulator& sim) {
    std::optional<ProcId> best;
    Tick best_key = 0;
    for (const auto& p : sim.state().processors) {
        if (p.role != ProcRole::Primary || p.failed()) continue;
        Tick key = std::numeric_limits<Tick>::max();
        if (auto top = sim.top_candidate(p.id)) key = sim.state().find(*top)->job.abs_deadline;
        if (!best || key > best_key) {
            best = p.id;
            best_key = key;
        }
    }
    return best;
}

namespace {

std::string postponed_list(const std::vector<JobId>& ids) {
    if (ids.empty()) return "-";
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty()) out += ",";
        out += id.str();
    }
    return out;
}

// Installs the critical job at the top of `target`, postpones whatever was
// about to run there and logs the alteration.
void take_over(Simulator& sim, const CriticalTask& ct, ProcId target, ActiveJob job) {
    auto& st = sim.mutable_state();
    const auto running = sim.top_candidate(target);
    AlterResult r = priority_alter(sim.processor_order(target), ct, running);
    // admitted before reassignment so admission probes see the critical job
    sim.admit_job(std::move(job));
    st.processors[target].local_order = r.order;
    for (const auto& id : r.postponed) {
        auto* j = st.find(id);
        j->job.state = JobState::Postponed;
        st.super.postponed_stack.push_back(id);
    }
    st.super.active_ct = ct;
    st.super.active_proc = target;
    st.super.mode = SuperMode::Active;

    std::string detail = "target=p" + std::to_string(target) + " postponed=" + postponed_list(r.postponed);
    if (auto it = st.super.tables.find(target); it != st.super.tables.end()) {
        detail += " frame=" + std::to_string(it->second.cursor);
    }
    sim.log({st.now, target, EventKind::Alter, ct.job_id(), detail});
    sim.reassign_tasks(r.postponed);
}

void infeasible(Simulator& sim, const CriticalTask& ct) {
    const Tick now = sim.state().now;
    sim.log({now, kNoProc, EventKind::Miss, ct.job_id(), "catastrophic infeasible"});
    sim.log({now, kNoProc, EventKind::Discard, ct.job_id(), "catastrophic infeasible"});
}

void relocate(Simulator& sim) {
    auto& st = sim.mutable_state();
    const CriticalTask ct = *st.super.active_ct;
    const ProcId from = *st.super.active_proc;
    auto target = choose_critical_target(sim);
    if (!target) {
        sim.retire(ct.job_id(), EventKind::Discard, "catastrophic infeasible", true);
        on_critical_complete(sim);
        return;
    }
    auto* j = st.find(ct.job_id());
    j->proc = *target;
    j->home = *target;
    // take_over ranks the critical job itself, so hide it from the target's order first
    j->job.state = JobState::Postponed;
    const auto running = sim.top_candidate(*target);
    AlterResult r = priority_alter(sim.processor_order(*target), ct, running);
    j = st.find(ct.job_id());
    j->job.state = JobState::Ready;
    st.processors[*target].local_order = r.order;
    for (const auto& id : r.postponed) {
        st.find(id)->job.state = JobState::Postponed;
        st.super.postponed_stack.push_back(id);
    }
    st.super.active_proc = *target;
    sim.log({st.now, *target, EventKind::Alter, ct.job_id(),
             "target=p" + std::to_string(*target) + " postponed=" + postponed_list(r.postponed) + " relocated-from=p" +
                 std::to_string(from)});
    sim.reassign_tasks(r.postponed);
}

} // namespace

void on_critical_arrival(Simulator& sim, const CriticalTask& ct) {
    auto& st = sim.mutable_state();
    if (st.super.active_ct || !st.critical_queue.empty()) {
        st.critical_queue.push_back(ct);
        st.super.mode = SuperMode::Active;
        return;
    }
    const Tick now = st.now;
    if (ct.abs_deadline <= now || ct.wcet > ct.abs_deadline - now) {
        infeasible(sim, ct);
        return;
    }
    auto target = choose_critical_target(sim);
    if (!target) {
        infeasible(sim, ct);
        return;
    }
    ActiveJob aj;
    aj.job = Job{ct.job_id(), now, ct.abs_deadline, ct.wcet, ct.wcet, -1, JobState::Ready};
    aj.region = Region::DynamicEDF;
    aj.home = aj.proc = *target;
    aj.standing = Standing::Apex;
    take_over(sim, ct, *target, std::move(aj));
}

void on_critical_complete(Simulator& sim) {
    auto& st = sim.mutable_state();
    auto& sup = st.super;
    sup.active_ct.reset();
    sup.active_proc.reset();
    const Tick t = sim.stamp();
    while (!sup.postponed_stack.empty()) {
        const JobId id = sup.postponed_stack.back();
        sup.postponed_stack.pop_back();
        ActiveJob* j = st.find(id);
        if (!j) continue;
        if (st.processors[j->home].failed()) {
            sim.retire(id, EventKind::Discard, "processor failed");
            continue;
        }
        j->proc = j->home;
        j->job.state = JobState::Ready;
        if (j->job.abs_deadline <= t && j->job.remaining > 0) {
            if (sim.scenario().miss_policy == MissPolicy::Discard) {
                sim.retire(id, EventKind::Discard, "missed while postponed", true);
                continue;
            }
            sim.log({t, j->proc, EventKind::Miss, id, "deadline=" + std::to_string(j->job.abs_deadline) + " demoted"});
            j->standing = Standing::Late;
            j->seq = st.next_seq++;
            continue;
        }
        j->standing = Standing::Resumed;
        j->seq = st.next_seq++;
        j->resume_pending = true;
    }
    sup.mode = st.critical_queue.empty() ? SuperMode::Suspended : SuperMode::Active;
}

void service_critical_queue(Simulator& sim) {
    auto& st = sim.mutable_state();
    if (st.super.active_ct && st.super.active_proc && st.processors[*st.super.active_proc].failed()) {
        relocate(sim);
    }
    while (!st.super.active_ct && !st.critical_queue.empty()) {
        CriticalTask ct = st.critical_queue.front();
        st.critical_queue.pop_front();
        on_critical_arrival(sim, ct);
    }
    st.super.mode = (st.super.active_ct || !st.critical_queue.empty()) ? SuperMode::Active : SuperMode::Suspended;
}

} // namespace supersched
