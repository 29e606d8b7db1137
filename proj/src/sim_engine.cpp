#include <supersched/sim_engine.hpp>

#include <supersched/super_scheduler.hpp>

#include <algorithm>
#include <climits>
#include <stdexcept>
#include <tuple>

namespace supersched {

struct Simulator::Config {
    Scenario scenario;
    std::map<TaskId, ProcId> placement;
    // Tasks in ascending id order with base priorities assigned.
    std::vector<Task> tasks;
    // Critical tasks in (arrival, id) order.
    std::vector<CriticalTask> criticals;
};

namespace {

std::string proc_name(ProcId p) {
    return "p" + std::to_string(p);
}

bool runnable(const ActiveJob& j) {
    return (j.job.state == JobState::Ready || j.job.state == JobState::Running) && j.job.remaining > 0;
}

std::string join_procs(const std::vector<ProcId>& procs) {
    std::string out;
    for (auto p : procs) {
        if (!out.empty()) out += ",";
        out += proc_name(p);
    }
    return out;
}

} // namespace

bool BackupSlot::covers_job(const JobId& job) const {
    return std::any_of(covers.begin(), covers.end(), [&](const SlotCover& c) { return c.covers(job); });
}

ActiveJob* SimState::find(const JobId& id) {
    auto it = std::lower_bound(jobs.begin(), jobs.end(), id, [](const ActiveJob& a, const JobId& b) { return a.job.id < b; });
    return (it != jobs.end() && it->job.id == id) ? &*it : nullptr;
}

const ActiveJob* SimState::find(const JobId& id) const {
    return const_cast<SimState*>(this)->find(id);
}

Simulator::Simulator(Scenario scenario) {
    if (auto issues = validate(scenario); !issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    auto cfg = std::make_shared<Config>();
    cfg->placement = resolve_placement(scenario);
    cfg->tasks = scenario.taskset.tasks;
    std::sort(cfg->tasks.begin(), cfg->tasks.end(), [](const Task& a, const Task& b) { return a.id < b.id; });

    TaskSet fixed;
    for (const auto& t : cfg->tasks) {
        if (scenario.mode == SchedMode::RM || (scenario.mode == SchedMode::Hybrid && t.region == Region::FixedRM)) {
            fixed.tasks.push_back(t);
        }
    }
    const auto priorities = rm_assign(fixed);
    for (auto& t : cfg->tasks) {
        auto it = priorities.find(t.id);
        t.base_priority = it == priorities.end() ? 0 : it->second;
    }

    cfg->criticals = scenario.critical_tasks;
    std::sort(cfg->criticals.begin(), cfg->criticals.end(), [](const CriticalTask& a, const CriticalTask& b) {
        return std::tie(a.arrival, a.id) < std::tie(b.arrival, b.id);
    });

    horizon_ = effective_horizon(scenario);
    Tick max_window = 0;
    for (const auto& t : cfg->tasks) max_window = std::max(max_window, t.deadline);
    cutoff_ = horizon_ + max_window;
    for (const auto& ct : cfg->criticals) cutoff_ = std::max(cutoff_, ct.abs_deadline);

    for (ProcId p = 0; p < scenario.total_processors(); ++p) {
        Processor proc;
        proc.id = p;
        proc.role = scenario.is_backup(p) ? ProcRole::Backup : ProcRole::Primary;
        if (proc.role == ProcRole::Primary) {
            proc.servers = scenario.servers_for(p);
            if (scenario.mode == SchedMode::Hybrid) {
                proc.budgets = {server_budget(proc.servers, proc.servers.beta),
                                server_budget(proc.servers, proc.servers.alpha)};
            }
        }
        state_.processors.push_back(proc);
    }
    for (const auto& s : scenario.backup_slots) {
        state_.slots.push_back(BackupSlot{s.backup_proc, s.start, s.end, s.covers, std::nullopt});
    }
    state_.pending_faults = scenario.faults;
    std::sort(state_.pending_faults.begin(), state_.pending_faults.end(), [](const FaultSpec& a, const FaultSpec& b) {
        return std::tie(a.tick, a.proc) < std::tie(b.tick, b.proc);
    });

    if (scenario.super_scheduler && scenario.mode != SchedMode::EDF) {
        for (ProcId p = 0; p < scenario.processors; ++p) {
            TaskSet local;
            for (const auto& t : fixed.tasks) {
                if (cfg->placement.at(t.id) == p) local.tasks.push_back(t);
            }
            if (local.empty()) continue;
            try {
                state_.super.tables.emplace(p, build_schedule_table(local));
            } catch (const ConfigError&) {
                // no table for a region that fails admission; the run proceeds without replay data
            } catch (const std::overflow_error&) {
            }
        }
    }

    cfg->scenario = std::move(scenario);
    config_ = std::move(cfg);
}

Simulator::Simulator(const Simulator& other, ProbeTag)
    : config_(other.config_), state_(other.state_), horizon_(other.horizon_), cutoff_(other.cutoff_), probe_(true),
      stamp_(other.stamp_) {}

const Scenario& Simulator::scenario() const noexcept {
    return config_->scenario;
}

void Simulator::log(TraceEvent ev) {
    trace_.record(std::move(ev));
}

void Simulator::step() {
    begin_tick();
    finish_tick();
}

const Trace& Simulator::run() {
    while (state_.now < horizon_) {
        step();
    }
    while (!state_.jobs.empty() || !state_.critical_queue.empty()) {
        if (state_.now >= cutoff_) {
            discard_remaining("horizon");
            break;
        }
        step();
    }
    return trace_;
}

void Simulator::begin_tick() {
    stamp_ = state_.now;
    release_jobs();
    replenish_servers();
    apply_faults();
    deliver_critical();
}

void Simulator::finish_tick() {
    stamp_ = state_.now;
    dispatch();
    execute();
    stamp_ = state_.now + 1;
    complete_jobs();
    police_deadlines();
    for (auto& [p, table] : state_.super.tables) table.advance();
    state_.now += 1;
}

void Simulator::admit_job(ActiveJob job) {
    auto it = std::lower_bound(state_.jobs.begin(), state_.jobs.end(), job.job.id,
                               [](const ActiveJob& a, const JobId& b) { return a.job.id < b; });
    if (it != state_.jobs.end() && it->job.id == job.job.id) {
        throw std::logic_error("job " + job.job.id.str() + " is already live");
    }
    state_.jobs.insert(it, std::move(job));
}

void Simulator::release_jobs() {
    const Tick now = state_.now;
    if (now >= horizon_) return;
    for (const auto& t : config_->tasks) {
        if (now % t.period != 0) continue;
        ActiveJob aj;
        aj.job.id = JobId::periodic(t.id, static_cast<std::uint32_t>(now / t.period + 1));
        aj.job.release = now;
        aj.job.abs_deadline = now + t.deadline;
        aj.job.wcet = t.wcet;
        aj.job.remaining = t.wcet;
        aj.job.effective_priority = t.base_priority;
        aj.region = t.region;
        aj.home = config_->placement.at(t.id);
        aj.proc = aj.home;
        const JobId id = aj.job.id;
        log({now, aj.home, EventKind::Release, id, release_detail(aj.job.abs_deadline)});
        admit_job(std::move(aj));
        if (state_.processors[state_.find(id)->proc].failed()) {
            activate_backup(id);
        }
    }
}

void Simulator::replenish_servers() {
    if (scenario().mode != SchedMode::Hybrid || state_.now == 0) return;
    for (auto& p : state_.processors) {
        if (p.role != ProcRole::Primary || p.failed() || state_.now % p.servers.quantum != 0) continue;
        p.budgets = {server_budget(p.servers, p.servers.beta), server_budget(p.servers, p.servers.alpha)};
        log({state_.now, p.id, EventKind::ServerReplenish, std::nullopt,
             "rm=" + std::to_string(p.budgets.rm) + " edf=" + std::to_string(p.budgets.edf)});
    }
}

void Simulator::apply_faults() {
    if (probe_) return;
    const Tick now = state_.now;
    std::vector<JobId> victims;
    auto due_end = std::find_if(state_.pending_faults.begin(), state_.pending_faults.end(),
                                [&](const FaultSpec& f) { return f.tick > now; });
    for (auto it = state_.pending_faults.begin(); it != due_end; ++it) {
        auto& p = state_.processors[it->proc];
        p.failed_at = now;
        p.current.reset();
        p.charging.reset();
        p.switch_left = 0;
        log({now, p.id, EventKind::Fault, std::nullopt, "crash-stop"});
        for (const auto& j : state_.jobs) {
            if (j.proc != p.id || j.job.state == JobState::Postponed) continue;
            // the active critical task is re-placed by the super scheduler
            if (state_.super.active_ct && j.job.id == state_.super.active_ct->job_id()) continue;
            victims.push_back(j.job.id);
        }
    }
    state_.pending_faults.erase(state_.pending_faults.begin(), due_end);
    std::sort(victims.begin(), victims.end());
    for (const auto& v : victims) {
        activate_backup(v);
    }
}

void Simulator::inject_fault(ProcId proc, Tick at) {
    if (proc >= state_.processors.size()) {
        throw std::invalid_argument("fault on unknown processor " + std::to_string(proc));
    }
    if (state_.processors[proc].failed()) {
        throw std::invalid_argument("processor " + std::to_string(proc) + " has already failed");
    }
    for (const auto& f : state_.pending_faults) {
        if (f.proc == proc) throw std::invalid_argument("processor " + std::to_string(proc) + " already has a fault scheduled");
    }
    if (at < state_.now) {
        throw std::invalid_argument("fault tick lies in the past");
    }
    FaultSpec f{proc, at};
    auto pos = std::upper_bound(state_.pending_faults.begin(), state_.pending_faults.end(), f,
                                [](const FaultSpec& a, const FaultSpec& b) { return std::tie(a.tick, a.proc) < std::tie(b.tick, b.proc); });
    state_.pending_faults.insert(pos, f);
}

void Simulator::activate_backup(const JobId& id) {
    ActiveJob* j = state_.find(id);
    if (!j) {
        throw std::invalid_argument("no live job " + id.str());
    }
    const ProcId from = j->proc;
    if (!state_.processors[from].failed()) {
        throw std::invalid_argument("primary of " + id.str() + " has not failed");
    }
    BackupSlot* chosen = nullptr;
    bool taken = false;
    for (auto& s : state_.slots) {
        if (!s.covers_job(id) || stamp_ >= s.end || state_.processors[s.backup_proc].failed()) continue;
        if (s.used_by) {
            taken = true;
            continue;
        }
        chosen = &s;
        break;
    }
    if (!chosen) {
        retire(id, EventKind::Discard, taken ? "overloaded slot taken" : "no backup");
        return;
    }
    chosen->used_by = id;
    std::string lost;
    for (const auto& c : chosen->covers) {
        if (c.covers(id)) continue;
        lost += (lost.empty() ? "" : ",") + c.str();
    }
    j = state_.find(id);
    j->proc = chosen->backup_proc;
    j->job.remaining = j->job.wcet;
    j->job.state = JobState::Ready;
    j->standing = Standing::Normal;
    j->resume_pending = false;
    std::string detail = "from " + proc_name(from);
    if (!lost.empty()) detail += " coverage-lost=" + lost;
    log({stamp_, chosen->backup_proc, EventKind::BackupActivate, id, detail});
}

void Simulator::deliver_critical() {
    if (probe_) return;
    const Tick now = state_.now;
    const bool supervised = scenario().super_scheduler;
    if (supervised) service_critical_queue(*this);
    if (now >= horizon_) return;
    for (const auto& ct : config_->criticals) {
        if (ct.arrival != now) continue;
        log({now, kNoProc, EventKind::Release, ct.job_id(), release_detail(ct.abs_deadline)});
        if (supervised) {
            on_critical_arrival(*this, ct);
            continue;
        }
        // Without the super scheduler the critical task is an ordinary EDF job.
        auto target = choose_critical_target(*this);
        if (!target) {
            log({now, kNoProc, EventKind::Miss, ct.job_id(), "catastrophic infeasible"});
            log({now, kNoProc, EventKind::Discard, ct.job_id(), "catastrophic infeasible"});
            continue;
        }
        ActiveJob aj;
        aj.job = Job{ct.job_id(), ct.arrival, ct.abs_deadline, ct.wcet, ct.wcet, INT_MAX, JobState::Ready};
        aj.region = Region::DynamicEDF;
        aj.home = aj.proc = *target;
        admit_job(std::move(aj));
    }
}

std::optional<Simulator::Pick> Simulator::choose(const Processor& p, const Directive* directive) const {
    if (p.failed()) return std::nullopt;
    if (directive && !directive->pass_through && directive->proc == p.id && directive->forced) {
        const ActiveJob* forced = state_.find(*directive->forced);
        if (forced && forced->proc == p.id && runnable(*forced)) return Pick{forced->job.id, std::nullopt};
    }

    const ActiveJob* apex = nullptr;
    const ActiveJob* resumed = nullptr;
    const ActiveJob* migrated = nullptr;
    const ActiveJob* late = nullptr;
    std::vector<Job> normal;
    std::vector<Job> normal_rm;
    for (const auto& j : state_.jobs) {
        if (j.proc != p.id || !runnable(j)) continue;
        switch (j.standing) {
        case Standing::Apex:
            if (!apex) apex = &j;
            break;
        case Standing::Resumed:
            if (!resumed || j.seq < resumed->seq) resumed = &j;
            break;
        case Standing::Migrated:
            if (!migrated || std::tie(j.job.abs_deadline, j.job.release, j.job.id) <
                                 std::tie(migrated->job.abs_deadline, migrated->job.release, migrated->job.id)) {
                migrated = &j;
            }
            break;
        case Standing::Late:
            if (!late || j.seq < late->seq) late = &j;
            break;
        case Standing::Normal:
            if (p.role == ProcRole::Primary && scenario().mode == SchedMode::Hybrid && j.region == Region::FixedRM) {
                normal_rm.push_back(j.job);
            } else {
                normal.push_back(j.job);
            }
            break;
        }
    }
    if (apex) return Pick{apex->job.id, std::nullopt};
    if (resumed) return Pick{resumed->job.id, std::nullopt};

    if (p.role == ProcRole::Backup || scenario().mode == SchedMode::EDF) {
        if (auto id = edf_pick(normal, state_.now)) return Pick{*id, std::nullopt};
    } else if (scenario().mode == SchedMode::RM) {
        if (auto id = rm_pick(normal)) return Pick{*id, std::nullopt};
    } else {
        if (auto c = hybrid_pick(normal_rm, normal, p.budgets, state_.now)) return Pick{c->job, c->server};
    }

    if (migrated) return Pick{migrated->job.id, std::nullopt};
    if (late) return Pick{late->job.id, std::nullopt};
    return std::nullopt;
}

std::optional<JobId> Simulator::top_candidate(ProcId proc) const {
    auto pick = choose(state_.processors.at(proc), nullptr);
    if (!pick) return std::nullopt;
    return pick->job;
}

PriorityOrder Simulator::processor_order(ProcId proc) const {
    const auto mode = scenario().mode;
    const bool backup = state_.processors.at(proc).role == ProcRole::Backup;
    using Key = std::tuple<int, Tick, Tick, Tick, JobId>;
    auto key = [&](const ActiveJob& j) -> Key {
        const auto s = static_cast<int>(j.standing);
        switch (j.standing) {
        case Standing::Resumed:
        case Standing::Late: return {s, j.seq, 0, 0, j.job.id};
        case Standing::Normal:
            if (mode == SchedMode::RM && !backup) {
                return {s, static_cast<Tick>(static_cast<unsigned>(j.job.effective_priority)), j.job.release, 0, j.job.id};
            }
            return {s, j.job.abs_deadline, j.region == Region::FixedRM ? 0u : 1u, j.job.release, j.job.id};
        default: return {s, j.job.abs_deadline, j.job.release, 0, j.job.id};
        }
    };
    std::vector<const ActiveJob*> jobs;
    for (const auto& j : state_.jobs) {
        if (j.proc == proc && runnable(j)) jobs.push_back(&j);
    }
    std::sort(jobs.begin(), jobs.end(), [&](const ActiveJob* a, const ActiveJob* b) { return key(*a) < key(*b); });
    std::vector<JobId> ids;
    if (auto top = top_candidate(proc)) ids.push_back(*top);
    for (const auto* j : jobs) {
        if (ids.empty() || j->job.id != ids.front()) ids.push_back(j->job.id);
    }
    return PriorityOrder::from_jobs(ids);
}

void Simulator::dispatch() {
    const Tick now = state_.now;
    const Directive d = tick_hook(state_, state_.super);
    const Tick ctx = scenario().ctx_cost;
    for (auto& p : state_.processors) {
        if (p.failed()) continue;
        auto pick = choose(p, &d);
        std::optional<JobId> next;
        if (pick) next = pick->job;
        if (p.current != next) {
            if (p.current) {
                if (ActiveJob* cur = state_.find(*p.current)) {
                    std::string detail;
                    if (cur->job.state == JobState::Postponed) detail = "postponed";
                    else if (cur->proc != p.id) detail = "reassigned";
                    log({now, p.id, EventKind::Preempt, cur->job.id, detail});
                    if (cur->job.state == JobState::Running) cur->job.state = JobState::Ready;
                }
            }
            if (next) {
                ActiveJob* nj = state_.find(*next);
                std::string detail;
                if (nj->resume_pending) {
                    detail = "resume";
                    nj->resume_pending = false;
                } else if (pick->server) {
                    detail = "server=" + std::string(to_string(*pick->server));
                }
                log({now, p.id, EventKind::Dispatch, *next, detail});
                nj->job.state = JobState::Running;
                if (ctx > 0 && p.last_run != next) p.switch_left = ctx;
                p.last_run = next;
            }
            p.current = next;
        }
        p.charging = pick ? pick->server : std::nullopt;
    }
}

void Simulator::execute() {
    for (auto& p : state_.processors) {
        if (p.failed() || !p.current) continue;
        ActiveJob* j = state_.find(*p.current);
        if (!j) continue;
        if (p.switch_left > 0) {
            --p.switch_left;
        } else if (j->job.remaining > 0) {
            --j->job.remaining;
        }
        if (p.charging == ServerKind::RM && p.budgets.rm > 0) --p.budgets.rm;
        if (p.charging == ServerKind::EDF && p.budgets.edf > 0) --p.budgets.edf;
    }
}

void Simulator::retire(const JobId& id, EventKind kind, std::string detail, bool missed) {
    ActiveJob* j = state_.find(id);
    if (!j) {
        throw std::invalid_argument("no live job " + id.str());
    }
    const ProcId where = j->proc;
    if (missed) {
        log({stamp_, where, EventKind::Miss, id, "deadline=" + std::to_string(j->job.abs_deadline)});
    }
    log({stamp_, where, kind, id, std::move(detail)});
    for (auto& p : state_.processors) {
        if (p.current == id) {
            p.current.reset();
            p.charging.reset();
        }
    }
    auto& stack = state_.super.postponed_stack;
    stack.erase(std::remove(stack.begin(), stack.end(), id), stack.end());
    state_.jobs.erase(state_.jobs.begin() + (j - state_.jobs.data()));
}

void Simulator::discard_job(const JobId& id, std::string detail) {
    const bool was_active_ct = state_.super.active_ct && state_.super.active_ct->job_id() == id;
    retire(id, EventKind::Discard, std::move(detail));
    if (was_active_ct) on_critical_complete(*this);
}

void Simulator::complete_jobs() {
    std::vector<JobId> done;
    for (const auto& j : state_.jobs) {
        if (j.job.remaining == 0 && j.job.state == JobState::Running) done.push_back(j.job.id);
    }
    for (const auto& id : done) {
        const bool was_active_ct = state_.super.active_ct && state_.super.active_ct->job_id() == id;
        retire(id, EventKind::Complete, "");
        if (was_active_ct) on_critical_complete(*this);
    }
}

void Simulator::police_deadlines() {
    const Tick t = stamp_;
    std::vector<JobId> due;
    for (const auto& j : state_.jobs) {
        if (j.job.abs_deadline <= t && j.job.remaining > 0 && j.standing != Standing::Late) due.push_back(j.job.id);
    }
    for (const auto& id : due) {
        ActiveJob* j = state_.find(id);
        if (!j) continue;
        const bool postponed = j->job.state == JobState::Postponed;
        const bool was_active_ct = state_.super.active_ct && state_.super.active_ct->job_id() == id;
        if (id.critical || scenario().miss_policy == MissPolicy::Discard) {
            retire(id, EventKind::Discard, postponed ? "missed while postponed" : "deadline miss", true);
            if (was_active_ct) on_critical_complete(*this);
            continue;
        }
        log({t, j->proc, EventKind::Miss, id, "deadline=" + std::to_string(j->job.abs_deadline) + " demoted"});
        j->standing = Standing::Late;
        j->seq = state_.next_seq++;
        if (postponed) {
            j->job.state = JobState::Ready;
            j->proc = j->home;
            auto& stack = state_.super.postponed_stack;
            stack.erase(std::remove(stack.begin(), stack.end(), id), stack.end());
        }
    }
    auto& queue = state_.critical_queue;
    for (auto it = queue.begin(); it != queue.end();) {
        if (it->abs_deadline <= t) {
            log({t, kNoProc, EventKind::Miss, it->job_id(), "deadline=" + std::to_string(it->abs_deadline)});
            log({t, kNoProc, EventKind::Discard, it->job_id(), "queued past deadline"});
            it = queue.erase(it);
        } else {
            ++it;
        }
    }
}

void Simulator::discard_remaining(std::string detail) {
    stamp_ = state_.now;
    std::vector<JobId> left;
    for (const auto& j : state_.jobs) left.push_back(j.job.id);
    for (const auto& id : left) {
        if (state_.find(id)) retire(id, EventKind::Discard, detail);
    }
    for (const auto& ct : state_.critical_queue) {
        log({stamp_, kNoProc, EventKind::Discard, ct.job_id(), detail});
    }
    state_.critical_queue.clear();
    state_.super.active_ct.reset();
    state_.super.active_proc.reset();
    state_.super.postponed_stack.clear();
    state_.super.mode = SuperMode::Suspended;
}

bool Simulator::admits(const ActiveJob& job, ProcId target) const {
    Simulator probe(*this, ProbeTag{});
    const JobId id = job.job.id;
    ActiveJob* pj = probe.state_.find(id);
    pj->proc = target;
    pj->job.state = JobState::Ready;
    pj->standing = Standing::Migrated;
    auto& stack = probe.state_.super.postponed_stack;
    stack.erase(std::remove(stack.begin(), stack.end(), id), stack.end());

    probe.finish_tick();
    while (probe.state_.find(id) && probe.state_.now < job.job.abs_deadline) {
        probe.step();
    }
    for (const auto& ev : probe.trace_) {
        if (ev.kind == EventKind::Complete && ev.job == id) return ev.tick <= job.job.abs_deadline;
    }
    return false;
}

void Simulator::reassign_tasks(std::span<const JobId> displaced) {
    for (const auto& id : displaced) {
        ActiveJob* j = state_.find(id);
        if (!j || j->job.state != JobState::Postponed) {
            throw std::invalid_argument("job " + id.str() + " is not postponed");
        }
        const ProcId from = j->proc;
        std::vector<ProcId> rejected;
        std::optional<ProcId> landed;
        for (const auto& p : state_.processors) {
            if (p.failed() || p.id == from) continue;
            if (admits(*state_.find(id), p.id)) {
                landed = p.id;
                break;
            }
            rejected.push_back(p.id);
        }
        if (!landed) {
            std::string detail = "stays postponed";
            if (!rejected.empty()) detail += " rejected=" + join_procs(rejected);
            log({state_.now, from, EventKind::Reassign, id, detail});
            continue;
        }
        j = state_.find(id);
        j->proc = *landed;
        j->job.state = JobState::Ready;
        j->standing = Standing::Migrated;
        j->seq = state_.next_seq++;
        auto& stack = state_.super.postponed_stack;
        stack.erase(std::remove(stack.begin(), stack.end(), id), stack.end());
        std::string detail = "from " + proc_name(from);
        if (!rejected.empty()) detail += " rejected=" + join_procs(rejected);
        log({state_.now, *landed, EventKind::Reassign, id, detail});
    }
}

Trace run(const Scenario& scenario) {
    Simulator sim(scenario);
    return sim.run();
}

} // namespace supersched
