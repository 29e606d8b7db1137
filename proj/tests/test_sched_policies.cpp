#include <supersched/sched_policies.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>

using namespace supersched;

namespace {

Job job(TaskId task, std::uint32_t idx, Tick release, Tick deadline, int prio = 0) {
    Job j;
    j.id = JobId::periodic(task, idx);
    j.release = release;
    j.abs_deadline = deadline;
    j.wcet = j.remaining = 1;
    j.effective_priority = prio;
    return j;
}

Task task(TaskId id, Tick t) {
    Task x;
    x.id = id;
    x.wcet = 1;
    x.period = x.deadline = t;
    return x;
}

JobId J(TaskId t) {
    return JobId::periodic(t, 1);
}

PriorityOrder order_of(std::initializer_list<JobId> ids) {
    std::vector<JobId> v(ids);
    return PriorityOrder::from_jobs(v);
}

} // namespace

TEST_CASE("rm_assign orders by period then id") {
    TaskSet s;
    s.tasks = {task(1, 10), task(2, 20), task(3, 5)};
    auto p = rm_assign(s);
    CHECK(p.at(3) == 0);
    CHECK(p.at(1) == 1);
    CHECK(p.at(2) == 2);

    s.tasks = {task(2, 5), task(1, 5)};
    p = rm_assign(s);
    CHECK(p.at(1) == 0);
    CHECK(p.at(2) == 1);

    s.tasks = {task(9, 3)};
    CHECK(rm_assign(s).at(9) == 0);
}

TEST_CASE("rm_assign is a permutation and ignores task-list order") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 200; ++rep) {
        TaskSet s;
        const int n = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) s.tasks.push_back(task(static_cast<TaskId>(i + 1), 1 + rng() % 10));
        auto base = rm_assign(s);
        std::vector<int> prios;
        for (auto& [id, p] : base) prios.push_back(p);
        std::sort(prios.begin(), prios.end());
        for (int i = 0; i < n; ++i) CHECK(prios[i] == i);
        std::shuffle(s.tasks.begin(), s.tasks.end(), rng);
        CHECK(rm_assign(s) == base);
    }
}

TEST_CASE("edf_pick examples") {
    CHECK_FALSE(edf_pick({}, 0).has_value());
    std::vector<Job> js = {job(1, 1, 0, 17), job(2, 1, 0, 12), job(3, 1, 0, 30)};
    CHECK(edf_pick(js, 0) == J(2));
    js = {job(1, 1, 5, 20), job(2, 1, 3, 20)};
    CHECK(edf_pick(js, 5) == J(2));
}

TEST_CASE("edf_pick agrees with a brute-force scan up to 10^4 jobs") {
    std::mt19937_64 rng(17);
    for (std::size_t n : {1u, 2u, 10u, 100u, 1000u, 10000u}) {
        for (int rep = 0; rep < 5; ++rep) {
            std::vector<Job> js;
            for (std::size_t i = 0; i < n; ++i) {
                js.push_back(job(static_cast<TaskId>(rng() % 50), static_cast<std::uint32_t>(1 + i), rng() % 20,
                                 20 + rng() % 20));
            }
            // brute force: a job wins iff no other job beats it on (deadline, release, id)
            std::optional<JobId> oracle;
            for (const auto& a : js) {
                bool beaten = false;
                for (const auto& b : js) {
                    if (std::tie(b.abs_deadline, b.release, b.id) < std::tie(a.abs_deadline, a.release, a.id)) {
                        beaten = true;
                        break;
                    }
                }
                if (!beaten) {
                    oracle = a.id;
                    break;
                }
            }
            CHECK(edf_pick(js, 0) == oracle);
            if (n >= 1000) break;
        }
    }
}

TEST_CASE("server budget") {
    ServerConfig q10;
    q10.quantum = 10;
    CHECK(server_budget(q10, 0.4) == 4);
    CHECK(server_budget(q10, 1.0) == 10);
    CHECK_THROWS_WITH_AS(server_budget(q10, 0.05), "quantum too coarse for server size", ConfigError);
}

TEST_CASE("server budget conserves the long-run rate") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 500; ++rep) {
        ServerConfig c;
        c.quantum = 1 + rng() % 200;
        const double u = (1 + rng() % 1000) / 1000.0;
        if (static_cast<double>(c.quantum) * u < 1.0) continue;
        const Tick b = server_budget(c, u);
        for (Tick k : {1ULL, 7ULL, 100ULL}) {
            const double granted = static_cast<double>(k * b);
            const double ideal = static_cast<double>(k) * static_cast<double>(c.quantum) * u;
            CHECK(granted >= ideal - static_cast<double>(k) - 1e-6);
            CHECK(granted <= ideal + 1e-6);
        }
    }
}

TEST_CASE("server config validation") {
    ServerConfig ok;
    CHECK(validate(ok).empty());
    ServerConfig bad{0.7, 0.6, 10};
    CHECK_FALSE(validate(bad).empty());
    ServerConfig zero{0.0, 0.5, 10};
    CHECK_FALSE(validate(zero).empty());
    ServerConfig coarse{0.05, 0.5, 10};
    CHECK_FALSE(validate(coarse).empty());
}

TEST_CASE("hybrid_pick examples") {
    std::vector<Job> none;
    std::vector<Job> edf = {job(2, 1, 0, 8)};
    auto c = hybrid_pick(none, edf, {0, 3}, 0);
    REQUIRE(c);
    CHECK(c->job == J(2));
    CHECK(c->server == ServerKind::EDF);

    std::vector<Job> rm = {job(1, 1, 0, 8)};
    c = hybrid_pick(rm, edf, {2, 2}, 0);
    REQUIRE(c);
    CHECK(c->job == J(1));
    CHECK(c->server == ServerKind::RM);

    CHECK_FALSE(hybrid_pick(none, edf, {5, 0}, 0).has_value());
}

TEST_CASE("hybrid_pick never selects a server without budget") {
    std::mt19937_64 rng(29);
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<Job> rm, edf;
        for (int i = 0; i < static_cast<int>(rng() % 4); ++i) rm.push_back(job(1 + i, 1, 0, 1 + rng() % 20, i));
        for (int i = 0; i < static_cast<int>(rng() % 4); ++i) edf.push_back(job(10 + i, 1, 0, 1 + rng() % 20));
        ServerBudgets b{rng() % 2, rng() % 2};
        auto c = hybrid_pick(rm, edf, b, 0);
        const bool rm_can = b.rm > 0 && !rm.empty();
        const bool edf_can = b.edf > 0 && !edf.empty();
        CHECK(c.has_value() == (rm_can || edf_can));
        if (!c) continue;
        if (c->server == ServerKind::RM) CHECK(rm_can);
        if (c->server == ServerKind::EDF) CHECK(edf_can);
        if (rm_can && edf_can) {
            const Job& r = *std::find_if(rm.begin(), rm.end(), [&](const Job& j) { return j.id == *rm_pick(rm); });
            const Job& e = *std::find_if(edf.begin(), edf.end(), [&](const Job& j) { return j.id == *edf_pick(edf, 0); });
            CHECK(c->server == (e.abs_deadline < r.abs_deadline ? ServerKind::EDF : ServerKind::RM));
        }
    }
}

TEST_CASE("priority_alter examples") {
    const auto ct = make_critical(1, 2, 0);
    const JobId CT = ct.job_id();

    auto r = priority_alter(order_of({J(1), J(2), J(3)}), ct, J(1));
    CHECK(r.order.jobs() == std::vector<JobId>{CT, J(1), J(2), J(3)});
    CHECK(r.postponed == std::vector<JobId>{J(1)});

    r = priority_alter(PriorityOrder{}, ct, std::nullopt);
    CHECK(r.order.jobs() == std::vector<JobId>{CT});
    CHECK(r.postponed.empty());

    r = priority_alter(order_of({J(5), J(2)}), ct, J(5));
    CHECK(r.order.jobs() == std::vector<JobId>{CT, J(5), J(2)});
    CHECK(r.postponed == std::vector<JobId>{J(5)});
}

TEST_CASE("a second critical task queues behind the first") {
    const auto a = make_critical(1, 2, 0);
    const auto b = make_critical(2, 2, 0);
    auto first = priority_alter(order_of({J(1), J(2)}), a, J(1));
    auto second = priority_alter(first.order, b, std::nullopt);
    CHECK(second.order.jobs() == std::vector<JobId>{a.job_id(), b.job_id(), J(1), J(2)});
    CHECK(second.postponed.empty());
    CHECK_THROWS_AS(priority_alter(second.order, a, std::nullopt), std::invalid_argument);
}

TEST_CASE("priority_alter keeps the ordinary order and puts the critical job at rank 0") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 500; ++rep) {
        std::vector<JobId> ids;
        const int n = static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) ids.push_back(J(static_cast<TaskId>(i + 1)));
        std::shuffle(ids.begin(), ids.end(), rng);
        auto o = PriorityOrder::from_jobs(ids);
        const auto ct = make_critical(7, 1, 0);
        std::optional<JobId> running;
        if (!ids.empty() && rng() % 2) running = ids.front();
        auto r = priority_alter(o, ct, running);
        CHECK(r.order.rank_of(ct.job_id()) == std::size_t{0});
        auto rest = r.order.jobs();
        rest.erase(rest.begin());
        CHECK(rest == ids);
        for (std::size_t i = 0; i < r.order.size(); ++i) CHECK(r.order.entries[i].priority == static_cast<int>(i));
        CHECK(r.postponed.size() == (running ? 1u : 0u));
    }
}

TEST_CASE("overrun_demote") {
    const JobId A = J(1), B = J(2), C = J(3);
    CHECK(overrun_demote(order_of({A, B, C}), B).jobs() == std::vector<JobId>{A, C, B});
    CHECK(overrun_demote(order_of({A}), A).jobs() == std::vector<JobId>{A});
    auto both = overrun_demote(overrun_demote(order_of({A, B}), A), B);
    CHECK(both.jobs() == std::vector<JobId>{A, B});
    CHECK(both.entries[0].late);
    CHECK(both.entries[1].late);
}

TEST_CASE("overrun_demote keeps non-late jobs in order") {
    std::mt19937_64 rng(37);
    for (int rep = 0; rep < 300; ++rep) {
        std::vector<JobId> ids;
        const int n = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) ids.push_back(J(static_cast<TaskId>(i + 1)));
        auto o = PriorityOrder::from_jobs(ids);
        std::vector<JobId> late_order;
        for (int k = 0; k < 3; ++k) {
            JobId pick = ids[rng() % ids.size()];
            if (std::find(late_order.begin(), late_order.end(), pick) == late_order.end()) late_order.push_back(pick);
            o = overrun_demote(o, pick);
        }
        std::vector<JobId> expect;
        for (auto& id : ids) {
            if (std::find(late_order.begin(), late_order.end(), id) == late_order.end()) expect.push_back(id);
        }
        expect.insert(expect.end(), late_order.begin(), late_order.end());
        CHECK(o.jobs() == expect);
    }
}
