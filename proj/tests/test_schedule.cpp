#include "doctest.h"
#include "quaysched/oracle.hpp"
#include "quaysched/schedule.hpp"
#include "test_util.hpp"

#include <map>

using namespace quaysched;
using testutil::make_plan;

namespace {

DurationFn by_task_id(std::map<int, std::int64_t> durations) {
    return [d = std::move(durations)](const Task& t) { return d.at(t.task_id); };
}

Chromosome full_range_chromosome(const BayPlan& plan, int nq,
                                 std::vector<std::vector<int>> assignment) {
    Chromosome c;
    c.num_qcs = nq;
    c.ranges.assign(static_cast<std::size_t>(nq), {1, plan.num_hatches});
    c.assignment = std::move(assignment);
    return c;
}

}  // namespace

TEST_SUITE("schedule") {

TEST_CASE("one crane runs its tasks back to back") {
    const auto plan = make_plan({1, 1});  // task 1 in hatch 1, task 2 in hatch 2
    const auto c = full_range_chromosome(plan, 1, {{1}, {1}});
    const auto timeline = decode(plan, c, by_task_id({{1, 100}, {2, 200}}));
    REQUIRE(timeline.per_qc.size() == 1);
    REQUIRE(timeline.per_qc[0].size() == 2);
    CHECK(timeline.per_qc[0][0].start == 0);
    CHECK(timeline.per_qc[0][0].end == 100);
    CHECK(timeline.per_qc[0][1].start == 100);
    CHECK(timeline.per_qc[0][1].end == 300);
    CHECK(timeline.makespan() == 300);
}

TEST_CASE("disjoint cranes run in parallel") {
    const auto plan = make_plan({1, 1});
    const auto c = full_range_chromosome(plan, 2, {{1}, {2}});
    const auto timeline = decode(plan, c, by_task_id({{1, 100}, {2, 100}}));
    CHECK(timeline.per_qc[0][0].end == 100);
    CHECK(timeline.per_qc[1][0].end == 100);
    CHECK(timeline.makespan() == 100);
    const auto counts = check_feasibility(timeline, c);
    CHECK(counts.feasible());
}

TEST_CASE("decode keeps contiguity and duration identities") {
    const auto plan = generate_instance(4, GeneratorProfile::tiny());
    const auto model = HandlingModel::constant();
    for (const auto& c : generate_set(plan, 50, 1, std::min(3, plan.num_hatches), 6).chromosomes) {
        const auto timeline = decode(plan, c, model);
        for (std::size_t k = 0; k < timeline.per_qc.size(); ++k) {
            const auto& qc = timeline.per_qc[k];
            for (std::size_t i = 0; i < qc.size(); ++i) {
                if (i == 0) CHECK(qc[0].start == 0);
                if (i > 0) CHECK(qc[i].start == qc[i - 1].end);  // non-delay
                CHECK(qc[i].end > qc[i].start);
                if (i > 0) CHECK(qc[i].hatch >= qc[i - 1].hatch);  // left-to-right
            }
        }
    }
}

TEST_CASE("crossed cranes are a crossover violation") {
    // QC1 works hatch 3 while QC2 works hatch 2.
    const auto plan = make_plan({0, 1, 1});
    const auto c = full_range_chromosome(plan, 2, {{}, {2}, {1}});
    const auto timeline = decode(plan, c, by_task_id({{1, 100}, {2, 100}}));
    const auto counts = check_feasibility(timeline, c);
    CHECK(counts.crossover > 0);
    CHECK(!counts.feasible());
}

TEST_CASE("shared hatch is an exclusivity violation") {
    const auto plan = make_plan({2});
    const auto c = full_range_chromosome(plan, 2, {{1, 2}});
    const auto timeline = decode(plan, c, by_task_id({{1, 100}, {2, 100}}));
    const auto counts = check_feasibility(timeline, c);
    CHECK(counts.exclusivity > 0);
    CHECK(!counts.feasible());
}

TEST_CASE("slot order is enforced even without temporal overlap") {
    // Hatch 2 slot 0 -> QC1 (arrives late), slot 1 -> QC2 (runs first and leaves).
    const auto plan = make_plan({1, 2});
    const auto c = full_range_chromosome(plan, 2, {{1}, {1, 2}});
    const auto timeline = decode(plan, c, by_task_id({{1, 100}, {2, 100}, {3, 50}}));
    const auto counts = check_feasibility(timeline, c);
    CHECK(counts.crossover == 0);
    CHECK(counts.exclusivity == 0);
    CHECK(counts.precedence > 0);
}

TEST_CASE("fitness is the absolute |H - C|") {
    auto plan = make_plan({1, 1});
    plan.berthing_time = 300;
    const auto c = full_range_chromosome(plan, 1, {{1}, {1}});
    const auto ev = evaluate(plan, c, by_task_id({{1, 100}, {2, 200}}));
    REQUIRE(ev.feasible);
    CHECK(ev.makespan == 300);
    CHECK(*ev.fitness == 0);

    plan.berthing_time = 250;
    const auto ev2 = evaluate(plan, c, by_task_id({{1, 100}, {2, 100}}));
    CHECK(ev2.makespan == 200);
    CHECK(*ev2.fitness == 50);
}

TEST_CASE("infeasible evaluations carry no fitness") {
    const auto plan = make_plan({2});
    const auto c = full_range_chromosome(plan, 2, {{1, 2}});
    const auto ev = evaluate(plan, c, by_task_id({{1, 100}, {2, 100}}));
    CHECK(!ev.feasible);
    CHECK(!ev.fitness.has_value());
    CHECK(ev.makespan > 0);
}

TEST_CASE("fitness is symmetric around C") {
    const auto plan = generate_instance(9, GeneratorProfile::tiny());
    const auto model = HandlingModel::constant();
    for (const auto& c : generate_set(plan, 30, 1, std::min(3, plan.num_hatches), 2).chromosomes) {
        const auto ev = evaluate(plan, c, model);
        if (!ev.feasible) continue;
        BayPlan mirrored = plan;
        mirrored.berthing_time = 2 * ev.makespan - plan.berthing_time;
        if (mirrored.berthing_time <= 0) continue;
        const auto ev2 = evaluate(mirrored, c, model);
        REQUIRE(ev2.feasible);
        CHECK(*ev2.fitness == *ev.fitness);
    }
}

TEST_CASE("relabeling task ids never changes the verdict") {
    const auto plan = generate_instance(12, GeneratorProfile::tiny());
    BayPlan relabeled = plan;
    for (auto& hatch : relabeled.tasks_by_hatch)
        for (auto& task : hatch) task.task_id = task.task_id * 10 + 3;
    const auto model = HandlingModel::constant();
    for (const auto& c : generate_set(plan, 50, 1, std::min(3, plan.num_hatches), 8).chromosomes) {
        const auto a = evaluate(plan, c, model);
        const auto b = evaluate(relabeled, c, model);
        CHECK(a.feasible == b.feasible);
        CHECK(a.makespan == b.makespan);
        CHECK(a.fitness == b.fitness);
    }
}

TEST_CASE("event verdict equals the independent grid verdict") {
    const auto model = HandlingModel::constant();
    int checked = 0;
    int infeasible_seen = 0;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const auto plan = generate_instance(seed, GeneratorProfile::tiny());
        const int uq = std::min(3, plan.num_hatches);
        for (const auto& c : generate_set(plan, 12, 1, uq, seed + 100).chromosomes) {
            const bool event_verdict = evaluate(plan, c, model).feasible;
            const bool grid_verdict = grid_check(plan, c, model);
            REQUIRE(event_verdict == grid_verdict);
            ++checked;
            if (!event_verdict) ++infeasible_seen;
        }
    }
    CHECK(checked >= 100);
    CHECK(infeasible_seen > 0);  // the comparison must exercise both verdicts
}

TEST_CASE("schedule JSON carries intervals and the verdict") {
    auto plan = make_plan({1, 1});
    plan.berthing_time = 300;
    const auto c = full_range_chromosome(plan, 1, {{1}, {1}});
    const auto duration = by_task_id({{1, 100}, {2, 200}});
    const auto timeline = decode(plan, c, duration);
    const auto ev = evaluate(plan, c, duration);
    const auto j = to_json(timeline, ev);
    CHECK(j.at("feasible").get<bool>());
    CHECK(j.at("fitness").get<std::int64_t>() == 0);
    CHECK(j.at("makespan").get<std::int64_t>() == 300);
    CHECK(j.at("qcs").size() == 1);
    CHECK(j.at("qcs")[0].at("tasks").size() == 2);
}

}  // TEST_SUITE
