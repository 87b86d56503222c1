#include "doctest.h"
#include "quaysched/bayplan.hpp"
#include "quaysched/handling.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace quaysched;

namespace {

GeneratorProfile forced_profile() {
    GeneratorProfile p;
    p.min_hatches = p.max_hatches = 6;
    p.min_tasks_per_hatch = p.max_tasks_per_hatch = 1;
    p.min_moves_per_task = p.max_moves_per_task = 1;
    return p;
}

}  // namespace

TEST_SUITE("bayplan") {

TEST_CASE("forced bounds force the shape") {
    const BayPlan plan = generate_instance(1, forced_profile());
    CHECK(plan.num_hatches == 6);
    CHECK(plan.total_containers() == 6);
    CHECK(plan.total_tasks() == 6);
}

TEST_CASE("same seed and profile give byte-identical JSON") {
    const BayPlan a = generate_instance(7);
    const BayPlan b = generate_instance(7);
    CHECK(to_json(a).dump() == to_json(b).dump());
    const BayPlan c = generate_instance(8);
    CHECK(to_json(a).dump() != to_json(c).dump());
}

TEST_CASE("H is the slack-scaled work formula") {
    // Degenerate slack pins H exactly: recompute it from the emitted ground truth.
    GeneratorProfile p;
    p.slack_min = p.slack_max = 1.0;
    const BayPlan plan = generate_instance(2, p);
    std::int64_t work = 0;
    for (auto s : plan.ground_truth_seconds) work += s;
    const int ref = GeneratorProfile::reference_crane_count(plan.num_hatches);
    CHECK(plan.berthing_time == std::llround(static_cast<double>(work) / ref));

    // Default profile: H must land inside the slack band around work/ref.
    const BayPlan q = generate_instance(2);
    std::int64_t work_q = 0;
    for (auto s : q.ground_truth_seconds) work_q += s;
    const double base = static_cast<double>(work_q) / GeneratorProfile::reference_crane_count(q.num_hatches);
    CHECK(q.berthing_time >= std::floor(base * 0.95) - 1);
    CHECK(q.berthing_time <= std::ceil(base * 1.10) + 1);
}

TEST_CASE("generated instances satisfy every invariant") {
    // Property sweep across seeds; check_invariants throws on any breach.
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        const BayPlan plan = generate_instance(seed, GeneratorProfile::tiny());
        CHECK_NOTHROW(plan.check_invariants());
    }
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const BayPlan plan = generate_instance(seed);
        CHECK_NOTHROW(plan.check_invariants());
    }
}

TEST_CASE("unloads precede loads within each hatch") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const BayPlan plan = generate_instance(seed);
        for (int b = 1; b <= plan.num_hatches; ++b) {
            bool seen_load = false;
            for (const auto& task : plan.hatch_tasks(b)) {
                for (const auto& move : task.moves) {
                    if (move.load) seen_load = true;
                    if (seen_load) CHECK(move.load);
                }
            }
        }
    }
}

TEST_CASE("jobchange is recomputable from the load sequence") {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const BayPlan plan = generate_instance(seed, GeneratorProfile::tiny());
        for (const auto& hatch : plan.tasks_by_hatch) {
            for (const auto& task : hatch) {
                const auto expected = jobchange_flags(task.moves);
                for (std::size_t i = 0; i < task.moves.size(); ++i)
                    CHECK(task.moves[i].jobchange == expected[i]);
            }
        }
    }
}

TEST_CASE("write then read is the identity") {
    const BayPlan plan = generate_instance(13);
    const auto path = std::filesystem::temp_directory_path() / "quaysched_roundtrip.json";
    write_instance(plan, path.string());
    const BayPlan back = read_instance(path.string());
    CHECK(back == plan);
    std::filesystem::remove(path);
}

TEST_CASE("schema violations name the offending field") {
    auto j = to_json(generate_instance(3, GeneratorProfile::tiny()));

    SUBCASE("missing berthing_time") {
        j.erase("berthing_time");
        CHECK_THROWS_WITH_AS(bayplan_from_json(j), doctest::Contains("berthing_time"), ParseError);
    }
    SUBCASE("hatch index zero") {
        j["hatches"][0]["hatch"] = 0;
        CHECK_THROWS_WITH_AS(bayplan_from_json(j), doctest::Contains("hatch"), ParseError);
    }
    SUBCASE("non-binary move flag") {
        j["hatches"][0]["tasks"][0]["moves"][0]["load"] = 2;
        CHECK_THROWS_AS(bayplan_from_json(j), ParseError);
    }
    SUBCASE("inconsistent jobchange flag") {
        auto& moves = j["hatches"][0]["tasks"][0]["moves"];
        moves[0]["jobchange"] = 1;  // move 0 must be 0
        CHECK_THROWS_AS(bayplan_from_json(j), ParseError);
    }
}

TEST_CASE("ground-truth accessor resolves the canonical move order") {
    const BayPlan plan = generate_instance(21, GeneratorProfile::tiny());
    GroundTruth gt(plan);
    REQUIRE(gt.available());
    std::size_t flat = 0;
    for (int b = 1; b <= plan.num_hatches; ++b) {
        const auto& tasks = plan.hatch_tasks(b);
        for (std::size_t t = 0; t < tasks.size(); ++t)
            for (std::size_t m = 0; m < tasks[t].moves.size(); ++m)
                CHECK(gt.move_seconds(b, static_cast<int>(t), static_cast<int>(m)) ==
                      plan.ground_truth_seconds[flat++]);
    }
}

TEST_CASE("invalid profile bounds are a configuration error") {
    GeneratorProfile p;
    p.min_hatches = 10;
    p.max_hatches = 5;
    CHECK_THROWS_AS(generate_instance(1, p), ConfigError);
}

}  // TEST_SUITE
