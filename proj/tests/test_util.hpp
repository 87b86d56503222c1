#pragma once

// Hand-built fixtures shared across the test suites.

#include <cstdint>
#include <vector>

#include "quaysched/bayplan.hpp"

namespace quaysched::testutil {

/// Plan with tasks_per_hatch[b-1] tasks in hatch b, each of uniform all-unload moves.
inline BayPlan make_plan(const std::vector<int>& tasks_per_hatch, int moves_per_task = 2,
                         std::int64_t berthing_time = 1000) {
    BayPlan plan;
    plan.vessel_id = "fixture";
    plan.num_hatches = static_cast<int>(tasks_per_hatch.size());
    plan.berthing_time = berthing_time;
    plan.tasks_by_hatch.resize(tasks_per_hatch.size());
    int id = 1;
    for (std::size_t h = 0; h < tasks_per_hatch.size(); ++h) {
        for (int t = 0; t < tasks_per_hatch[h]; ++t) {
            Task task;
            task.task_id = id++;
            task.hatch = static_cast<int>(h) + 1;
            task.moves.assign(static_cast<std::size_t>(moves_per_task), ContainerMove{});
            plan.tasks_by_hatch[h].push_back(std::move(task));
        }
    }
    return plan;
}

}  // namespace quaysched::testutil
