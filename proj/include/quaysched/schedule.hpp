#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "json.hpp"
#include "quaysched/bayplan.hpp"
#include "quaysched/chromosome.hpp"
#include "quaysched/handling.hpp"

namespace quaysched {

struct TaskInterval {
    int task_id = 0;
    int hatch = 0;
    std::int64_t start = 0;
    std::int64_t end = 0;  // half-open [start, end)
};

/// Decoded timeline: per-QC contiguous task intervals, all cranes deploying at t = 0.
struct Timeline {
    std::vector<std::vector<TaskInterval>> per_qc;  // index k-1, hatch-ascending order

    std::int64_t start_time() const;  // min start over assigned tasks (0 when any exist)
    std::int64_t end_time() const;    // max end
    std::int64_t makespan() const { return end_time() - start_time(); }
};

struct ViolationCounts {
    int crossover = 0;    // a lower-numbered QC positioned right of a higher-numbered one
    int exclusivity = 0;  // two QCs working the same hatch at the same instant
    int precedence = 0;   // a hatch's slot m+1 started before slot m completed

    bool feasible() const { return crossover == 0 && exclusivity == 0 && precedence == 0; }
};

struct Evaluation {
    bool feasible = false;
    std::optional<std::int64_t> fitness;  // |H - C|; present iff feasible
    std::int64_t makespan = 0;
    ViolationCounts violations;
};

/// Task duration used by the timeline: predicted seconds rounded to the nearest whole
/// second, floored at 1. Integer durations keep the event-based checker and the
/// 1-second-grid oracle exactly comparable.
std::int64_t task_duration(const HandlingModel& model, const Task& task);

using DurationFn = std::function<std::int64_t(const Task&)>;

/// Decodes a chromosome: each QC runs its assigned tasks ordered by (hatch ascending,
/// slot ascending), back to back from t = 0.
Timeline decode(const BayPlan& plan, const Chromosome& c, const DurationFn& duration);
Timeline decode(const BayPlan& plan, const Chromosome& c, const HandlingModel& model);

/// Event-based feasibility: over each maximal constant-position segment, active QCs
/// (started, not finished) must sit at strictly increasing hatches; at most one QC per
/// hatch at any instant; within a hatch, slot m+1 must not start before slot m completes.
ViolationCounts check_feasibility(const Timeline& timeline, const Chromosome& c);

/// decode + check_feasibility + |H - C|.
Evaluation evaluate(const BayPlan& plan, const Chromosome& c, const HandlingModel& model);
Evaluation evaluate(const BayPlan& plan, const Chromosome& c, const DurationFn& duration);

nlohmann::json to_json(const Timeline& timeline, const Evaluation& eval);

}  // namespace quaysched
