#pragma once

#include <cstdint>
#include <optional>

#include "json.hpp"
#include "quaysched/bayplan.hpp"
#include "quaysched/chromosome.hpp"
#include "quaysched/handling.hpp"

namespace quaysched {

// Exact ground truth for tiny instances. Everything here is re-derived on purpose:
// the grid simulator and the enumerator's evaluator share no timeline or feasibility
// code with the schedule module, so agreement between the two is a real check.

struct OracleLimits {
    int max_total_tasks = 8;
    int max_uq = 3;
    std::uint64_t max_enumerations = 1'000'000;
};

enum class OracleStatus { Optimal, Infeasible, TooLarge };

struct OracleResult {
    OracleStatus status = OracleStatus::TooLarge;
    std::int64_t optimum = 0;             // valid when status == Optimal
    std::optional<Chromosome> best;       // one optimal chromosome
    std::uint64_t enumerated = 0;
};

/// 1-second-grid feasibility: materializes every crane's position per second and checks
/// strict left-to-right ordering of active cranes, at-most-one crane per hatch, and
/// within-hatch slot precedence.
bool grid_check(const BayPlan& plan, const Chromosome& c, const HandlingModel& model);

/// Exhaustive minimum of |H - C| over every crane count in [lq, uq] and every
/// range-respecting assignment (ranges built by the same block rule the generator uses).
/// Ties break toward the lexicographically smallest encoding.
OracleResult enumerate_optimum(const BayPlan& plan, int lq, int uq, const HandlingModel& model,
                               const OracleLimits& limits = {}, int overlap = 1);

nlohmann::json to_json(const OracleResult& result);

}  // namespace quaysched
