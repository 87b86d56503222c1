#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quaysched/bayplan.hpp"
#include "quaysched/handling.hpp"
#include "quaysched/search.hpp"
#include "quaysched/surrogate.hpp"

namespace quaysched {

/// Workload buckets for the results tables. Bounds are the lower edges of the
/// non-initial buckets: {300,600,1000,1500} labels ~299, 300~599, ..., 1500~.
struct VanBuckets {
    std::vector<int> bounds = {300, 600, 1000, 1500};
    std::string label(int con) const;
    std::vector<std::string> labels() const;  // in ascending workload order
};

extern const std::vector<std::string> kSolverNames;  // surrogate, ga-tournament, ga-roulette

SearchResult run_solver(const std::string& solver, const BayPlan& plan, const HandlingModel& f1,
                        const Regressor* f2, const SearchParams& params,
                        const SearchHooks& hooks = {});

struct BenchRun {
    std::string instance_id;
    std::string solver;
    int population = 0;
    std::string van_bucket;
    int con = 0;
    double time_s = 0.0;
    std::optional<std::int64_t> score;
    int total_evals = 0;
    std::vector<GenerationLog> generations;
};

/// Full sweep: every (instance x solver x population) cell, instances fanned out across
/// workers. Seeds derive from (base seed, instance index, solver, population), so the
/// sweep is reproducible run-to-run and across thread counts.
std::vector<BenchRun> run_bench(const std::vector<BayPlan>& plans, const HandlingModel& f1,
                                const Regressor& f2, const std::vector<std::string>& solvers,
                                const std::vector<int>& populations, const SearchParams& base,
                                const VanBuckets& buckets);

struct SummaryRow {
    int population = 0;
    std::string van_bucket;
    std::string solver;
    double mean_time_s = 0.0;
    std::optional<double> mean_score;  // over solved runs; empty when none solved
    int n_instances = 0;
};

std::vector<SummaryRow> aggregate(const std::vector<BenchRun>& runs, const VanBuckets& buckets);

struct FigRow {
    int population = 0;
    std::string solver;
    double value = 0.0;
};

std::vector<FigRow> fig8_rows(const std::vector<BenchRun>& runs);  // mean time vs population
std::vector<FigRow> fig9_rows(const std::vector<BenchRun>& runs);  // mean score vs population

void write_runs_csv(const std::vector<BenchRun>& runs, const std::string& path);
std::vector<BenchRun> read_runs_csv(const std::string& path);  // without generation logs
void write_gens_csv(const std::vector<BenchRun>& runs, const std::string& path);
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path);
std::vector<SummaryRow> read_summary_csv(const std::string& path);
void write_fig_csv(const std::vector<FigRow>& rows, const std::string& value_column,
                   const std::string& path);

/// Per-generation best-so-far logs parsed back from gens.csv, keyed by
/// (instance, solver, population).
struct GensRecord {
    std::string instance_id;
    std::string solver;
    int population = 0;
    int generation = 0;
    int full_evals = 0;
    std::optional<std::int64_t> best_fitness;
};
std::vector<GensRecord> read_gens_csv(const std::string& path);

// Table-2-shaped f1 comparison: per-move, per-task, and makespan-level errors against
// the stored ground-truth handling times of held-out vessels.

struct HandlingReport {
    HandlingKind kind;
    Metrics move;
    Metrics task;
    Metrics makespan;
};

struct HandlingEvalOptions {
    int chromosomes_per_plan = 5;
    int lq = 1;
    int uq = 6;
    int overlap = 1;
    std::uint64_t seed = 0;
};

std::vector<HandlingReport> evaluate_handling(
    const std::vector<BayPlan>& test_plans,
    const std::vector<std::pair<HandlingKind, HandlingModel>>& models,
    const HandlingEvalOptions& opts = {});

void write_handling_csv(const std::vector<HandlingReport>& rows, const std::string& path);
std::vector<HandlingReport> read_handling_csv(const std::string& path);

void write_f2_metrics_csv(const std::vector<SelectionEntry>& table, const std::string& path);
std::vector<std::pair<std::string, Metrics>> read_f2_metrics_csv(const std::string& path);

}  // namespace quaysched
