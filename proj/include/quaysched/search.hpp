#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "json.hpp"
#include "quaysched/bayplan.hpp"
#include "quaysched/chromosome.hpp"
#include "quaysched/handling.hpp"
#include "quaysched/schedule.hpp"
#include "quaysched/surrogate.hpp"

namespace quaysched {

struct SearchParams {
    int max_generations = 10;  // G
    int parents = 5;           // np
    int evolutions = 10;       // e
    int population = 100;      // nc, fresh population per generation
    int lq = 1;
    int uq = 6;
    std::uint64_t seed = 0;
    int evaluation_cap = 0;  // per-generation cap on ranked evaluations; 0 = population
    int overlap = 1;

    void check() const;  // throws ConfigError on invariant breach
};

struct GenerationLog {
    int generation = 0;
    int full_evals = 0;      // ranking + offspring
    int ranking_evals = 0;   // surrogate rank-order phase (population phase for baselines)
    int offspring_evals = 0;
    std::optional<std::int64_t> best_fitness;  // best-so-far after this generation
    double wall_ms = 0.0;
    std::vector<std::pair<double, double>> predicted_actual;  // feasible ranked evals
};

struct SearchResult {
    std::optional<Chromosome> best;
    std::optional<Evaluation> best_eval;
    std::vector<GenerationLog> generations;
    int total_full_evals = 0;
    double wall_ms = 0.0;

    bool solved() const { return best.has_value(); }
};

struct SearchHooks {
    /// Called once per full evaluation, in a deterministic order independent of the
    /// worker count.
    std::function<void(const Chromosome&, const Evaluation&)> on_full_eval;
};

/// Surrogate-assisted search: per generation a fresh population is generated, ranked by
/// the f2 prediction, and evaluated in rank order until `parents` feasible chromosomes
/// are found (capped at evaluation_cap); the parents then evolve through `evolutions`
/// rounds of midpoint crossover, single-hatch mutation, and elitist truncation.
SearchResult solve_surrogate(const BayPlan& plan, const Regressor& f2, const HandlingModel& f1,
                             const SearchParams& params, const SearchHooks& hooks = {});

/// Baseline: generational GA with size-2 tournament selection and two-point PMX on the
/// row-major flattened assignment string (out-of-range genes clamped to the nearest
/// covering QC). Evaluates the whole population every generation.
SearchResult solve_ga_tournament(const BayPlan& plan, const HandlingModel& f1,
                                 const SearchParams& params, const SearchHooks& hooks = {});

/// Baseline: generational GA with roulette selection (weights 1/(1+fitness) over the
/// feasible individuals), order crossover on the flattened string, and swap mutation
/// inside one hatch.
SearchResult solve_ga_roulette(const BayPlan& plan, const HandlingModel& f1,
                               const SearchParams& params, const SearchHooks& hooks = {});

nlohmann::json to_json(const SearchResult& result);
void write_generation_csv(const SearchResult& result, const std::string& path);

// Operator internals, exposed for the property suites.

std::vector<int> flatten_assignment(const Chromosome& c);
void unflatten_assignment(Chromosome& c, const std::vector<int>& genes);

/// Clamp every gene to its hatch's covering set under the chromosome's own ranges
/// (nearest QC index; ties toward the smaller index).
void clamp_genes(Chromosome& c, const BayPlan& plan);

/// Two-point PMX adapted to QC-label strings: the child takes `a`, receives b's cut
/// segment, maps displaced values outside the cut, and is clamped back into a's ranges.
Chromosome pmx_child(const Chromosome& a, const Chromosome& b, const BayPlan& plan,
                     std::size_t cut1, std::size_t cut2);

/// Order crossover adapted to QC-label strings: the child keeps a's cut segment and
/// fills the remaining positions from b in cyclic order starting after the cut.
Chromosome order_child(const Chromosome& a, const Chromosome& b, const BayPlan& plan,
                       std::size_t cut1, std::size_t cut2);

/// Swap two genes within one hatch (falls back to a single-hatch redraw when every
/// hatch has fewer than two slots).
Chromosome swap_mutate(const Chromosome& c, const BayPlan& plan, Rng& rng);

/// Roulette weights over a population's evaluations: 1/(1+fitness) for feasible
/// individuals, 0 for infeasible; uniform when nothing is feasible.
std::vector<double> roulette_weights(const std::vector<Evaluation>& evals);

}  // namespace quaysched
