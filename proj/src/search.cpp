#include "quaysched/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "quaysched/threads.hpp"

namespace quaysched {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

constexpr std::uint64_t kStreamPopulation = 1;
constexpr std::uint64_t kStreamEvolution = 2;
constexpr std::uint64_t kStreamOperators = 3;

struct Individual {
    Chromosome chromosome;
    Evaluation eval;
};

/// Evaluates a fixed chromosome set across workers, then reports results in index
/// order: counts, hooks, and the best-so-far update stay schedule-independent.
class BudgetedEvaluator {
public:
    BudgetedEvaluator(const BayPlan& plan, const HandlingModel& f1, const SearchHooks& hooks,
                      SearchResult& result)
        : plan_(plan), f1_(f1), hooks_(hooks), result_(result) {}

    Evaluation evaluate_one(const Chromosome& c) {
        Evaluation ev = evaluate(plan_, c, f1_);
        ++result_.total_full_evals;
        if (hooks_.on_full_eval) hooks_.on_full_eval(c, ev);
        consider_best(c, ev);
        return ev;
    }

    std::vector<Evaluation> evaluate_all(const std::vector<Chromosome>& cs) {
        std::vector<Evaluation> evals(cs.size());
        parallel_for(cs.size(), [&](std::size_t i) { evals[i] = evaluate(plan_, cs[i], f1_); });
        for (std::size_t i = 0; i < cs.size(); ++i) {
            ++result_.total_full_evals;
            if (hooks_.on_full_eval) hooks_.on_full_eval(cs[i], evals[i]);
            consider_best(cs[i], evals[i]);
        }
        return evals;
    }

private:
    void consider_best(const Chromosome& c, const Evaluation& ev) {
        if (!ev.feasible) return;
        if (!result_.best_eval || *ev.fitness < *result_.best_eval->fitness) {
            result_.best = c;
            result_.best_eval = ev;
        }
    }

    const BayPlan& plan_;
    const HandlingModel& f1_;
    const SearchHooks& hooks_;
    SearchResult& result_;
};

int effective_uq(const SearchParams& params, const BayPlan& plan) {
    return std::min(params.uq, plan.num_hatches);
}

int effective_lq(const SearchParams& params, int uq_eff) { return std::min(params.lq, uq_eff); }

}  // namespace

void SearchParams::check() const {
    auto bad = [](const std::string& what) { throw ConfigError("search params: " + what); };
    if (max_generations < 1) bad("max_generations must be >= 1");
    if (parents < 2) bad("parents must be >= 2");
    if (evolutions < 0) bad("evolutions must be >= 0");
    if (population < parents) bad("population must be >= parents");
    if (lq < 1 || lq > uq) bad("1 <= lq <= uq required");
    if (evaluation_cap < 0) bad("evaluation_cap must be >= 0");
}

SearchResult solve_surrogate(const BayPlan& plan, const Regressor& f2, const HandlingModel& f1,
                             const SearchParams& params, const SearchHooks& hooks) {
    params.check();
    const int uq_eff = effective_uq(params, plan);
    const int lq_eff = effective_lq(params, uq_eff);
    const int uq_feat = f2.padding_uq();
    if (uq_feat < uq_eff)
        throw ConfigError("f2 model was trained with padding uq=" + std::to_string(uq_feat) +
                          " < search uq=" + std::to_string(uq_eff));
    const int cap = params.evaluation_cap > 0 ? params.evaluation_cap : params.population;

    const auto solve_start = Clock::now();
    SearchResult result;
    BudgetedEvaluator evaluator(plan, f1, hooks, result);

    for (int g = 0; g < params.max_generations; ++g) {
        const auto gen_start = Clock::now();
        GenerationLog log;
        log.generation = g;

        auto generated = generate_set(plan, params.population, lq_eff, uq_eff,
                                      mix_seed(params.seed, static_cast<std::uint64_t>(g),
                                               kStreamPopulation),
                                      ChromosomeOptions{params.overlap});
        auto& pop = generated.chromosomes;

        std::vector<double> predicted(pop.size());
        parallel_for(pop.size(), [&](std::size_t i) {
            predicted[i] = predict_fitness(f2, features_of(plan, pop[i], uq_feat));
        });
        std::vector<std::size_t> order(pop.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return predicted[a] < predicted[b]; });

        // Rank-order evaluation until np feasible parents or the cap.
        std::vector<Individual> parents;
        for (std::size_t idx : order) {
            if (log.ranking_evals >= cap) break;
            const Evaluation ev = evaluator.evaluate_one(pop[idx]);
            ++log.ranking_evals;
            if (ev.feasible) {
                log.predicted_actual.emplace_back(predicted[idx],
                                                  static_cast<double>(*ev.fitness));
                parents.push_back({pop[idx], ev});
                if (static_cast<int>(parents.size()) == params.parents) break;
            }
        }

        // Evolution: crossover + mutation + elitist truncation, e rounds. Fewer than
        // two feasible parents means nothing to recombine this generation.
        if (parents.size() >= 2) {
            Rng evo_rng(mix_seed(params.seed, static_cast<std::uint64_t>(g), kStreamEvolution));
            for (int round = 0; round < params.evolutions; ++round) {
                std::vector<std::size_t> perm(parents.size());
                std::iota(perm.begin(), perm.end(), 0);
                evo_rng.shuffle(perm);

                std::vector<Chromosome> offspring;
                std::size_t i = 0;
                for (; i + 1 < perm.size(); i += 2) {
                    const auto& pa = parents[perm[i]].chromosome;
                    const auto& pb = parents[perm[i + 1]].chromosome;
                    if (pa.num_qcs == pb.num_qcs && pa.ranges == pb.ranges) {
                        auto [ca, cb] = crossover(pa, pb);
                        offspring.push_back(mutate(ca, plan, evo_rng));
                        offspring.push_back(mutate(cb, plan, evo_rng));
                    } else {
                        // No dimension match in this pair: mutation stands in.
                        offspring.push_back(mutate(pa, plan, evo_rng));
                        offspring.push_back(mutate(pb, plan, evo_rng));
                    }
                }
                if (i < perm.size()) offspring.push_back(mutate(parents[perm[i]].chromosome, plan, evo_rng));

                const auto evals = evaluator.evaluate_all(offspring);
                log.offspring_evals += static_cast<int>(offspring.size());
                for (std::size_t j = 0; j < offspring.size(); ++j)
                    if (evals[j].feasible) parents.push_back({offspring[j], evals[j]});

                std::stable_sort(parents.begin(), parents.end(),
                                 [](const Individual& a, const Individual& b) {
                                     return *a.eval.fitness < *b.eval.fitness;
                                 });
                if (static_cast<int>(parents.size()) > params.parents)
                    parents.resize(static_cast<std::size_t>(params.parents));
            }
        }

        log.full_evals = log.ranking_evals + log.offspring_evals;
        if (result.best_eval) log.best_fitness = *result.best_eval->fitness;
        log.wall_ms = ms_since(gen_start);
        result.generations.push_back(std::move(log));
    }

    result.wall_ms = ms_since(solve_start);
    return result;
}

std::vector<int> flatten_assignment(const Chromosome& c) {
    std::vector<int> genes;
    for (const auto& row : c.assignment) genes.insert(genes.end(), row.begin(), row.end());
    return genes;
}

void unflatten_assignment(Chromosome& c, const std::vector<int>& genes) {
    std::size_t pos = 0;
    for (auto& row : c.assignment)
        for (auto& gene : row) gene = genes.at(pos++);
    if (pos != genes.size())
        throw std::invalid_argument("gene string length does not match the assignment shape");
}

void clamp_genes(Chromosome& c, const BayPlan& plan) {
    const auto cover = covering_sets(plan.num_hatches, c.ranges);
    for (int b = 1; b <= plan.num_hatches; ++b) {
        const auto& cs = cover[static_cast<std::size_t>(b - 1)];
        for (auto& gene : c.assignment[static_cast<std::size_t>(b - 1)]) {
            int best = cs.front();
            int best_dist = std::abs(best - gene);
            for (int k : cs) {
                const int d = std::abs(k - gene);
                if (d < best_dist) {
                    best = k;
                    best_dist = d;
                }
            }
            gene = best;
        }
    }
}

Chromosome pmx_child(const Chromosome& a, const Chromosome& b, const BayPlan& plan,
                     std::size_t cut1, std::size_t cut2) {
    auto genes = flatten_assignment(a);
    const auto donor = flatten_assignment(b);

    // Value mapping donor -> receiver over the cut, first occurrence wins.
    std::map<int, int> mapping;
    for (std::size_t i = cut1; i < cut2; ++i) {
        mapping.emplace(donor[i], genes[i]);
        genes[i] = donor[i];
    }
    const std::size_t guard = cut2 - cut1;
    for (std::size_t i = 0; i < genes.size(); ++i) {
        if (i >= cut1 && i < cut2) continue;
        int v = genes[i];
        for (std::size_t steps = 0; steps < guard; ++steps) {
            const auto it = mapping.find(v);
            if (it == mapping.end()) break;
            v = it->second;
        }
        genes[i] = v;
    }

    Chromosome child = a;
    unflatten_assignment(child, genes);
    clamp_genes(child, plan);
    return child;
}

Chromosome order_child(const Chromosome& a, const Chromosome& b, const BayPlan& plan,
                       std::size_t cut1, std::size_t cut2) {
    const auto keep = flatten_assignment(a);
    const auto donor = flatten_assignment(b);
    const std::size_t n = keep.size();
    std::vector<int> genes(n);
    for (std::size_t i = cut1; i < cut2; ++i) genes[i] = keep[i];
    std::size_t src = cut2 % n;
    std::size_t dst = cut2 % n;
    for (std::size_t filled = 0; filled + (cut2 - cut1) < n; ++filled) {
        genes[dst] = donor[src];
        src = (src + 1) % n;
        dst = (dst + 1) % n;
        while (dst >= cut1 && dst < cut2) dst = (dst + 1) % n;
    }

    Chromosome child = a;
    unflatten_assignment(child, genes);
    clamp_genes(child, plan);
    return child;
}

Chromosome swap_mutate(const Chromosome& c, const BayPlan& plan, Rng& rng) {
    std::vector<int> eligible;
    for (int b = 1; b <= plan.num_hatches; ++b)
        if (c.assignment[static_cast<std::size_t>(b - 1)].size() >= 2) eligible.push_back(b);
    if (eligible.empty()) return mutate(c, plan, rng);

    Chromosome out = c;
    const int b = eligible[rng.next_below(eligible.size())];
    auto& row = out.assignment[static_cast<std::size_t>(b - 1)];
    const auto i = static_cast<std::size_t>(rng.next_below(row.size()));
    auto j = static_cast<std::size_t>(rng.next_below(row.size() - 1));
    if (j >= i) ++j;
    std::swap(row[i], row[j]);
    return out;
}

std::vector<double> roulette_weights(const std::vector<Evaluation>& evals) {
    std::vector<double> weights(evals.size(), 0.0);
    bool any_feasible = false;
    for (std::size_t i = 0; i < evals.size(); ++i) {
        if (evals[i].feasible) {
            weights[i] = 1.0 / (1.0 + static_cast<double>(*evals[i].fitness));
            any_feasible = true;
        }
    }
    if (!any_feasible) std::fill(weights.begin(), weights.end(), 1.0);
    return weights;
}

namespace {

std::size_t roulette_pick(const std::vector<double>& weights, Rng& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    const double target = rng.uniform_real() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (target < acc) return i;
    }
    return weights.size() - 1;
}

std::size_t tournament_pick(const std::vector<Individual>& pop, Rng& rng) {
    const std::size_t i = rng.next_below(pop.size());
    const std::size_t j = rng.next_below(pop.size());
    const auto& a = pop[i].eval;
    const auto& b = pop[j].eval;
    if (a.feasible != b.feasible) return a.feasible ? i : j;
    if (a.feasible && b.feasible) return *a.fitness <= *b.fitness ? i : j;
    return i;
}

std::pair<std::size_t, std::size_t> draw_cuts(std::size_t n, Rng& rng) {
    if (n < 2) return {0, n};
    std::size_t c1 = rng.next_below(n);
    std::size_t c2 = rng.next_below(n);
    while (c2 == c1) c2 = rng.next_below(n);
    if (c1 > c2) std::swap(c1, c2);
    return {c1, c2 + 1};  // half-open, non-empty
}

enum class BaselineKind { Tournament, Roulette };

SearchResult solve_baseline(const BayPlan& plan, const HandlingModel& f1,
                            const SearchParams& params, const SearchHooks& hooks,
                            BaselineKind kind) {
    params.check();
    const int uq_eff = effective_uq(params, plan);
    const int lq_eff = effective_lq(params, uq_eff);

    const auto solve_start = Clock::now();
    SearchResult result;
    BudgetedEvaluator evaluator(plan, f1, hooks, result);

    auto generated = generate_set(plan, params.population, lq_eff, uq_eff,
                                  mix_seed(params.seed, 0, kStreamPopulation),
                                  ChromosomeOptions{params.overlap});

    std::vector<Individual> pop;
    {
        const auto gen_start = Clock::now();
        const auto evals = evaluator.evaluate_all(generated.chromosomes);
        for (std::size_t i = 0; i < generated.chromosomes.size(); ++i)
            pop.push_back({std::move(generated.chromosomes[i]), evals[i]});
        GenerationLog log;
        log.generation = 0;
        log.ranking_evals = static_cast<int>(pop.size());
        log.full_evals = log.ranking_evals;
        if (result.best_eval) log.best_fitness = *result.best_eval->fitness;
        log.wall_ms = ms_since(gen_start);
        result.generations.push_back(std::move(log));
    }

    for (int g = 1; g < params.max_generations; ++g) {
        const auto gen_start = Clock::now();
        Rng rng(mix_seed(params.seed, static_cast<std::uint64_t>(g), kStreamOperators));

        std::vector<Evaluation> pop_evals;
        pop_evals.reserve(pop.size());
        for (const auto& ind : pop) pop_evals.push_back(ind.eval);
        const auto weights = roulette_weights(pop_evals);

        std::vector<Chromosome> next;
        next.reserve(pop.size());
        while (next.size() < pop.size()) {
            std::size_t ia, ib;
            if (kind == BaselineKind::Tournament) {
                ia = tournament_pick(pop, rng);
                ib = tournament_pick(pop, rng);
            } else {
                ia = roulette_pick(weights, rng);
                ib = roulette_pick(weights, rng);
            }
            const auto& pa = pop[ia].chromosome;
            const auto& pb = pop[ib].chromosome;
            const auto [c1, c2] = draw_cuts(flatten_assignment(pa).size(), rng);
            if (kind == BaselineKind::Tournament) {
                next.push_back(pmx_child(pa, pb, plan, c1, c2));
                if (next.size() < pop.size()) next.push_back(pmx_child(pb, pa, plan, c1, c2));
            } else {
                Chromosome ca = order_child(pa, pb, plan, c1, c2);
                next.push_back(swap_mutate(ca, plan, rng));
                if (next.size() < pop.size()) {
                    Chromosome cb = order_child(pb, pa, plan, c1, c2);
                    next.push_back(swap_mutate(cb, plan, rng));
                }
            }
        }

        const auto evals = evaluator.evaluate_all(next);
        pop.clear();
        for (std::size_t i = 0; i < next.size(); ++i) pop.push_back({std::move(next[i]), evals[i]});

        GenerationLog log;
        log.generation = g;
        log.ranking_evals = static_cast<int>(pop.size());
        log.full_evals = log.ranking_evals;
        if (result.best_eval) log.best_fitness = *result.best_eval->fitness;
        log.wall_ms = ms_since(gen_start);
        result.generations.push_back(std::move(log));
    }

    result.wall_ms = ms_since(solve_start);
    return result;
}

}  // namespace

SearchResult solve_ga_tournament(const BayPlan& plan, const HandlingModel& f1,
                                 const SearchParams& params, const SearchHooks& hooks) {
    return solve_baseline(plan, f1, params, hooks, BaselineKind::Tournament);
}

SearchResult solve_ga_roulette(const BayPlan& plan, const HandlingModel& f1,
                               const SearchParams& params, const SearchHooks& hooks) {
    return solve_baseline(plan, f1, params, hooks, BaselineKind::Roulette);
}

nlohmann::json to_json(const SearchResult& result) {
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& g : result.generations) {
        nlohmann::json pa = nlohmann::json::array();
        for (const auto& [pred, actual] : g.predicted_actual) pa.push_back({pred, actual});
        gens.push_back({{"generation", g.generation},
                        {"full_evals", g.full_evals},
                        {"ranking_evals", g.ranking_evals},
                        {"offspring_evals", g.offspring_evals},
                        {"best_fitness", g.best_fitness ? nlohmann::json(*g.best_fitness)
                                                        : nlohmann::json(nullptr)},
                        {"wall_ms", g.wall_ms},
                        {"predicted_actual", std::move(pa)}});
    }
    nlohmann::json j = {{"status", result.solved() ? "ok" : "no_solution"},
                        {"total_full_evals", result.total_full_evals},
                        {"wall_ms", result.wall_ms},
                        {"generations", std::move(gens)}};
    if (result.solved()) {
        j["best"] = result.best->to_json();
        j["best_fitness"] = *result.best_eval->fitness;
        j["best_makespan"] = result.best_eval->makespan;
    } else {
        j["best"] = nullptr;
    }
    return j;
}

void write_generation_csv(const SearchResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write generation log " + path);
    out << "generation,full_evals,best_fitness,wall_ms\n";
    for (const auto& g : result.generations) {
        out << g.generation << ',' << g.full_evals << ',';
        if (g.best_fitness) out << *g.best_fitness;
        out << ',' << g.wall_ms << '\n';
    }
}

}  // namespace quaysched
