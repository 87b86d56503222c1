// Command-line front end: instance generation, f1/f2 training, the three solvers, the
// benchmark sweep, and the exact-oracle comparison on tiny instances.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "quaysched/bench.hpp"
#include "quaysched/oracle.hpp"
#include "quaysched/threads.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace quaysched;

namespace {

struct RunConfig {
    std::uint64_t seed = 0;
    std::string out = "out";
    int n = 20;
    std::string solver = "surrogate";
    int population = 100;
    std::string model_kind;  // empty = auto-select
    std::string profile_preset = "default";
    GeneratorProfile profile;
    SearchParams ga;
    RegressOptions regress;
    int f2_per_plan = 50;
    int handling_chromosomes_per_plan = 5;
    std::vector<int> populations_sweep = {100, 300, 500, 700};
    VanBuckets van_buckets;
    OracleLimits oracle_limits;
};

GeneratorProfile preset_profile(const std::string& name) {
    if (name == "default") return GeneratorProfile{};
    if (name == "tiny") return GeneratorProfile::tiny();
    if (name == "mid") return GeneratorProfile::mid();
    throw ConfigError("unknown profile preset '" + name + "'");
}

template <typename T>
void maybe(const json& j, const char* key, T& value) {
    if (j.contains(key)) value = j.at(key).get<T>();
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    in >> j;

    maybe(j, "seed", cfg.seed);
    maybe(j, "out", cfg.out);
    maybe(j, "n", cfg.n);
    maybe(j, "solver", cfg.solver);
    maybe(j, "population", cfg.population);
    maybe(j, "model_kind", cfg.model_kind);
    if (j.contains("profile")) {
        const auto& p = j.at("profile");
        maybe(p, "preset", cfg.profile_preset);
        cfg.profile = preset_profile(cfg.profile_preset);
        maybe(p, "min_hatches", cfg.profile.min_hatches);
        maybe(p, "max_hatches", cfg.profile.max_hatches);
        maybe(p, "min_tasks_per_hatch", cfg.profile.min_tasks_per_hatch);
        maybe(p, "max_tasks_per_hatch", cfg.profile.max_tasks_per_hatch);
        maybe(p, "min_moves_per_task", cfg.profile.min_moves_per_task);
        maybe(p, "max_moves_per_task", cfg.profile.max_moves_per_task);
        maybe(p, "twin_prob", cfg.profile.twin_prob);
        maybe(p, "full_prob", cfg.profile.full_prob);
        maybe(p, "special_prob", cfg.profile.special_prob);
        maybe(p, "slack_min", cfg.profile.slack_min);
        maybe(p, "slack_max", cfg.profile.slack_max);
        maybe(p, "noise", cfg.profile.noise);
    }
    if (j.contains("ga")) {
        const auto& g = j.at("ga");
        maybe(g, "max_generations", cfg.ga.max_generations);
        maybe(g, "parents", cfg.ga.parents);
        maybe(g, "evolutions", cfg.ga.evolutions);
        maybe(g, "population", cfg.ga.population);
        maybe(g, "lq", cfg.ga.lq);
        maybe(g, "uq", cfg.ga.uq);
        maybe(g, "evaluation_cap", cfg.ga.evaluation_cap);
        maybe(g, "overlap", cfg.ga.overlap);
    }
    if (j.contains("f2")) {
        const auto& f = j.at("f2");
        maybe(f, "per_plan", cfg.f2_per_plan);
        maybe(f, "ridge", cfg.regress.ridge);
        maybe(f, "bandwidth", cfg.regress.bandwidth);
        maybe(f, "knn_k", cfg.regress.knn_k);
        maybe(f, "max_kernel_points", cfg.regress.max_kernel_points);
    }
    if (j.contains("handling_eval")) {
        maybe(j.at("handling_eval"), "chromosomes_per_plan", cfg.handling_chromosomes_per_plan);
    }
    maybe(j, "populations_sweep", cfg.populations_sweep);
    if (j.contains("van_buckets")) cfg.van_buckets.bounds = j.at("van_buckets").get<std::vector<int>>();
    if (j.contains("oracle")) {
        const auto& o = j.at("oracle");
        maybe(o, "max_total_tasks", cfg.oracle_limits.max_total_tasks);
        maybe(o, "max_uq", cfg.oracle_limits.max_uq);
        maybe(o, "max_enumerations", cfg.oracle_limits.max_enumerations);
    }
}

std::vector<std::string> list_instance_files(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.starts_with("instance_") && name.ends_with(".json"))
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("no instance_*.json files under " + dir);
    return files;
}

std::vector<BayPlan> load_instances(const std::string& dir) {
    std::vector<BayPlan> plans;
    for (const auto& path : list_instance_files(dir)) plans.push_back(read_instance(path));
    return plans;
}

/// Deterministic 80/20 vessel split shared by train-f1 and train-f2.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_by_vessel(std::size_t n,
                                                                              std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(mix_seed(seed, 0x76657373u));
    rng.shuffle(order);
    const std::size_t n_test = std::max<std::size_t>(1, n / 5);
    std::vector<std::size_t> train(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> test(order.end() - static_cast<std::ptrdiff_t>(n_test), order.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {train, test};
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    json j;
    in >> j;
    return j;
}

int cmd_gen(const RunConfig& cfg) {
    if (cfg.n < 1) throw ConfigError("gen: --n must be >= 1");
    fs::create_directories(cfg.out);
    std::vector<HandlingSample> all_samples;
    for (int i = 0; i < cfg.n; ++i) {
        const BayPlan plan = generate_instance(mix_seed(cfg.seed, static_cast<std::uint64_t>(i)),
                                               cfg.profile);
        char name[32];
        std::snprintf(name, sizeof(name), "instance_%04d.json", i);
        write_instance(plan, (fs::path(cfg.out) / name).string());
        const auto samples = handling_samples(plan);
        all_samples.insert(all_samples.end(), samples.begin(), samples.end());
    }
    std::ofstream csv(fs::path(cfg.out) / "samples.csv");
    csv << "load,twin,full,special,jobchange,seconds\n";
    for (const auto& s : all_samples)
        csv << (s.move.load ? 1 : 0) << ',' << (s.move.twin ? 1 : 0) << ',' << (s.move.full ? 1 : 0)
            << ',' << (s.move.special ? 1 : 0) << ',' << (s.move.jobchange ? 1 : 0) << ','
            << static_cast<std::int64_t>(s.seconds) << '\n';
    std::cout << "wrote " << cfg.n << " instances to " << cfg.out << "\n";
    return 0;
}

int cmd_train_f1(const RunConfig& cfg, const std::string& data_dir) {
    fs::create_directories(cfg.out);
    const auto plans = load_instances(data_dir);
    const auto [train_idx, test_idx] = split_by_vessel(plans.size(), cfg.seed);

    std::vector<HandlingSample> train_samples;
    for (std::size_t i : train_idx) {
        const auto s = handling_samples(plans[i]);
        train_samples.insert(train_samples.end(), s.begin(), s.end());
    }
    std::vector<BayPlan> test_plans;
    for (std::size_t i : test_idx) test_plans.push_back(plans[i]);

    const HandlingKind kinds[] = {HandlingKind::Constant, HandlingKind::AverageByType,
                                  HandlingKind::Linear, HandlingKind::KernelRbf};
    std::vector<std::pair<HandlingKind, HandlingModel>> models;
    for (HandlingKind kind : kinds)
        models.emplace_back(kind, fit_handling(kind, train_samples, cfg.regress));

    HandlingEvalOptions eval_opts;
    eval_opts.chromosomes_per_plan = cfg.handling_chromosomes_per_plan;
    eval_opts.lq = cfg.ga.lq;
    eval_opts.uq = cfg.ga.uq;
    eval_opts.overlap = cfg.ga.overlap;
    eval_opts.seed = cfg.seed;
    const auto reports = evaluate_handling(test_plans, models, eval_opts);
    write_handling_csv(reports, (fs::path(cfg.out) / "f1_metrics.csv").string());

    // Saved model: forced kind, or the lowest makespan-level MAE.
    HandlingKind chosen = reports.front().kind;
    double best_mae = reports.front().makespan.mae;
    for (const auto& r : reports) {
        if (r.makespan.mae < best_mae) {
            best_mae = r.makespan.mae;
            chosen = r.kind;
        }
    }
    if (!cfg.model_kind.empty()) chosen = handling_kind_from_string(cfg.model_kind);
    const auto it = std::find_if(models.begin(), models.end(),
                                 [&](const auto& kv) { return kv.first == chosen; });
    json model_file = {{"selected", to_string(chosen)}, {"model", it->second.to_json()}};
    write_json_file(model_file, (fs::path(cfg.out) / "f1_model.json").string());

    json split = {{"train", json::array()}, {"test", json::array()}};
    for (std::size_t i : train_idx) split["train"].push_back(plans[i].vessel_id);
    for (std::size_t i : test_idx) split["test"].push_back(plans[i].vessel_id);
    write_json_file(split, (fs::path(cfg.out) / "f1_split.json").string());

    std::cout << "selected f1: " << to_string(chosen) << " (makespan MAE " << best_mae << ")\n";
    return 0;
}

HandlingModel load_f1(const std::string& path) {
    return HandlingModel::from_json(read_json_file(path).at("model"));
}

Regressor load_f2(const std::string& path) {
    return Regressor::from_json(read_json_file(path).at("model"));
}

int cmd_train_f2(const RunConfig& cfg, const std::string& data_dir, const std::string& f1_path) {
    fs::create_directories(cfg.out);
    const auto plans = load_instances(data_dir);
    const HandlingModel f1 = load_f1(f1_path);

    TrainingSetParams params{cfg.ga.lq, cfg.ga.uq, cfg.ga.overlap};
    const auto rows = build_training_set(plans, cfg.f2_per_plan, params, f1, cfg.seed);

    std::vector<FitnessSample> samples;
    std::vector<int> groups;
    for (const auto& row : rows) {
        samples.push_back(row.sample);
        groups.push_back(row.plan_index);
    }
    write_training_csv(samples, cfg.ga.uq, (fs::path(cfg.out) / "training_set.csv").string());

    auto selection = select_fitness_model(samples, cfg.regress, &groups, cfg.seed);
    if (!cfg.model_kind.empty()) {
        const FitnessKind forced = fitness_kind_from_string(cfg.model_kind);
        selection.selected = forced;
        selection.model = fit_fitness(forced, samples, cfg.regress, &groups, cfg.seed);
    }
    write_f2_metrics_csv(selection.table, (fs::path(cfg.out) / "f2_metrics.csv").string());

    json model_file = {{"selected", to_string(selection.selected)},
                       {"model", selection.model.to_json()}};
    write_json_file(model_file, (fs::path(cfg.out) / "f2_model.json").string());

    json split = {{"train", json::array()}, {"test", json::array()}};
    for (int g : selection.model.report().train_groups) split["train"].push_back(plans[static_cast<std::size_t>(g)].vessel_id);
    for (int g : selection.model.report().test_groups) split["test"].push_back(plans[static_cast<std::size_t>(g)].vessel_id);
    write_json_file(split, (fs::path(cfg.out) / "f2_split.json").string());

    std::cout << "selected f2: " << to_string(selection.selected) << " (held-out MAE "
              << selection.model.report().mae << ")\n";
    return 0;
}

int cmd_solve(const RunConfig& cfg, const std::string& instance_path, const std::string& f1_path,
              const std::string& f2_path) {
    fs::create_directories(cfg.out);
    const BayPlan plan = read_instance(instance_path);
    const HandlingModel f1 = load_f1(f1_path);
    std::optional<Regressor> f2;
    if (cfg.solver == "surrogate") {
        if (f2_path.empty()) throw ConfigError("solve: the surrogate solver needs --f2");
        f2 = load_f2(f2_path);
    }

    SearchParams params = cfg.ga;
    params.population = cfg.population;
    params.seed = cfg.seed;
    const SearchResult result =
        run_solver(cfg.solver, plan, f1, f2 ? &*f2 : nullptr, params);

    write_json_file(to_json(result), (fs::path(cfg.out) / "result.json").string());
    write_generation_csv(result, (fs::path(cfg.out) / "generations.csv").string());
    if (result.solved()) {
        const Timeline timeline = decode(plan, *result.best, f1);
        write_json_file(to_json(timeline, *result.best_eval),
                        (fs::path(cfg.out) / "schedule.json").string());
        std::cout << "fitness " << *result.best_eval->fitness << " makespan "
                  << result.best_eval->makespan << " evals " << result.total_full_evals << "\n";
        return 0;
    }
    std::cout << "no solution found\n";
    return 3;
}

int cmd_bench(const RunConfig& cfg, const std::string& data_dir, const std::string& f1_path,
              const std::string& f2_path) {
    fs::create_directories(cfg.out);
    const auto plans = load_instances(data_dir);
    const HandlingModel f1 = load_f1(f1_path);
    const Regressor f2 = load_f2(f2_path);

    SearchParams base = cfg.ga;
    base.seed = cfg.seed;
    const auto runs =
        run_bench(plans, f1, f2, kSolverNames, cfg.populations_sweep, base, cfg.van_buckets);

    write_runs_csv(runs, (fs::path(cfg.out) / "runs.csv").string());
    write_gens_csv(runs, (fs::path(cfg.out) / "gens.csv").string());
    write_summary_csv(aggregate(runs, cfg.van_buckets), (fs::path(cfg.out) / "summary.csv").string());
    write_fig_csv(fig8_rows(runs), "mean_time_s", (fs::path(cfg.out) / "fig8.csv").string());
    write_fig_csv(fig9_rows(runs), "mean_score", (fs::path(cfg.out) / "fig9.csv").string());
    std::cout << "bench: " << runs.size() << " runs over " << plans.size() << " instances\n";
    return 0;
}

int cmd_oracle(const RunConfig& cfg, const std::string& data_dir, const std::string& f1_path,
               const std::string& f2_path) {
    fs::create_directories(cfg.out);
    const auto plans = load_instances(data_dir);
    const HandlingModel f1 = load_f1(f1_path);
    const Regressor f2 = load_f2(f2_path);

    json instances = json::array();
    std::map<std::string, int> matches;
    int solvable = 0;
    std::uint64_t grid_checked = 0, grid_agree = 0;

    for (std::size_t pi = 0; pi < plans.size(); ++pi) {
        const auto& plan = plans[pi];
        json entry = {{"instance", plan.vessel_id}};
        const int uq_eff = std::min(cfg.ga.uq, std::min(cfg.oracle_limits.max_uq, plan.num_hatches));
        const int lq_eff = std::min(cfg.ga.lq, uq_eff);
        const OracleResult oracle =
            enumerate_optimum(plan, lq_eff, uq_eff, f1, cfg.oracle_limits, cfg.ga.overlap);
        entry["oracle"] = to_json(oracle);

        if (oracle.status == OracleStatus::Optimal) {
            ++solvable;
            SearchParams params = cfg.ga;
            params.uq = uq_eff;
            params.lq = lq_eff;
            params.population = cfg.population;
            json solver_results;
            for (std::size_t si = 0; si < kSolverNames.size(); ++si) {
                const auto& solver = kSolverNames[si];
                SearchParams sp = params;
                sp.seed = mix_seed(cfg.seed, pi, si + 1);
                const SearchResult result = run_solver(solver, plan, f1, &f2, sp);
                json sr = {{"solved", result.solved()}};
                if (result.solved()) {
                    sr["fitness"] = *result.best_eval->fitness;
                    sr["matches_optimum"] = *result.best_eval->fitness == oracle.optimum;
                    if (*result.best_eval->fitness == oracle.optimum) ++matches[solver];
                }
                solver_results[solver] = std::move(sr);
            }
            entry["solvers"] = std::move(solver_results);

            // Cross-check the two feasibility implementations on sampled chromosomes.
            const auto sample = generate_set(plan, 50, lq_eff, uq_eff, mix_seed(cfg.seed, pi, 0x6772u),
                                             ChromosomeOptions{cfg.ga.overlap});
            for (const auto& c : sample.chromosomes) {
                const bool event_verdict = evaluate(plan, c, f1).feasible;
                const bool grid_verdict = grid_check(plan, c, f1);
                ++grid_checked;
                if (event_verdict == grid_verdict) ++grid_agree;
            }
        }
        instances.push_back(std::move(entry));
    }

    json report = {{"instances", std::move(instances)},
                   {"solvable_instances", solvable},
                   {"grid_agreement", {{"checked", grid_checked}, {"agree", grid_agree}}}};
    for (const auto& solver : kSolverNames)
        report["match_rate"][solver] =
            solvable > 0 ? static_cast<double>(matches[solver]) / solvable : 0.0;
    write_json_file(report, (fs::path(cfg.out) / "oracle_report.json").string());
    std::cout << "oracle: " << solvable << "/" << plans.size() << " instances within limits\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quay crane scheduling: surrogate-assisted GA, baselines, and exact oracle"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::string out;
    app.add_option("--config", config_path, "JSON config file (flags override it)");
    auto* seed_opt = app.add_option("--seed", seed, "master seed");
    auto* out_opt = app.add_option("--out", out, "output directory");

    int n = 0;
    std::string profile_name, data_dir, instance_path, f1_path, f2_path, solver, model_kind;
    int population = 0;

    auto* gen = app.add_subcommand("gen", "generate synthetic instances + handling samples");
    auto* gen_n = gen->add_option("--n", n, "number of instances");
    auto* gen_profile = gen->add_option("--profile", profile_name, "profile preset: default|tiny|mid");

    auto* train_f1 = app.add_subcommand("train-f1", "fit handling-time models, emit metrics");
    train_f1->add_option("--data", data_dir, "instances directory")->required();
    auto* f1_kind = train_f1->add_option("--model-kind", model_kind, "force the saved kind");

    auto* train_f2 = app.add_subcommand("train-f2", "fit fitness surrogates, emit metrics");
    train_f2->add_option("--data", data_dir, "instances directory")->required();
    train_f2->add_option("--f1", f1_path, "trained f1 model file")->required();
    auto* f2_kind = train_f2->add_option("--model-kind", model_kind, "force the saved kind");

    auto* solve = app.add_subcommand("solve", "run one solver on one instance");
    solve->add_option("--instance", instance_path, "instance file")->required();
    auto* solve_solver = solve->add_option("--solver", solver, "surrogate|ga-tournament|ga-roulette")
                             ->check(CLI::IsMember({"surrogate", "ga-tournament", "ga-roulette"}));
    solve->add_option("--f1", f1_path, "trained f1 model file")->required();
    solve->add_option("--f2", f2_path, "trained f2 model file (surrogate)");
    auto* solve_pop = solve->add_option("--population", population, "population per generation");

    auto* bench = app.add_subcommand("bench", "population sweep over instances and solvers");
    bench->add_option("--data", data_dir, "instances directory")->required();
    bench->add_option("--f1", f1_path, "trained f1 model file")->required();
    bench->add_option("--f2", f2_path, "trained f2 model file")->required();

    auto* oracle = app.add_subcommand("oracle", "exact optimum vs solvers on tiny instances");
    oracle->add_option("--data", data_dir, "instances directory")->required();
    oracle->add_option("--f1", f1_path, "trained f1 model file")->required();
    oracle->add_option("--f2", f2_path, "trained f2 model file")->required();
    auto* oracle_pop = oracle->add_option("--population", population, "population per generation");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (!config_path.empty()) load_config_file(cfg, config_path);
        if (seed_opt->count() > 0) cfg.seed = seed;
        if (out_opt->count() > 0) cfg.out = out;
        if (gen_n->count() > 0) cfg.n = n;
        if (gen_profile->count() > 0) cfg.profile_preset = profile_name;
        if (gen_profile->count() > 0 || config_path.empty())
            cfg.profile = preset_profile(cfg.profile_preset);
        if (f1_kind->count() > 0 || f2_kind->count() > 0) cfg.model_kind = model_kind;
        if (solve_solver->count() > 0) cfg.solver = solver;
        if (solve_pop->count() > 0 || oracle_pop->count() > 0) cfg.population = population;

        if (gen->parsed()) return cmd_gen(cfg);
        if (train_f1->parsed()) return cmd_train_f1(cfg, data_dir);
        if (train_f2->parsed()) return cmd_train_f2(cfg, data_dir, f1_path);
        if (solve->parsed()) return cmd_solve(cfg, instance_path, f1_path, f2_path);
        if (bench->parsed()) return cmd_bench(cfg, data_dir, f1_path, f2_path);
        if (oracle->parsed()) return cmd_oracle(cfg, data_dir, f1_path, f2_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
