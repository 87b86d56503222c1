#include "quaysched/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "quaysched/oracle.hpp"
#include "quaysched/threads.hpp"

namespace quaysched {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open CSV " + path);
    std::string header;
    if (!std::getline(in, header)) throw ParseError("empty CSV " + path);
    if (header != expected_header)
        throw ParseError("CSV " + path + " header mismatch: got '" + header + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) rows.push_back(split_csv_line(line));
    }
    return rows;
}

std::uint64_t solver_salt(const std::string& solver) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : solver) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

std::string VanBuckets::label(int con) const {
    if (bounds.empty()) return "all";
    if (con < bounds.front()) return "~" + std::to_string(bounds.front() - 1);
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i)
        if (con < bounds[i + 1])
            return std::to_string(bounds[i]) + "~" + std::to_string(bounds[i + 1] - 1);
    return std::to_string(bounds.back()) + "~";
}

std::vector<std::string> VanBuckets::labels() const {
    std::vector<std::string> out;
    if (bounds.empty()) return {"all"};
    out.push_back("~" + std::to_string(bounds.front() - 1));
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i)
        out.push_back(std::to_string(bounds[i]) + "~" + std::to_string(bounds[i + 1] - 1));
    out.push_back(std::to_string(bounds.back()) + "~");
    return out;
}

const std::vector<std::string> kSolverNames = {"surrogate", "ga-tournament", "ga-roulette"};

SearchResult run_solver(const std::string& solver, const BayPlan& plan, const HandlingModel& f1,
                        const Regressor* f2, const SearchParams& params, const SearchHooks& hooks) {
    if (solver == "surrogate") {
        if (f2 == nullptr) throw ConfigError("surrogate solver needs a trained f2 model");
        return solve_surrogate(plan, *f2, f1, params, hooks);
    }
    if (solver == "ga-tournament") return solve_ga_tournament(plan, f1, params, hooks);
    if (solver == "ga-roulette") return solve_ga_roulette(plan, f1, params, hooks);
    throw ConfigError("unknown solver '" + solver + "'");
}

std::vector<BenchRun> run_bench(const std::vector<BayPlan>& plans, const HandlingModel& f1,
                                const Regressor& f2, const std::vector<std::string>& solvers,
                                const std::vector<int>& populations, const SearchParams& base,
                                const VanBuckets& buckets) {
    struct Cell {
        std::size_t plan;
        std::string solver;
        int population;
    };
    std::vector<Cell> cells;
    for (std::size_t pi = 0; pi < plans.size(); ++pi)
        for (const auto& solver : solvers)
            for (int population : populations) cells.push_back({pi, solver, population});

    std::vector<BenchRun> runs(cells.size());
    parallel_for(cells.size(), [&](std::size_t i) {
        const auto& cell = cells[i];
        const auto& plan = plans[cell.plan];
        SearchParams params = base;
        params.population = cell.population;
        params.seed = mix_seed(base.seed, cell.plan,
                               solver_salt(cell.solver) ^ static_cast<std::uint64_t>(cell.population));
        const SearchResult result = run_solver(cell.solver, plan, f1, &f2, params);

        BenchRun& run = runs[i];
        run.instance_id = plan.vessel_id;
        run.solver = cell.solver;
        run.population = cell.population;
        run.con = plan.total_containers();
        run.van_bucket = buckets.label(run.con);
        run.time_s = result.wall_ms / 1000.0;
        if (result.solved()) run.score = *result.best_eval->fitness;
        run.total_evals = result.total_full_evals;
        run.generations = result.generations;
    });
    return runs;
}

std::vector<SummaryRow> aggregate(const std::vector<BenchRun>& runs, const VanBuckets& buckets) {
    std::vector<int> populations;
    for (const auto& run : runs) populations.push_back(run.population);
    std::sort(populations.begin(), populations.end());
    populations.erase(std::unique(populations.begin(), populations.end()), populations.end());

    std::vector<SummaryRow> rows;
    for (int population : populations) {
        for (const auto& bucket : buckets.labels()) {
            for (const auto& solver : kSolverNames) {
                SummaryRow row;
                row.population = population;
                row.van_bucket = bucket;
                row.solver = solver;
                double time_sum = 0.0, score_sum = 0.0;
                int n = 0, solved = 0;
                for (const auto& run : runs) {
                    if (run.population != population || run.van_bucket != bucket ||
                        run.solver != solver)
                        continue;
                    time_sum += run.time_s;
                    ++n;
                    if (run.score) {
                        score_sum += static_cast<double>(*run.score);
                        ++solved;
                    }
                }
                if (n == 0) continue;
                row.n_instances = n;
                row.mean_time_s = time_sum / n;
                if (solved > 0) row.mean_score = score_sum / solved;
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

namespace {

std::vector<FigRow> fig_rows(const std::vector<BenchRun>& runs, bool use_score) {
    std::vector<int> populations;
    for (const auto& run : runs) populations.push_back(run.population);
    std::sort(populations.begin(), populations.end());
    populations.erase(std::unique(populations.begin(), populations.end()), populations.end());

    std::vector<FigRow> rows;
    for (int population : populations) {
        for (const auto& solver : kSolverNames) {
            double sum = 0.0;
            int n = 0;
            for (const auto& run : runs) {
                if (run.population != population || run.solver != solver) continue;
                if (use_score) {
                    if (run.score) {
                        sum += static_cast<double>(*run.score);
                        ++n;
                    }
                } else {
                    sum += run.time_s;
                    ++n;
                }
            }
            if (n > 0) rows.push_back({population, solver, sum / n});
        }
    }
    return rows;
}

}  // namespace

std::vector<FigRow> fig8_rows(const std::vector<BenchRun>& runs) { return fig_rows(runs, false); }
std::vector<FigRow> fig9_rows(const std::vector<BenchRun>& runs) { return fig_rows(runs, true); }

void write_runs_csv(const std::vector<BenchRun>& runs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "instance,solver,population,van_bucket,con,time_s,score,total_evals\n";
    out.precision(17);
    for (const auto& run : runs) {
        out << run.instance_id << ',' << run.solver << ',' << run.population << ','
            << run.van_bucket << ',' << run.con << ',' << run.time_s << ',';
        if (run.score) out << *run.score;
        out << ',' << run.total_evals << '\n';
    }
}

std::vector<BenchRun> read_runs_csv(const std::string& path) {
    const auto rows =
        read_csv(path, "instance,solver,population,van_bucket,con,time_s,score,total_evals");
    std::vector<BenchRun> runs;
    for (const auto& cells : rows) {
        if (cells.size() != 8) throw ParseError("runs CSV row has wrong cell count");
        BenchRun run;
        run.instance_id = cells[0];
        run.solver = cells[1];
        run.population = std::stoi(cells[2]);
        run.van_bucket = cells[3];
        run.con = std::stoi(cells[4]);
        run.time_s = std::stod(cells[5]);
        if (!cells[6].empty()) run.score = std::stoll(cells[6]);
        run.total_evals = std::stoi(cells[7]);
        runs.push_back(std::move(run));
    }
    return runs;
}

void write_gens_csv(const std::vector<BenchRun>& runs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "instance,solver,population,generation,full_evals,ranking_evals,offspring_evals,"
           "best_fitness,wall_ms\n";
    out.precision(17);
    for (const auto& run : runs) {
        for (const auto& g : run.generations) {
            out << run.instance_id << ',' << run.solver << ',' << run.population << ','
                << g.generation << ',' << g.full_evals << ',' << g.ranking_evals << ','
                << g.offspring_evals << ',';
            if (g.best_fitness) out << *g.best_fitness;
            out << ',' << g.wall_ms << '\n';
        }
    }
}

std::vector<GensRecord> read_gens_csv(const std::string& path) {
    const auto rows = read_csv(
        path,
        "instance,solver,population,generation,full_evals,ranking_evals,offspring_evals,"
        "best_fitness,wall_ms");
    std::vector<GensRecord> records;
    for (const auto& cells : rows) {
        if (cells.size() != 9) throw ParseError("gens CSV row has wrong cell count");
        GensRecord rec;
        rec.instance_id = cells[0];
        rec.solver = cells[1];
        rec.population = std::stoi(cells[2]);
        rec.generation = std::stoi(cells[3]);
        rec.full_evals = std::stoi(cells[4]);
        if (!cells[7].empty()) rec.best_fitness = std::stoll(cells[7]);
        records.push_back(std::move(rec));
    }
    return records;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "population,van_bucket,solver,mean_time_s,mean_score,n_instances\n";
    out.precision(17);
    for (const auto& row : rows) {
        out << row.population << ',' << row.van_bucket << ',' << row.solver << ','
            << row.mean_time_s << ',';
        if (row.mean_score) out << *row.mean_score;
        out << ',' << row.n_instances << '\n';
    }
}

std::vector<SummaryRow> read_summary_csv(const std::string& path) {
    const auto rows = read_csv(path, "population,van_bucket,solver,mean_time_s,mean_score,n_instances");
    std::vector<SummaryRow> out;
    for (const auto& cells : rows) {
        if (cells.size() != 6) throw ParseError("summary CSV row has wrong cell count");
        SummaryRow row;
        row.population = std::stoi(cells[0]);
        row.van_bucket = cells[1];
        row.solver = cells[2];
        row.mean_time_s = std::stod(cells[3]);
        if (!cells[4].empty()) row.mean_score = std::stod(cells[4]);
        row.n_instances = std::stoi(cells[5]);
        out.push_back(std::move(row));
    }
    return out;
}

void write_fig_csv(const std::vector<FigRow>& rows, const std::string& value_column,
                   const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "population,solver," << value_column << '\n';
    out.precision(17);
    for (const auto& row : rows)
        out << row.population << ',' << row.solver << ',' << row.value << '\n';
}

std::vector<HandlingReport> evaluate_handling(
    const std::vector<BayPlan>& test_plans,
    const std::vector<std::pair<HandlingKind, HandlingModel>>& models,
    const HandlingEvalOptions& opts) {
    if (test_plans.empty()) throw std::invalid_argument("evaluate_handling: no test vessels");

    // Shared chromosome draws per plan so every model sees the same schedules.
    std::vector<std::vector<Chromosome>> chromosomes(test_plans.size());
    std::vector<std::vector<std::int64_t>> actual_makespans(test_plans.size());
    for (std::size_t pi = 0; pi < test_plans.size(); ++pi) {
        const auto& plan = test_plans[pi];
        const int uq_eff = std::min(opts.uq, plan.num_hatches);
        const int lq_eff = std::min(opts.lq, uq_eff);
        chromosomes[pi] = generate_set(plan, opts.chromosomes_per_plan, lq_eff, uq_eff,
                                       mix_seed(opts.seed, pi, 0xf1e0u),
                                       ChromosomeOptions{opts.overlap})
                              .chromosomes;
        GroundTruth gt(plan);
        if (!gt.available())
            throw std::invalid_argument("vessel " + plan.vessel_id + " has no ground truth");
        // Actual duration per task: the stored per-move seconds summed over the task.
        std::map<int, std::int64_t> actual_seconds;
        for (int b = 1; b <= plan.num_hatches; ++b) {
            const auto& tasks = plan.hatch_tasks(b);
            for (std::size_t s = 0; s < tasks.size(); ++s)
                actual_seconds[tasks[s].task_id] = gt.task_seconds(b, static_cast<int>(s));
        }
        for (const auto& c : chromosomes[pi]) {
            const auto timeline = decode(plan, c, [&](const Task& task) {
                return std::max<std::int64_t>(1, actual_seconds.at(task.task_id));
            });
            actual_makespans[pi].push_back(timeline.makespan());
        }
    }

    std::vector<HandlingReport> reports;
    for (const auto& [kind, model] : models) {
        std::vector<double> move_pred, move_act, task_pred, task_act, mk_pred, mk_act;
        for (std::size_t pi = 0; pi < test_plans.size(); ++pi) {
            const auto& plan = test_plans[pi];
            GroundTruth gt(plan);
            for (int b = 1; b <= plan.num_hatches; ++b) {
                const auto& tasks = plan.hatch_tasks(b);
                for (std::size_t s = 0; s < tasks.size(); ++s) {
                    double task_sum = 0.0;
                    for (std::size_t m = 0; m < tasks[s].moves.size(); ++m) {
                        move_pred.push_back(model.predict_move(tasks[s].moves[m]));
                        move_act.push_back(static_cast<double>(
                            gt.move_seconds(b, static_cast<int>(s), static_cast<int>(m))));
                        task_sum += move_pred.back();
                    }
                    task_pred.push_back(task_sum);
                    task_act.push_back(static_cast<double>(gt.task_seconds(b, static_cast<int>(s))));
                }
            }
            for (std::size_t ci = 0; ci < chromosomes[pi].size(); ++ci) {
                const auto timeline = decode(plan, chromosomes[pi][ci], model);
                mk_pred.push_back(static_cast<double>(timeline.makespan()));
                mk_act.push_back(static_cast<double>(actual_makespans[pi][ci]));
            }
        }
        HandlingReport report{kind, metrics(move_pred, move_act), metrics(task_pred, task_act),
                              metrics(mk_pred, mk_act)};
        reports.push_back(report);
    }
    return reports;
}

void write_handling_csv(const std::vector<HandlingReport>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "method,move_mae,move_mape,task_mae,task_mape,makespan_mae,makespan_mape\n";
    out.precision(17);
    for (const auto& row : rows)
        out << to_string(row.kind) << ',' << row.move.mae << ',' << row.move.mape << ','
            << row.task.mae << ',' << row.task.mape << ',' << row.makespan.mae << ','
            << row.makespan.mape << '\n';
}

std::vector<HandlingReport> read_handling_csv(const std::string& path) {
    const auto rows =
        read_csv(path, "method,move_mae,move_mape,task_mae,task_mape,makespan_mae,makespan_mape");
    std::vector<HandlingReport> out;
    for (const auto& cells : rows) {
        if (cells.size() != 7) throw ParseError("handling CSV row has wrong cell count");
        HandlingReport row;
        row.kind = handling_kind_from_string(cells[0]);
        row.move = {std::stod(cells[1]), std::stod(cells[2])};
        row.task = {std::stod(cells[3]), std::stod(cells[4])};
        row.makespan = {std::stod(cells[5]), std::stod(cells[6])};
        out.push_back(row);
    }
    return out;
}

void write_f2_metrics_csv(const std::vector<SelectionEntry>& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "method,mae,mape\n";
    out.precision(17);
    for (const auto& entry : table)
        out << to_string(entry.kind) << ',' << entry.report.mae << ',' << entry.report.mape << '\n';
}

std::vector<std::pair<std::string, Metrics>> read_f2_metrics_csv(const std::string& path) {
    const auto rows = read_csv(path, "method,mae,mape");
    std::vector<std::pair<std::string, Metrics>> out;
    for (const auto& cells : rows) {
        if (cells.size() != 3) throw ParseError("f2 metrics CSV row has wrong cell count");
        out.emplace_back(cells[0], Metrics{std::stod(cells[1]), std::stod(cells[2])});
    }
    return out;
}

}  // namespace quaysched
