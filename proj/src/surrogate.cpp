#include "quaysched/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "quaysched/handling.hpp"
#include "quaysched/rng.hpp"

namespace quaysched {

int feature_width(int uq) { return 3 + 2 * uq; }

std::vector<double> features_of(const BayPlan& plan, const Chromosome& c, int uq) {
    if (uq < c.num_qcs)
        throw std::invalid_argument("feature padding width uq=" + std::to_string(uq) +
                                    " < chromosome crane count " + std::to_string(c.num_qcs));
    std::vector<int> containers(static_cast<std::size_t>(c.num_qcs), 0);
    std::vector<int> first_hatch(static_cast<std::size_t>(c.num_qcs), 0);
    for (int b = 1; b <= plan.num_hatches; ++b) {
        const auto& tasks = plan.hatch_tasks(b);
        const auto& row = c.assignment[static_cast<std::size_t>(b - 1)];
        for (std::size_t s = 0; s < tasks.size(); ++s) {
            const auto k = static_cast<std::size_t>(row[s] - 1);
            containers[k] += static_cast<int>(tasks[s].moves.size());
            if (first_hatch[k] == 0) first_hatch[k] = b;  // hatch-ascending scan
        }
    }
    const double con = plan.total_containers();
    std::vector<double> x;
    x.reserve(static_cast<std::size_t>(feature_width(uq)));
    x.push_back(con);
    x.push_back(static_cast<double>(plan.num_hatches));
    x.push_back(static_cast<double>(c.num_qcs));
    for (int k = 0; k < uq; ++k)
        x.push_back(k < c.num_qcs ? containers[static_cast<std::size_t>(k)] / con : 0.0);
    for (int k = 0; k < uq; ++k) {
        if (k >= c.num_qcs) {
            x.push_back(0.0);
        } else if (first_hatch[static_cast<std::size_t>(k)] > 0) {
            x.push_back(static_cast<double>(first_hatch[static_cast<std::size_t>(k)]) /
                        plan.num_hatches);
        } else {
            // No assigned task: the crane parks at the left edge of its range.
            x.push_back(static_cast<double>(c.ranges[static_cast<std::size_t>(k)].first) /
                        plan.num_hatches);
        }
    }
    return x;
}

FitnessSample extract_features(const BayPlan& plan, const Chromosome& c, const Evaluation& eval,
                               int uq) {
    const auto x = features_of(plan, c, uq);
    FitnessSample s;
    s.con = static_cast<int>(x[0]);
    s.b = static_cast<int>(x[1]);
    s.nq = c.num_qcs;
    s.p.assign(x.begin() + 3, x.begin() + 3 + uq);
    s.q1.assign(x.begin() + 3 + uq, x.end());
    s.y1 = eval.feasible;
    if (eval.fitness) s.y2 = static_cast<double>(*eval.fitness);
    return s;
}

std::vector<double> sample_features(const FitnessSample& s) {
    std::vector<double> x;
    x.reserve(3 + s.p.size() + s.q1.size());
    x.push_back(static_cast<double>(s.con));
    x.push_back(static_cast<double>(s.b));
    x.push_back(static_cast<double>(s.nq));
    x.insert(x.end(), s.p.begin(), s.p.end());
    x.insert(x.end(), s.q1.begin(), s.q1.end());
    return x;
}

std::vector<TrainingRow> build_training_set(const std::vector<BayPlan>& plans, int per_plan,
                                            const TrainingSetParams& params,
                                            const HandlingModel& f1, std::uint64_t seed) {
    if (plans.empty()) throw std::invalid_argument("build_training_set: no training vessels");
    if (per_plan < 1) throw std::invalid_argument("build_training_set: per_plan must be >= 1");
    std::vector<TrainingRow> rows;
    rows.reserve(plans.size() * static_cast<std::size_t>(per_plan));
    for (std::size_t pi = 0; pi < plans.size(); ++pi) {
        const auto& plan = plans[pi];
        const int uq_eff = std::min(params.uq, plan.num_hatches);
        const int lq_eff = std::min(params.lq, uq_eff);
        auto generated = generate_set(plan, per_plan, lq_eff, uq_eff, mix_seed(seed, pi),
                                      ChromosomeOptions{params.overlap});
        for (auto& c : generated.chromosomes) {
            const Evaluation eval = evaluate(plan, c, f1);
            TrainingRow row;
            row.plan_index = static_cast<int>(pi);
            row.sample = extract_features(plan, c, eval, params.uq);
            row.chromosome = std::move(c);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

const char* to_string(FitnessKind kind) {
    switch (kind) {
        case FitnessKind::Linear: return "linear";
        case FitnessKind::KernelRbf: return "kernel_rbf";
        case FitnessKind::NearestNeighbors: return "nearest_neighbors";
    }
    return "?";
}

FitnessKind fitness_kind_from_string(const std::string& name) {
    if (name == "linear") return FitnessKind::Linear;
    if (name == "kernel_rbf") return FitnessKind::KernelRbf;
    if (name == "nearest_neighbors") return FitnessKind::NearestNeighbors;
    throw std::invalid_argument("unknown fitness model kind '" + name + "'");
}

double Regressor::predict(std::span<const double> features) const {
    if (static_cast<int>(features.size()) != width_)
        throw std::invalid_argument("feature width " + std::to_string(features.size()) +
                                    " does not match the trained width " + std::to_string(width_));
    const Eigen::Map<const Eigen::VectorXd> x(features.data(),
                                              static_cast<Eigen::Index>(features.size()));
    switch (kind_) {
        case FitnessKind::Linear: return linear_.predict(x);
        case FitnessKind::KernelRbf: return kernel_.predict(x);
        case FitnessKind::NearestNeighbors: return knn_.predict(x);
    }
    throw std::logic_error("unreachable fitness kind");
}

namespace {

/// Deterministic 80/20 split over n items (or over distinct group ids when groups are
/// given). Returns per-row test membership.
std::vector<bool> holdout_mask(std::size_t n, const std::vector<int>* groups, std::uint64_t seed) {
    std::vector<bool> is_test(n, false);
    if (groups != nullptr) {
        std::vector<int> ids = *groups;
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        Rng rng(mix_seed(seed, 0x73706cu));
        rng.shuffle(ids);
        const std::size_t n_test = std::max<std::size_t>(1, ids.size() / 5);
        std::vector<bool> test_group(ids.size(), false);
        std::vector<int> test_ids(ids.end() - static_cast<std::ptrdiff_t>(n_test), ids.end());
        for (std::size_t i = 0; i < n; ++i)
            is_test[i] = std::find(test_ids.begin(), test_ids.end(), (*groups)[i]) != test_ids.end();
        return is_test;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(seed, 0x73706cu));
    rng.shuffle(order);
    const std::size_t n_test = std::max<std::size_t>(1, n / 5);
    for (std::size_t i = order.size() - n_test; i < order.size(); ++i) is_test[order[i]] = true;
    return is_test;
}

}  // namespace

Regressor fit_fitness(FitnessKind kind, const std::vector<FitnessSample>& samples,
                      const RegressOptions& opts, const std::vector<int>* groups,
                      std::uint64_t split_seed) {
    if (groups != nullptr && groups->size() != samples.size())
        throw std::invalid_argument("fit_fitness: groups must align with samples");

    // Only feasible rows carry a fitness to learn.
    std::vector<std::size_t> feasible;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples[i].y1 && samples[i].y2) feasible.push_back(i);
    if (feasible.size() < 50)
        throw TrainingError("fit_fitness requires >= 50 feasible samples, got " +
                            std::to_string(feasible.size()));

    const int width = static_cast<int>(sample_features(samples[feasible.front()]).size());
    for (std::size_t i : feasible)
        if (static_cast<int>(sample_features(samples[i]).size()) != width)
            throw std::invalid_argument("fit_fitness: inconsistent feature widths");

    std::vector<int> feasible_groups;
    if (groups != nullptr)
        for (std::size_t i : feasible) feasible_groups.push_back((*groups)[i]);
    const auto is_test =
        holdout_mask(feasible.size(), groups != nullptr ? &feasible_groups : nullptr, split_seed);

    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < feasible.size(); ++i)
        (is_test[i] ? test_rows : train_rows).push_back(feasible[i]);
    if (train_rows.empty() || test_rows.empty())
        throw TrainingError("fit_fitness: degenerate train/test split");

    Eigen::MatrixXd X(static_cast<Eigen::Index>(train_rows.size()), width);
    Eigen::VectorXd y(static_cast<Eigen::Index>(train_rows.size()));
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
        const auto x = sample_features(samples[train_rows[i]]);
        X.row(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
        y(static_cast<Eigen::Index>(i)) = *samples[train_rows[i]].y2;
    }

    Regressor model;
    model.kind_ = kind;
    model.width_ = width;
    switch (kind) {
        case FitnessKind::Linear: model.linear_ = fit_ols(X, y); break;
        case FitnessKind::KernelRbf: model.kernel_ = fit_kernel_ridge(X, y, opts); break;
        case FitnessKind::NearestNeighbors: model.knn_ = fit_knn(X, y, opts); break;
    }

    FitReport report;
    report.train_rows = static_cast<int>(train_rows.size());
    report.test_rows = static_cast<int>(test_rows.size());
    if (groups != nullptr) {
        for (std::size_t i = 0; i < feasible.size(); ++i) {
            auto& dst = is_test[i] ? report.test_groups : report.train_groups;
            const int g = (*groups)[feasible[i]];
            if (std::find(dst.begin(), dst.end(), g) == dst.end()) dst.push_back(g);
        }
        std::sort(report.train_groups.begin(), report.train_groups.end());
        std::sort(report.test_groups.begin(), report.test_groups.end());
    }
    double abs_sum = 0.0, rel_sum = 0.0;
    int rel_n = 0;
    for (std::size_t row : test_rows) {
        const auto x = sample_features(samples[row]);
        const double pred = std::max(0.0, model.predict(x));
        const double actual = *samples[row].y2;
        abs_sum += std::abs(pred - actual);
        if (actual > 0.0) {
            rel_sum += std::abs(pred - actual) / actual;
            ++rel_n;
        }
    }
    report.mae = abs_sum / static_cast<double>(test_rows.size());
    report.mape = rel_n > 0 ? rel_sum / rel_n : 0.0;
    model.report_ = report;
    return model;
}

double predict_fitness(const Regressor& model, std::span<const double> features) {
    return std::max(0.0, model.predict(features));
}

SelectionResult select_fitness_model(const std::vector<FitnessSample>& samples,
                                     const RegressOptions& opts, const std::vector<int>* groups,
                                     std::uint64_t split_seed) {
    const FitnessKind kinds[] = {FitnessKind::Linear, FitnessKind::KernelRbf,
                                 FitnessKind::NearestNeighbors};
    SelectionResult result;
    bool first = true;
    for (FitnessKind kind : kinds) {
        Regressor model = fit_fitness(kind, samples, opts, groups, split_seed);
        result.table.push_back({kind, model.report()});
        // Strict '<' keeps the earlier (simpler) kind on ties.
        if (first || model.report().mae < result.model.report().mae) {
            result.selected = kind;
            result.model = std::move(model);
            first = false;
        }
    }
    return result;
}

nlohmann::json Regressor::to_json() const {
    nlohmann::json j = {{"kind", quaysched::to_string(kind_)},
                        {"feature_width", width_},
                        {"report",
                         {{"mae", report_.mae},
                          {"mape", report_.mape},
                          {"train_rows", report_.train_rows},
                          {"test_rows", report_.test_rows},
                          {"train_groups", report_.train_groups},
                          {"test_groups", report_.test_groups}}}};
    switch (kind_) {
        case FitnessKind::Linear: j["linear"] = quaysched::to_json(linear_); break;
        case FitnessKind::KernelRbf: j["kernel"] = quaysched::to_json(kernel_); break;
        case FitnessKind::NearestNeighbors: j["knn"] = quaysched::to_json(knn_); break;
    }
    return j;
}

Regressor Regressor::from_json(const nlohmann::json& j) {
    Regressor m;
    m.kind_ = fitness_kind_from_string(j.at("kind").get<std::string>());
    m.width_ = j.at("feature_width").get<int>();
    const auto& r = j.at("report");
    m.report_.mae = r.at("mae").get<double>();
    m.report_.mape = r.at("mape").get<double>();
    m.report_.train_rows = r.at("train_rows").get<int>();
    m.report_.test_rows = r.at("test_rows").get<int>();
    m.report_.train_groups = r.at("train_groups").get<std::vector<int>>();
    m.report_.test_groups = r.at("test_groups").get<std::vector<int>>();
    switch (m.kind_) {
        case FitnessKind::Linear: m.linear_ = linear_from_json(j.at("linear")); break;
        case FitnessKind::KernelRbf: m.kernel_ = kernel_ridge_from_json(j.at("kernel")); break;
        case FitnessKind::NearestNeighbors: m.knn_ = knn_from_json(j.at("knn")); break;
    }
    return m;
}

void write_training_csv(const std::vector<FitnessSample>& samples, int uq, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write training CSV " + path);
    out << "con,b,nq";
    for (int k = 1; k <= uq; ++k) out << ",p_" << k;
    for (int k = 1; k <= uq; ++k) out << ",q1_" << k;
    out << ",y1,y2\n";
    out.precision(17);
    for (const auto& s : samples) {
        if (static_cast<int>(s.p.size()) != uq || static_cast<int>(s.q1.size()) != uq)
            throw std::invalid_argument("sample padding width does not match uq");
        out << s.con << ',' << s.b << ',' << s.nq;
        for (double v : s.p) out << ',' << v;
        for (double v : s.q1) out << ',' << v;
        out << ',' << (s.y1 ? 1 : 0) << ',';
        if (s.y2) out << *s.y2;
        out << '\n';
    }
}

std::vector<FitnessSample> read_training_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open training CSV " + path);
    std::string header;
    if (!std::getline(in, header)) throw ParseError("empty training CSV " + path);
    const auto columns = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
    if (columns < 7 || (columns - 5) % 2 != 0)
        throw ParseError("training CSV header has unexpected column count");
    const auto uq = static_cast<int>((columns - 5) / 2);

    std::vector<FitnessSample> samples;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.push_back("");
        if (cells.size() != columns) throw ParseError("training CSV row has wrong cell count");
        FitnessSample s;
        s.con = std::stoi(cells[0]);
        s.b = std::stoi(cells[1]);
        s.nq = std::stoi(cells[2]);
        for (int k = 0; k < uq; ++k) s.p.push_back(std::stod(cells[static_cast<std::size_t>(3 + k)]));
        for (int k = 0; k < uq; ++k)
            s.q1.push_back(std::stod(cells[static_cast<std::size_t>(3 + uq + k)]));
        s.y1 = cells[columns - 2] == "1";
        if (!cells[columns - 1].empty()) s.y2 = std::stod(cells[columns - 1]);
        samples.push_back(std::move(s));
    }
    return samples;
}

}  // namespace quaysched
