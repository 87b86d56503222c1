#include "quaysched/handling.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "quaysched/rng.hpp"

namespace quaysched {

std::int64_t ground_truth_seconds(const ContainerMove& move) {
    const double base = move.load ? static_cast<double>(ground_truth::kLoadBase)
                                  : static_cast<double>(ground_truth::kUnloadBase);
    double secs = base * (1.0 + (move.twin ? ground_truth::kTwinFactor : 0.0));
    if (move.full) secs += static_cast<double>(ground_truth::kFullExtra);
    if (move.special) secs += static_cast<double>(ground_truth::kSpecialExtra);
    if (move.jobchange) secs += static_cast<double>(ground_truth::kJobchangeExtra);
    return std::llround(secs);
}

std::int64_t ground_truth_seconds(const ContainerMove& move, Rng& noise_rng) {
    const double noisy = static_cast<double>(ground_truth_seconds(move)) +
                         noise_rng.normal(0.0, ground_truth::kNoiseSigma);
    return std::max<std::int64_t>(ground_truth::kFloorSeconds, std::llround(noisy));
}

const char* to_string(HandlingKind kind) {
    switch (kind) {
        case HandlingKind::Constant: return "constant";
        case HandlingKind::AverageByType: return "average";
        case HandlingKind::Linear: return "linear";
        case HandlingKind::KernelRbf: return "kernel_rbf";
    }
    return "?";
}

HandlingKind handling_kind_from_string(const std::string& name) {
    if (name == "constant") return HandlingKind::Constant;
    if (name == "average") return HandlingKind::AverageByType;
    if (name == "linear") return HandlingKind::Linear;
    if (name == "kernel_rbf") return HandlingKind::KernelRbf;
    throw std::invalid_argument("unknown handling model kind '" + name + "'");
}

int move_pattern(const ContainerMove& move) {
    return (move.load ? 1 : 0) | (move.twin ? 2 : 0) | (move.full ? 4 : 0) |
           (move.special ? 8 : 0) | (move.jobchange ? 16 : 0);
}

namespace {

Eigen::VectorXd move_features(const ContainerMove& move) {
    Eigen::VectorXd x(5);
    x << (move.load ? 1.0 : 0.0), (move.twin ? 1.0 : 0.0), (move.full ? 1.0 : 0.0),
        (move.special ? 1.0 : 0.0), (move.jobchange ? 1.0 : 0.0);
    return x;
}

}  // namespace

double HandlingModel::predict_move(const ContainerMove& move) const {
    switch (kind_) {
        case HandlingKind::Constant:
            return static_cast<double>(move.load ? ground_truth::kLoadBase
                                                 : ground_truth::kUnloadBase);
        case HandlingKind::AverageByType: {
            if (!trained_) throw std::logic_error("average handling model is untrained");
            const double m = pattern_mean_[static_cast<std::size_t>(move_pattern(move))];
            return std::isnan(m) ? global_mean_ : m;
        }
        case HandlingKind::Linear:
            if (!trained_) throw std::logic_error("linear handling model is untrained");
            return linear_.predict(move_features(move));
        case HandlingKind::KernelRbf:
            if (!trained_) throw std::logic_error("kernel handling model is untrained");
            return kernel_.predict(move_features(move));
    }
    throw std::logic_error("unreachable handling kind");
}

double HandlingModel::predict_task(const Task& task) const {
    double total = 0.0;
    for (const auto& move : task.moves) total += predict_move(move);
    return total;
}

HandlingModel fit_handling(HandlingKind kind, const std::vector<HandlingSample>& samples,
                           const RegressOptions& opts) {
    if (samples.size() < 32)
        throw TrainingError("fit_handling requires >= 32 samples, got " +
                            std::to_string(samples.size()));
    std::set<int> patterns;
    for (const auto& s : samples) patterns.insert(move_pattern(s.move));
    if (patterns.size() < 2)
        throw TrainingError("fit_handling requires >= 2 distinct feature patterns");

    HandlingModel model;
    model.kind_ = kind;
    model.trained_ = true;
    if (kind == HandlingKind::Constant) return model;  // validated, then ignored

    if (kind == HandlingKind::AverageByType) {
        std::vector<double> sum(32, 0.0);
        std::vector<int> count(32, 0);
        double total = 0.0;
        for (const auto& s : samples) {
            const int p = move_pattern(s.move);
            sum[static_cast<std::size_t>(p)] += s.seconds;
            ++count[static_cast<std::size_t>(p)];
            total += s.seconds;
        }
        model.pattern_mean_.assign(32, std::numeric_limits<double>::quiet_NaN());
        for (int p = 0; p < 32; ++p)
            if (count[static_cast<std::size_t>(p)] > 0)
                model.pattern_mean_[static_cast<std::size_t>(p)] =
                    sum[static_cast<std::size_t>(p)] / count[static_cast<std::size_t>(p)];
        model.global_mean_ = total / static_cast<double>(samples.size());
        return model;
    }

    Eigen::MatrixXd X(static_cast<Eigen::Index>(samples.size()), 5);
    Eigen::VectorXd y(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        X.row(static_cast<Eigen::Index>(i)) = move_features(samples[i].move);
        y(static_cast<Eigen::Index>(i)) = samples[i].seconds;
    }
    if (kind == HandlingKind::Linear) {
        model.linear_ = fit_ols(X, y);
    } else {
        model.kernel_ = fit_kernel_ridge(X, y, opts);
    }
    return model;
}

Metrics metrics(std::span<const double> predictions, std::span<const double> actuals) {
    if (predictions.size() != actuals.size())
        throw std::invalid_argument("metrics: length mismatch");
    if (predictions.empty()) throw std::invalid_argument("metrics: empty input");
    double abs_sum = 0.0;
    double rel_sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (actuals[i] <= 0.0) throw std::invalid_argument("metrics: actual values must be > 0");
        const double err = std::abs(predictions[i] - actuals[i]);
        abs_sum += err;
        rel_sum += err / actuals[i];
    }
    const auto n = static_cast<double>(predictions.size());
    return Metrics{abs_sum / n, rel_sum / n};
}

std::vector<HandlingSample> handling_samples(const BayPlan& plan) {
    GroundTruth gt(plan);
    if (!gt.available())
        throw std::invalid_argument("instance " + plan.vessel_id + " carries no ground_truth_seconds");
    std::vector<HandlingSample> samples;
    samples.reserve(static_cast<std::size_t>(plan.total_containers()));
    for (int b = 1; b <= plan.num_hatches; ++b) {
        const auto& tasks = plan.hatch_tasks(b);
        for (std::size_t t = 0; t < tasks.size(); ++t)
            for (std::size_t m = 0; m < tasks[t].moves.size(); ++m)
                samples.push_back({tasks[t].moves[m],
                                   static_cast<double>(gt.move_seconds(b, static_cast<int>(t),
                                                                       static_cast<int>(m)))});
    }
    return samples;
}

nlohmann::json HandlingModel::to_json() const {
    nlohmann::json j = {{"kind", quaysched::to_string(kind_)}, {"trained", trained_}};
    switch (kind_) {
        case HandlingKind::Constant: break;
        case HandlingKind::AverageByType: {
            nlohmann::json means = nlohmann::json::array();
            for (double m : pattern_mean_)
                means.push_back(std::isnan(m) ? nlohmann::json(nullptr) : nlohmann::json(m));
            j["pattern_mean"] = std::move(means);
            j["global_mean"] = global_mean_;
            break;
        }
        case HandlingKind::Linear: j["linear"] = quaysched::to_json(linear_); break;
        case HandlingKind::KernelRbf: j["kernel"] = quaysched::to_json(kernel_); break;
    }
    return j;
}

HandlingModel HandlingModel::from_json(const nlohmann::json& j) {
    HandlingModel m;
    m.kind_ = handling_kind_from_string(j.at("kind").get<std::string>());
    m.trained_ = j.at("trained").get<bool>();
    switch (m.kind_) {
        case HandlingKind::Constant: break;
        case HandlingKind::AverageByType: {
            m.pattern_mean_.clear();
            for (const auto& v : j.at("pattern_mean"))
                m.pattern_mean_.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                      : v.get<double>());
            m.global_mean_ = j.at("global_mean").get<double>();
            break;
        }
        case HandlingKind::Linear: m.linear_ = linear_from_json(j.at("linear")); break;
        case HandlingKind::KernelRbf: m.kernel_ = kernel_ridge_from_json(j.at("kernel")); break;
    }
    return m;
}

}  // namespace quaysched
