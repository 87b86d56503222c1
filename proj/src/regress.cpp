#include "quaysched/regress.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace quaysched {

namespace {

Eigen::VectorXd json_to_vector(const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
    return rows;
}

Eigen::MatrixXd json_to_matrix(const nlohmann::json& j) {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    if (rows.empty()) return {};
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        m.row(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const Eigen::VectorXd>(rows[i].data(), static_cast<Eigen::Index>(rows[i].size()));
    return m;
}

void standardize_columns(const Eigen::MatrixXd& X, Eigen::VectorXd& mean, Eigen::VectorXd& scale) {
    mean = X.colwise().mean();
    Eigen::MatrixXd centered = X.rowwise() - mean.transpose();
    scale = (centered.array().square().colwise().mean()).sqrt();
    for (Eigen::Index c = 0; c < scale.size(); ++c)
        if (scale(c) <= 0.0) scale(c) = 1.0;
}

Eigen::MatrixXd apply_standardize(const Eigen::MatrixXd& X, const Eigen::VectorXd& mean,
                                  const Eigen::VectorXd& scale) {
    return (X.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

double median_pairwise_distance(const Eigen::MatrixXd& X) {
    const Eigen::Index n = X.rows();
    if (n < 2) return 1.0;
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n) * (static_cast<std::size_t>(n) - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            dists.push_back((X.row(i) - X.row(j)).norm());
    std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2), dists.end());
    const double med = dists[dists.size() / 2];
    return med > 0.0 ? med : 1.0;
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::VectorXd> dedup_rows(const Eigen::MatrixXd& X,
                                                       const Eigen::VectorXd& y) {
    const Eigen::Index n = X.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    auto row_less = [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index c = 0; c < X.cols(); ++c) {
            if (X(a, c) < X(b, c)) return true;
            if (X(a, c) > X(b, c)) return false;
        }
        return false;
    };
    std::sort(order.begin(), order.end(), row_less);

    std::vector<Eigen::Index> reps;
    std::vector<double> means;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < order.size() && !row_less(order[i], order[j]) && !row_less(order[j], order[i])) {
            sum += y(order[j]);
            ++j;
        }
        reps.push_back(order[i]);
        means.push_back(sum / static_cast<double>(j - i));
        i = j;
    }

    Eigen::MatrixXd Xu(static_cast<Eigen::Index>(reps.size()), X.cols());
    Eigen::VectorXd yu(static_cast<Eigen::Index>(reps.size()));
    for (std::size_t r = 0; r < reps.size(); ++r) {
        Xu.row(static_cast<Eigen::Index>(r)) = X.row(reps[r]);
        yu(static_cast<Eigen::Index>(r)) = means[r];
    }
    return {std::move(Xu), std::move(yu)};
}

LinearModel fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() != y.size() || X.rows() == 0)
        throw std::invalid_argument("fit_ols: empty or mismatched training data");
    Eigen::MatrixXd A(X.rows(), X.cols() + 1);
    A.leftCols(X.cols()) = X;
    A.col(X.cols()).setOnes();
    const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(y);
    LinearModel m;
    m.weights = sol.head(X.cols());
    m.intercept = sol(X.cols());
    return m;
}

double KernelRidgeModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const Eigen::VectorXd xs = (x - mean).array() / scale.array();
    const double gamma = 1.0 / (2.0 * bandwidth * bandwidth);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < support.rows(); ++i) {
        const double d2 = (support.row(i).transpose() - xs).squaredNorm();
        acc += alpha(i) * std::exp(-gamma * d2);
    }
    return acc;
}

KernelRidgeModel fit_kernel_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const RegressOptions& opts) {
    if (X.rows() != y.size() || X.rows() == 0)
        throw std::invalid_argument("fit_kernel_ridge: empty or mismatched training data");
    auto [Xu, yu] = dedup_rows(X, y);

    if (opts.max_kernel_points > 0 && Xu.rows() > opts.max_kernel_points) {
        // Rows are already lexicographically sorted; keep an evenly spaced subsample.
        const Eigen::Index keep = opts.max_kernel_points;
        Eigen::MatrixXd Xs(keep, Xu.cols());
        Eigen::VectorXd ys(keep);
        for (Eigen::Index i = 0; i < keep; ++i) {
            const Eigen::Index src = i * Xu.rows() / keep;
            Xs.row(i) = Xu.row(src);
            ys(i) = yu(src);
        }
        Xu = std::move(Xs);
        yu = std::move(ys);
    }

    KernelRidgeModel m;
    standardize_columns(Xu, m.mean, m.scale);
    m.support = apply_standardize(Xu, m.mean, m.scale);
    m.bandwidth = opts.bandwidth > 0.0 ? opts.bandwidth : median_pairwise_distance(m.support);

    const Eigen::Index n = m.support.rows();
    const double gamma = 1.0 / (2.0 * m.bandwidth * m.bandwidth);
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double k = std::exp(-gamma * (m.support.row(i) - m.support.row(j)).squaredNorm());
            K(i, j) = k;
            K(j, i) = k;
        }
    }
    K.diagonal().array() += opts.ridge;
    m.alpha = K.ldlt().solve(yu);
    return m;
}

double KnnModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const Eigen::VectorXd xs = (x - mean).array() / scale.array();
    const Eigen::Index n = points.rows();
    const int kk = std::min<int>(k, static_cast<int>(n));
    std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        dist[static_cast<std::size_t>(i)] = {(points.row(i).transpose() - xs).squaredNorm(), i};
    std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
    double acc = 0.0;
    for (int i = 0; i < kk; ++i) acc += targets(dist[static_cast<std::size_t>(i)].second);
    return acc / kk;
}

KnnModel fit_knn(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const RegressOptions& opts) {
    if (X.rows() != y.size() || X.rows() == 0)
        throw std::invalid_argument("fit_knn: empty or mismatched training data");
    auto [Xu, yu] = dedup_rows(X, y);
    KnnModel m;
    m.k = opts.knn_k;
    standardize_columns(Xu, m.mean, m.scale);
    m.points = apply_standardize(Xu, m.mean, m.scale);
    m.targets = std::move(yu);
    return m;
}

nlohmann::json to_json(const LinearModel& m) {
    return {{"weights", vector_to_json(m.weights)}, {"intercept", m.intercept}};
}

nlohmann::json to_json(const KernelRidgeModel& m) {
    return {{"support", matrix_to_json(m.support)},
            {"alpha", vector_to_json(m.alpha)},
            {"mean", vector_to_json(m.mean)},
            {"scale", vector_to_json(m.scale)},
            {"bandwidth", m.bandwidth}};
}

nlohmann::json to_json(const KnnModel& m) {
    return {{"points", matrix_to_json(m.points)},
            {"targets", vector_to_json(m.targets)},
            {"mean", vector_to_json(m.mean)},
            {"scale", vector_to_json(m.scale)},
            {"k", m.k}};
}

LinearModel linear_from_json(const nlohmann::json& j) {
    LinearModel m;
    m.weights = json_to_vector(j.at("weights"));
    m.intercept = j.at("intercept").get<double>();
    return m;
}

KernelRidgeModel kernel_ridge_from_json(const nlohmann::json& j) {
    KernelRidgeModel m;
    m.support = json_to_matrix(j.at("support"));
    m.alpha = json_to_vector(j.at("alpha"));
    m.mean = json_to_vector(j.at("mean"));
    m.scale = json_to_vector(j.at("scale"));
    m.bandwidth = j.at("bandwidth").get<double>();
    return m;
}

KnnModel knn_from_json(const nlohmann::json& j) {
    KnnModel m;
    m.points = json_to_matrix(j.at("points"));
    m.targets = json_to_vector(j.at("targets"));
    m.mean = json_to_vector(j.at("mean"));
    m.scale = json_to_vector(j.at("scale"));
    m.k = j.at("k").get<int>();
    return m;
}

}  // namespace quaysched
