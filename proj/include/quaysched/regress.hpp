#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "json.hpp"

namespace quaysched {

/// Shared knobs for the learned backends. Declared once; every trainer takes them and
/// the CLI exposes them through the config file.
struct RegressOptions {
    double ridge = 1e-3;       // kernel ridge regularizer
    double bandwidth = 0.0;    // RBF bandwidth; 0 = median pairwise distance heuristic
    int knn_k = 5;             // neighbors for the k-NN backend
    int max_kernel_points = 2000;  // deterministic support-set cap for kernel ridge
};

/// Ordinary least squares with intercept. Duplication-invariant as-is.
struct LinearModel {
    Eigen::VectorXd weights;
    double intercept = 0.0;

    double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
        return weights.dot(x) + intercept;
    }
};

LinearModel fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Kernel ridge regression with an RBF kernel on standardized features. Training
/// deduplicates exact-duplicate rows (targets merged by mean) and, past
/// max_kernel_points, keeps an evenly spaced subsample of the lexicographically sorted
/// rows; both steps keep the fit invariant under duplication of the training set.
struct KernelRidgeModel {
    Eigen::MatrixXd support;   // standardized support rows
    Eigen::VectorXd alpha;
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;
    double bandwidth = 1.0;

    double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

KernelRidgeModel fit_kernel_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const RegressOptions& opts = {});

/// k nearest neighbors (mean of targets), standardized features, deduplicated rows,
/// ties broken by the sorted row order so predictions are deterministic.
struct KnnModel {
    Eigen::MatrixXd points;  // standardized, lexicographically sorted
    Eigen::VectorXd targets;
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;
    int k = 5;

    double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

KnnModel fit_knn(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const RegressOptions& opts = {});

/// Exact-duplicate row merge: returns (unique rows sorted lexicographically, mean target
/// per row). Exposed for tests.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> dedup_rows(const Eigen::MatrixXd& X,
                                                       const Eigen::VectorXd& y);

nlohmann::json to_json(const LinearModel& m);
nlohmann::json to_json(const KernelRidgeModel& m);
nlohmann::json to_json(const KnnModel& m);
LinearModel linear_from_json(const nlohmann::json& j);
KernelRidgeModel kernel_ridge_from_json(const nlohmann::json& j);
KnnModel knn_from_json(const nlohmann::json& j);

}  // namespace quaysched
