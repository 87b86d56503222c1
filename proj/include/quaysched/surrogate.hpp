#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "quaysched/bayplan.hpp"
#include "quaysched/chromosome.hpp"
#include "quaysched/regress.hpp"
#include "quaysched/schedule.hpp"

namespace quaysched {

/// One training row for the fitness surrogate: container count, hatch count, crane
/// count, per-QC workload fractions and normalized first hatches (both zero-padded to
/// width uq), the feasibility flag, and the fitness when feasible.
struct FitnessSample {
    int con = 0;
    int b = 0;
    int nq = 0;
    std::vector<double> p;   // workload fractions, size uq
    std::vector<double> q1;  // first hatch / B, size uq
    bool y1 = false;
    std::optional<double> y2;
};

/// Width of the flattened feature vector: 3 + 2*uq, independent of nq. This fixed
/// width is what lets one regressor serve encodings of different dimensions.
int feature_width(int uq);

/// The x-part alone, computable before any evaluation (used to rank fresh populations).
/// A QC with no assigned task contributes p = 0 and q1 = l_k/B. Throws
/// std::invalid_argument when uq < c.num_qcs.
std::vector<double> features_of(const BayPlan& plan, const Chromosome& c, int uq);

FitnessSample extract_features(const BayPlan& plan, const Chromosome& c, const Evaluation& eval,
                               int uq);

std::vector<double> sample_features(const FitnessSample& s);

struct TrainingRow {
    int plan_index = 0;
    Chromosome chromosome;
    FitnessSample sample;
};

struct TrainingSetParams {
    int lq = 1;
    int uq = 6;
    int overlap = 1;
};

/// Generates per_plan chromosomes per vessel (Algorithm 1), evaluates all of them
/// (Algorithm 2), and keeps every sample, infeasible ones included. Deterministic per
/// seed. The effective crane bound per vessel is min(uq, B); features are padded to uq.
std::vector<TrainingRow> build_training_set(const std::vector<BayPlan>& plans, int per_plan,
                                            const TrainingSetParams& params,
                                            const HandlingModel& f1, std::uint64_t seed);

enum class FitnessKind { Linear, KernelRbf, NearestNeighbors };

const char* to_string(FitnessKind kind);
FitnessKind fitness_kind_from_string(const std::string& name);

struct FitReport {
    double mae = 0.0;
    double mape = 0.0;  // over test rows with y2 > 0
    int train_rows = 0;
    int test_rows = 0;
    std::vector<int> train_groups;
    std::vector<int> test_groups;
};

/// Trained fitness regressor over the fixed-width feature vector.
class Regressor {
public:
    FitnessKind kind() const { return kind_; }
    int width() const { return width_; }
    int padding_uq() const { return (width_ - 3) / 2; }
    const FitReport& report() const { return report_; }

    /// Raw model output (no clamp).
    double predict(std::span<const double> features) const;

    nlohmann::json to_json() const;
    static Regressor from_json(const nlohmann::json& j);

    friend Regressor fit_fitness(FitnessKind kind, const std::vector<FitnessSample>& samples,
                                 const RegressOptions& opts, const std::vector<int>* groups,
                                 std::uint64_t split_seed);

private:
    FitnessKind kind_ = FitnessKind::Linear;
    int width_ = 0;
    FitReport report_;
    LinearModel linear_;
    KernelRidgeModel kernel_;
    KnnModel knn_;
};

/// Trains on the feasible rows only (>= 50 required, else TrainingError) with a
/// deterministic 80/20 held-out split: by group when `groups` (one id per sample,
/// e.g. the vessel index) is given, by row otherwise.
Regressor fit_fitness(FitnessKind kind, const std::vector<FitnessSample>& samples,
                      const RegressOptions& opts = {}, const std::vector<int>* groups = nullptr,
                      std::uint64_t split_seed = 0);

/// Model prediction clamped below at 0. Throws std::invalid_argument on width mismatch.
double predict_fitness(const Regressor& model, std::span<const double> features);

struct SelectionEntry {
    FitnessKind kind;
    FitReport report;
};

struct SelectionResult {
    FitnessKind selected;
    std::vector<SelectionEntry> table;  // in enum order
    Regressor model;
};

/// Trains every kind and keeps the argmin held-out MAE; ties break toward the earlier
/// (simpler) enum entry.
SelectionResult select_fitness_model(const std::vector<FitnessSample>& samples,
                                     const RegressOptions& opts = {},
                                     const std::vector<int>* groups = nullptr,
                                     std::uint64_t split_seed = 0);

/// Training-set CSV: con,b,nq,p_1..p_uq,q1_1..q1_uq,y1,y2 (y2 empty when infeasible).
void write_training_csv(const std::vector<FitnessSample>& samples, int uq, const std::string& path);
std::vector<FitnessSample> read_training_csv(const std::string& path);

}  // namespace quaysched
