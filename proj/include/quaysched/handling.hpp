#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "quaysched/bayplan.hpp"
#include "quaysched/regress.hpp"
#include "quaysched/rng.hpp"

namespace quaysched {

class Rng;

class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Synthetic ground-truth constants. The 90/150 bases are the published per-container
// settings; the modifiers and the noise scale are declared artifact plumbing, echoed
// into instance files for auditability.
namespace ground_truth {
inline constexpr std::int64_t kUnloadBase = 90;
inline constexpr std::int64_t kLoadBase = 150;
inline constexpr double kTwinFactor = 0.20;
inline constexpr std::int64_t kFullExtra = 10;
inline constexpr std::int64_t kSpecialExtra = 30;
inline constexpr std::int64_t kJobchangeExtra = 60;
inline constexpr double kNoiseSigma = 15.0;
inline constexpr std::int64_t kFloorSeconds = 20;
}  // namespace ground_truth

/// Noise-free handling time: base(90 unload / 150 load) x (1 + 0.20*twin)
/// + 10*full + 30*special + 60*jobchange. Always a whole number of seconds.
std::int64_t ground_truth_seconds(const ContainerMove& move);

/// Noisy variant: adds Gaussian noise (sigma 15) and floors the result at 20 s.
std::int64_t ground_truth_seconds(const ContainerMove& move, Rng& noise_rng);

enum class HandlingKind { Constant, AverageByType, Linear, KernelRbf };

const char* to_string(HandlingKind kind);
HandlingKind handling_kind_from_string(const std::string& name);

struct HandlingSample {
    ContainerMove move;
    double seconds = 0.0;
};

/// Index into the 2^5 feature-pattern table.
int move_pattern(const ContainerMove& move);

/// The f1 layer: per-container handling seconds from the five binary features.
/// Trained models are immutable; prediction is reentrant.
class HandlingModel {
public:
    HandlingModel() = default;  // Constant, usable without training

    static HandlingModel constant() { return HandlingModel{}; }

    HandlingKind kind() const { return kind_; }
    bool trained() const { return trained_; }

    double predict_move(const ContainerMove& move) const;
    /// Sum of predict_move over the task's moves.
    double predict_task(const Task& task) const;

    nlohmann::json to_json() const;
    static HandlingModel from_json(const nlohmann::json& j);

    friend HandlingModel fit_handling(HandlingKind kind, const std::vector<HandlingSample>& samples,
                                      const RegressOptions& opts);

private:
    HandlingKind kind_ = HandlingKind::Constant;
    bool trained_ = false;
    std::vector<double> pattern_mean_;  // AverageByType: 32 entries, NaN = unseen
    double global_mean_ = 0.0;
    LinearModel linear_;
    KernelRidgeModel kernel_;
};

/// Fits the requested backend. Requires >= 32 samples covering >= 2 distinct feature
/// patterns (throws TrainingError otherwise); Constant validates the data but ignores it.
HandlingModel fit_handling(HandlingKind kind, const std::vector<HandlingSample>& samples,
                           const RegressOptions& opts = {});

struct Metrics {
    double mae = 0.0;
    double mape = 0.0;  // fraction, not percent
};

/// MAE = mean |p-a|, MAPE = mean |p-a|/a. Throws std::invalid_argument on length
/// mismatch, empty input, or a non-positive actual.
Metrics metrics(std::span<const double> predictions, std::span<const double> actuals);

/// Per-vessel (move, seconds) pairs from a stored instance's ground-truth list.
std::vector<HandlingSample> handling_samples(const BayPlan& plan);

}  // namespace quaysched
