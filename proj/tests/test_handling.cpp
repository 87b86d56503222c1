#include "doctest.h"
#include "quaysched/handling.hpp"

#include <array>

using namespace quaysched;

namespace {

ContainerMove make_move(bool load, bool twin = false, bool full = false, bool special = false,
                        bool jobchange = false) {
    return ContainerMove{load, twin, full, special, jobchange};
}

/// Noise-free samples covering all 16 reachable patterns (jobchange excluded: it is a
/// derived flag, but fit inputs may still carry it).
std::vector<HandlingSample> noise_free_samples(int copies) {
    std::vector<HandlingSample> samples;
    for (int c = 0; c < copies; ++c) {
        for (int bits = 0; bits < 32; ++bits) {
            ContainerMove move{(bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0, (bits & 8) != 0,
                               (bits & 16) != 0};
            samples.push_back({move, static_cast<double>(ground_truth_seconds(move))});
        }
    }
    return samples;
}

}  // namespace

TEST_SUITE("handling") {

TEST_CASE("ground truth matches the published bases") {
    CHECK(ground_truth_seconds(make_move(false)) == 90);
    CHECK(ground_truth_seconds(make_move(true)) == 150);
    // load, twin, full, jobchange: 150*1.2 + 10 + 60 = 250
    CHECK(ground_truth_seconds(make_move(true, true, true, false, true)) == 250);
}

TEST_CASE("noisy ground truth is seeded and floored") {
    Rng a(5), b(5);
    const auto move = make_move(false);
    for (int i = 0; i < 100; ++i) {
        const auto va = ground_truth_seconds(move, a);
        CHECK(va == ground_truth_seconds(move, b));
        CHECK(va >= 20);
    }
}

TEST_CASE("constant model predicts exactly 90/150") {
    const HandlingModel model = HandlingModel::constant();
    CHECK(model.predict_move(make_move(false)) == 90.0);
    CHECK(model.predict_move(make_move(true)) == 150.0);
    CHECK(model.predict_move(make_move(true, true, true, true, true)) == 150.0);
}

TEST_CASE("average-by-type returns the pattern mean") {
    std::vector<HandlingSample> samples;
    for (int i = 0; i < 40; ++i) samples.push_back({make_move(false), 100.0});
    for (int i = 0; i < 8; ++i) samples.push_back({make_move(true), 200.0});
    const auto model = fit_handling(HandlingKind::AverageByType, samples);
    CHECK(model.predict_move(make_move(false)) == doctest::Approx(100.0));
    CHECK(model.predict_move(make_move(true)) == doctest::Approx(200.0));
    // Unseen pattern falls back to the global mean.
    const double global = (40 * 100.0 + 8 * 200.0) / 48.0;
    CHECK(model.predict_move(make_move(false, true)) == doctest::Approx(global));
}

TEST_CASE("on noise-free data the truth is nonlinear: OLS misses, pattern means do not") {
    const auto samples = noise_free_samples(4);
    const auto linear = fit_handling(HandlingKind::Linear, samples);
    const auto average = fit_handling(HandlingKind::AverageByType, samples);

    double linear_mae = 0.0, average_mae = 0.0;
    for (const auto& s : samples) {
        linear_mae += std::abs(linear.predict_move(s.move) - s.seconds);
        average_mae += std::abs(average.predict_move(s.move) - s.seconds);
    }
    linear_mae /= static_cast<double>(samples.size());
    average_mae /= static_cast<double>(samples.size());

    CHECK(average_mae == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(linear_mae > 0.1);  // the twin x load interaction is not linear in the flags
}

TEST_CASE("kernel model also recovers the 32 pattern means") {
    const auto samples = noise_free_samples(2);
    RegressOptions opts;
    opts.ridge = 1e-8;
    const auto model = fit_handling(HandlingKind::KernelRbf, samples, opts);
    for (const auto& s : samples)
        CHECK(model.predict_move(s.move) == doctest::Approx(s.seconds).epsilon(1e-3));
}

TEST_CASE("kernel predictions are invariant under training-set duplication") {
    auto samples = noise_free_samples(1);
    const auto model_once = fit_handling(HandlingKind::KernelRbf, samples);
    auto doubled = samples;
    doubled.insert(doubled.end(), samples.begin(), samples.end());
    const auto model_twice = fit_handling(HandlingKind::KernelRbf, doubled);
    for (const auto& s : samples)
        CHECK(model_once.predict_move(s.move) == doctest::Approx(model_twice.predict_move(s.move)).epsilon(1e-12));
}

TEST_CASE("predict_task is the fold of predict_move") {
    Task task;
    task.task_id = 1;
    task.hatch = 1;
    task.moves = {make_move(false), make_move(false), make_move(false)};
    const auto constant = HandlingModel::constant();
    CHECK(constant.predict_task(task) == doctest::Approx(270.0));

    const auto samples = noise_free_samples(2);
    for (auto kind : {HandlingKind::AverageByType, HandlingKind::Linear, HandlingKind::KernelRbf}) {
        const auto model = fit_handling(kind, samples);
        Task mixed;
        mixed.task_id = 2;
        mixed.hatch = 1;
        mixed.moves = {make_move(false), make_move(true, true), make_move(true, false, true, false, true)};
        double sum = 0.0;
        for (const auto& m : mixed.moves) sum += model.predict_move(m);
        CHECK(model.predict_task(mixed) == doctest::Approx(sum));
    }
}

TEST_CASE("training preconditions are enforced") {
    std::vector<HandlingSample> few = {{make_move(false), 90.0}, {make_move(true), 150.0}};
    CHECK_THROWS_AS(fit_handling(HandlingKind::Linear, few), TrainingError);

    std::vector<HandlingSample> degenerate(40, {make_move(false), 90.0});
    CHECK_THROWS_AS(fit_handling(HandlingKind::AverageByType, degenerate), TrainingError);
}

TEST_CASE("untrained non-constant model refuses to predict") {
    HandlingModel untrained;  // constant kind is fine
    CHECK_NOTHROW(untrained.predict_move(make_move(false)));
    const auto j = fit_handling(HandlingKind::Linear, noise_free_samples(2)).to_json();
    auto tampered = j;
    tampered["trained"] = false;
    const auto model = HandlingModel::from_json(tampered);
    CHECK_THROWS_AS(model.predict_move(make_move(false)), std::logic_error);
}

TEST_CASE("metrics arithmetic") {
    {
        const std::array<double, 1> p{100.0}, a{90.0};
        const auto m = metrics(p, a);
        CHECK(m.mae == doctest::Approx(10.0));
        CHECK(m.mape == doctest::Approx(10.0 / 90.0));
    }
    {
        const std::array<double, 3> x{1.0, 2.0, 3.0};
        const auto m = metrics(x, x);
        CHECK(m.mae == 0.0);
        CHECK(m.mape == 0.0);
    }
    {
        const std::array<double, 2> p{90.0, 150.0}, a{100.0, 100.0};
        const auto m = metrics(p, a);
        CHECK(m.mae == doctest::Approx(30.0));
        CHECK(m.mape == doctest::Approx(0.30));
    }
}

TEST_CASE("metrics rejects bad input") {
    const std::array<double, 2> p{1.0, 2.0};
    const std::array<double, 1> a{1.0};
    CHECK_THROWS_AS(metrics(p, a), std::invalid_argument);
    const std::array<double, 2> zero{1.0, 0.0};
    CHECK_THROWS_AS(metrics(p, zero), std::invalid_argument);
    CHECK_THROWS_AS(metrics(std::span<const double>{}, std::span<const double>{}),
                    std::invalid_argument);
}

TEST_CASE("handling model JSON round-trips") {
    const auto samples = noise_free_samples(2);
    for (auto kind : {HandlingKind::Constant, HandlingKind::AverageByType, HandlingKind::Linear,
                      HandlingKind::KernelRbf}) {
        const auto model = fit_handling(kind, samples);
        const auto back = HandlingModel::from_json(model.to_json());
        for (int bits = 0; bits < 32; ++bits) {
            ContainerMove move{(bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0, (bits & 8) != 0,
                               (bits & 16) != 0};
            CHECK(back.predict_move(move) == doctest::Approx(model.predict_move(move)).epsilon(1e-12));
        }
    }
}

}  // TEST_SUITE
