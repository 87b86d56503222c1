#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace quaysched {

/// Instance file violates the documented schema; message names the offending field.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One container lift with its five binary handling features.
struct ContainerMove {
    bool load = false;       // 1 = loading, 0 = unloading
    bool twin = false;       // twin lift
    bool full = false;       // full vs empty box
    bool special = false;    // danger / bundle / reefer
    bool jobchange = false;  // operation type differs from the preceding move

    bool operator==(const ContainerMove&) const = default;
};

/// Contiguous group of moves in one hatch; the atomic unit of crane assignment.
struct Task {
    int task_id = 0;
    int hatch = 0;  // 1-based bay index
    std::vector<ContainerMove> moves;

    bool operator==(const Task&) const = default;
};

/// jobchange flags implied by a load-flag sequence: move 0 is 0, move i is 1 iff the
/// load flag changed from move i-1.
std::vector<bool> jobchange_flags(const std::vector<ContainerMove>& moves);

struct BayPlan {
    std::string vessel_id;
    int num_hatches = 0;
    std::int64_t berthing_time = 0;  // H, seconds
    std::vector<std::vector<Task>> tasks_by_hatch;    // index 0 = hatch 1; priority order
    std::vector<std::int64_t> ground_truth_seconds;   // optional; canonical move order

    int total_containers() const;
    int total_tasks() const;
    const std::vector<Task>& hatch_tasks(int hatch) const { return tasks_by_hatch.at(static_cast<std::size_t>(hatch - 1)); }

    /// Throws std::invalid_argument naming the first violated invariant.
    void check_invariants() const;

    bool operator==(const BayPlan&) const = default;
};

/// Accessor over the optional ground_truth_seconds list, resolving the canonical move
/// order (hatch ascending, task order, move order) into per-task offsets.
class GroundTruth {
public:
    explicit GroundTruth(const BayPlan& plan);
    bool available() const { return available_; }
    std::int64_t move_seconds(int hatch, int task_slot, int move_index) const;
    std::int64_t task_seconds(int hatch, int task_slot) const;

private:
    const BayPlan* plan_;
    bool available_;
    std::vector<std::vector<std::size_t>> offsets_;  // [hatch-1][slot] -> flat index of move 0
};

struct GeneratorProfile {
    int min_hatches = 6;
    int max_hatches = 20;
    int min_tasks_per_hatch = 1;
    int max_tasks_per_hatch = 3;
    int min_moves_per_task = 4;
    int max_moves_per_task = 40;
    double twin_prob = 0.2;
    double full_prob = 0.7;
    double special_prob = 0.1;
    double slack_min = 0.95;
    double slack_max = 1.10;
    bool noise = true;  // Gaussian noise on ground-truth handling seconds

    /// Throws ConfigError when a min exceeds its max or a probability leaves [0,1].
    void check() const;

    static int reference_crane_count(int num_hatches);  // ceil(B/5)

    /// Small instances for the exact oracle (<= 8 tasks, suits uq <= 3).
    static GeneratorProfile tiny();
    /// Mid-size instances for benchmark sweeps.
    static GeneratorProfile mid();
};

/// Deterministic synthetic vessel. Within each hatch the concatenated move sequence is
/// all unloads followed by all loads, split into tasks; H is the ground-truth total work
/// divided by the reference crane count, scaled by a slack factor from the profile.
BayPlan generate_instance(std::uint64_t seed, const GeneratorProfile& profile = {});

nlohmann::json to_json(const BayPlan& plan);
BayPlan bayplan_from_json(const nlohmann::json& j);

BayPlan read_instance(const std::string& path);
void write_instance(const BayPlan& plan, const std::string& path);

}  // namespace quaysched
