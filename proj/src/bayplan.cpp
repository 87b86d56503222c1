#include "quaysched/bayplan.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "quaysched/handling.hpp"
#include "quaysched/rng.hpp"

namespace quaysched {

std::vector<bool> jobchange_flags(const std::vector<ContainerMove>& moves) {
    std::vector<bool> flags(moves.size(), false);
    for (std::size_t i = 1; i < moves.size(); ++i) {
        flags[i] = moves[i].load != moves[i - 1].load;
    }
    return flags;
}

int BayPlan::total_containers() const {
    int n = 0;
    for (const auto& hatch : tasks_by_hatch)
        for (const auto& task : hatch) n += static_cast<int>(task.moves.size());
    return n;
}

int BayPlan::total_tasks() const {
    int n = 0;
    for (const auto& hatch : tasks_by_hatch) n += static_cast<int>(hatch.size());
    return n;
}

void BayPlan::check_invariants() const {
    if (num_hatches < 1) throw std::invalid_argument("num_hatches must be >= 1");
    if (berthing_time <= 0) throw std::invalid_argument("berthing_time must be > 0");
    if (static_cast<int>(tasks_by_hatch.size()) != num_hatches)
        throw std::invalid_argument("tasks_by_hatch size must equal num_hatches");

    std::set<int> ids;
    for (int b = 1; b <= num_hatches; ++b) {
        const auto& tasks = tasks_by_hatch[static_cast<std::size_t>(b - 1)];
        int prev_id = 0;
        bool first = true;
        for (const auto& task : tasks) {
            if (task.hatch != b)
                throw std::invalid_argument("task " + std::to_string(task.task_id) +
                                            " stored under hatch " + std::to_string(b) +
                                            " but labeled hatch " + std::to_string(task.hatch));
            if (task.hatch < 1 || task.hatch > num_hatches)
                throw std::invalid_argument("task hatch out of [1, B]");
            if (task.moves.empty())
                throw std::invalid_argument("task " + std::to_string(task.task_id) + " has no moves");
            if (!ids.insert(task.task_id).second)
                throw std::invalid_argument("duplicate task_id " + std::to_string(task.task_id));
            if (!first && task.task_id <= prev_id)
                throw std::invalid_argument("task ids within hatch " + std::to_string(b) +
                                            " not strictly increasing");
            prev_id = task.task_id;
            first = false;

            const auto expected = jobchange_flags(task.moves);
            for (std::size_t i = 0; i < task.moves.size(); ++i) {
                if (task.moves[i].jobchange != expected[i])
                    throw std::invalid_argument("jobchange flag of task " +
                                                std::to_string(task.task_id) + " move " +
                                                std::to_string(i) + " inconsistent with load sequence");
            }
        }
    }
    if (total_containers() < 1) throw std::invalid_argument("instance has no container moves");
    if (!ground_truth_seconds.empty() &&
        static_cast<int>(ground_truth_seconds.size()) != total_containers())
        throw std::invalid_argument("ground_truth_seconds length must equal the container count");
}

GroundTruth::GroundTruth(const BayPlan& plan) : plan_(&plan) {
    available_ = !plan.ground_truth_seconds.empty();
    offsets_.resize(plan.tasks_by_hatch.size());
    std::size_t flat = 0;
    for (std::size_t h = 0; h < plan.tasks_by_hatch.size(); ++h) {
        offsets_[h].resize(plan.tasks_by_hatch[h].size());
        for (std::size_t t = 0; t < plan.tasks_by_hatch[h].size(); ++t) {
            offsets_[h][t] = flat;
            flat += plan.tasks_by_hatch[h][t].moves.size();
        }
    }
}

std::int64_t GroundTruth::move_seconds(int hatch, int task_slot, int move_index) const {
    if (!available_) throw std::logic_error("instance carries no ground_truth_seconds");
    const std::size_t base = offsets_[static_cast<std::size_t>(hatch - 1)][static_cast<std::size_t>(task_slot)];
    return plan_->ground_truth_seconds[base + static_cast<std::size_t>(move_index)];
}

std::int64_t GroundTruth::task_seconds(int hatch, int task_slot) const {
    const auto& task = plan_->tasks_by_hatch[static_cast<std::size_t>(hatch - 1)][static_cast<std::size_t>(task_slot)];
    std::int64_t total = 0;
    for (std::size_t m = 0; m < task.moves.size(); ++m)
        total += move_seconds(hatch, task_slot, static_cast<int>(m));
    return total;
}

void GeneratorProfile::check() const {
    auto bad = [](const std::string& what) { throw ConfigError("generator profile: " + what); };
    if (min_hatches < 1 || min_hatches > max_hatches) bad("hatch bounds invalid");
    if (min_tasks_per_hatch < 1 || min_tasks_per_hatch > max_tasks_per_hatch) bad("tasks-per-hatch bounds invalid");
    if (min_moves_per_task < 1 || min_moves_per_task > max_moves_per_task) bad("moves-per-task bounds invalid");
    for (double p : {twin_prob, full_prob, special_prob})
        if (p < 0.0 || p > 1.0) bad("probability outside [0,1]");
    if (slack_min <= 0.0 || slack_min > slack_max) bad("slack bounds invalid");
}

int GeneratorProfile::reference_crane_count(int num_hatches) {
    return (num_hatches + 4) / 5;
}

GeneratorProfile GeneratorProfile::tiny() {
    GeneratorProfile p;
    p.min_hatches = 2;
    p.max_hatches = 4;
    p.min_tasks_per_hatch = 1;
    p.max_tasks_per_hatch = 2;
    p.min_moves_per_task = 2;
    p.max_moves_per_task = 6;
    return p;
}

GeneratorProfile GeneratorProfile::mid() {
    GeneratorProfile p;
    p.min_hatches = 6;
    p.max_hatches = 10;
    p.min_tasks_per_hatch = 1;
    p.max_tasks_per_hatch = 2;
    p.min_moves_per_task = 4;
    p.max_moves_per_task = 20;
    return p;
}

BayPlan generate_instance(std::uint64_t seed, const GeneratorProfile& profile) {
    profile.check();
    Rng shape_rng(mix_seed(seed, 0x5348u));
    Rng feature_rng(mix_seed(seed, 0x464cu));
    Rng noise_rng(mix_seed(seed, 0x4e4fu));

    BayPlan plan;
    {
        std::ostringstream name;
        name << "synthetic-" << seed;
        plan.vessel_id = name.str();
    }
    plan.num_hatches = shape_rng.uniform_int(profile.min_hatches, profile.max_hatches);
    plan.tasks_by_hatch.resize(static_cast<std::size_t>(plan.num_hatches));

    int next_task_id = 1;
    for (int b = 1; b <= plan.num_hatches; ++b) {
        const int n_tasks = shape_rng.uniform_int(profile.min_tasks_per_hatch, profile.max_tasks_per_hatch);
        std::vector<int> sizes(static_cast<std::size_t>(n_tasks));
        int total_moves = 0;
        for (auto& s : sizes) {
            s = shape_rng.uniform_int(profile.min_moves_per_task, profile.max_moves_per_task);
            total_moves += s;
        }
        // Discharge before loading: the hatch's concatenated move sequence is 0..0 1..1,
        // cut into tasks at the drawn sizes. The task spanning the cut carries the only
        // jobchange inside this hatch.
        const int n_unload = shape_rng.uniform_int(0, total_moves);

        auto& tasks = plan.tasks_by_hatch[static_cast<std::size_t>(b - 1)];
        tasks.reserve(sizes.size());
        int emitted = 0;
        for (int s : sizes) {
            Task task;
            task.task_id = next_task_id++;
            task.hatch = b;
            task.moves.resize(static_cast<std::size_t>(s));
            for (auto& move : task.moves) {
                move.load = emitted >= n_unload;
                move.twin = feature_rng.bernoulli(profile.twin_prob);
                move.full = feature_rng.bernoulli(profile.full_prob);
                move.special = feature_rng.bernoulli(profile.special_prob);
                ++emitted;
            }
            const auto jc = jobchange_flags(task.moves);
            for (std::size_t i = 0; i < task.moves.size(); ++i) task.moves[i].jobchange = jc[i];
            tasks.push_back(std::move(task));
        }
    }

    std::int64_t total_work = 0;
    plan.ground_truth_seconds.reserve(static_cast<std::size_t>(plan.total_containers()));
    for (const auto& hatch : plan.tasks_by_hatch) {
        for (const auto& task : hatch) {
            for (const auto& move : task.moves) {
                const std::int64_t secs = profile.noise ? ground_truth_seconds(move, noise_rng)
                                                        : ground_truth_seconds(move);
                plan.ground_truth_seconds.push_back(secs);
                total_work += secs;
            }
        }
    }

    const int ref_cranes = GeneratorProfile::reference_crane_count(plan.num_hatches);
    const double slack = shape_rng.uniform_real(profile.slack_min, profile.slack_max);
    plan.berthing_time = std::max<std::int64_t>(
        1, std::llround(static_cast<double>(total_work) / ref_cranes * slack));

    plan.check_invariants();
    return plan;
}

namespace {

int require_int(const nlohmann::json& j, const char* field) {
    if (!j.contains(field)) throw ParseError(std::string("missing field '") + field + "'");
    if (!j.at(field).is_number_integer()) throw ParseError(std::string("field '") + field + "' must be an integer");
    return j.at(field).get<int>();
}

bool binary_flag(const nlohmann::json& j, const char* field) {
    if (!j.contains(field)) throw ParseError(std::string("missing move field '") + field + "'");
    const auto& v = j.at(field);
    if (!v.is_number_integer()) throw ParseError(std::string("move field '") + field + "' must be 0 or 1");
    const int x = v.get<int>();
    if (x != 0 && x != 1) throw ParseError(std::string("move field '") + field + "' must be 0 or 1");
    return x == 1;
}

}  // namespace

nlohmann::json to_json(const BayPlan& plan) {
    nlohmann::json hatches = nlohmann::json::array();
    for (int b = 1; b <= plan.num_hatches; ++b) {
        nlohmann::json tasks = nlohmann::json::array();
        for (const auto& task : plan.hatch_tasks(b)) {
            nlohmann::json moves = nlohmann::json::array();
            for (const auto& move : task.moves) {
                moves.push_back({{"load", move.load ? 1 : 0},
                                 {"twin", move.twin ? 1 : 0},
                                 {"full", move.full ? 1 : 0},
                                 {"special", move.special ? 1 : 0},
                                 {"jobchange", move.jobchange ? 1 : 0}});
            }
            tasks.push_back({{"task_id", task.task_id}, {"moves", std::move(moves)}});
        }
        hatches.push_back({{"hatch", b}, {"tasks", std::move(tasks)}});
    }
    nlohmann::json j = {{"vessel_id", plan.vessel_id},
                        {"num_hatches", plan.num_hatches},
                        {"berthing_time", plan.berthing_time},
                        {"hatches", std::move(hatches)}};
    if (!plan.ground_truth_seconds.empty()) j["ground_truth_seconds"] = plan.ground_truth_seconds;
    return j;
}

BayPlan bayplan_from_json(const nlohmann::json& j) {
    BayPlan plan;
    if (!j.contains("vessel_id")) throw ParseError("missing field 'vessel_id'");
    plan.vessel_id = j.at("vessel_id").get<std::string>();
    plan.num_hatches = require_int(j, "num_hatches");
    if (!j.contains("berthing_time")) throw ParseError("missing field 'berthing_time'");
    plan.berthing_time = j.at("berthing_time").get<std::int64_t>();
    if (plan.num_hatches < 1) throw ParseError("field 'num_hatches' must be >= 1");
    if (!j.contains("hatches") || !j.at("hatches").is_array())
        throw ParseError("missing field 'hatches'");

    plan.tasks_by_hatch.resize(static_cast<std::size_t>(plan.num_hatches));
    for (const auto& hj : j.at("hatches")) {
        const int b = require_int(hj, "hatch");
        if (b < 1 || b > plan.num_hatches)
            throw ParseError("field 'hatch' = " + std::to_string(b) + " outside [1, num_hatches]");
        if (!hj.contains("tasks") || !hj.at("tasks").is_array())
            throw ParseError("missing field 'tasks' under hatch " + std::to_string(b));
        auto& tasks = plan.tasks_by_hatch[static_cast<std::size_t>(b - 1)];
        for (const auto& tj : hj.at("tasks")) {
            Task task;
            task.task_id = require_int(tj, "task_id");
            task.hatch = b;
            if (!tj.contains("moves") || !tj.at("moves").is_array())
                throw ParseError("missing field 'moves' in task " + std::to_string(task.task_id));
            for (const auto& mj : tj.at("moves")) {
                ContainerMove move;
                move.load = binary_flag(mj, "load");
                move.twin = binary_flag(mj, "twin");
                move.full = binary_flag(mj, "full");
                move.special = binary_flag(mj, "special");
                move.jobchange = binary_flag(mj, "jobchange");
                task.moves.push_back(move);
            }
            tasks.push_back(std::move(task));
        }
    }
    if (j.contains("ground_truth_seconds")) {
        if (!j.at("ground_truth_seconds").is_array())
            throw ParseError("field 'ground_truth_seconds' must be an array");
        plan.ground_truth_seconds = j.at("ground_truth_seconds").get<std::vector<std::int64_t>>();
    }
    try {
        plan.check_invariants();
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return plan;
}

BayPlan read_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open instance file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid JSON in " + path + ": " + e.what());
    }
    return bayplan_from_json(j);
}

void write_instance(const BayPlan& plan, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write instance file " + path);
    out << to_json(plan).dump(2) << '\n';
}

}  // namespace quaysched
