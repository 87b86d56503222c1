#include "quaysched/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace quaysched {

namespace {

struct GridInterval {
    int hatch;
    int slot;  // task slot within the hatch
    std::int64_t start;
    std::int64_t end;
};

/// Independent timeline construction: walk each crane's assigned slots in (hatch, slot)
/// order, summing per-move predictions itself and rounding the task total (floor 1 s).
std::vector<std::vector<GridInterval>> build_grid_timeline(const BayPlan& plan, const Chromosome& c,
                                                           const HandlingModel& model) {
    std::vector<std::vector<GridInterval>> per_qc(static_cast<std::size_t>(c.num_qcs));
    std::vector<std::int64_t> clock(static_cast<std::size_t>(c.num_qcs), 0);
    for (int b = 1; b <= plan.num_hatches; ++b) {
        const auto& tasks = plan.hatch_tasks(b);
        for (std::size_t s = 0; s < tasks.size(); ++s) {
            const int k = c.assignment[static_cast<std::size_t>(b - 1)][s];
            double predicted = 0.0;
            for (const auto& move : tasks[s].moves) predicted += model.predict_move(move);
            const std::int64_t dur = std::max<std::int64_t>(1, std::llround(predicted));
            auto& t0 = clock[static_cast<std::size_t>(k - 1)];
            per_qc[static_cast<std::size_t>(k - 1)].push_back({b, static_cast<int>(s), t0, t0 + dur});
            t0 += dur;
        }
    }
    return per_qc;
}

bool grid_feasible(const BayPlan& plan, const std::vector<std::vector<GridInterval>>& per_qc) {
    std::int64_t horizon = 0;
    for (const auto& qc : per_qc)
        if (!qc.empty()) horizon = std::max(horizon, qc.back().end);

    // Slot completion times per hatch, for the precedence rule.
    std::vector<std::vector<std::int64_t>> slot_end(static_cast<std::size_t>(plan.num_hatches));
    for (int b = 1; b <= plan.num_hatches; ++b)
        slot_end[static_cast<std::size_t>(b - 1)].resize(plan.hatch_tasks(b).size(), 0);
    for (const auto& qc : per_qc)
        for (const auto& iv : qc)
            slot_end[static_cast<std::size_t>(iv.hatch - 1)][static_cast<std::size_t>(iv.slot)] = iv.end;

    std::vector<std::size_t> cursor(per_qc.size(), 0);
    std::vector<int> occupancy(static_cast<std::size_t>(plan.num_hatches), 0);
    for (std::int64_t t = 0; t < horizon; ++t) {
        std::fill(occupancy.begin(), occupancy.end(), 0);
        int prev_hatch = 0;
        for (std::size_t k = 0; k < per_qc.size(); ++k) {
            auto& cur = cursor[k];
            const auto& qc = per_qc[k];
            while (cur < qc.size() && qc[cur].end <= t) ++cur;
            if (cur >= qc.size() || qc[cur].start > t) continue;  // not active this second
            const auto& iv = qc[cur];
            if (prev_hatch != 0 && iv.hatch <= prev_hatch) return false;  // crossover or shared hatch
            prev_hatch = iv.hatch;
            if (++occupancy[static_cast<std::size_t>(iv.hatch - 1)] > 1) return false;
            // A slot active at t requires every earlier slot of its hatch done by t.
            if (iv.slot > 0 &&
                slot_end[static_cast<std::size_t>(iv.hatch - 1)][static_cast<std::size_t>(iv.slot - 1)] > t)
                return false;
        }
    }
    return true;
}

std::int64_t grid_makespan(const std::vector<std::vector<GridInterval>>& per_qc) {
    std::int64_t lo = 0, hi = 0;
    bool any = false;
    for (const auto& qc : per_qc) {
        if (qc.empty()) continue;
        lo = any ? std::min(lo, qc.front().start) : qc.front().start;
        hi = any ? std::max(hi, qc.back().end) : qc.back().end;
        any = true;
    }
    return any ? hi - lo : 0;
}

}  // namespace

bool grid_check(const BayPlan& plan, const Chromosome& c, const HandlingModel& model) {
    return grid_feasible(plan, build_grid_timeline(plan, c, model));
}

OracleResult enumerate_optimum(const BayPlan& plan, int lq, int uq, const HandlingModel& model,
                               const OracleLimits& limits, int overlap) {
    OracleResult result;
    if (plan.total_tasks() > limits.max_total_tasks || uq > limits.max_uq) {
        result.status = OracleStatus::TooLarge;
        return result;
    }

    bool found = false;
    std::vector<int> best_key;
    std::uint64_t enumerated = 0;
    bool overflow = false;

    for (int nq = lq; nq <= uq && !overflow; ++nq) {
        const auto ranges = movement_ranges(plan.num_hatches, nq, overlap);
        const auto cover = covering_sets(plan.num_hatches, ranges);

        struct Slot {
            int hatch;
            int slot;
        };
        std::vector<Slot> slots;
        for (int b = 1; b <= plan.num_hatches; ++b)
            for (std::size_t s = 0; s < plan.hatch_tasks(b).size(); ++s)
                slots.push_back({b, static_cast<int>(s)});

        Chromosome c;
        c.num_qcs = nq;
        c.ranges = ranges;
        c.assignment.resize(static_cast<std::size_t>(plan.num_hatches));
        for (int b = 1; b <= plan.num_hatches; ++b)
            c.assignment[static_cast<std::size_t>(b - 1)].resize(plan.hatch_tasks(b).size());

        std::vector<std::size_t> digit(slots.size(), 0);
        for (;;) {
            if (++enumerated > limits.max_enumerations) {
                overflow = true;
                break;
            }
            for (std::size_t i = 0; i < slots.size(); ++i) {
                const auto& cs = cover[static_cast<std::size_t>(slots[i].hatch - 1)];
                c.assignment[static_cast<std::size_t>(slots[i].hatch - 1)]
                            [static_cast<std::size_t>(slots[i].slot)] = cs[digit[i]];
            }

            const auto timeline = build_grid_timeline(plan, c, model);
            if (grid_feasible(plan, timeline)) {
                const std::int64_t fitness = std::llabs(plan.berthing_time - grid_makespan(timeline));
                auto key = encode_key(c);
                if (!found || fitness < result.optimum ||
                    (fitness == result.optimum && key < best_key)) {
                    found = true;
                    result.optimum = fitness;
                    result.best = c;
                    best_key = std::move(key);
                }
            }

            std::size_t pos = 0;
            while (pos < slots.size()) {
                const auto& cs = cover[static_cast<std::size_t>(slots[pos].hatch - 1)];
                if (++digit[pos] < cs.size()) break;
                digit[pos] = 0;
                ++pos;
            }
            if (pos == slots.size()) break;
        }
    }

    result.enumerated = enumerated;
    if (overflow) {
        result.status = OracleStatus::TooLarge;
        result.best.reset();
    } else {
        result.status = found ? OracleStatus::Optimal : OracleStatus::Infeasible;
    }
    return result;
}

nlohmann::json to_json(const OracleResult& result) {
    nlohmann::json j;
    switch (result.status) {
        case OracleStatus::Optimal: j["status"] = "optimal"; break;
        case OracleStatus::Infeasible: j["status"] = "infeasible"; break;
        case OracleStatus::TooLarge: j["status"] = "too-large"; break;
    }
    j["enumerated_count"] = result.enumerated;
    if (result.status == OracleStatus::Optimal) {
        j["optimum"] = result.optimum;
        j["chromosome"] = result.best->to_json();
    }
    return j;
}

}  // namespace quaysched
