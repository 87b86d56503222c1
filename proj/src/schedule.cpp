#include "quaysched/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace quaysched {

std::int64_t Timeline::start_time() const {
    std::int64_t s = std::numeric_limits<std::int64_t>::max();
    for (const auto& qc : per_qc)
        if (!qc.empty()) s = std::min(s, qc.front().start);
    return s == std::numeric_limits<std::int64_t>::max() ? 0 : s;
}

std::int64_t Timeline::end_time() const {
    std::int64_t e = 0;
    for (const auto& qc : per_qc)
        if (!qc.empty()) e = std::max(e, qc.back().end);
    return e;
}

std::int64_t task_duration(const HandlingModel& model, const Task& task) {
    return std::max<std::int64_t>(1, std::llround(model.predict_task(task)));
}

Timeline decode(const BayPlan& plan, const Chromosome& c, const DurationFn& duration) {
    Timeline timeline;
    timeline.per_qc.resize(static_cast<std::size_t>(c.num_qcs));
    // Hatch-ascending, slot-ascending pass; appending per QC preserves that order.
    for (int b = 1; b <= plan.num_hatches; ++b) {
        const auto& tasks = plan.hatch_tasks(b);
        const auto& row = c.assignment[static_cast<std::size_t>(b - 1)];
        for (std::size_t s = 0; s < tasks.size(); ++s) {
            auto& qc = timeline.per_qc[static_cast<std::size_t>(row[s] - 1)];
            const std::int64_t start = qc.empty() ? 0 : qc.back().end;
            qc.push_back({tasks[s].task_id, b, start, start + duration(tasks[s])});
        }
    }
    return timeline;
}

Timeline decode(const BayPlan& plan, const Chromosome& c, const HandlingModel& model) {
    return decode(plan, c, [&model](const Task& t) { return task_duration(model, t); });
}

ViolationCounts check_feasibility(const Timeline& timeline, const Chromosome& c) {
    if (timeline.per_qc.size() != static_cast<std::size_t>(c.num_qcs))
        throw std::logic_error("timeline was not decoded from this chromosome");
    ViolationCounts counts;

    // Within-hatch precedence. Timeline intervals are emitted in slot order per hatch
    // (ascending task ids), so adjacent pairs suffice.
    {
        std::map<int, std::vector<const TaskInterval*>> by_hatch;
        for (const auto& qc : timeline.per_qc)
            for (const auto& iv : qc) by_hatch[iv.hatch].push_back(&iv);
        for (auto& [hatch, ivs] : by_hatch) {
            std::sort(ivs.begin(), ivs.end(),
                      [](const TaskInterval* a, const TaskInterval* b) { return a->task_id < b->task_id; });
            for (std::size_t i = 1; i < ivs.size(); ++i)
                if (ivs[i]->start < ivs[i - 1]->end) ++counts.precedence;
        }
    }

    // Event sweep over interval boundaries; positions are constant between events.
    std::vector<std::int64_t> events;
    for (const auto& qc : timeline.per_qc)
        for (const auto& iv : qc) {
            events.push_back(iv.start);
            events.push_back(iv.end);
        }
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());

    std::vector<std::size_t> cursor(timeline.per_qc.size(), 0);
    for (std::size_t e = 0; e + 1 < events.size(); ++e) {
        const std::int64_t t = events[e];
        // Active QCs in crane order with their current hatch.
        std::vector<std::pair<int, int>> active;  // (qc index, hatch)
        for (std::size_t k = 0; k < timeline.per_qc.size(); ++k) {
            const auto& qc = timeline.per_qc[k];
            auto& cur = cursor[k];
            while (cur < qc.size() && qc[cur].end <= t) ++cur;
            if (cur < qc.size() && qc[cur].start <= t)
                active.emplace_back(static_cast<int>(k), qc[cur].hatch);
        }
        for (std::size_t i = 1; i < active.size(); ++i) {
            if (active[i - 1].second > active[i].second) ++counts.crossover;
            if (active[i - 1].second == active[i].second) ++counts.exclusivity;
        }
    }

    return counts;
}

Evaluation evaluate(const BayPlan& plan, const Chromosome& c, const DurationFn& duration) {
    const Timeline timeline = decode(plan, c, duration);
    Evaluation eval;
    eval.violations = check_feasibility(timeline, c);
    eval.feasible = eval.violations.feasible();
    eval.makespan = timeline.makespan();
    if (eval.feasible) eval.fitness = std::llabs(plan.berthing_time - eval.makespan);
    return eval;
}

Evaluation evaluate(const BayPlan& plan, const Chromosome& c, const HandlingModel& model) {
    return evaluate(plan, c, [&model](const Task& t) { return task_duration(model, t); });
}

nlohmann::json to_json(const Timeline& timeline, const Evaluation& eval) {
    nlohmann::json qcs = nlohmann::json::array();
    for (std::size_t k = 0; k < timeline.per_qc.size(); ++k) {
        nlohmann::json tasks = nlohmann::json::array();
        for (const auto& iv : timeline.per_qc[k])
            tasks.push_back({{"task_id", iv.task_id},
                             {"hatch", iv.hatch},
                             {"start", iv.start},
                             {"end", iv.end}});
        qcs.push_back({{"qc", static_cast<int>(k) + 1}, {"tasks", std::move(tasks)}});
    }
    return {{"qcs", std::move(qcs)},
            {"feasible", eval.feasible},
            {"fitness", eval.fitness ? nlohmann::json(*eval.fitness) : nlohmann::json(nullptr)},
            {"makespan", eval.makespan},
            {"violations",
             {{"crossover", eval.violations.crossover},
              {"exclusivity", eval.violations.exclusivity},
              {"precedence", eval.violations.precedence}}}};
}

}  // namespace quaysched
