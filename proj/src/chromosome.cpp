#include "quaysched/chromosome.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace quaysched {

nlohmann::json Chromosome::to_json() const {
    nlohmann::json ranges_j = nlohmann::json::array();
    for (const auto& [l, r] : ranges) ranges_j.push_back({l, r});
    return {{"num_qcs", num_qcs}, {"ranges", std::move(ranges_j)}, {"assignment", assignment}};
}

Chromosome Chromosome::from_json(const nlohmann::json& j) {
    Chromosome c;
    c.num_qcs = j.at("num_qcs").get<int>();
    for (const auto& rj : j.at("ranges")) c.ranges.emplace_back(rj.at(0).get<int>(), rj.at(1).get<int>());
    c.assignment = j.at("assignment").get<std::vector<std::vector<int>>>();
    return c;
}

std::vector<int> encode_key(const Chromosome& c) {
    std::vector<int> key;
    key.push_back(c.num_qcs);
    for (const auto& [l, r] : c.ranges) {
        key.push_back(l);
        key.push_back(r);
    }
    for (const auto& row : c.assignment) key.insert(key.end(), row.begin(), row.end());
    return key;
}

std::vector<std::pair<int, int>> movement_ranges(int num_hatches, int num_qcs, int overlap) {
    std::vector<std::pair<int, int>> ranges;
    ranges.reserve(static_cast<std::size_t>(num_qcs));
    for (int k = 0; k < num_qcs; ++k) {
        const int block_start = k * num_hatches / num_qcs + 1;
        const int block_end = (k + 1) * num_hatches / num_qcs;
        const int l = std::max(1, block_start - overlap);
        const int r = std::min(num_hatches, block_end + overlap);
        ranges.emplace_back(l, r);
    }
    return ranges;
}

std::vector<std::vector<int>> covering_sets(int num_hatches,
                                            const std::vector<std::pair<int, int>>& ranges) {
    std::vector<std::vector<int>> cover(static_cast<std::size_t>(num_hatches));
    for (int b = 1; b <= num_hatches; ++b)
        for (std::size_t k = 0; k < ranges.size(); ++k)
            if (ranges[k].first <= b && b <= ranges[k].second)
                cover[static_cast<std::size_t>(b - 1)].push_back(static_cast<int>(k) + 1);
    return cover;
}

namespace {

constexpr std::uint64_t kSpaceCap = std::uint64_t{1} << 62;

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > kSpaceCap / b) return kSpaceCap;
    return a * b;
}

/// Distinct assignments for one crane count: product over slots of |cover(hatch)|.
std::uint64_t assignment_space(const BayPlan& plan, const std::vector<std::vector<int>>& cover) {
    std::uint64_t total = 1;
    for (int b = 1; b <= plan.num_hatches; ++b) {
        const auto slots = plan.hatch_tasks(b).size();
        const auto choices = static_cast<std::uint64_t>(cover[static_cast<std::size_t>(b - 1)].size());
        for (std::size_t s = 0; s < slots; ++s) total = saturating_mul(total, choices);
        if (total >= kSpaceCap) return kSpaceCap;
    }
    return total;
}

Chromosome skeleton(const BayPlan& plan, int nq, const std::vector<std::pair<int, int>>& ranges) {
    Chromosome c;
    c.num_qcs = nq;
    c.ranges = ranges;
    c.assignment.resize(static_cast<std::size_t>(plan.num_hatches));
    for (int b = 1; b <= plan.num_hatches; ++b)
        c.assignment[static_cast<std::size_t>(b - 1)].resize(plan.hatch_tasks(b).size());
    return c;
}

/// Odometer walk over every range-respecting assignment for a fixed crane count.
template <typename Fn>
void enumerate_assignments(const BayPlan& plan, Chromosome& c,
                           const std::vector<std::vector<int>>& cover, Fn&& emit) {
    struct Slot {
        int hatch;
        int slot;
    };
    std::vector<Slot> slots;
    for (int b = 1; b <= plan.num_hatches; ++b)
        for (std::size_t s = 0; s < plan.hatch_tasks(b).size(); ++s)
            slots.push_back({b, static_cast<int>(s)});

    std::vector<std::size_t> digit(slots.size(), 0);
    for (;;) {
        for (std::size_t i = 0; i < slots.size(); ++i) {
            const auto& cs = cover[static_cast<std::size_t>(slots[i].hatch - 1)];
            c.assignment[static_cast<std::size_t>(slots[i].hatch - 1)][static_cast<std::size_t>(slots[i].slot)] =
                cs[digit[i]];
        }
        emit(c);
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

}  // namespace

GenerateResult generate_set(const BayPlan& plan, int nc, int lq, int uq, std::uint64_t seed,
                            const ChromosomeOptions& opts) {
    if (lq < 1 || lq > uq || uq > plan.num_hatches)
        throw std::invalid_argument("generate_set requires 1 <= lq <= uq <= num_hatches");
    if (nc < 1) throw std::invalid_argument("generate_set requires nc >= 1");

    std::vector<std::vector<std::pair<int, int>>> ranges_by_nq;
    std::vector<std::vector<std::vector<int>>> cover_by_nq;
    std::uint64_t space = 0;
    for (int nq = lq; nq <= uq; ++nq) {
        auto ranges = movement_ranges(plan.num_hatches, nq, opts.overlap);
        auto cover = covering_sets(plan.num_hatches, ranges);
        space = std::min(kSpaceCap, space + assignment_space(plan, cover));
        ranges_by_nq.push_back(std::move(ranges));
        cover_by_nq.push_back(std::move(cover));
    }

    GenerateResult result;
    std::set<std::vector<int>> seen;

    if (space < static_cast<std::uint64_t>(nc)) {
        // Smaller space than the request: return the whole space.
        result.space_exhausted = true;
        for (int nq = lq; nq <= uq; ++nq) {
            Chromosome c = skeleton(plan, nq, ranges_by_nq[static_cast<std::size_t>(nq - lq)]);
            enumerate_assignments(plan, c, cover_by_nq[static_cast<std::size_t>(nq - lq)],
                                  [&](const Chromosome& done) {
                                      if (seen.insert(encode_key(done)).second)
                                          result.chromosomes.push_back(done);
                                  });
        }
        return result;
    }

    Rng rng(mix_seed(seed, 0x67656eu));
    result.chromosomes.reserve(static_cast<std::size_t>(nc));
    while (static_cast<int>(result.chromosomes.size()) < nc) {
        const int nq = rng.uniform_int(lq, uq);
        const auto& cover = cover_by_nq[static_cast<std::size_t>(nq - lq)];
        Chromosome c = skeleton(plan, nq, ranges_by_nq[static_cast<std::size_t>(nq - lq)]);
        for (int b = 1; b <= plan.num_hatches; ++b) {
            const auto& cs = cover[static_cast<std::size_t>(b - 1)];
            for (auto& gene : c.assignment[static_cast<std::size_t>(b - 1)])
                gene = cs[rng.next_below(cs.size())];
        }
        if (seen.insert(encode_key(c)).second) result.chromosomes.push_back(std::move(c));
    }
    return result;
}

std::vector<ChromosomeViolation> validate(const BayPlan& plan, const Chromosome& c) {
    if (static_cast<int>(c.assignment.size()) != plan.num_hatches)
        throw std::invalid_argument("chromosome has " + std::to_string(c.assignment.size()) +
                                    " hatch rows, plan has " + std::to_string(plan.num_hatches));
    for (int b = 1; b <= plan.num_hatches; ++b)
        if (c.assignment[static_cast<std::size_t>(b - 1)].size() != plan.hatch_tasks(b).size())
            throw std::invalid_argument("chromosome row for hatch " + std::to_string(b) +
                                        " does not match the plan's task count");

    std::vector<ChromosomeViolation> out;
    if (c.num_qcs < 1 || static_cast<int>(c.ranges.size()) != c.num_qcs) {
        out.push_back({ViolationKind::CraneCount, 0, -1,
                       "num_qcs/ranges size mismatch (" + std::to_string(c.num_qcs) + " vs " +
                           std::to_string(c.ranges.size()) + ")"});
        return out;
    }

    for (int k = 0; k < c.num_qcs; ++k) {
        const auto [l, r] = c.ranges[static_cast<std::size_t>(k)];
        if (l < 1 || r > plan.num_hatches || l > r)
            out.push_back({ViolationKind::RangeBounds, 0, -1,
                           "range of QC " + std::to_string(k + 1) + " = [" + std::to_string(l) +
                               "," + std::to_string(r) + "] outside [1,B]"});
        if (k > 0) {
            const auto [pl, pr] = c.ranges[static_cast<std::size_t>(k - 1)];
            if (l < pl || r < pr)
                out.push_back({ViolationKind::RangeOrder, 0, -1,
                               "ranges of QC " + std::to_string(k) + " and QC " +
                                   std::to_string(k + 1) + " are not ordered"});
        }
    }

    const auto cover = covering_sets(plan.num_hatches, c.ranges);
    for (int b = 1; b <= plan.num_hatches; ++b) {
        if (cover[static_cast<std::size_t>(b - 1)].empty())
            out.push_back({ViolationKind::Coverage, b, -1,
                           "hatch " + std::to_string(b) + " is covered by no QC range"});
        const auto& row = c.assignment[static_cast<std::size_t>(b - 1)];
        for (std::size_t s = 0; s < row.size(); ++s) {
            const int k = row[s];
            if (k < 1 || k > c.num_qcs) {
                out.push_back({ViolationKind::Assignment, b, static_cast<int>(s),
                               "QC index " + std::to_string(k) + " out of [1,nq]"});
                continue;
            }
            const auto [l, r] = c.ranges[static_cast<std::size_t>(k - 1)];
            if (b < l || b > r)
                out.push_back({ViolationKind::Assignment, b, static_cast<int>(s),
                               "QC " + std::to_string(k) + " assigned outside its range at hatch " +
                                   std::to_string(b)});
        }
    }
    return out;
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b) {
    if (a.assignment.size() != b.assignment.size())
        throw std::invalid_argument("crossover parents encode different bay plans");
    for (std::size_t h = 0; h < a.assignment.size(); ++h)
        if (a.assignment[h].size() != b.assignment[h].size())
            throw std::invalid_argument("crossover parents encode different bay plans");
    if (a.num_qcs != b.num_qcs || a.ranges != b.ranges)
        throw std::invalid_argument("crossover parents must share crane count and ranges");

    const auto num_hatches = a.assignment.size();
    const std::size_t mid = (num_hatches + 1) / 2;  // hatches 1..ceil(B/2) keep their parent
    Chromosome child_a = a;
    Chromosome child_b = b;
    for (std::size_t h = mid; h < num_hatches; ++h) {
        child_a.assignment[h] = b.assignment[h];
        child_b.assignment[h] = a.assignment[h];
    }
    return {std::move(child_a), std::move(child_b)};
}

Chromosome mutate(const Chromosome& c, const BayPlan& plan, Rng& rng) {
    Chromosome out = c;
    const int b = rng.uniform_int(1, plan.num_hatches);
    const auto cover = covering_sets(plan.num_hatches, c.ranges);
    const auto& cs = cover[static_cast<std::size_t>(b - 1)];
    for (auto& gene : out.assignment[static_cast<std::size_t>(b - 1)])
        gene = cs[rng.next_below(cs.size())];
    return out;
}

Chromosome mutate(const Chromosome& c, const BayPlan& plan, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x6d7574u));
    return mutate(c, plan, rng);
}

}  // namespace quaysched
