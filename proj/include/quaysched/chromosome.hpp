#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "quaysched/bayplan.hpp"
#include "quaysched/rng.hpp"

namespace quaysched {

/// Variable-dimension 2D encoding: per-hatch ordered QC assignments plus crane count
/// and movement ranges. Task order inside a hatch is the bay plan's; the chromosome
/// only assigns cranes. Immutable value type; operators are pure functions.
struct Chromosome {
    int num_qcs = 0;
    std::vector<std::pair<int, int>> ranges;       // (l_k, r_k), 1-based inclusive
    std::vector<std::vector<int>> assignment;      // [hatch-1][slot] -> QC index (1-based)

    bool operator==(const Chromosome&) const = default;

    nlohmann::json to_json() const;
    static Chromosome from_json(const nlohmann::json& j);
};

/// Flat integer encoding (num_qcs, ranges, row-major assignment); the distinctness and
/// tie-break order used throughout.
std::vector<int> encode_key(const Chromosome& c);

struct ChromosomeOptions {
    /// Hatches are split into num_qcs contiguous near-equal blocks; each block is
    /// extended by this many hatches on both sides (clipped to [1, B]).
    int overlap = 1;
};

/// Deterministic movement ranges for (B, nq): ordered, and jointly covering every hatch.
std::vector<std::pair<int, int>> movement_ranges(int num_hatches, int num_qcs, int overlap = 1);

/// QCs whose range covers each hatch, per hatch (1-based hatch -> list of QC indices).
std::vector<std::vector<int>> covering_sets(int num_hatches,
                                            const std::vector<std::pair<int, int>>& ranges);

struct GenerateResult {
    std::vector<Chromosome> chromosomes;
    /// True when the distinct-chromosome space was smaller than the request and the
    /// full space was returned instead.
    bool space_exhausted = false;
};

/// Algorithm-1 generation: nc pairwise-distinct chromosomes, crane count uniform on
/// [lq, uq], assignments uniform over each hatch's covering set. Deterministic per seed.
GenerateResult generate_set(const BayPlan& plan, int nc, int lq, int uq, std::uint64_t seed,
                            const ChromosomeOptions& opts = {});

enum class ViolationKind { RangeOrder, RangeBounds, Coverage, Assignment, CraneCount };

struct ChromosomeViolation {
    ViolationKind kind;
    int hatch = 0;  // 0 = not hatch-specific
    int slot = -1;
    std::string detail;
};

/// Every violated encoding invariant with its location; empty means valid. Throws
/// std::invalid_argument when the assignment shape does not match the plan.
std::vector<ChromosomeViolation> validate(const BayPlan& plan, const Chromosome& c);

/// Midpoint crossover: children swap assignment columns for hatches above ceil(B/2).
/// Parents must share (num_qcs, ranges) and the plan's shape; throws
/// std::invalid_argument otherwise (caller re-pairs).
std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b);

/// Redraws every slot of one uniformly chosen hatch from that hatch's covering set.
Chromosome mutate(const Chromosome& c, const BayPlan& plan, Rng& rng);
Chromosome mutate(const Chromosome& c, const BayPlan& plan, std::uint64_t seed);

}  // namespace quaysched
