#pragma once

// Slow, obviously-correct reference computations. Tests, the acceptance
// runner and `laminar oracle` compare the engine against these.

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "laminar/bitspace.hpp"
#include "laminar/boolalg.hpp"
#include "laminar/classes.hpp"

namespace laminar::oracle {

/// Every offset where the mask matches, by direct comparison.
std::vector<std::size_t> scan_mask(const Bits& layer, const Mask& mask);

/// Left-to-right greedy cover, longest mask first at each position.
std::vector<Block> cover(const Bits& layer, std::span<const Mask> masks);

/// Polynomial value by expanding every monomial.
bool eval(const Poly& p, const Assignment& a);

template <class T>
std::vector<T> dedup(std::span<const T> seq) {
    std::vector<T> out;
    for (std::size_t i = 0; i < seq.size(); ++i)
        if (i == 0 || !(seq[i] == seq[i - 1])) out.push_back(seq[i]);
    return out;
}

struct PackSearch {
    /// Smallest adjective-set size found, if any.
    std::optional<std::size_t> min_size;
    /// Every minimum-size solution, polynomials over representation positions.
    std::set<std::vector<Poly>> solutions;
    bool direct_bits = false;  // atoms were needed
    bool exhausted = false;
};

/// Brute-force subset search over the same generator pool the packer uses:
/// single-bit atoms, closed under `op` to `depth` levels, capped at
/// `pool_limit`. A subset is a solution when each member's value vector is
/// unique over the whole cube of differing positions.
PackSearch pack_search(std::span<const Bits> members, BoolOp op, std::size_t depth, std::size_t max_adjectives,
                       std::size_t pool_limit = 128, std::size_t subset_limit = 4'000'000);

/// Explicit automaton of a conditioning class: states are the state-bit
/// assignments, symbols the input assignments (bit j of either index is
/// position j). delta[(state << input_width) | input] is the next state, or
/// nullopt where the mask fails.
struct Dfa {
    std::size_t input_width = 0;
    std::size_t state_width = 0;
    std::vector<std::optional<std::uint32_t>> delta;
};

/// Builds the table by evaluating the class directly on every (state, input).
Dfa build_dfa(const SimpleClass& cls);

struct DfaRun {
    enum Status { running, detected, failed } status = running;
    std::size_t frames = 0;
    std::optional<std::size_t> failed_at;
    std::vector<std::uint32_t> states;
};

DfaRun simulate_dfa(const Dfa& dfa, std::span<const std::uint32_t> inputs, std::uint32_t state, std::size_t horizon);

/// Windowed sums: each event (tick, amount) counts while tick > now - window.
double windowed_sum(std::span<const std::pair<std::uint64_t, double>> events, std::uint64_t now, std::size_t window);

struct SingleOpBest {
    std::size_t fitness = 0;
    std::vector<DerivationStep> steps;  // every step reaching it; empty when the class itself is best
};

/// Best mask coverage of `codes` over the class itself and every class one
/// operation away, trying each listed op on every index pair and offset.
SingleOpBest best_single_op(const SimpleClass& cls, std::span<const Bits> codes, std::span<const ClassOp> ops);

/// Occurrences of `pattern` across the frames, overlaps included.
std::size_t count_occurrences(std::span<const Bits> frames, const Bits& pattern);

}  // namespace laminar::oracle
