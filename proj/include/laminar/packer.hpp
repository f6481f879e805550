#pragma once

// Packing a context into its parent. Both algorithms work on the binary
// representations of the member classes: positions where the members agree
// form a template, and new adjectives (or writer verbs) must tell the
// members apart exactly, so the parent can regenerate every member and
// nothing else.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "laminar/classes.hpp"
#include "laminar/memory.hpp"
#include "laminar/options.hpp"

namespace laminar {

struct PackParams {
    std::size_t max_adjectives = 8;
    std::size_t depth = 3;            // operation nesting of one generated adjective
    std::size_t max_candidates = 64;
    std::size_t window = 16;          // observations used for correlation verbs
    std::size_t max_differing = 10;   // larger difference sets exhaust the budget
    std::size_t pool_limit = 128;
    std::size_t search_limit = 200000;
};

enum class PackAlgorithm : std::uint8_t { abstraction = 0, detalisation = 1 };

/// How one generator predicate came about.
enum class PackStepKind : std::uint8_t { direct_bit = 0, combine = 1, noun_op = 2 };

struct PackStep {
    PackStepKind kind = PackStepKind::direct_bit;
    ClassOp op = ClassOp::specialize;  // meaningful for combine and noun_op
    std::uint32_t a = 0;  // position for direct_bit / noun_op, step index for combine
    std::uint32_t b = 0;
    friend bool operator==(const PackStep&, const PackStep&) = default;
};

struct CorrelationVerb {
    ClassId target = 0;  // lower class whose quality is tied to a block bit
    VerbPredicate verb;
    friend bool operator==(const CorrelationVerb&, const CorrelationVerb&) = default;
};

struct PackCandidate {
    std::size_t id = 0;
    PackAlgorithm algorithm = PackAlgorithm::abstraction;
    std::size_t width = 0;               // padded representation length
    Bits template_bits;                  // agreed bits, zero at differing positions
    std::vector<std::uint32_t> differing;
    std::vector<PackStep> steps;         // derivation of every generator predicate
    std::vector<std::uint32_t> outputs;  // step index of each generator predicate
    std::vector<AdjectivePredicate> adjectives;  // readers over representation positions
    std::vector<VerbPredicate> writers;          // writers from fresh qualities (argument profiles)
    std::vector<Bits> signatures;        // one generator vector per regenerated member
    std::vector<Bits> regenerated;       // member representations, ascending
    std::size_t prefix = 0;              // detalisation: shared leading bits
    std::size_t suffix = 0;              // detalisation: shared trailing bits
    std::vector<Bits> residues;
    std::optional<SimpleClass> parent_after;  // parent with composed verbs
    std::vector<CorrelationVerb> extra_verbs;
    bool direct_bits = false;            // step 2.1 was needed
    bool correlation = false;            // step 3.1 was needed

    bool same_output(const PackCandidate& o) const;
};

struct PackReport {
    std::vector<PackCandidate> candidates;
    bool direct_bits_tried = false;
    bool budget_exhausted = false;
    std::string note;
};

// --- representation-level core ---------------------------------------------------

PackReport abstraction_bits(std::span<const Bits> members, const OptionProfile& profile,
                            const PackParams& params = {});
PackReport detalisation_bits(std::span<const Bits> members, const OptionProfile& profile,
                             const PackParams& params = {});

/// Re-executes a candidate as a generator by enumerating every assignment of
/// its differing positions. Independent of the search that produced it.
std::vector<Bits> regenerate(const PackCandidate& candidate);

/// Accepted iff every observed member representation is regenerated.
bool validate_candidate(const PackCandidate& candidate, std::span<const Bits> observed);

/// Ops appearing in the candidate's derivation, including the verb steps of
/// parent_after beyond `parent_steps`.
std::vector<ClassOp> candidate_ops(const PackCandidate& candidate, std::size_t parent_steps);

Bits encode_candidate(const PackCandidate& candidate);

// --- class level --------------------------------------------------------------------

Bits binary_repr(const SimpleClass& cls, const Basis& basis);

struct PackInput {
    SimpleClass parent;
    std::vector<SimpleClass> members;
    std::vector<Observation> observations;
    std::vector<ClassId> member_ids;  // parallel to members; used by correlation verbs
};

PackReport abstraction_pack(const PackInput& input, const Basis& basis, const OptionProfile& profile,
                            const PackParams& params = {});
PackReport detalisation_pack(const PackInput& input, const Basis& basis, const OptionProfile& profile,
                             const PackParams& params = {});

/// Builds the packing input of a memory context.
PackInput pack_input(const MemoryTree& memory, const Context& context);

}  // namespace laminar
