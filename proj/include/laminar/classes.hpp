#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "laminar/bitspace.hpp"
#include "laminar/boolalg.hpp"

namespace laminar {

struct Noun {
    Mask mask;
    std::vector<QualityId> qualities;   // declared qualities Q
    std::vector<std::uint32_t> actions; // action-point offsets A, inside the mask span
    friend bool operator==(const Noun&, const Noun&) = default;
};

/// The six class operations. Numeric values are part of the class encoding.
enum class ClassOp : std::uint8_t {
    verb_xor = 0,
    verb_and = 1,
    adjective_xor = 2,
    adjective_and = 3,
    specialize = 4,
    argument = 5,
};

std::string_view to_string(ClassOp op) noexcept;
bool is_verb_op(ClassOp op) noexcept;
bool is_adjective_op(ClassOp op) noexcept;
bool is_noun_op(ClassOp op) noexcept;

enum class Provenance : std::uint8_t { spontaneous = 0, internal_speech = 1 };

struct DerivationStep {
    ClassOp op = ClassOp::adjective_xor;
    std::uint16_t l = 0;  // predicate index, or the mask offset for noun operations
    std::uint16_t m = 0;
    Provenance provenance = Provenance::spontaneous;
    friend bool operator==(const DerivationStep&, const DerivationStep&) = default;
};

struct ClassOrigin {
    std::uint16_t basis_index = 0;
    std::vector<DerivationStep> steps;
    friend bool operator==(const ClassOrigin&, const ClassOrigin&) = default;
};

/// Basis index of a sentence constituent; nullopt is a wildcard slot.
using SentenceSlot = std::optional<std::uint16_t>;

struct SimpleClass {
    std::string name;
    Noun noun;
    std::vector<AdjectivePredicate> adjectives;
    std::vector<VerbPredicate> verbs;
    /// Non-empty for upper nouns recognized from a sequence of lower nouns.
    std::vector<SentenceSlot> sentence;
    std::optional<ClassOrigin> origin;

    bool is_sentence() const noexcept { return !sentence.empty(); }
    bool is_empty_class() const noexcept { return adjectives.empty() && verbs.empty(); }
    /// Offsets read by adjective `index`.
    std::vector<std::uint32_t> adjective_arguments(std::size_t index) const;

    friend bool operator==(const SimpleClass&, const SimpleClass&) = default;
};

/// Checks the structural invariants of a class (argument ranges, declared
/// qualities and action points). Raises invalid-argument.
void validate_class(const SimpleClass& cls);

enum class PredicateTarget { verb, adjective };

/// Appends V_l op V_m (or A_l op A_m). New adjectives output a fresh
/// quality; new verbs get their action point from resolve_action_point over
/// the adjectives touched by the operands' action points.
SimpleClass apply_predicate_op(const SimpleClass& cls, PredicateTarget target, BoolOp op, std::size_t l,
                               std::size_t m, Provenance provenance = Provenance::spontaneous);

/// Smallest offset that is an argument of every active adjective and of no
/// other adjective. ambiguity-error when none exists.
std::uint32_t resolve_action_point(const SimpleClass& cls, std::span<const std::size_t> active_adjectives);

SimpleClass noun_specialize(const SimpleClass& cls, std::size_t offset,
                            Provenance provenance = Provenance::spontaneous);
SimpleClass noun_argument(const SimpleClass& cls, std::size_t offset,
                          Provenance provenance = Provenance::spontaneous);

/// Dispatches one recorded step; the basis of every replay.
SimpleClass apply_step(const SimpleClass& cls, const DerivationStep& step);

QualityId fresh_quality(const SimpleClass& cls) noexcept;

/// Immutable, ordered set of global classes. Sentence classes get their
/// masks here: the concatenated slot codes of their constituents.
class Basis {
public:
    static constexpr std::size_t default_derived_budget = 64;

    explicit Basis(std::vector<SimpleClass> classes, std::size_t derived_budget = default_derived_budget);

    std::size_t size() const noexcept { return classes_.size(); }
    const SimpleClass& at(std::size_t index) const;
    std::span<const SimpleClass> classes() const noexcept { return classes_; }
    std::optional<std::size_t> find(std::string_view name) const noexcept;

    /// Width of one noun slot on a projection layer: guard bit plus enough
    /// bits for every basis index and the derived-class budget.
    std::size_t slot_width() const noexcept { return slot_width_; }
    std::size_t id_capacity() const noexcept { return std::size_t{1} << (slot_width_ - 1); }
    Mask slot_mask(std::size_t class_id) const;
    Bits slot_code(std::size_t class_id) const;

private:
    std::vector<SimpleClass> classes_;
    std::size_t slot_width_ = 1;
};

bool operator==(const Basis& a, const Basis& b);

/// Parses the text basis format (docs/formats.md).
Basis parse_basis(std::string_view text, std::size_t derived_budget = Basis::default_derived_budget);
Basis load_basis_file(const std::string& path, std::size_t derived_budget = Basis::default_derived_budget);

/// Overclass mapping: basis index plus derivation record, each step carrying
/// the predicate it produced in the serialized predicate format.
Bits phi_encode(const SimpleClass& cls, const Basis& basis);
/// Inverse of phi_encode. Trailing zero padding is accepted.
SimpleClass phi_decode(std::span<const std::uint8_t> bits, const Basis& basis);

}  // namespace laminar
