#pragma once

// Zhegalkin (algebraic normal form) polynomials: XOR of AND-monomials. Every
// adjective and verb predicate lives in this form, which is canonical, so
// two polynomials are the same Boolean function iff they compare equal.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "laminar/bits.hpp"

namespace laminar {

/// Variable identifier. Block-bit offsets and quality ids share one space;
/// quality variables carry the high bit so they sort after every bit.
using Var = std::uint32_t;
inline constexpr Var kQualityFlag = 0x8000'0000u;
constexpr Var bit_var(std::uint32_t offset) noexcept { return offset; }
constexpr Var quality_var(std::uint32_t quality) noexcept { return kQualityFlag | quality; }
constexpr bool is_quality(Var v) noexcept { return (v & kQualityFlag) != 0; }
constexpr std::uint32_t var_index(Var v) noexcept { return v & ~kQualityFlag; }

using Monomial = std::vector<Var>;  // sorted; empty = constant 1
using Assignment = std::map<Var, bool>;

class Poly {
public:
    static constexpr unsigned max_vars = 16;

    Poly() = default;  // constant 0
    static Poly zero() { return {}; }
    static Poly one();
    static Poly variable(Var v);
    /// Duplicate monomials cancel (XOR semantics).
    static Poly from_monomials(std::span<const Monomial> monomials);
    static Poly parse(std::string_view text);

    /// Support variables, ascending. Variables that cancel out are dropped.
    std::span<const Var> vars() const noexcept { return vars_; }
    std::vector<Monomial> monomials() const;
    std::size_t term_count() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }
    bool is_one() const noexcept { return terms_.size() == 1 && terms_[0] == 0; }

    /// Raises invalid-argument if a support variable is missing.
    bool eval(const Assignment& assignment) const;
    bool eval(const std::function<bool(Var)>& value) const;
    /// Bit j of `local` is the value of vars()[j].
    bool eval_local(std::uint32_t local) const noexcept;

    /// Truth table over `universe` (which must contain the support); entry x
    /// assigns universe[j] = bit j of x. Computed with the Moebius kernel.
    Bits truth_table(std::span<const Var> universe) const;

    /// Raw monomial bitmasks over vars(), in canonical order.
    std::span<const std::uint32_t> terms() const noexcept { return terms_; }
    Poly(std::vector<Var> vars, std::vector<std::uint32_t> terms);

    std::string to_string() const;

    friend bool operator==(const Poly&, const Poly&) = default;
    friend auto operator<=>(const Poly& a, const Poly& b) {
        if (auto c = a.vars_ <=> b.vars_; c != 0) return c;
        return a.terms_ <=> b.terms_;
    }

private:
    void canonicalize();

    std::vector<Var> vars_;
    std::vector<std::uint32_t> terms_;
};

Poly xor_poly(const Poly& p, const Poly& q);
Poly and_poly(const Poly& p, const Poly& q);

/// Unique polynomial over bit_var(0..n-1) whose truth table is `table`
/// (length 2^n, entry x assigns variable j = bit j of x).
Poly from_truth_table(std::span<const std::uint8_t> table);

enum class BoolOp : std::uint8_t { xor_op = 0, and_op = 1 };
Poly apply(BoolOp op, const Poly& p, const Poly& q);

using QualityId = std::uint16_t;

struct AdjectivePredicate {
    Poly poly;  // over bit variables only
    QualityId output = 0;
    friend bool operator==(const AdjectivePredicate&, const AdjectivePredicate&) = default;
};

struct VerbPredicate {
    Poly poly;  // over quality and bit variables
    std::uint32_t action_point = 0;
    /// Operational bit of the action point: 1 = the verb was last composed
    /// with AND, 0 = XOR (or not composed at all).
    bool op_bit = false;
    friend bool operator==(const VerbPredicate&, const VerbPredicate&) = default;
};

enum class PredicateKind { adjective, verb };
using Predicate = std::variant<AdjectivePredicate, VerbPredicate>;

// Serialized field widths; see docs/formats.md.
inline constexpr unsigned kArgCountBits = 5;
inline constexpr unsigned kOffsetBits = 8;
inline constexpr unsigned kQualityBits = 16;

Bits serialize_adjective(const AdjectivePredicate& a);
Bits serialize_verb(const VerbPredicate& v);
void write_adjective(BitWriter& out, const AdjectivePredicate& a);
void write_verb(BitWriter& out, const VerbPredicate& v);
AdjectivePredicate read_adjective(BitReader& in);
VerbPredicate read_verb(BitReader& in);

/// Decodes a complete bit string; trailing bits are a decode error.
Predicate deserialize_predicate(std::span<const std::uint8_t> bits, PredicateKind kind);

}  // namespace laminar
