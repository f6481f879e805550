#pragma once

// Data-parallel inner loops of the engine. Each kernel has a portable scalar
// reference and, on x86-64, an AVX2 variant. The variant is picked once at
// startup from CPUID; LAMINAR_ISA=scalar|avx2 overrides the choice.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace laminar::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

struct MaskTerm {
    std::uint32_t offset;
    bool value;
};

inline constexpr std::size_t word_count(std::size_t nbits) { return (nbits + 63) / 64; }

/// Bit-parallel mask scan over a packed layer (bit i lives in word i/64 at
/// position i%64). Sets bit o of `out` iff every term matches at o and
/// o + span <= nbits. `out` must hold word_count(nbits) words; bits for
/// offsets that cannot fit are cleared.
using MatchFn = void (*)(std::span<const std::uint64_t> layer, std::size_t nbits,
                         std::span<const MaskTerm> terms, std::size_t span,
                         std::span<std::uint64_t> out);

/// In-place binary Moebius transform of a truth table over `nvars`
/// variables (bit x holds f(x), variable j is bit j of x). Maps a truth
/// table to Zhegalkin coefficients and back (the transform is an
/// involution). Tables with nvars < 6 use the low 2^nvars bits of word 0.
using MobiusFn = void (*)(std::span<std::uint64_t> table, unsigned nvars);

struct KernelTable {
    Isa isa;
    MatchFn match_offsets;
    MobiusFn mobius;
};

const KernelTable& table(Isa isa);
bool available(Isa isa) noexcept;

/// Table selected for this process.
const KernelTable& active();

namespace scalar {
void match_offsets(std::span<const std::uint64_t> layer, std::size_t nbits,
                   std::span<const MaskTerm> terms, std::size_t span, std::span<std::uint64_t> out);
void mobius(std::span<std::uint64_t> table, unsigned nvars);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define LAMINAR_HAVE_AVX2_KERNELS 1
namespace avx2 {
void match_offsets(std::span<const std::uint64_t> layer, std::size_t nbits,
                   std::span<const MaskTerm> terms, std::size_t span, std::span<std::uint64_t> out);
void mobius(std::span<std::uint64_t> table, unsigned nvars);
}  // namespace avx2
#endif

}  // namespace laminar::kernels
