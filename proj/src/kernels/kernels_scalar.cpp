#include <algorithm>

#include "laminar/kernels.hpp"

namespace laminar::kernels::scalar {

namespace {

// 64 bits of the layer starting at bit `pos`; bits past the end read as 0.
inline std::uint64_t window(std::span<const std::uint64_t> layer, std::size_t pos) {
    const std::size_t w = pos / 64;
    const unsigned sh = pos % 64;
    if (w >= layer.size()) return 0;
    std::uint64_t v = layer[w] >> sh;
    if (sh != 0 && w + 1 < layer.size()) v |= layer[w + 1] << (64 - sh);
    return v;
}

constexpr std::uint64_t kLowHalf[6] = {
    0x5555555555555555ull, 0x3333333333333333ull, 0x0F0F0F0F0F0F0F0Full,
    0x00FF00FF00FF00FFull, 0x0000FFFF0000FFFFull, 0x00000000FFFFFFFFull,
};

}  // namespace

void match_offsets(std::span<const std::uint64_t> layer, std::size_t nbits,
                   std::span<const MaskTerm> terms, std::size_t span, std::span<std::uint64_t> out) {
    const std::size_t nwords = word_count(nbits);
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(nwords), ~0ull);
    if (span == 0 || span > nbits) {
        std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(nwords), 0ull);
        return;
    }
    for (const auto& t : terms) {
        for (std::size_t k = 0; k < nwords; ++k) {
            const std::uint64_t w = window(layer, k * 64 + t.offset);
            out[k] &= t.value ? w : ~w;
        }
    }
    // Valid offsets are 0 .. nbits - span.
    const std::size_t limit = nbits - span + 1;
    for (std::size_t k = 0; k < nwords; ++k) {
        const std::size_t lo = k * 64;
        if (lo >= limit) {
            out[k] = 0;
        } else if (limit - lo < 64) {
            out[k] &= (1ull << (limit - lo)) - 1;
        }
    }
}

void mobius(std::span<std::uint64_t> table, unsigned nvars) {
    const unsigned in_word = std::min(nvars, 6u);
    const std::size_t nwords = nvars <= 6 ? 1 : (std::size_t{1} << (nvars - 6));
    for (std::size_t w = 0; w < nwords; ++w) {
        std::uint64_t t = table[w];
        for (unsigned j = 0; j < in_word; ++j) t ^= (t & kLowHalf[j]) << (1u << j);
        table[w] = t;
    }
    for (unsigned j = 6; j < nvars; ++j) {
        const std::size_t stride = std::size_t{1} << (j - 6);
        for (std::size_t base = 0; base < nwords; base += 2 * stride)
            for (std::size_t w = base; w < base + stride; ++w) table[w + stride] ^= table[w];
    }
}

}  // namespace laminar::kernels::scalar
