#include "laminar/kernels.hpp"

#if defined(LAMINAR_HAVE_AVX2_KERNELS)

#include <immintrin.h>

#include <algorithm>
#include <vector>

#define LAMINAR_AVX2 __attribute__((target("avx2")))

namespace laminar::kernels::avx2 {

namespace {

constexpr std::uint64_t kLowHalf[6] = {
    0x5555555555555555ull, 0x3333333333333333ull, 0x0F0F0F0F0F0F0F0Full,
    0x00FF00FF00FF00FFull, 0x0000FFFF0000FFFFull, 0x00000000FFFFFFFFull,
};

}  // namespace

LAMINAR_AVX2 void match_offsets(std::span<const std::uint64_t> layer, std::size_t nbits,
                                std::span<const MaskTerm> terms, std::size_t span,
                                std::span<std::uint64_t> out) {
    const std::size_t nwords = word_count(nbits);
    if (span == 0 || span > nbits) {
        std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(nwords), 0ull);
        return;
    }
    std::uint32_t max_off = 0;
    for (const auto& t : terms) max_off = std::max(max_off, t.offset);

    // Zero-padded copy so every unaligned 4-word load stays in bounds.
    const std::size_t padded_words = nwords + max_off / 64 + 8;
    std::vector<std::uint64_t> padded(padded_words, 0);
    std::copy(layer.begin(), layer.begin() + static_cast<std::ptrdiff_t>(std::min(layer.size(), nwords)),
              padded.begin());

    const std::size_t vec_words = (nwords + 3) / 4 * 4;
    std::vector<std::uint64_t> acc(vec_words, ~0ull);
    const __m256i ones = _mm256_set1_epi64x(-1);

    for (const auto& t : terms) {
        const std::size_t skip = t.offset / 64;
        const unsigned sh = t.offset % 64;
        const __m128i right = _mm_cvtsi32_si128(static_cast<int>(sh));
        const __m128i left = _mm_cvtsi32_si128(static_cast<int>(64 - sh));
        for (std::size_t k = 0; k < vec_words; k += 4) {
            const auto* src = reinterpret_cast<const __m256i*>(padded.data() + k + skip);
            const __m256i lo = _mm256_loadu_si256(src);
            const __m256i hi = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(padded.data() + k + skip + 1));
            __m256i w = _mm256_or_si256(_mm256_srl_epi64(lo, right), _mm256_sll_epi64(hi, left));
            if (!t.value) w = _mm256_xor_si256(w, ones);
            auto* dst = reinterpret_cast<__m256i*>(acc.data() + k);
            _mm256_storeu_si256(dst, _mm256_and_si256(_mm256_loadu_si256(dst), w));
        }
    }

    const std::size_t limit = nbits - span + 1;
    for (std::size_t k = 0; k < nwords; ++k) {
        const std::size_t lo = k * 64;
        std::uint64_t v = acc[k];
        if (lo >= limit) {
            v = 0;
        } else if (limit - lo < 64) {
            v &= (1ull << (limit - lo)) - 1;
        }
        out[k] = v;
    }
}

LAMINAR_AVX2 void mobius(std::span<std::uint64_t> table, unsigned nvars) {
    const unsigned in_word = std::min(nvars, 6u);
    const std::size_t nwords = nvars <= 6 ? 1 : (std::size_t{1} << (nvars - 6));

    std::size_t w = 0;
    for (; w + 4 <= nwords; w += 4) {
        auto* p = reinterpret_cast<__m256i*>(table.data() + w);
        __m256i t = _mm256_loadu_si256(p);
        for (unsigned j = 0; j < in_word; ++j) {
            const __m256i m = _mm256_set1_epi64x(static_cast<long long>(kLowHalf[j]));
            t = _mm256_xor_si256(t, _mm256_sll_epi64(_mm256_and_si256(t, m),
                                                     _mm_cvtsi32_si128(static_cast<int>(1u << j))));
        }
        _mm256_storeu_si256(p, t);
    }
    for (; w < nwords; ++w) {
        std::uint64_t t = table[w];
        for (unsigned j = 0; j < in_word; ++j) t ^= (t & kLowHalf[j]) << (1u << j);
        table[w] = t;
    }

    for (unsigned j = 6; j < nvars; ++j) {
        const std::size_t stride = std::size_t{1} << (j - 6);
        for (std::size_t base = 0; base < nwords; base += 2 * stride) {
            std::size_t i = base;
            if (stride >= 4) {
                for (; i + 4 <= base + stride; i += 4) {
                    auto* lo = reinterpret_cast<__m256i*>(table.data() + i);
                    auto* hi = reinterpret_cast<__m256i*>(table.data() + i + stride);
                    _mm256_storeu_si256(hi, _mm256_xor_si256(_mm256_loadu_si256(hi), _mm256_loadu_si256(lo)));
                }
            }
            for (; i < base + stride; ++i) table[i + stride] ^= table[i];
        }
    }
}

}  // namespace laminar::kernels::avx2

#endif
