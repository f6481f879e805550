#include <cstdlib>
#include <string>

#include "laminar/error.hpp"
#include "laminar/kernels.hpp"

namespace laminar::kernels {

namespace {

constexpr KernelTable kScalar{Isa::scalar, &scalar::match_offsets, &scalar::mobius};
#if defined(LAMINAR_HAVE_AVX2_KERNELS)
constexpr KernelTable kAvx2{Isa::avx2, &avx2::match_offsets, &avx2::mobius};
#endif

Isa detect() {
    if (const char* forced = std::getenv("LAMINAR_ISA")) {
        const std::string name = forced;
        if (name == "scalar") return Isa::scalar;
        if (name == "avx2" && available(Isa::avx2)) return Isa::avx2;
    }
    return available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "unknown";
}

bool available(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2:
#if defined(LAMINAR_HAVE_AVX2_KERNELS)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& table(Isa isa) {
    if (!available(isa)) fail(Errc::invalid_argument, "kernel set not supported on this CPU");
#if defined(LAMINAR_HAVE_AVX2_KERNELS)
    if (isa == Isa::avx2) return kAvx2;
#endif
    return kScalar;
}

const KernelTable& active() {
    static const KernelTable& chosen = table(detect());
    return chosen;
}

}  // namespace laminar::kernels
