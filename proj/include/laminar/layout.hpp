#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "laminar/bitspace.hpp"

namespace laminar {

/// Reserved zones of the signal layer. The external half carries frames from
/// receptors; the engine overlays the rest before every tick.
struct SignalLayout {
    std::size_t length = 0;
    Region external;  // first half
    Region failed;    // conditioning failure reports, 1/16
    Region emotions;  // patch dispositions, 1/16
    Region ego;       // pending responses, 1/8
    Region internal;  // internal speech output, 1/8
    Region output;    // response segment, 1/8

    /// length must be a multiple of 16 and at least 32.
    static SignalLayout for_length(std::size_t length);

    std::vector<std::pair<std::string, Region>> named() const;
    static std::size_t width(const Region& r) noexcept { return r.end - r.begin + 1; }
};

/// Copies `bits` into `frame` at `r`, zero-padding or truncating to fit.
void write_region(Bits& frame, const Region& r, std::span<const std::uint8_t> bits);
Bits read_region(std::span<const std::uint8_t> frame, const Region& r);

}  // namespace laminar
