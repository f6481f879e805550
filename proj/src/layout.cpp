#include "laminar/layout.hpp"

namespace laminar {

SignalLayout SignalLayout::for_length(std::size_t n) {
    require(n >= 32 && n % 16 == 0, Errc::config, "signal layer length must be a multiple of 16, at least 32");
    SignalLayout l;
    l.length = n;
    std::size_t at = 0;
    auto take = [&](std::size_t w) {
        const Region r{at, at + w - 1};
        at += w;
        return r;
    };
    l.external = take(n / 2);
    l.failed = take(n / 16);
    l.emotions = take(n / 16);
    l.ego = take(n / 8);
    l.internal = take(n / 8);
    l.output = take(n / 8);
    return l;
}

std::vector<std::pair<std::string, Region>> SignalLayout::named() const {
    return {{"external", external}, {"failed", failed}, {"emotions", emotions},
            {"ego", ego},           {"internal", internal}, {"output", output}};
}

void write_region(Bits& frame, const Region& r, std::span<const std::uint8_t> bits) {
    require(r.end < frame.size(), Errc::address, "region outside frame");
    for (std::size_t i = r.begin; i <= r.end; ++i) {
        const std::size_t j = i - r.begin;
        frame[i] = j < bits.size() ? bits[j] : 0;
    }
}

Bits read_region(std::span<const std::uint8_t> frame, const Region& r) {
    require(r.end < frame.size(), Errc::address, "region outside frame");
    return Bits(frame.begin() + static_cast<std::ptrdiff_t>(r.begin), frame.begin() + static_cast<std::ptrdiff_t>(r.end + 1));
}

}  // namespace laminar
