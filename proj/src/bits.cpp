#include "laminar/bits.hpp"

#include <algorithm>

namespace laminar {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_argument: return "invalid-argument";
        case Errc::address: return "address-error";
        case Errc::overlap: return "overlap-error";
        case Errc::decode: return "decode-error";
        case Errc::ambiguity: return "ambiguity-error";
        case Errc::not_encodable: return "not-encodable";
        case Errc::capacity: return "capacity-error";
        case Errc::conflict: return "conflict-error";
        case Errc::busy: return "busy-error";
        case Errc::forbidden: return "forbidden-error";
        case Errc::scope: return "scope-error";
        case Errc::config: return "config-error";
        case Errc::data: return "data-error";
    }
    return "error";
}

std::string to_string(std::span<const std::uint8_t> bits) {
    std::string out;
    out.reserve(bits.size());
    for (auto b : bits) out.push_back(b ? '1' : '0');
    return out;
}

Bits parse_bits(std::string_view text) {
    Bits out;
    out.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') fail(Errc::data, "bit string contains '" + std::string(1, c) + "'");
        out.push_back(c == '1' ? 1 : 0);
    }
    return out;
}

void BitWriter::put(std::uint64_t value, unsigned width) {
    for (unsigned i = width; i-- > 0;) put(((value >> i) & 1u) != 0);
}

bool BitReader::get() {
    if (pos_ >= bits_.size()) fail(Errc::decode, "truncated bit string");
    return bits_[pos_++] != 0;
}

std::uint64_t BitReader::get(unsigned width) {
    if (remaining() < width) fail(Errc::decode, "truncated bit string");
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) v = (v << 1) | (bits_[pos_++] ? 1u : 0u);
    return v;
}

Bits BitReader::take(std::size_t count) {
    if (remaining() < count) fail(Errc::decode, "truncated bit string");
    Bits out(bits_.begin() + static_cast<std::ptrdiff_t>(pos_),
             bits_.begin() + static_cast<std::ptrdiff_t>(pos_ + count));
    pos_ += count;
    return out;
}

bool BitReader::rest_is_zero() const noexcept {
    return std::all_of(bits_.begin() + static_cast<std::ptrdiff_t>(pos_), bits_.end(),
                       [](std::uint8_t b) { return b == 0; });
}

}  // namespace laminar
