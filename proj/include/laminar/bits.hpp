#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "laminar/error.hpp"

namespace laminar {

/// Unpacked bit string, one 0/1 value per element. Used for every serialized
/// artifact (predicates, class encodings, slot codes, responses).
using Bits = std::vector<std::uint8_t>;

std::string to_string(std::span<const std::uint8_t> bits);

/// Parses a string of '0'/'1'. Anything else is a data error.
Bits parse_bits(std::string_view text);

/// Append-only MSB-first writer.
class BitWriter {
public:
    void put(bool bit) { bits_.push_back(bit ? 1 : 0); }
    void put(std::uint64_t value, unsigned width);
    void append(std::span<const std::uint8_t> bits) { bits_.insert(bits_.end(), bits.begin(), bits.end()); }

    const Bits& bits() const& { return bits_; }
    Bits bits() && { return std::move(bits_); }

private:
    Bits bits_;
};

/// Cursor over a bit string. Reading past the end raises a decode error,
/// never undefined behavior.
class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> bits) : bits_(bits) {}

    bool get();
    std::uint64_t get(unsigned width);
    Bits take(std::size_t count);

    std::size_t position() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bits_.size() - pos_; }
    bool rest_is_zero() const noexcept;

private:
    std::span<const std::uint8_t> bits_;
    std::size_t pos_ = 0;
};

}  // namespace laminar
