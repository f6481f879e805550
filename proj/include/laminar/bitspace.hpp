#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "laminar/bits.hpp"

namespace laminar {

/// Partial bit pattern. Offsets without an entry are wildcard gaps. The span
/// is at least max offset + 1 and may be wider: a noun keeps its footprint
/// after a constant is turned into a gap.
class Mask {
public:
    struct Entry {
        std::uint32_t offset;
        bool value;
        friend bool operator==(const Entry&, const Entry&) = default;
    };

    static constexpr std::size_t max_span = 256;

    Mask() = default;
    /// Entries may come in any order; duplicates are an invalid-argument.
    explicit Mask(std::vector<Entry> entries, std::optional<std::size_t> span = std::nullopt);

    /// Text form: '0' / '1' for constants, '.' for gaps, e.g. "1.0".
    static Mask parse(std::string_view text);

    std::span<const Entry> entries() const noexcept { return entries_; }
    std::size_t span() const noexcept { return span_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return span_ == 0; }

    std::optional<bool> at(std::size_t offset) const noexcept;
    bool matches(std::span<const std::uint8_t> window) const noexcept;

    /// Same mask with the constant at `offset` turned into a gap; span kept.
    Mask without(std::size_t offset) const;

    std::string to_string() const;

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    std::vector<Entry> entries_;  // ascending by offset
    std::size_t span_ = 0;
};

/// Inclusive address range.
struct Region {
    std::size_t begin = 0;
    std::size_t end = 0;
    bool intersects(const Region& o) const noexcept { return begin <= o.end && o.begin <= end; }
    friend bool operator==(const Region&, const Region&) = default;
};

struct Block {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t mask_id = 0;

    Region region() const noexcept { return {begin, end}; }
    std::size_t size() const noexcept { return end - begin + 1; }
    friend bool operator==(const Block&, const Block&) = default;
};

struct ExcitedRegion {
    Region region;
    Mask mask;
};

struct Point {
    std::size_t address;
    bool value;
};

/// Fixed-length addressed bit array plus the regions forcibly excited on it
/// during the current tick.
class Layer {
public:
    explicit Layer(std::size_t length);
    static Layer parse(std::string_view text);

    std::size_t size() const noexcept { return length_; }
    bool get(std::size_t address) const;
    void set(std::size_t address, bool value);

    std::span<const std::uint64_t> words() const noexcept { return words_; }
    Bits bits() const;
    Bits slice(std::size_t begin, std::size_t end) const;  // inclusive
    std::string to_string() const;

    std::span<const ExcitedRegion> excited() const noexcept { return excited_; }
    void record_excited(ExcitedRegion region) { excited_.push_back(std::move(region)); }
    void clear_excited() noexcept { excited_.clear(); }
    void clear_bits() noexcept;

    /// Compares bits only.
    bool same_bits(const Layer& other) const noexcept { return length_ == other.length_ && words_ == other.words_; }

private:
    std::size_t length_;
    std::vector<std::uint64_t> words_;
    std::vector<ExcitedRegion> excited_;
};

Layer make_layer(std::size_t length);
Layer write_points(Layer layer, std::span<const Point> assignments);

/// Ascending offsets where the mask matches. Matches overlapping a region
/// excited with the same mask are skipped.
std::vector<std::size_t> detect_mask(const Layer& layer, const Mask& mask);

/// Greedy left-to-right covering: at each free position the matching mask
/// with the largest span wins, ties to the lowest index. Blocks never touch
/// an excited region.
std::vector<Block> cover_layer(const Layer& layer, std::span<const Mask> masks);

Bits read_block(const Layer& layer, const Block& block);

struct Excitation {
    Layer layer;
    ExcitedRegion region;
};

/// Writes the mask's constants at `offset` and records the region so the
/// same mask is not detected there again this tick.
Excitation excite_mask(Layer layer, const Mask& mask, std::size_t offset,
                       std::span<const Block> blocks = {});

bool pairwise_disjoint(std::span<const Block> blocks);

}  // namespace laminar
