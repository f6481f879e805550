#include "laminar/bitspace.hpp"

#include <algorithm>

#include "laminar/kernels.hpp"

namespace laminar {

Mask::Mask(std::vector<Entry> entries, std::optional<std::size_t> span) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.offset < b.offset; });
    for (std::size_t i = 1; i < entries_.size(); ++i)
        require(entries_[i].offset != entries_[i - 1].offset, Errc::invalid_argument,
                "mask has two entries at offset " + std::to_string(entries_[i].offset));
    const std::size_t natural = entries_.empty() ? 0 : entries_.back().offset + 1;
    span_ = span.value_or(natural);
    require(span_ >= natural, Errc::invalid_argument, "mask span shorter than its entries");
    require(span_ >= 1, Errc::invalid_argument, "mask must span at least one point");
    require(span_ <= max_span, Errc::invalid_argument, "mask span exceeds " + std::to_string(max_span));
}

Mask Mask::parse(std::string_view text) {
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '0' || c == '1') {
            entries.push_back({static_cast<std::uint32_t>(i), c == '1'});
        } else if (c != '.') {
            fail(Errc::data, "mask text contains '" + std::string(1, c) + "'");
        }
    }
    return Mask(std::move(entries), text.size());
}

std::optional<bool> Mask::at(std::size_t offset) const noexcept {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), offset,
                               [](const Entry& e, std::size_t o) { return e.offset < o; });
    if (it == entries_.end() || it->offset != offset) return std::nullopt;
    return it->value;
}

bool Mask::matches(std::span<const std::uint8_t> window) const noexcept {
    if (window.size() < span_) return false;
    return std::all_of(entries_.begin(), entries_.end(),
                       [&](const Entry& e) { return (window[e.offset] != 0) == e.value; });
}

Mask Mask::without(std::size_t offset) const {
    require(at(offset).has_value(), Errc::invalid_argument,
            "mask has no constant at offset " + std::to_string(offset));
    std::vector<Entry> rest;
    for (const auto& e : entries_)
        if (e.offset != offset) rest.push_back(e);
    return Mask(std::move(rest), span_);
}

std::string Mask::to_string() const {
    std::string s(span_, '.');
    for (const auto& e : entries_) s[e.offset] = e.value ? '1' : '0';
    return s;
}

Layer::Layer(std::size_t length) : length_(length), words_(kernels::word_count(length), 0) {
    require(length >= 1, Errc::invalid_argument, "layer length must be positive");
}

Layer Layer::parse(std::string_view text) {
    Layer layer(text.size());
    const Bits bits = parse_bits(text);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) layer.set(i, true);
    return layer;
}

bool Layer::get(std::size_t address) const {
    require(address < length_, Errc::address, "address " + std::to_string(address) + " outside layer");
    return ((words_[address / 64] >> (address % 64)) & 1u) != 0;
}

void Layer::set(std::size_t address, bool value) {
    require(address < length_, Errc::address, "address " + std::to_string(address) + " outside layer");
    const std::uint64_t bit = 1ull << (address % 64);
    if (value) {
        words_[address / 64] |= bit;
    } else {
        words_[address / 64] &= ~bit;
    }
}

Bits Layer::bits() const { return slice(0, length_ - 1); }

Bits Layer::slice(std::size_t begin, std::size_t end) const {
    require(begin <= end && end < length_, Errc::address, "slice outside layer");
    Bits out;
    out.reserve(end - begin + 1);
    for (std::size_t i = begin; i <= end; ++i) out.push_back(((words_[i / 64] >> (i % 64)) & 1u) ? 1 : 0);
    return out;
}

std::string Layer::to_string() const { return laminar::to_string(bits()); }

void Layer::clear_bits() noexcept { std::fill(words_.begin(), words_.end(), 0ull); }

Layer make_layer(std::size_t length) { return Layer(length); }

Layer write_points(Layer layer, std::span<const Point> assignments) {
    for (const auto& p : assignments)
        require(p.address < layer.size(), Errc::address, "address " + std::to_string(p.address) + " outside layer");
    for (const auto& p : assignments) layer.set(p.address, p.value);
    return layer;
}

namespace {

std::vector<std::uint64_t> match_bitset(const Layer& layer, const Mask& mask) {
    std::vector<kernels::MaskTerm> terms;
    terms.reserve(mask.size());
    for (const auto& e : mask.entries()) terms.push_back({e.offset, e.value});
    std::vector<std::uint64_t> out(kernels::word_count(layer.size()), 0);
    kernels::active().match_offsets(layer.words(), layer.size(), terms, mask.span(), out);
    return out;
}

inline bool test_bit(const std::vector<std::uint64_t>& set, std::size_t i) {
    return ((set[i / 64] >> (i % 64)) & 1u) != 0;
}

}  // namespace

std::vector<std::size_t> detect_mask(const Layer& layer, const Mask& mask) {
    std::vector<std::size_t> offsets;
    if (mask.empty()) return offsets;
    const auto set = match_bitset(layer, mask);
    for (std::size_t w = 0; w < set.size(); ++w) {
        std::uint64_t bits = set[w];
        while (bits != 0) {
            const std::size_t o = w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits));
            bits &= bits - 1;
            const Region r{o, o + mask.span() - 1};
            const bool suppressed = std::any_of(layer.excited().begin(), layer.excited().end(),
                                                [&](const ExcitedRegion& x) { return x.mask == mask && x.region.intersects(r); });
            if (!suppressed) offsets.push_back(o);
        }
    }
    return offsets;
}

std::vector<Block> cover_layer(const Layer& layer, std::span<const Mask> masks) {
    std::vector<std::vector<std::uint64_t>> sets;
    sets.reserve(masks.size());
    for (const auto& m : masks)
        sets.push_back(m.empty() ? std::vector<std::uint64_t>(kernels::word_count(layer.size()), 0) : match_bitset(layer, m));

    std::vector<Block> blocks;
    std::size_t pos = 0;
    while (pos < layer.size()) {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < masks.size(); ++i) {
            if (!test_bit(sets[i], pos)) continue;
            const Region r{pos, pos + masks[i].span() - 1};
            const bool hits_excited = std::any_of(layer.excited().begin(), layer.excited().end(),
                                                  [&](const ExcitedRegion& x) { return x.region.intersects(r); });
            if (hits_excited) continue;
            if (!best || masks[i].span() > masks[*best].span()) best = i;
        }
        if (best) {
            blocks.push_back({pos, pos + masks[*best].span() - 1, *best});
            pos += masks[*best].span();
        } else {
            ++pos;
        }
    }
    return blocks;
}

Bits read_block(const Layer& layer, const Block& block) {
    require(block.begin <= block.end && block.end < layer.size(), Errc::address, "block outside layer");
    return layer.slice(block.begin, block.end);
}

Excitation excite_mask(Layer layer, const Mask& mask, std::size_t offset, std::span<const Block> blocks) {
    require(!mask.empty(), Errc::invalid_argument, "cannot excite an empty mask");
    const Region r{offset, offset + mask.span() - 1};
    for (const auto& b : blocks)
        require(!b.region().intersects(r), Errc::overlap, "excited region overlaps a block");
    for (const auto& x : layer.excited())
        require(!x.region.intersects(r), Errc::overlap, "excited region overlaps an earlier excitation");
    require(r.end < layer.size(), Errc::address, "excited mask runs past the layer end");
    for (const auto& e : mask.entries()) layer.set(offset + e.offset, e.value);
    ExcitedRegion record{r, mask};
    layer.record_excited(record);
    return {std::move(layer), std::move(record)};
}

bool pairwise_disjoint(std::span<const Block> blocks) {
    for (std::size_t i = 0; i < blocks.size(); ++i)
        for (std::size_t j = i + 1; j < blocks.size(); ++j)
            if (blocks[i].region().intersects(blocks[j].region())) return false;
    return true;
}

}  // namespace laminar
