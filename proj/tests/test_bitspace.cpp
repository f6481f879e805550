#include "doctest.h"

#include <random>

#include "helpers.hpp"
#include "laminar/bitspace.hpp"

using namespace laminar;

namespace {

std::vector<std::size_t> scan_oracle(const Bits& layer, const Mask& mask) {
    std::vector<std::size_t> out;
    for (std::size_t o = 0; o + mask.span() <= layer.size(); ++o) {
        bool ok = true;
        for (const auto& e : mask.entries()) ok = ok && (layer[o + e.offset] != 0) == e.value;
        if (ok) out.push_back(o);
    }
    return out;
}

}  // namespace

TEST_SUITE("bitspace") {

TEST_CASE("make_layer") {
    CHECK(make_layer(4).to_string() == "0000");
    CHECK(make_layer(1).to_string() == "0");
    CHECK_THROWS_AS(make_layer(0), Error);
}

TEST_CASE("write_points") {
    const std::vector<Point> pts{{1, true}, {3, true}};
    CHECK(write_points(make_layer(4), pts).to_string() == "0101");
    CHECK(write_points(Layer::parse("0101"), {}).to_string() == "0101");
    const std::vector<Point> bad{{5, true}};
    try {
        write_points(make_layer(2), bad);
        FAIL("expected address-error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::address);
    }
}

TEST_CASE("detect_mask examples") {
    CHECK(detect_mask(Layer::parse("101101"), Mask({{0, true}, {2, true}})) == std::vector<std::size_t>{0, 3});
    CHECK(detect_mask(Layer::parse("000"), Mask({{0, true}})).empty());
    CHECK(detect_mask(Layer::parse("10"), Mask({{0, true}, {3, false}})).empty());
}

TEST_CASE("detect_mask equals brute force on random small instances") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 10000; ++i) {
        const Bits bits = testing::random_bits(rng, 1 + rng() % 16);
        const Mask m = testing::random_mask(rng, 6);
        REQUIRE(detect_mask(testing::layer_of(bits), m) == scan_oracle(bits, m));
    }
}

TEST_CASE("cover_layer examples") {
    const Mask a({{0, true}, {1, true}});
    const Mask single({{0, true}});
    std::vector<Mask> one{a};
    CHECK(cover_layer(Layer::parse("1111"), one) == std::vector<Block>{{0, 1, 0}, {2, 3, 0}});
    std::vector<Mask> only_single{single};
    CHECK(cover_layer(Layer::parse("0000"), only_single).empty());
    std::vector<Mask> both{single, a};
    CHECK(cover_layer(Layer::parse("111"), both) == std::vector<Block>{{0, 1, 1}, {2, 2, 0}});
}

TEST_CASE("cover_layer is disjoint, idempotent, and avoids excited regions") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        Layer layer = testing::layer_of(testing::random_bits(rng, 4 + rng() % 28));
        std::vector<Mask> masks;
        for (int k = 0; k < 3; ++k) masks.push_back(testing::random_mask(rng, 5));
        const Mask ex = testing::random_mask(rng, 3);
        const std::size_t at = rng() % (layer.size() - ex.span() + 1);
        layer = excite_mask(std::move(layer), ex, at).layer;
        const auto blocks = cover_layer(layer, masks);
        REQUIRE(pairwise_disjoint(blocks));
        REQUIRE(cover_layer(layer, masks) == blocks);
        for (const auto& b : blocks) {
            REQUIRE_FALSE(b.region().intersects(layer.excited()[0].region));
            REQUIRE(b.size() == masks[b.mask_id].span());
            REQUIRE(masks[b.mask_id].matches(read_block(layer, b)));
        }
    }
}

TEST_CASE("read_block") {
    CHECK(to_string(read_block(Layer::parse("10110"), {1, 3, 0})) == "011");
    CHECK(to_string(read_block(Layer::parse("1"), {0, 0, 0})) == "1");
    CHECK_THROWS_AS(read_block(Layer::parse("10"), {1, 5, 0}), Error);
}

TEST_CASE("excite_mask writes, hides the region, and refuses overlap") {
    const Mask m({{0, true}, {1, true}});
    auto ex = excite_mask(make_layer(4), m, 2);
    CHECK(ex.layer.to_string() == "0011");
    CHECK(ex.region.region == Region{2, 3});
    CHECK(detect_mask(ex.layer, m).empty());
    try {
        excite_mask(ex.layer, m, 3);
        FAIL("expected overlap-error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::overlap);
    }
    const std::vector<Block> blocks{{0, 1, 0}};
    CHECK_THROWS_AS(excite_mask(make_layer(4), m, 1, blocks), Error);
}

TEST_CASE("excited block reads back the mask constants") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        const Mask m = testing::random_mask(rng, 6);
        Layer l = testing::layer_of(testing::random_bits(rng, 16));
        const std::size_t at = rng() % (16 - m.span() + 1);
        auto ex = excite_mask(l, m, at);
        const Bits got = read_block(ex.layer, {at, at + m.span() - 1, 0});
        REQUIRE(m.matches(got));
    }
}

TEST_CASE("mask text form and gap removal keep the span") {
    const Mask m = Mask::parse("1.0");
    CHECK(m.span() == 3);
    CHECK(m.size() == 2);
    const Mask g = m.without(2);
    CHECK(g.span() == 3);
    CHECK(g.to_string() == "1..");
    CHECK_THROWS_AS(m.without(1), Error);
}

}
