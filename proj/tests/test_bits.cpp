#include "doctest.h"

#include "laminar/bits.hpp"

using namespace laminar;

TEST_SUITE("bits") {

TEST_CASE("writer and reader agree MSB-first") {
    BitWriter w;
    w.put(5, 3);
    w.put(true);
    w.put(0xA5, 8);
    CHECK(to_string(w.bits()) == "101110100101");
    BitReader r(w.bits());
    CHECK(r.get(3) == 5);
    CHECK(r.get());
    CHECK(r.get(8) == 0xA5);
    CHECK(r.remaining() == 0);
}

TEST_CASE("reading past the end is a decode error") {
    const Bits b = parse_bits("10");
    BitReader r(b);
    CHECK_THROWS_AS(r.get(3), Error);
    try {
        BitReader again(b);
        again.take(5);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::decode);
    }
}

TEST_CASE("parse rejects foreign characters") {
    CHECK(parse_bits("0110") == Bits{0, 1, 1, 0});
    CHECK_THROWS_AS(parse_bits("01x"), Error);
}

TEST_CASE("rest_is_zero tolerates padding only") {
    const Bits b = parse_bits("1000");
    BitReader r(b);
    r.get();
    CHECK(r.rest_is_zero());
    const Bits c = parse_bits("1001");
    BitReader s(c);
    s.get();
    CHECK_FALSE(s.rest_is_zero());
}

}
