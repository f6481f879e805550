#include "doctest.h"

#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "laminar/classes.hpp"

using namespace laminar;

namespace {

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::config;
}

SimpleClass two_adjectives(const char* a0, const char* a1, std::size_t span) {
    SimpleClass c;
    c.name = "T";
    std::vector<Mask::Entry> entries{{0, true}};
    c.noun.mask = Mask(entries, span);
    c.noun.qualities = {1, 2};
    c.adjectives = {{Poly::parse(a0), 1}, {Poly::parse(a1), 2}};
    return c;
}

}  // namespace

TEST_SUITE("classes") {

TEST_CASE("adjective XOR appends A0 xor A1 with a fresh quality") {
    const SimpleClass c = two_adjectives("b2 + b3", "b3*b4", 6);
    const SimpleClass d = apply_predicate_op(c, PredicateTarget::adjective, BoolOp::xor_op, 0, 1);
    REQUIRE(d.adjectives.size() == 3);
    CHECK(d.adjectives[2].poly == xor_poly(c.adjectives[0].poly, c.adjectives[1].poly));
    CHECK(d.adjectives[2].output == fresh_quality(c));
    CHECK(c.adjectives.size() == 2);  // input untouched
    const SimpleClass z = apply_predicate_op(c, PredicateTarget::adjective, BoolOp::xor_op, 1, 1);
    CHECK(z.adjectives.back().poly.is_zero());
    CHECK(code_of([&] { apply_predicate_op(c, PredicateTarget::adjective, BoolOp::and_op, 0, 5); }) ==
          Errc::invalid_argument);
}

TEST_CASE("verb composition with no qualifying offset is ambiguous") {
    // A0 reads only offset 1 and A1 only offset 2, so no offset serves both.
    SimpleClass c = two_adjectives("b1", "b2", 4);
    c.noun.actions = {1, 2};
    c.verbs = {{Poly::parse("q1"), 1, false}, {Poly::parse("q2"), 2, false}};
    for (std::uint32_t o = 0; o < 4; ++o) {
        const auto a0 = c.adjective_arguments(0), a1 = c.adjective_arguments(1);
        const bool both = std::count(a0.begin(), a0.end(), o) && std::count(a1.begin(), a1.end(), o);
        CHECK_FALSE(both);
    }
    CHECK(code_of([&] { apply_predicate_op(c, PredicateTarget::verb, BoolOp::and_op, 0, 1); }) == Errc::ambiguity);
}

TEST_CASE("verb composition resolves the action point") {
    SimpleClass c = two_adjectives("b2 + b3", "b3*b4", 6);
    c.noun.actions = {3};
    c.verbs = {{Poly::parse("q1 + b0"), 3, false}, {Poly::parse("q2"), 3, false}};
    const SimpleClass d = apply_predicate_op(c, PredicateTarget::verb, BoolOp::and_op, 0, 1);
    CHECK(d.verbs.back().action_point == 3);
    CHECK(d.verbs.back().op_bit);
    CHECK(d.verbs.back().poly == and_poly(c.verbs[0].poly, c.verbs[1].poly));
}

TEST_CASE("resolve_action_point examples") {
    const SimpleClass c = two_adjectives("b2 + b3", "b3*b4", 6);
    const std::vector<std::size_t> both{0, 1};
    CHECK(resolve_action_point(c, both) == 3);
    SimpleClass one = two_adjectives("b5", "b5", 6);
    one.adjectives.pop_back();
    const std::vector<std::size_t> first{0};
    CHECK(resolve_action_point(one, first) == 5);
    const SimpleClass twins = two_adjectives("b1 + b2", "b1*b2", 4);
    CHECK(code_of([&] { resolve_action_point(twins, first); }) == Errc::ambiguity);
    CHECK(code_of([&] { resolve_action_point(twins, {}); }) == Errc::invalid_argument);
}

TEST_CASE("noun_specialize") {
    SimpleClass c;
    c.name = "S";
    c.noun.mask = Mask({{0, true}, {1, false}});
    const SimpleClass d = noun_specialize(c, 1);
    CHECK(d.noun.mask.to_string() == "1.");
    REQUIRE(d.adjectives.size() == 1);
    CHECK(d.adjectives[0].poly == Poly::variable(bit_var(1)));
    CHECK(d.noun.mask.size() + 1 == c.noun.mask.size());
    CHECK(code_of([&] { noun_specialize(c, 7); }) == Errc::invalid_argument);
    CHECK(d.adjectives[0].poly.eval([](Var) { return true; }));
}

TEST_CASE("noun_argument") {
    SimpleClass c;
    c.name = "S";
    c.noun.mask = Mask({{0, true}, {1, true}});
    const SimpleClass d = noun_argument(c, 0);
    CHECK(d.noun.mask.to_string() == ".1");
    REQUIRE(d.verbs.size() == 1);
    CHECK(d.verbs[0].action_point == 0);
    CHECK(d.verbs[0].poly.is_one());
    CHECK(d.noun.actions == std::vector<std::uint32_t>{0});
    CHECK(code_of([&] { noun_argument(d, 0); }) == Errc::invalid_argument);
}

TEST_CASE("basis parser assigns sentence masks from slot codes") {
    const Basis b = parse_basis(testing::kSmallBasis);
    REQUIRE(b.size() == 3);
    CHECK(b.slot_width() == 8);  // 3 + 64 ids need 7 bits, plus the guard
    const auto& e = b.at(2);
    CHECK(e.noun.mask.span() == 16);
    Bits expect = b.slot_code(0);
    const Bits second = b.slot_code(1);
    expect.insert(expect.end(), second.begin(), second.end());
    CHECK(e.noun.mask.matches(expect));
    CHECK(code_of([] { parse_basis("class X\n  mask 1\n  frobnicate\nend\n"); }) == Errc::data);
    CHECK(code_of([] { parse_basis("class X\n  mask 1\n  adjective 5 : b3\n  quality 5\nend\n"); }) == Errc::data);
}

TEST_CASE("phi encodes a basis class as index plus empty derivation") {
    const Basis b = parse_basis(testing::kTwoClassBasis);
    const Bits enc = phi_encode(b.at(1), b);
    CHECK(enc.size() == 24);
    CHECK(to_string(enc) == "000000000000000100000000");
    CHECK(phi_decode(enc, b) == b.at(1));
}

TEST_CASE("phi round trip, injectivity and stability over depth-2 derivations") {
    const Basis b = parse_basis(testing::kTwoClassBasis);
    const auto classes = testing::enumerate_derived(b, 2);
    std::set<Bits> seen;
    for (const auto& c : classes) {
        const Bits enc = phi_encode(c, b);
        REQUIRE(phi_decode(enc, b) == c);
        REQUIRE(seen.insert(enc).second);
        Bits padded = enc;
        padded.resize(enc.size() + 9, 0);
        REQUIRE(phi_decode(padded, b) == c);
    }
    // A second, independently built basis gives the same encodings.
    const Basis again = parse_basis(testing::kTwoClassBasis);
    const auto classes2 = testing::enumerate_derived(again, 2);
    REQUIRE(classes2.size() == classes.size());
    for (std::size_t i = 0; i < classes.size(); ++i) REQUIRE(phi_encode(classes2[i], again) == phi_encode(classes[i], b));
    MESSAGE("classes enumerated: " << classes.size());
}

TEST_CASE("phi rejects classes without a derivation and corrupted encodings") {
    const Basis b = parse_basis(testing::kTwoClassBasis);
    SimpleClass loose = b.at(0);
    loose.origin.reset();
    CHECK(code_of([&] { phi_encode(loose, b); }) == Errc::not_encodable);
    SimpleClass edited = b.at(0);
    edited.noun.qualities.push_back(9);
    CHECK(code_of([&] { phi_encode(edited, b); }) == Errc::not_encodable);

    const SimpleClass d = noun_specialize(b.at(0), 0);
    Bits enc = phi_encode(d, b);
    Bits wrong_index = enc;
    wrong_index[15] = 1;
    wrong_index[14] = 1;
    CHECK(code_of([&] { phi_decode(wrong_index, b); }) == Errc::decode);
    Bits truncated(enc.begin(), enc.end() - 3);
    CHECK(code_of([&] { phi_decode(truncated, b); }) == Errc::decode);
    Bits trailing = enc;
    trailing.push_back(1);
    CHECK(code_of([&] { phi_decode(trailing, b); }) == Errc::decode);
}

TEST_CASE("operations record provenance in the derivation") {
    const Basis b = parse_basis(testing::kTwoClassBasis);
    const SimpleClass d = noun_argument(b.at(0), 2, Provenance::internal_speech);
    REQUIRE(d.origin);
    REQUIRE(d.origin->steps.size() == 1);
    CHECK(d.origin->steps[0] == DerivationStep{ClassOp::argument, 2, 0, Provenance::internal_speech});
}

}
