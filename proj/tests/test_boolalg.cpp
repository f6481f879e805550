#include "doctest.h"

#include <random>
#include <set>

#include "laminar/boolalg.hpp"

using namespace laminar;

namespace {

// Evaluates straight from the monomial list, independent of Poly::eval.
bool oracle_eval(const Poly& p, std::uint32_t x) {
    bool acc = false;
    for (const auto& m : p.monomials()) {
        bool term = true;
        for (Var v : m) term = term && ((x >> var_index(v)) & 1u);
        acc ^= term;
    }
    return acc;
}

Bits table_of(std::uint32_t code, unsigned n) {
    Bits t(std::size_t{1} << n);
    for (std::size_t x = 0; x < t.size(); ++x) t[x] = (code >> x) & 1u;
    return t;
}

std::vector<Var> bit_universe(unsigned n) {
    std::vector<Var> u;
    for (unsigned j = 0; j < n; ++j) u.push_back(bit_var(j));
    return u;
}

}  // namespace

TEST_SUITE("boolalg") {

TEST_CASE("eval examples") {
    const Poly orp = Poly::parse("b0 + b1 + b0*b1");
    CHECK(orp.eval(Assignment{{bit_var(0), true}, {bit_var(1), false}}));
    CHECK_FALSE(Poly::zero().eval(Assignment{}));
    CHECK(Poly::one().eval(Assignment{{bit_var(3), false}}));
    try {
        orp.eval(Assignment{{bit_var(0), true}});
        FAIL("expected argument error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invalid_argument);
    }
}

TEST_CASE("composition examples") {
    const Poly p = Poly::parse("b0*b2 + b1 + 1");
    CHECK(xor_poly(p, p).is_zero());
    CHECK(and_poly(p, Poly::one()) == p);
    const Poly xy = and_poly(Poly::variable(bit_var(0)), Poly::variable(bit_var(1)));
    CHECK(xy.monomials() == std::vector<Monomial>{{bit_var(0), bit_var(1)}});
    CHECK(to_string(xy.truth_table(bit_universe(2))) == "0001");
}

TEST_CASE("from_truth_table examples") {
    CHECK(from_truth_table(parse_bits("0111")) == Poly::parse("b0 + b1 + b0*b1"));
    CHECK(from_truth_table(parse_bits("0000")).is_zero());
    CHECK(from_truth_table(parse_bits("01")) == Poly::variable(bit_var(0)));
    CHECK_THROWS_AS(from_truth_table(parse_bits("011")), Error);
}

TEST_CASE("every 3-variable function round-trips through the normal form") {
    for (std::uint32_t code = 0; code < 256; ++code) {
        const Bits t = table_of(code, 3);
        const Poly p = from_truth_table(t);
        for (std::uint32_t x = 0; x < 8; ++x) {
            REQUIRE(oracle_eval(p, x) == (t[x] != 0));
            REQUIRE(p.eval_local(0) == oracle_eval(p, 0));
        }
        REQUIRE(p.truth_table(bit_universe(3)) == t);
    }
}

TEST_CASE("sampled 4-variable functions and pointwise composition") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 10000; ++i) {
        const auto a = static_cast<std::uint32_t>(rng() & 0xFFFF);
        const auto b = static_cast<std::uint32_t>(rng() & 0xFFFF);
        const Poly p = from_truth_table(table_of(a, 4));
        const Poly q = from_truth_table(table_of(b, 4));
        const Poly x = xor_poly(p, q);
        const Poly y = and_poly(p, q);
        for (std::uint32_t v = 0; v < 16; ++v) {
            const bool pa = (a >> v) & 1u, qb = (b >> v) & 1u;
            REQUIRE(oracle_eval(p, v) == pa);
            REQUIRE(oracle_eval(x, v) == (pa != qb));
            REQUIRE(oracle_eval(y, v) == (pa && qb));
        }
        REQUIRE(x == from_truth_table(table_of(a ^ b, 4)));
        REQUIRE(y == from_truth_table(table_of(a & b, 4)));
    }
}

TEST_CASE("canonical form: equal functions have equal monomials") {
    const Poly a = Poly::parse("b1*b0 + b2 + b2 + b0");
    const Poly b = Poly::parse("b0 + b0*b1");
    CHECK(a == b);
    CHECK(a.to_string() == "b0 + b0*b1");
}

TEST_CASE("closure under one operation reaches a fixed point") {
    for (BoolOp op : {BoolOp::xor_op, BoolOp::and_op}) {
        std::set<Poly> set{Poly::variable(bit_var(0)), Poly::variable(bit_var(1)), Poly::variable(bit_var(2))};
        std::size_t rounds = 0;
        while (true) {
            std::set<Poly> next = set;
            for (const auto& p : set)
                for (const auto& q : set) next.insert(apply(op, p, q));
            ++rounds;
            if (next.size() == set.size()) break;
            set = std::move(next);
            REQUIRE(rounds < 300);
        }
        CHECK(set.size() <= 256);
    }
}

TEST_CASE("predicate serialization round trip and canonical bits") {
    const AdjectivePredicate a{Poly::parse("b1 + b4*b1 + 1"), 7};
    const Bits bits = serialize_adjective(a);
    CHECK(std::get<AdjectivePredicate>(deserialize_predicate(bits, PredicateKind::adjective)) == a);
    const AdjectivePredicate same{Poly::parse("1 + b1*b4 + b1"), 7};
    CHECK(serialize_adjective(same) == bits);

    const VerbPredicate v{Poly::parse("q9*b2 + b0 + q3"), 2, true};
    const Bits vb = serialize_verb(v);
    CHECK(std::get<VerbPredicate>(deserialize_predicate(vb, PredicateKind::verb)) == v);
}

TEST_CASE("constant-0 adjective has the shortest encoding") {
    // 5-bit argument count, no offsets, one coefficient bit, 16-bit quality.
    const Bits bits = serialize_adjective({Poly::zero(), 0});
    CHECK(bits.size() == 5 + 1 + 16);
    CHECK(to_string(bits) == std::string(22, '0'));
}

TEST_CASE("malformed predicates raise decode errors") {
    auto decode_code = [](const Bits& b, PredicateKind k) {
        try {
            deserialize_predicate(b, k);
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::config;  // no error
    };
    CHECK(decode_code({}, PredicateKind::adjective) == Errc::decode);
    Bits good = serialize_adjective({Poly::parse("b2"), 1});
    good.pop_back();
    CHECK(decode_code(good, PredicateKind::adjective) == Errc::decode);
    good = serialize_adjective({Poly::parse("b2"), 1});
    good.push_back(0);
    CHECK(decode_code(good, PredicateKind::adjective) == Errc::decode);
}

TEST_CASE("random noise never crashes the decoder") {
    std::mt19937_64 rng(5);
    int decoded = 0;
    for (int i = 0; i < 10000; ++i) {
        Bits b(64);
        for (auto& x : b) x = rng() & 1u;
        for (auto kind : {PredicateKind::adjective, PredicateKind::verb}) {
            try {
                const auto p = deserialize_predicate(b, kind);
                ++decoded;
                // Anything accepted must re-encode to the same bits.
                const Bits again = kind == PredicateKind::adjective ? serialize_adjective(std::get<AdjectivePredicate>(p))
                                                                     : serialize_verb(std::get<VerbPredicate>(p));
                REQUIRE(again == b);
            } catch (const Error& e) {
                REQUIRE(e.code() == Errc::decode);
            }
        }
    }
    MESSAGE("well-formed decodes: " << decoded);
}

}
