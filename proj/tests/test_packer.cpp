#include "doctest.h"

#include <memory>
#include <random>

#include "helpers.hpp"
#include "laminar/oracle.hpp"
#include "laminar/packer.hpp"

using namespace laminar;

namespace {

OptionProfile with(NounOption n, VerbOption v, AdjectiveOption a) {
    OptionProfile p;
    p.noun = n;
    p.verb = v;
    p.adjective = a;
    return p;
}

std::vector<Bits> bits_list(std::initializer_list<const char*> texts) {
    std::vector<Bits> out;
    for (auto t : texts) out.push_back(parse_bits(t));
    return out;
}

std::set<std::vector<Poly>> adjective_sets(const PackReport& r) {
    std::set<std::vector<Poly>> out;
    for (const auto& c : r.candidates) {
        std::vector<Poly> s;
        for (const auto& a : c.adjectives) s.push_back(a.poly);
        std::sort(s.begin(), s.end());
        out.insert(s);
    }
    return out;
}

}  // namespace

TEST_SUITE("packer") {

TEST_CASE("two members differing in one bit") {
    const auto members = bits_list({"0110100", "0110110"});
    const auto r = abstraction_bits(members, {});
    REQUIRE_FALSE(r.candidates.empty());
    CHECK(r.direct_bits_tried);
    for (const auto& c : r.candidates) {
        REQUIRE(c.adjectives.size() == 1);
        CHECK(c.adjectives[0].poly == Poly::variable(bit_var(5)));
        CHECK(c.direct_bits);
        CHECK(validate_candidate(c, members));
    }
}

TEST_CASE("one member needs no adjectives") {
    const auto members = bits_list({"10110", "10110"});
    const auto r = abstraction_bits(members, {});
    REQUIRE(r.candidates.size() == 1);
    CHECK(r.candidates[0].adjectives.empty());
    CHECK(regenerate(r.candidates[0]) == bits_list({"10110"}));
    CHECK_THROWS_AS(abstraction_bits(std::vector<Bits>{}, {}), Error);
}

TEST_CASE("too many differing positions exhaust the budget") {
    PackParams params;
    params.max_differing = 4;
    const auto members = bits_list({"000000", "111111"});
    const auto r = abstraction_bits(members, {}, params);
    CHECK(r.candidates.empty());
    CHECK(r.budget_exhausted);
    CHECK(r.direct_bits_tried);
}

TEST_CASE("combinations are tried before direct bits") {
    // Three members on two differing bits: x0 + x1 alone cannot separate
    // them, so the combined pool fails and atoms are needed.
    const auto members = bits_list({"00", "01", "10"});
    const auto r = abstraction_bits(members, with(NounOption::ratio, VerbOption::logic, AdjectiveOption::intuition));
    REQUIRE_FALSE(r.candidates.empty());
    CHECK(r.direct_bits_tried);
    for (const auto& c : r.candidates) CHECK(validate_candidate(c, members));

    // Full rank over three differing bits is reachable with XOR combinations
    // alone; AND combinations cannot tell 000 from 100 without atoms.
    const auto pair = bits_list({"000", "111"});
    const auto intu = abstraction_bits(pair, with(NounOption::ratio, VerbOption::logic, AdjectiveOption::intuition));
    REQUIRE_FALSE(intu.candidates.empty());
    CHECK_FALSE(intu.direct_bits_tried);
    CHECK(intu.candidates[0].adjectives.size() == 3);
    const auto sens = abstraction_bits(pair, with(NounOption::ratio, VerbOption::logic, AdjectiveOption::sensorics));
    REQUIRE_FALSE(sens.candidates.empty());
    CHECK(sens.direct_bits_tried);
    CHECK(adjective_sets(intu) != adjective_sets(sens));
}

TEST_CASE("accepted candidates regenerate exactly the members") {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 100; ++round) {
        const std::size_t width = 4 + rng() % 6;
        std::vector<Bits> members;
        const std::size_t count = 1 + rng() % 4;
        for (std::size_t i = 0; i < count; ++i) members.push_back(testing::random_bits(rng, width));
        for (const auto& profile : all_profiles()) {
            const auto r = abstraction_bits(members, profile);
            const auto ops = spontaneous_ops(profile);
            for (const auto& c : r.candidates) {
                const auto produced = regenerate(c);
                std::set<Bits> want(members.begin(), members.end());
                REQUIRE(std::set<Bits>(produced.begin(), produced.end()) == want);
                for (auto op : candidate_ops(c, 0)) REQUIRE(ops.allows(op));
            }
        }
    }
}

TEST_CASE("validate_candidate rejects a candidate missing a member") {
    const auto members = bits_list({"0001", "0010", "0100"});
    auto r = abstraction_bits(members, {});
    REQUIRE_FALSE(r.candidates.empty());
    auto c = r.candidates[0];
    CHECK(validate_candidate(c, members));
    c.signatures.pop_back();
    CHECK_FALSE(validate_candidate(c, members));
}

TEST_CASE("engine search agrees with the brute-force oracle") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 60; ++round) {
        const std::size_t width = 3 + rng() % 2;
        std::vector<Bits> members;
        const std::size_t count = 2 + rng() % 3;
        for (std::size_t i = 0; i < count; ++i) members.push_back(testing::random_bits(rng, width));
        for (auto adj : {AdjectiveOption::intuition, AdjectiveOption::sensorics}) {
            const auto profile = with(NounOption::ratio, VerbOption::logic, adj);
            const PackParams params;
            const auto r = abstraction_bits(members, profile, params);
            const auto o = oracle::pack_search(members, spontaneous_ops(profile).adjective, params.depth,
                                               params.max_adjectives);
            REQUIRE_FALSE(o.exhausted);
            CHECK(r.candidates.empty() == !o.min_size.has_value());
            if (!r.candidates.empty()) {
                CHECK(r.candidates[0].adjectives.size() == *o.min_size);
                CHECK(r.direct_bits_tried == o.direct_bits);
                const auto found = adjective_sets(r);
                CHECK(std::includes(o.solutions.begin(), o.solutions.end(), found.begin(), found.end()));
                if (o.solutions.size() <= PackParams{}.max_candidates) CHECK(found == o.solutions);
            }
        }
    }
}

TEST_CASE("detalisation factors a shared prefix and suffix") {
    const auto members = bits_list({"0101" "001" "10", "0101" "110" "10", "0101" "011" "10"});
    for (auto noun : {NounOption::ratio, NounOption::irratio}) {
        const auto r = detalisation_bits(members, with(noun, VerbOption::logic, AdjectiveOption::intuition));
        REQUIRE(r.candidates.size() == 1);
        const auto& c = r.candidates[0];
        CHECK(c.algorithm == PackAlgorithm::detalisation);
        CHECK(c.prefix == 4);
        CHECK(c.suffix == 2);
        CHECK(c.residues == bits_list({"001", "011", "110"}));
        CHECK(validate_candidate(c, members));
        if (noun == NounOption::ratio) {
            CHECK(c.adjectives.size() == 3);
            CHECK(c.writers.empty());
        } else {
            CHECK(c.writers.size() == 3);
            CHECK(c.adjectives.empty());
        }
        for (auto op : candidate_ops(c, 0))
            CHECK(op == (noun == NounOption::ratio ? ClassOp::specialize : ClassOp::argument));
    }
}

TEST_CASE("detalisation of identical members has no residue") {
    const auto members = bits_list({"0110", "0110"});
    const auto r = detalisation_bits(members, {});
    REQUIRE(r.candidates.size() == 1);
    CHECK(r.candidates[0].residues == bits_list({""}));
    CHECK(r.candidates[0].differing.empty());
}

TEST_CASE("detalisation without common ends falls back to abstraction") {
    const auto members = bits_list({"0110", "1001", "1111"});
    const auto d = detalisation_bits(members, {});
    const auto a = abstraction_bits(members, {});
    REQUIRE(d.candidates.size() == a.candidates.size());
    for (std::size_t i = 0; i < a.candidates.size(); ++i) CHECK(d.candidates[i].same_output(a.candidates[i]));
}

TEST_CASE("class-level packing composes verbs and never touches the basis") {
    const auto basis = std::make_shared<const Basis>(parse_basis(R"(
class P
  mask 1...
  quality 1
  action 1 2
  adjective 1 : b1
  verb 1 : q1
  verb 2 : b1
end
class R
  mask 01
  quality 4
  adjective 4 : b1
end
)"));
    const Basis before = *basis;
    PackInput in;
    in.parent = basis->at(0);
    in.members = {basis->at(0), basis->at(1)};
    in.member_ids = {0, 1};
    for (auto verb : {VerbOption::logic, VerbOption::ethics}) {
        const auto profile = with(NounOption::ratio, verb, AdjectiveOption::intuition);
        const auto r = abstraction_pack(in, *basis, profile);
        REQUIRE_FALSE(r.candidates.empty());
        for (const auto& c : r.candidates) {
            REQUIRE(c.parent_after.has_value());
            CHECK(c.parent_after->verbs.size() == 3);
            CHECK(c.parent_after->verbs[2].op_bit == (verb == VerbOption::ethics));
            CHECK_FALSE(c.correlation);
            for (auto op : candidate_ops(c, 0)) CHECK(spontaneous_ops(profile).allows(op));
        }
    }
    CHECK(*basis == before);
}

TEST_CASE("correlation verbs when no verbs compose") {
    const auto basis = std::make_shared<const Basis>(parse_basis(testing::kTwoClassBasis));
    PackInput in;
    in.parent = basis->at(0);
    in.members = {basis->at(1)};
    in.member_ids = {1};
    // R's quality 4 equals its second block bit on every sighting.
    for (const char* block : {"01", "01", "01"}) {
        Observation o;
        o.class_id = 1;
        o.block = parse_bits(block);
        o.qualities = parse_bits("1");
        in.observations.push_back(o);
    }
    auto r = abstraction_pack(in, *basis, {});
    REQUIRE(r.candidates.size() == 1);
    CHECK(r.candidates[0].correlation);
    REQUIRE(r.candidates[0].extra_verbs.size() == 1);
    CHECK(r.candidates[0].extra_verbs[0].verb.action_point == 1);
    CHECK(r.candidates[0].extra_verbs[0].verb.poly == Poly::variable(quality_var(4)));

    in.observations.resize(1);
    r = abstraction_pack(in, *basis, {});
    CHECK(r.candidates[0].extra_verbs.empty());
    CHECK_THROWS_AS(abstraction_pack(PackInput{in.parent, {}, {}, {}}, *basis, {}), Error);
}

TEST_CASE("candidate encodings are deterministic") {
    const auto members = bits_list({"0001", "0010", "0100"});
    const auto a = abstraction_bits(members, {});
    const auto b = abstraction_bits(members, {});
    REQUIRE(a.candidates.size() == b.candidates.size());
    for (std::size_t i = 0; i < a.candidates.size(); ++i)
        CHECK(encode_candidate(a.candidates[i]) == encode_candidate(b.candidates[i]));
}

}
