#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "laminar/bits.hpp"
#include "laminar/bitspace.hpp"
#include "laminar/classes.hpp"

namespace testing {

inline laminar::Bits random_bits(std::mt19937_64& rng, std::size_t n) {
    laminar::Bits b(n);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng() & 1u);
    return b;
}

inline laminar::Layer layer_of(const laminar::Bits& bits) {
    laminar::Layer l(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) l.set(i, true);
    return l;
}

inline laminar::Mask random_mask(std::mt19937_64& rng, std::size_t max_span) {
    const std::size_t span = 1 + rng() % max_span;
    std::vector<laminar::Mask::Entry> entries;
    for (std::size_t o = 0; o < span; ++o)
        if (o == 0 || o + 1 == span || rng() % 3 != 0)
            entries.push_back({static_cast<std::uint32_t>(o), (rng() & 1u) != 0});
    return laminar::Mask(entries, span);
}

inline const char* kSmallBasis = R"(
# two plain nouns and a sentence over them
class A
  mask 1.0.
  quality 1 2
  action 1
  adjective 1 : b0 + b2
  adjective 2 : b2*b3
  verb 1 : q1
end
class B
  mask 11..
  quality 3
  adjective 3 : b2
end
class E
  sentence A B
end
)";

}  // namespace testing

namespace testing {

/// Every class reachable from the basis by at most `depth` operations
/// (both provenance values), including the basis classes themselves.
inline std::vector<laminar::SimpleClass> enumerate_derived(const laminar::Basis& basis, std::size_t depth) {
    using namespace laminar;
    std::vector<SimpleClass> all;
    std::vector<SimpleClass> frontier;
    for (const auto& c : basis.classes())
        if (!c.is_sentence()) frontier.push_back(c);
    all = frontier;
    for (std::size_t d = 0; d < depth; ++d) {
        std::vector<SimpleClass> next;
        for (const auto& c : frontier) {
            std::vector<DerivationStep> steps;
            for (auto prov : {Provenance::spontaneous, Provenance::internal_speech}) {
                for (std::uint16_t l = 0; l < c.verbs.size(); ++l)
                    for (std::uint16_t m = 0; m < c.verbs.size(); ++m)
                        for (auto op : {ClassOp::verb_xor, ClassOp::verb_and}) steps.push_back({op, l, m, prov});
                for (std::uint16_t l = 0; l < c.adjectives.size(); ++l)
                    for (std::uint16_t m = 0; m < c.adjectives.size(); ++m)
                        for (auto op : {ClassOp::adjective_xor, ClassOp::adjective_and}) steps.push_back({op, l, m, prov});
                for (const auto& e : c.noun.mask.entries()) {
                    steps.push_back({ClassOp::specialize, static_cast<std::uint16_t>(e.offset), 0, prov});
                    steps.push_back({ClassOp::argument, static_cast<std::uint16_t>(e.offset), 0, prov});
                }
            }
            for (const auto& s : steps) {
                try {
                    next.push_back(apply_step(c, s));
                } catch (const Error&) {
                }
            }
        }
        all.insert(all.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return all;
}

inline const char* kTwoClassBasis = R"(
class P
  mask 1.0
  quality 1
  action 1
  adjective 1 : b0*b2 + b1
  verb 1 : q1 + b0
end
class R
  mask 01
  quality 4
  adjective 4 : b1
end
)";

}  // namespace testing

namespace testing {

inline laminar::Poly random_poly(std::mt19937_64& rng, const std::vector<laminar::Var>& vars, std::size_t max_terms = 3) {
    std::vector<laminar::Monomial> monos;
    const std::size_t terms = 1 + rng() % max_terms;
    for (std::size_t t = 0; t < terms; ++t) {
        laminar::Monomial m;
        for (auto v : vars)
            if (rng() % 3 == 0) m.push_back(v);
        if (m.empty()) m.push_back(vars[rng() % vars.size()]);
        monos.push_back(std::move(m));
    }
    return laminar::Poly::from_monomials(monos);
}

/// A random class whose verbs read only its own qualities, with at most
/// `max_mask_bits` constant mask positions. The lowest action point splits
/// input from state.
inline laminar::SimpleClass random_conditioning_class(std::mt19937_64& rng, std::size_t max_mask_bits = 4) {
    using namespace laminar;
    const std::size_t span = 2 + rng() % 4;
    const std::size_t k = 1 + rng() % (span - 1);
    std::vector<Mask::Entry> entries;
    for (std::size_t o = 0; o < span && entries.size() < max_mask_bits; ++o)
        if (rng() % 2 == 0) entries.push_back({static_cast<std::uint32_t>(o), (rng() & 1u) != 0});
    SimpleClass c;
    c.name = "R";
    c.noun.mask = Mask(entries, span);
    std::vector<Var> bits;
    for (std::size_t o = 0; o < span; ++o) bits.push_back(bit_var(static_cast<std::uint32_t>(o)));
    const std::size_t nq = 1 + rng() % 2;
    for (std::size_t i = 0; i < nq; ++i) {
        const auto q = static_cast<QualityId>(10 + i);
        c.noun.qualities.push_back(q);
        c.adjectives.push_back({random_poly(rng, bits), q});
    }
    std::vector<Var> args = bits;
    for (auto q : c.noun.qualities) args.push_back(quality_var(q));
    const std::size_t nv = 1 + rng() % 2;
    for (std::size_t i = 0; i < nv; ++i) {
        const auto ap = static_cast<std::uint32_t>(i == 0 ? k : k + rng() % (span - k));
        if (std::find(c.noun.actions.begin(), c.noun.actions.end(), ap) == c.noun.actions.end()) c.noun.actions.push_back(ap);
        c.verbs.push_back({random_poly(rng, args), ap, false});
    }
    return c;
}

}  // namespace testing
