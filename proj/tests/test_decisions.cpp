#include "doctest.h"

#include <memory>
#include <set>

#include "helpers.hpp"
#include "laminar/decisions.hpp"

using namespace laminar;

namespace {

const char* kNested = R"(
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
  adjective 3 : b3
end
class E
  sentence A B
end
class F
  sentence E
end
)";

std::shared_ptr<const Basis> basis_of(const char* text) { return std::make_shared<const Basis>(parse_basis(text)); }

Bits frame_of(const std::string& prefix, std::size_t n = 64) {
    Bits b = parse_bits(prefix);
    b.resize(n, 0);
    return b;
}

OptionProfile noun(NounOption n) {
    OptionProfile p;
    p.noun = n;
    return p;
}

MemoryTree observed(const char* basis, std::size_t depth, const std::string& frame) {
    MemoryTree memory{ClassStore(basis_of(basis))};
    Stack stack({depth, 64, 0});
    memory.observe(stack.tick(frame_of(frame), memory.store()), {});
    return memory;
}

}  // namespace

TEST_SUITE("decisions") {

TEST_CASE("apply then roll back restores memory") {
    MemoryTree memory = observed(testing::kSmallBasis, 3, "10001110");
    const MemoryTree before = memory;
    const auto tree = generate_patches(memory, default_packer({}));
    REQUIRE(tree.leaves().size() == 1);
    const Patch& p = tree.patches.at(tree.chain(tree.leaves()[0]).at(0));
    auto rec = apply_patch(memory, p);
    CHECK(memory.contexts().at(2).packed);
    CHECK_FALSE(memory == before);
    rollback(memory, rec);
    CHECK(memory == before);
    CHECK(memory.fingerprint() == before.fingerprint());

    // An installed class is removed again.
    Patch q = p;
    q.install = memory.store().at(2);
    q.install->name = "E2";
    rec = apply_patch(memory, q);
    CHECK(memory.store().shadow_of(2) == rec.installed);
    rollback(memory, rec);
    CHECK(memory == before);
}

TEST_CASE("no packable context leaves the root alone") {
    MemoryTree memory{ClassStore(basis_of(testing::kSmallBasis))};
    const auto tree = generate_patches(memory, default_packer({}));
    CHECK(tree.nodes.size() == 1);
    CHECK(tree.leaves().empty());
}

TEST_CASE("one context with three candidates gives three leaves") {
    const MemoryTree memory = observed(testing::kSmallBasis, 3, "10001110");
    Packer three = [](const MemoryTree&, const Context&) {
        PackReport r;
        for (std::size_t i = 0; i < 3; ++i) {
            PackCandidate c;
            c.id = i;
            c.width = 2;
            c.template_bits = {static_cast<std::uint8_t>(i & 1), static_cast<std::uint8_t>(i >> 1)};
            r.candidates.push_back(c);
        }
        return r;
    };
    const auto tree = generate_patches(memory, three);
    CHECK(tree.leaves().size() == 3);
    CHECK(tree.max_depth() == 1);
    for (auto leaf : tree.leaves()) CHECK(tree.chain(leaf).size() == 1);
}

TEST_CASE("packing a nested context opens a second level") {
    const MemoryTree memory = observed(kNested, 4, "10001110");
    REQUIRE(memory.contexts().size() == 2);
    CHECK_FALSE(memory.packable(memory.contexts().at(3)));
    const auto tree = generate_patches(memory, default_packer({}));
    REQUIRE_FALSE(tree.leaves().empty());
    CHECK(tree.max_depth() == 2);
    for (auto leaf : tree.leaves()) {
        const auto chain = tree.chain(leaf);
        REQUIRE(chain.size() == 2);
        CHECK(tree.patches[chain[0]].level == 1);
        CHECK(tree.patches[chain[0]].target == 2);
        CHECK(tree.patches[chain[1]].level == 2);
        CHECK(tree.patches[chain[1]].target == 3);
        CHECK(tree.patches[chain[1]].parent == chain[0]);

        // The leaf equals applying its patches one at a time.
        MemoryTree step = memory;
        for (auto id : chain) apply_patch(step, tree.patches[id]);
        CHECK(fix_memory(memory, tree, leaf) == step);
    }
}

TEST_CASE("patch groups touch disjoint classes") {
    const MemoryTree memory = observed(kNested, 4, "1000111010001111");
    const auto tree = generate_patches(memory, default_packer({}));
    for (const auto& node : tree.nodes) {
        std::set<ClassId> seen;
        for (auto id : node.patches)
            for (auto c : tree.patches[id].touched) CHECK(seen.insert(c).second);
    }
}

TEST_CASE("a chain from another memory state is a conflict") {
    MemoryTree memory = observed(testing::kSmallBasis, 3, "10001110");
    const auto tree = generate_patches(memory, default_packer({}));
    Stack stack({3, 64, 0});
    memory.observe(stack.tick(frame_of("10001111"), memory.store()), {});
    CHECK_THROWS_WITH_AS(fix_memory(memory, tree, tree.leaves().at(0)), doctest::Contains("another memory"), Error);
    try {
        fix_memory(memory, tree, tree.leaves().at(0));
    } catch (const Error& e) {
        CHECK(e.code() == Errc::conflict);
    }
}

TEST_CASE("a single leaf fixes memory and answers") {
    const auto layout = SignalLayout::for_length(64);
    const MemoryTree entry{ClassStore(basis_of(testing::kSmallBasis))};
    Stack stack({3, 64, 0});
    const auto r = resolve_sigma(entry, stack, frame_of("10001110"), layout, noun(NounOption::ratio),
                                 default_packer(noun(NounOption::ratio)));
    CHECK(r.outcome == SigmaOutcome::fixed);
    REQUIRE(r.response.has_value());
    CHECK(r.response->size() == SignalLayout::width(layout.output));
    CHECK(r.responses.size() == 1);
    CHECK(r.memory.contexts().at(2).packed);
    CHECK(r.applied.size() == 1);
    CHECK(stack.ticks() == 1);

    // Nothing is left to pack on the next identical frame.
    const auto again = resolve_sigma(r.memory, stack, frame_of("10001110"), layout, noun(NounOption::ratio),
                                     default_packer(noun(NounOption::ratio)));
    CHECK(again.outcome == SigmaOutcome::unpacked);
    CHECK(again.response.has_value());
}

TEST_CASE("two unresolved leaves drop everything") {
    const auto layout = SignalLayout::for_length(64);
    const MemoryTree entry{ClassStore(basis_of(testing::kSmallBasis))};
    Stack stack({3, 64, 0});
    const auto profile = noun(NounOption::irratio);
    const auto r = resolve_sigma(entry, stack, frame_of("10001110"), layout, profile, default_packer(profile));
    CHECK(r.responses.size() == 2);
    CHECK(r.responses[0] != r.responses[1]);
    CHECK(r.outcome == SigmaOutcome::dropped);
    CHECK_FALSE(r.response.has_value());
    CHECK(r.memory.fingerprint() == entry.fingerprint());
    CHECK(r.memory == entry);
    CHECK(r.log.size() == 3);
    for (const auto& rec : r.log) CHECK(rec.depth <= SigmaConfig{}.ego_depth);
}

TEST_CASE("Ego recursion stops at the depth cap") {
    const auto layout = SignalLayout::for_length(64);
    const MemoryTree entry{ClassStore(basis_of(testing::kSmallBasis))};
    const auto profile = noun(NounOption::irratio);
    for (std::size_t cap : {0, 1, 2, 4}) {
        Stack stack({3, 64, 0});
        SigmaConfig cfg;
        cfg.ego_depth = cap;
        const auto r = resolve_sigma(entry, stack, frame_of("10001110"), layout, profile, default_packer(profile), cfg);
        std::size_t deepest = 0;
        for (const auto& rec : r.log) deepest = std::max(deepest, rec.depth);
        CHECK(deepest <= cap);
        CHECK(r.response.has_value() != (r.outcome == SigmaOutcome::dropped));
    }
}

TEST_CASE("an empty frame answers from the unmodified tree") {
    const auto layout = SignalLayout::for_length(64);
    const MemoryTree entry{ClassStore(basis_of(testing::kSmallBasis))};
    Stack stack({3, 64, 0});
    const auto r = resolve_sigma(entry, stack, Bits(64, 0), layout, {}, default_packer({}));
    CHECK(r.outcome == SigmaOutcome::unpacked);
    REQUIRE(r.response.has_value());
    CHECK(*r.response == Bits(8, 0));
    CHECK(r.memory == entry);
}

}
