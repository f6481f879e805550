#pragma once

// Patches, the decision tree over candidate packings, and response
// resolution with Ego recursion.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "laminar/layout.hpp"
#include "laminar/memory.hpp"
#include "laminar/packer.hpp"

namespace laminar {

struct Patch {
    std::size_t id = 0;
    std::size_t level = 1;
    std::optional<std::size_t> parent;  // last patch of the group above
    ClassId target = 0;                 // context being packed
    std::size_t candidate = 0;          // index in the packer report
    PackAlgorithm algorithm = PackAlgorithm::abstraction;
    Context before;                     // context state the patch applies to
    Bits after;                         // candidate encoding stored in the context
    std::optional<SimpleClass> install; // rewritten parent class, when it differs
    std::vector<ClassId> touched;
};

/// What apply_patch changed, enough to undo it.
struct AppliedPatch {
    std::size_t patch = 0;
    ClassId target = 0;
    Context before;
    Context after;
    std::optional<ClassId> installed;
    std::optional<ClassId> previous_shadow;
};

/// conflict-error when the target context differs from patch.before.
AppliedPatch apply_patch(MemoryTree& memory, const Patch& patch);
/// Restores the context exactly if it is untouched since the patch, else
/// only unpacks it; an installed class is removed when it is the newest.
void rollback(MemoryTree& memory, const AppliedPatch& record);

struct DecisionNode {
    std::optional<std::size_t> parent;
    std::vector<std::size_t> patches;  // patch group applied on entering the node
    std::vector<std::size_t> children;
    std::size_t depth = 0;
};

struct DecisionTree {
    Bits root_fingerprint;
    std::vector<Patch> patches;
    std::vector<DecisionNode> nodes;  // nodes[0] is the root
    bool truncated = false;

    /// Nodes without children; empty when the root was never expanded.
    std::vector<std::size_t> leaves() const;
    /// Patch ids from the root down to `node`.
    std::vector<std::size_t> chain(std::size_t node) const;
    std::size_t max_depth() const;
};

using Packer = std::function<PackReport(const MemoryTree&, const Context&)>;

/// Abstraction candidates followed by distinct detalisation candidates,
/// keeping only those that regenerate the context.
Packer default_packer(const OptionProfile& profile, const PackParams& params = {});

struct TreeLimits {
    std::size_t max_depth = 3;
    std::size_t max_leaves = 64;
};

DecisionTree generate_patches(const MemoryTree& memory, const Packer& packer, const TreeLimits& limits = {});

/// Applies the chain of `node` to a copy of `memory`. conflict-error when the
/// tree was built from another memory state.
MemoryTree fix_memory(const MemoryTree& memory, const DecisionTree& tree, std::size_t node,
                      std::vector<AppliedPatch>* records = nullptr);

struct SigmaConfig {
    std::size_t ego_depth = 2;
    TreeLimits limits;
};

enum class SigmaOutcome { unpacked, fixed, ego_chosen, ego_single, dropped };
std::string_view to_string(SigmaOutcome o) noexcept;

struct DecisionRecord {
    std::size_t depth = 0;
    std::size_t leaves = 0;
    std::size_t nodes = 0;
    std::size_t tree_depth = 0;
    SigmaOutcome outcome = SigmaOutcome::dropped;
    std::optional<std::size_t> chosen;  // leaf index
};

struct Resolution {
    explicit Resolution(MemoryTree m) : memory(std::move(m)) {}

    std::optional<Bits> response;
    MemoryTree memory;
    SigmaOutcome outcome = SigmaOutcome::dropped;
    TickTrace trace;                 // first tick of this call
    std::vector<ForkEvent> forks;
    std::vector<Patch> applied;
    std::vector<AppliedPatch> records;
    std::size_t dropped = 0;         // patches discarded
    std::vector<Bits> responses;     // one per leaf
    std::vector<DecisionRecord> log; // this call first, then recursion
};

/// Runs `frame` through the stack and resolves the responses of every leaf
/// of the decision tree. Only `stack` is advanced; recursion works on copies.
Resolution resolve_sigma(const MemoryTree& memory, Stack& stack, const Bits& frame, const SignalLayout& layout,
                         const OptionProfile& profile, const Packer& packer, const SigmaConfig& config = {},
                         std::size_t depth = 0);

/// Output segment of a leaf memory on `frame`, XOR-folded with the leaf's
/// patch encodings so distinct leaves answer distinctly.
Bits leaf_response(const MemoryTree& leaf, const DecisionTree& tree, std::size_t node, const Stack& stack,
                   const Bits& frame, const SignalLayout& layout);

}  // namespace laminar
