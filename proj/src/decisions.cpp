#include "laminar/decisions.hpp"

#include <algorithm>

namespace laminar {

AppliedPatch apply_patch(MemoryTree& memory, const Patch& patch) {
    auto it = memory.contexts().find(patch.target);
    require(it != memory.contexts().end() && it->second == patch.before, Errc::conflict,
            "patch " + std::to_string(patch.id) + " does not match the current context");
    AppliedPatch rec;
    rec.patch = patch.id;
    rec.target = patch.target;
    rec.before = it->second;
    rec.previous_shadow = memory.store().shadow_of(patch.target);
    if (patch.install) rec.installed = memory.store().add_local(*patch.install, patch.target, true);
    it->second.packed = true;
    it->second.pack_encoding = patch.after;
    rec.after = it->second;
    return rec;
}

void rollback(MemoryTree& memory, const AppliedPatch& rec) {
    ClassStore& store = memory.store();
    if (rec.installed) {
        if (store.shadow_of(rec.target) == rec.installed) store.set_shadow(rec.target, rec.previous_shadow);
        if (*rec.installed + 1 == store.size()) store.pop_local();
    }
    auto it = memory.contexts().find(rec.target);
    if (it == memory.contexts().end()) return;
    if (it->second == rec.after) {
        it->second = rec.before;
    } else {
        it->second.packed = false;
        it->second.pack_encoding.clear();
    }
}

std::vector<std::size_t> DecisionTree::leaves() const {
    std::vector<std::size_t> out;
    if (nodes.empty() || nodes[0].children.empty()) return out;
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (nodes[i].children.empty()) out.push_back(i);
    return out;
}

std::vector<std::size_t> DecisionTree::chain(std::size_t node) const {
    std::vector<std::vector<std::size_t>> groups;
    for (std::optional<std::size_t> n = node; n; n = nodes.at(*n).parent) groups.push_back(nodes.at(*n).patches);
    std::vector<std::size_t> out;
    for (auto g = groups.rbegin(); g != groups.rend(); ++g) out.insert(out.end(), g->begin(), g->end());
    return out;
}

std::size_t DecisionTree::max_depth() const {
    std::size_t d = 0;
    for (const auto& n : nodes) d = std::max(d, n.depth);
    return d;
}

Packer default_packer(const OptionProfile& profile, const PackParams& params) {
    return [profile, params](const MemoryTree& memory, const Context& context) {
        const PackInput in = pack_input(memory, context);
        const Basis& basis = memory.store().basis();
        PackReport out = abstraction_pack(in, basis, profile, params);
        PackReport d = detalisation_pack(in, basis, profile, params);
        out.budget_exhausted = out.budget_exhausted || d.budget_exhausted;
        for (auto& c : d.candidates) {
            const bool seen = std::any_of(out.candidates.begin(), out.candidates.end(),
                                          [&](const PackCandidate& x) { return x.same_output(c); });
            if (!seen) out.candidates.push_back(std::move(c));
        }
        std::vector<Bits> reprs;
        for (const auto& m : in.members) reprs.push_back(binary_repr(m, basis));
        std::erase_if(out.candidates, [&](const PackCandidate& c) { return !validate_candidate(c, reprs); });
        for (std::size_t i = 0; i < out.candidates.size(); ++i) out.candidates[i].id = i;
        return out;
    };
}

namespace {

struct Builder {
    DecisionTree& tree;
    const Packer& packer;
    const TreeLimits& limits;
    std::size_t leaves_left;

    void expand(std::size_t node, const MemoryTree& memory) {
        const std::size_t depth = tree.nodes[node].depth;
        if (depth >= limits.max_depth || leaves_left == 0) {
            if (leaves_left > 0) --leaves_left;
            return;
        }
        struct Option {
            const Context* context;
            std::vector<PackCandidate> candidates;
        };
        std::vector<Option> options;
        for (const auto& [id, ctx] : memory.contexts()) {
            if (!memory.packable(ctx)) continue;
            auto report = packer(memory, ctx);
            if (!report.candidates.empty()) options.push_back({&ctx, std::move(report.candidates)});
        }
        if (options.empty()) {
            if (node != 0) --leaves_left;
            return;
        }
        // Cross product of one candidate per context, in lexicographic order.
        std::vector<std::size_t> pick(options.size(), 0);
        while (leaves_left > 0) {
            MemoryTree next = memory;
            DecisionNode child;
            child.parent = node;
            child.depth = depth + 1;
            const std::optional<std::size_t> above =
                tree.nodes[node].patches.empty() ? std::nullopt : std::optional(tree.nodes[node].patches.back());
            for (std::size_t k = 0; k < options.size(); ++k) {
                const PackCandidate& c = options[k].candidates[pick[k]];
                Patch p;
                p.id = tree.patches.size();
                p.level = depth + 1;
                p.parent = above;
                p.target = options[k].context->parent;
                p.candidate = pick[k];
                p.algorithm = c.algorithm;
                p.before = next.contexts().at(p.target);
                p.after = encode_candidate(c);
                p.touched = {p.target};
                const ClassId current = next.store().shadow_of(p.target).value_or(p.target);
                if (c.parent_after && !(*c.parent_after == next.store().at(current))) p.install = c.parent_after;
                try {
                    apply_patch(next, p);
                } catch (const Error& e) {
                    if (e.code() != Errc::capacity) throw;
                    p.install.reset();
                    apply_patch(next, p);
                }
                child.patches.push_back(p.id);
                tree.patches.push_back(std::move(p));
            }
            const std::size_t id = tree.nodes.size();
            tree.nodes.push_back(std::move(child));
            tree.nodes[node].children.push_back(id);
            expand(id, next);

            std::size_t k = options.size();
            while (k > 0) {
                if (++pick[k - 1] < options[k - 1].candidates.size()) break;
                pick[k - 1] = 0;
                --k;
            }
            if (k == 0) return;
        }
        tree.truncated = true;
    }
};

}  // namespace

DecisionTree generate_patches(const MemoryTree& memory, const Packer& packer, const TreeLimits& limits) {
    DecisionTree tree;
    tree.root_fingerprint = memory.fingerprint();
    tree.nodes.push_back({});
    Builder b{tree, packer, limits, limits.max_leaves};
    b.expand(0, memory);
    return tree;
}

MemoryTree fix_memory(const MemoryTree& memory, const DecisionTree& tree, std::size_t node,
                      std::vector<AppliedPatch>* records) {
    require(node < tree.nodes.size(), Errc::invalid_argument, "no such decision node");
    require(memory.fingerprint() == tree.root_fingerprint, Errc::conflict,
            "decision tree was built from another memory state");
    MemoryTree out = memory;
    for (auto id : tree.chain(node)) {
        auto rec = apply_patch(out, tree.patches.at(id));
        if (records) records->push_back(std::move(rec));
    }
    return out;
}

std::string_view to_string(SigmaOutcome o) noexcept {
    switch (o) {
        case SigmaOutcome::unpacked: return "unpacked";
        case SigmaOutcome::fixed: return "fixed";
        case SigmaOutcome::ego_chosen: return "ego-chosen";
        case SigmaOutcome::ego_single: return "ego-single";
        case SigmaOutcome::dropped: return "dropped";
    }
    return "?";
}

Bits leaf_response(const MemoryTree& leaf, const DecisionTree& tree, std::size_t node, const Stack& stack,
                   const Bits& frame, const SignalLayout& layout) {
    Stack s = stack;
    ClassStore store = leaf.store();
    const auto trace = s.tick(frame, store);
    Bits out = read_region(trace.layers.front(), layout.output);
    std::size_t at = 0;
    for (auto id : tree.chain(node))
        for (auto bit : tree.patches.at(id).after) out[at++ % out.size()] ^= bit;
    return out;
}

Resolution resolve_sigma(const MemoryTree& memory, Stack& stack, const Bits& frame, const SignalLayout& layout,
                         const OptionProfile& profile, const Packer& packer, const SigmaConfig& config,
                         std::size_t depth) {
    Resolution r(memory);
    const Stack entry = stack;
    MemoryTree observed = memory;
    r.trace = stack.tick(frame, observed.store());
    r.forks = observed.observe(r.trace, profile);

    const DecisionTree tree = generate_patches(observed, packer, config.limits);
    const auto leaves = tree.leaves();
    DecisionRecord rec;
    rec.depth = depth;
    rec.leaves = leaves.size();
    rec.nodes = tree.nodes.size();
    rec.tree_depth = tree.max_depth();

    auto finish = [&](SigmaOutcome o) {
        r.outcome = o;
        rec.outcome = o;
        r.log.insert(r.log.begin(), rec);
        return r;
    };
    auto fix = [&](std::size_t leaf_index) {
        r.memory = fix_memory(observed, tree, leaves[leaf_index], &r.records);
        for (auto id : tree.chain(leaves[leaf_index])) r.applied.push_back(tree.patches[id]);
        r.dropped = tree.patches.size() - r.applied.size();
        r.response = r.responses[leaf_index];
        rec.chosen = leaf_index;
    };

    if (leaves.empty()) {
        r.memory = std::move(observed);
        r.response = read_region(r.trace.layers.front(), layout.output);
        return finish(SigmaOutcome::unpacked);
    }
    for (auto leaf : leaves) {
        const MemoryTree m = fix_memory(observed, tree, leaf);
        r.responses.push_back(leaf_response(m, tree, leaf, entry, frame, layout));
    }
    if (leaves.size() == 1) {
        fix(0);
        return finish(SigmaOutcome::fixed);
    }

    auto drop = [&]() {
        r.memory = memory;
        r.response.reset();
        r.applied.clear();
        r.records.clear();
        r.dropped = tree.patches.size();
        return finish(SigmaOutcome::dropped);
    };
    if (depth >= config.ego_depth) return drop();

    // Ego: every pending response goes back in through the Ego zone while
    // memory stays at its entry state.
    Bits ego;
    for (const auto& k : r.responses) ego.insert(ego.end(), k.begin(), k.end());
    Bits again = frame;
    write_region(again, layout.ego, ego);
    Stack inner = entry;
    Resolution sub = resolve_sigma(memory, inner, again, layout, profile, packer, config, depth + 1);
    r.log.insert(r.log.end(), sub.log.begin(), sub.log.end());

    if (sub.response) {
        std::vector<std::size_t> hits;
        for (std::size_t i = 0; i < r.responses.size(); ++i)
            if (r.responses[i] == *sub.response) hits.push_back(i);
        if (hits.size() == 1) {
            fix(hits[0]);
            return finish(SigmaOutcome::ego_chosen);
        }
        if (sub.outcome == SigmaOutcome::fixed || sub.outcome == SigmaOutcome::ego_chosen ||
            sub.outcome == SigmaOutcome::ego_single) {
            r.memory = std::move(sub.memory);
            r.response = sub.response;
            r.applied = std::move(sub.applied);
            r.records = std::move(sub.records);
            r.dropped = tree.patches.size() + sub.dropped;
            return finish(SigmaOutcome::ego_single);
        }
    }
    return drop();
}

}  // namespace laminar
