#include "laminar/memory.hpp"

#include <algorithm>

namespace laminar {

ForkOutcome fork_context(const Context& context, Modification modification, const std::string& combination,
                         const OptionProfile& profile) {
    const bool trigger = profile.context == ContextOption::static_context ? modification.quality : modification.action;
    ForkOutcome out;
    if (!trigger) {
        out.current = context;
        return out;
    }
    out.forked = true;
    out.archived = ArchivedContext{combination, context};
    out.current.parent = context.parent;
    out.current.level = context.level;
    out.current.generation = context.generation + 1;
    return out;
}

namespace {

std::string combination_of(const std::vector<Observation>& members, bool qualities) {
    std::string s;
    for (const auto& m : members) {
        if (!s.empty()) s += '|';
        s += to_string(qualities ? m.qualities : m.actions);
    }
    return s;
}

}  // namespace

std::vector<ForkEvent> MemoryTree::observe(const TickTrace& trace, const OptionProfile& profile) {
    std::vector<ForkEvent> events;
    // Items of the level below each sentence level, as observations.
    std::vector<Observation> items;
    for (const auto& o : trace.objects) {
        Observation ob;
        ob.tick = trace.tick;
        ob.class_id = o.class_id;
        ob.block.assign(trace.frame.begin() + static_cast<std::ptrdiff_t>(o.block.begin),
                        trace.frame.begin() + static_cast<std::ptrdiff_t>(o.block.end + 1));
        ob.qualities = o.qualities;
        ob.actions = o.actions;
        items.push_back(std::move(ob));
    }
    for (const auto& level : trace.levels) {
        std::vector<Observation> next;
        for (const auto& s : level.sentences) {
            std::vector<Observation> members;
            for (auto m : s.members) members.push_back(items.at(m));

            const ClassId parent = store_.ancestor(s.noun_id);
            auto [it, inserted] = contexts_.try_emplace(parent);
            Context& ctx = it->second;
            if (inserted) {
                ctx.parent = parent;
                ctx.level = s.level;
            }
            Modification mod;
            if (ctx.last_snapshot.size() == members.size()) {
                for (std::size_t i = 0; i < members.size(); ++i) {
                    if (ctx.last_snapshot[i].class_id != members[i].class_id) continue;
                    mod.quality = mod.quality || ctx.last_snapshot[i].qualities != members[i].qualities;
                    mod.action = mod.action || ctx.last_snapshot[i].actions != members[i].actions;
                }
            }
            const bool on_quality = profile.context == ContextOption::static_context;
            auto outcome = fork_context(ctx, mod, combination_of(members, on_quality), profile);
            if (outcome.forked) {
                events.push_back({parent, outcome.archived->key});
                archive_.push_back(std::move(*outcome.archived));
                ctx = std::move(outcome.current);
            }
            for (const auto& m : members) {
                if (!std::binary_search(ctx.classes.begin(), ctx.classes.end(), m.class_id)) {
                    ctx.classes.insert(std::upper_bound(ctx.classes.begin(), ctx.classes.end(), m.class_id), m.class_id);
                    // A new member invalidates an earlier packing of this context.
                    ctx.packed = false;
                    ctx.pack_encoding.clear();
                }
                ctx.observations.push_back(m);
            }
            if (ctx.observations.size() > window_)
                ctx.observations.erase(ctx.observations.begin(),
                                       ctx.observations.end() - static_cast<std::ptrdiff_t>(window_));
            ctx.last_snapshot = members;

            Observation up;
            up.tick = trace.tick;
            up.class_id = s.noun_id;
            next.push_back(std::move(up));
        }
        items = std::move(next);
    }
    return events;
}

std::vector<ClassId> MemoryTree::children(const Context& context) const {
    std::vector<ClassId> out;
    for (auto c : context.classes) {
        const ClassId g = store_.ancestor(c);
        if (store_.level(g) > 0) out.push_back(g);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool MemoryTree::packable(const Context& context) const {
    if (context.packed || context.classes.empty()) return false;
    for (auto child : children(context)) {
        auto it = contexts_.find(child);
        if (it == contexts_.end() || !it->second.packed) return false;
    }
    return true;
}

Bits MemoryTree::fingerprint() const {
    BitWriter w;
    const Basis& basis = store_.basis();
    w.put(store_.size(), 32);
    for (ClassId id = static_cast<ClassId>(basis.size()); id < store_.size(); ++id) {
        const Bits enc = phi_encode(store_.at(id), basis);
        w.put(enc.size(), 32);
        w.append(enc);
        w.put(store_.ancestor(id), 16);
    }
    for (ClassId g = 0; g < basis.size(); ++g) {
        const auto s = store_.shadow_of(g);
        w.put(s.has_value());
        if (s) w.put(*s, 16);
    }
    w.put(contexts_.size(), 32);
    for (const auto& [parent, ctx] : contexts_) {
        w.put(parent, 16);
        w.put(ctx.generation, 32);
        w.put(ctx.packed);
        w.put(ctx.pack_encoding.size(), 32);
        w.append(ctx.pack_encoding);
        w.put(ctx.classes.size(), 16);
        for (auto c : ctx.classes) w.put(c, 16);
        w.put(ctx.observations.size(), 16);
        for (const auto& o : ctx.observations) {
            w.put(o.class_id, 16);
            w.put(o.block.size(), 16);
            w.append(o.block);
            w.put(o.qualities.size(), 16);
            w.append(o.qualities);
            w.put(o.actions.size(), 16);
            w.append(o.actions);
        }
    }
    w.put(archive_.size(), 32);
    return std::move(w).bits();
}

}  // namespace laminar
