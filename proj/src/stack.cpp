#include "laminar/stack.hpp"

#include <algorithm>
#include <set>

namespace laminar {

// --- class store ---------------------------------------------------------------

ClassStore::ClassStore(std::shared_ptr<const Basis> basis) : basis_(std::move(basis)) {
    require(basis_ != nullptr, Errc::invalid_argument, "class store needs a basis");
    const std::size_t n = basis_->size();
    constexpr std::size_t unknown = static_cast<std::size_t>(-1);
    basis_levels_.assign(n, unknown);
    // Levels settle in at most n rounds; anything still unknown is a cycle.
    for (std::size_t round = 0; round <= n; ++round) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (basis_levels_[i] != unknown) continue;
            const auto& cls = basis_->at(i);
            if (!cls.is_sentence()) {
                basis_levels_[i] = 0;
                changed = true;
                continue;
            }
            std::size_t level = 0;
            bool ready = true;
            for (const auto& slot : cls.sentence) {
                if (!slot) continue;
                if (basis_levels_[*slot] == unknown) {
                    ready = false;
                    break;
                }
                level = std::max(level, basis_levels_[*slot]);
            }
            if (ready) {
                basis_levels_[i] = level + 1;
                changed = true;
            }
        }
        if (!changed) break;
    }
    for (std::size_t i = 0; i < n; ++i) {
        require(basis_levels_[i] != unknown, Errc::invalid_argument,
                "sentence of '" + basis_->at(i).name + "' refers back to itself");
        max_level_ = std::max(max_level_, basis_levels_[i]);
    }
}

const SimpleClass& ClassStore::at(ClassId id) const {
    if (is_global(id)) return basis_->at(id);
    const std::size_t local = id - basis_->size();
    require(local < locals_.size(), Errc::invalid_argument, "unknown class id " + std::to_string(id));
    return locals_[local];
}

ClassId ClassStore::ancestor(ClassId id) const {
    if (is_global(id)) return id;
    const std::size_t local = id - basis_->size();
    require(local < locals_.size(), Errc::invalid_argument, "unknown class id " + std::to_string(id));
    return ancestors_[local];
}

std::size_t ClassStore::level(ClassId id) const { return basis_levels_[ancestor(id)]; }

ClassId ClassStore::add_local(SimpleClass cls, ClassId anc, bool shadow) {
    anc = ancestor(anc);
    require(size() < basis_->id_capacity(), Errc::capacity, "derived-class budget exhausted");
    validate_class(cls);
    const auto id = static_cast<ClassId>(size());
    locals_.push_back(std::move(cls));
    ancestors_.push_back(anc);
    if (shadow) shadows_[anc] = id;
    return id;
}

void ClassStore::pop_local() {
    require(!locals_.empty(), Errc::invalid_argument, "no local class to remove");
    const auto id = static_cast<ClassId>(size() - 1);
    std::erase_if(shadows_, [&](const auto& kv) { return kv.second == id; });
    locals_.pop_back();
    ancestors_.pop_back();
}

void ClassStore::set_shadow(ClassId global, std::optional<ClassId> local) {
    require(is_global(global), Errc::invalid_argument, "only global classes can be shadowed");
    if (!local) {
        shadows_.erase(global);
        return;
    }
    require(!is_global(*local) && ancestor(*local) == global, Errc::invalid_argument,
            "shadow must be a local descendant of the global class");
    shadows_[global] = *local;
}

std::optional<ClassId> ClassStore::shadow_of(ClassId global) const {
    auto it = shadows_.find(global);
    if (it == shadows_.end()) return std::nullopt;
    return it->second;
}

std::vector<ClassId> ClassStore::active_classes(std::size_t lvl) const {
    std::vector<ClassId> out;
    for (ClassId i = 0; i < basis_->size(); ++i) {
        if (basis_levels_[i] != lvl) continue;
        out.push_back(shadow_of(i).value_or(i));
    }
    return out;
}

// --- detection and projection ----------------------------------------------------

std::vector<ObjectInstance> detect_objects(const Layer& layer, const ClassStore& store) {
    const auto ids = store.active_classes(0);
    std::vector<Mask> masks;
    masks.reserve(ids.size());
    for (auto id : ids) masks.push_back(store.at(id).noun.mask);
    std::vector<ObjectInstance> out;
    for (const auto& b : cover_layer(layer, masks)) {
        ObjectInstance o;
        o.class_id = ids[b.mask_id];
        o.block = b;
        const auto& cls = store.at(o.class_id);
        o.qualities.assign(cls.noun.qualities.size(), 0);
        for (auto a : cls.noun.actions) o.actions.push_back(layer.get(b.begin + a) ? 1 : 0);
        out.push_back(std::move(o));
    }
    return out;
}

Layer excite_projection(Layer target, std::span<const ClassId> sequence, const Basis& basis,
                        std::optional<std::size_t> limit) {
    const std::size_t w = basis.slot_width();
    const std::size_t room = std::min(limit.value_or(target.size()), target.size());
    require(sequence.size() * w <= room, Errc::capacity,
            std::to_string(sequence.size()) + " slots of width " + std::to_string(w) + " do not fit " +
                std::to_string(room) + " addresses");
    for (std::size_t k = 0; k < sequence.size(); ++k)
        target = excite_mask(std::move(target), basis.slot_mask(sequence[k]), k * w).layer;
    return target;
}

std::vector<ClassId> read_slots(const Layer& layer, const Basis& basis, std::size_t limit) {
    const std::size_t w = basis.slot_width();
    limit = std::min(limit, layer.size());
    std::vector<ClassId> out;
    for (std::size_t at = 0; at + w <= limit; at += w) {
        if (!layer.get(at)) break;
        ClassId id = 0;
        for (std::size_t b = 1; b < w; ++b) id = (id << 1) | (layer.get(at + b) ? 1u : 0u);
        out.push_back(id);
    }
    return out;
}

std::vector<SentenceRecord> recognize_sentences(const Layer& layer, const ClassStore& store, std::size_t level,
                                                std::size_t slot_count) {
    const std::size_t w = store.basis().slot_width();
    const auto slots = read_slots(layer, store.basis(), slot_count * w);
    // The slots themselves are excitations; a one-slot sentence has the same
    // mask as its slot and would otherwise be suppressed.
    Layer plain = layer;
    plain.clear_excited();
    std::vector<SentenceRecord> out;
    for (auto id : store.active_classes(level)) {
        const auto& cls = store.at(id);
        const std::size_t n = cls.sentence.size();
        if (n == 0) continue;
        for (auto o : detect_mask(plain, cls.noun.mask)) {
            if (o % w != 0 || o / w + n > slots.size()) continue;
            SentenceRecord r;
            r.noun_id = id;
            r.level = level;
            r.slot_begin = o / w;
            r.constituents.assign(slots.begin() + static_cast<std::ptrdiff_t>(r.slot_begin),
                                  slots.begin() + static_cast<std::ptrdiff_t>(r.slot_begin + n));
            out.push_back(std::move(r));
        }
    }
    std::sort(out.begin(), out.end(), [](const SentenceRecord& a, const SentenceRecord& b) {
        return std::tie(a.slot_begin, a.noun_id) < std::tie(b.slot_begin, b.noun_id);
    });
    return out;
}

// --- qualities and verbs ---------------------------------------------------------------

namespace {

std::size_t index_of(std::span<const QualityId> qualities, QualityId q) {
    return static_cast<std::size_t>(std::find(qualities.begin(), qualities.end(), q) - qualities.begin());
}

}  // namespace

void load_qualities(std::span<ObjectInstance> objects, const Layer& layer, const ClassStore& store) {
    for (auto& o : objects) {
        const auto& cls = store.at(o.class_id);
        const Bits block = read_block(layer, o.block);
        o.qualities.assign(cls.noun.qualities.size(), 0);
        for (const auto& adj : cls.adjectives) {
            const bool value = adj.poly.eval([&](Var v) { return block.at(var_index(v)) != 0; });
            o.qualities[index_of(cls.noun.qualities, adj.output)] = value ? 1 : 0;
        }
    }
}

VerbPass apply_verbs(Layer layer, std::vector<ObjectInstance> objects, const ClassStore& store) {
    std::vector<std::size_t> order(objects.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return objects[a].block.begin < objects[b].block.begin; });

    std::vector<ActionRecord> log;
    for (auto d : order) {
        const auto& cls_d = store.at(objects[d].class_id);
        for (std::size_t vi = 0; vi < cls_d.verbs.size(); ++vi) {
            const auto& verb = cls_d.verbs[vi];
            std::vector<QualityId> linked;
            for (Var v : verb.poly.vars())
                if (is_quality(v)) linked.push_back(static_cast<QualityId>(var_index(v)));
            for (auto b : order) {
                const auto& cls_b = store.at(objects[b].class_id);
                const auto& declared = cls_b.noun.qualities;
                const bool triggers = std::all_of(linked.begin(), linked.end(), [&](QualityId q) {
                    return std::find(declared.begin(), declared.end(), q) != declared.end();
                });
                if (!triggers) continue;
                const std::size_t base = objects[d].block.begin;
                const bool value = verb.poly.eval([&](Var v) {
                    if (is_quality(v))
                        return objects[b].qualities[index_of(declared, static_cast<QualityId>(var_index(v)))] != 0;
                    return layer.get(base + var_index(v));
                });
                const std::size_t address = base + verb.action_point;
                layer.set(address, value);
                const auto& actions = cls_d.noun.actions;
                const auto slot = static_cast<std::size_t>(
                    std::find(actions.begin(), actions.end(), verb.action_point) - actions.begin());
                if (slot < objects[d].actions.size()) objects[d].actions[slot] = value ? 1 : 0;
                log.push_back({d, vi, b, address, value});
            }
        }
    }
    return {std::move(layer), std::move(objects), std::move(log)};
}

// --- stack --------------------------------------------------------------------------------

Stack::Stack(StackConfig config) : config_(config) {
    require(config_.depth >= 1, Errc::invalid_argument, "stack depth must be positive");
    require(config_.layer_length >= 1, Errc::invalid_argument, "layer length must be positive");
    if (config_.depth >= 4)
        require(config_.class_region < config_.layer_length, Errc::invalid_argument,
                "class region must leave room for projections");
    for (std::size_t k = 0; k < config_.depth; ++k) layers_.emplace_back(config_.layer_length);
}

const Layer& Stack::layer(std::size_t k) const {
    require(k < layers_.size(), Errc::invalid_argument, "layer " + std::to_string(k) + " outside the stack");
    return layers_[k];
}

Region Stack::class_region() const {
    require(has_class_region(), Errc::invalid_argument, "this stack has no class region");
    return {config_.layer_length - config_.class_region, config_.layer_length - 1};
}

void Stack::deposit_class_data(std::span<const std::uint8_t> bits) {
    const Region r = class_region();
    require(bits.size() <= r.end - r.begin + 1, Errc::capacity, "class encoding longer than the class region");
    pending_class_data_ = Bits(bits.begin(), bits.end());
}

namespace {

struct Run {
    ClassId id;
    std::vector<std::size_t> members;
};

}  // namespace

TickTrace Stack::tick(std::span<const std::uint8_t> frame, ClassStore& store) {
    require(frame.size() == config_.layer_length, Errc::invalid_argument,
            "frame has " + std::to_string(frame.size()) + " bits, signal layer has " +
                std::to_string(config_.layer_length));
    TickTrace trace;
    trace.tick = ticks_++;
    trace.frame.assign(frame.begin(), frame.end());

    for (auto& l : layers_) {
        l.clear_excited();
        l.clear_bits();
    }
    for (std::size_t i = 0; i < frame.size(); ++i)
        if (frame[i]) layers_[0].set(i, true);

    std::optional<Bits> class_data = std::move(pending_class_data_);
    pending_class_data_.reset();
    if (class_data && has_class_region()) {
        const Region r = class_region();
        for (std::size_t i = 0; i < class_data->size(); ++i) layers_[2].set(r.begin + i, (*class_data)[i] != 0);
    }

    trace.objects = detect_objects(layers_[0], store);
    load_qualities(trace.objects, layers_[0], store);

    const Basis& basis = store.basis();
    const std::size_t w = basis.slot_width();
    // Ancestor ids of the current level's items, in layer order.
    std::vector<ClassId> items;
    for (const auto& o : trace.objects) items.push_back(store.ancestor(o.class_id));

    for (std::size_t k = 1; k < layers_.size(); ++k) {
        LevelTrace lt;
        lt.layer = k;
        lt.sequence = items;

        // Keep only nouns some sentence of this level can use.
        std::optional<std::set<ClassId>> wanted;
        for (auto id : store.active_classes(k)) {
            const auto& s = store.at(id).sentence;
            if (std::any_of(s.begin(), s.end(), [](const SentenceSlot& x) { return !x.has_value(); })) {
                wanted.reset();
                break;
            }
            if (!wanted) wanted.emplace();
            for (const auto& x : s) wanted->insert(*x);
        }
        std::vector<Run> runs;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (wanted && !wanted->contains(items[i])) continue;
            if (runs.empty() || runs.back().id != items[i]) runs.push_back({items[i], {}});
            runs.back().members.push_back(i);
        }
        const std::size_t room = (k == 2 && has_class_region()) ? config_.layer_length - config_.class_region
                                                                : config_.layer_length;
        const std::size_t fit = room / w;
        if (runs.size() > fit) {
            lt.dropped = runs.size() - fit;
            runs.resize(fit);
        }
        for (const auto& r : runs) lt.projected.push_back(r.id);
        layers_[k] = excite_projection(std::move(layers_[k]), lt.projected, basis, room);

        const bool recognize = k + 1 < layers_.size();
        items.clear();
        if (recognize) {
            lt.sentences = recognize_sentences(layers_[k], store, k, runs.size());
            for (auto& s : lt.sentences) {
                for (std::size_t j = 0; j < s.constituents.size(); ++j) {
                    const auto& m = runs[s.slot_begin + j].members;
                    s.members.insert(s.members.end(), m.begin(), m.end());
                }
                items.push_back(store.ancestor(s.noun_id));
            }
        }
        trace.levels.push_back(std::move(lt));
        if (!recognize) break;
    }

    // Verbs act inside each first-level sentence context.
    if (trace.levels.size() >= 1) {
        for (const auto& s : trace.levels[0].sentences) {
            std::vector<ObjectInstance> context;
            for (auto m : s.members) context.push_back(trace.objects[m]);
            auto pass = apply_verbs(std::move(layers_[0]), std::move(context), store);
            layers_[0] = std::move(pass.layer);
            for (std::size_t j = 0; j < s.members.size(); ++j) trace.objects[s.members[j]] = pass.objects[j];
            for (auto rec : pass.log) {
                rec.object = s.members[rec.object];
                rec.trigger = s.members[rec.trigger];
                trace.actions.push_back(rec);
            }
        }
    }

    if (class_data && has_class_region()) {
        ClassInstall install;
        const Region r = class_region();
        install.data = layers_[2].slice(r.begin, r.end);
        if (std::any_of(install.data.begin(), install.data.end(), [](std::uint8_t b) { return b != 0; })) {
            try {
                SimpleClass cls = phi_decode(install.data, basis);
                const ClassId anc = cls.origin->basis_index;
                install.installed = store.add_local(std::move(cls), anc, true);
            } catch (const Error& e) {
                install.error = e.what();
            }
        }
        trace.install = std::move(install);
    }

    for (const auto& l : layers_) trace.layers.push_back(l.bits());
    return trace;
}

}  // namespace laminar
