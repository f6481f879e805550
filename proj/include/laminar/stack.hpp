#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "laminar/bitspace.hpp"
#include "laminar/classes.hpp"

namespace laminar {

using ClassId = std::uint32_t;

/// Global basis plus local classes. A local class may shadow the global
/// class it was derived from; detection then sees the local one instead.
class ClassStore {
public:
    explicit ClassStore(std::shared_ptr<const Basis> basis);

    const Basis& basis() const noexcept { return *basis_; }
    const std::shared_ptr<const Basis>& basis_ptr() const noexcept { return basis_; }

    std::size_t size() const noexcept { return basis_->size() + locals_.size(); }
    bool is_global(ClassId id) const noexcept { return id < basis_->size(); }
    const SimpleClass& at(ClassId id) const;
    /// Global class a local one descends from; identity on global ids.
    ClassId ancestor(ClassId id) const;
    /// 0 for plain nouns, 1 + max constituent level for sentence nouns.
    std::size_t level(ClassId id) const;

    /// capacity-error once the derived-class budget is used up.
    ClassId add_local(SimpleClass cls, ClassId ancestor, bool shadow = true);
    /// Removes the newest local class (and any shadow pointing at it).
    void pop_local();
    void set_shadow(ClassId global, std::optional<ClassId> local);
    std::optional<ClassId> shadow_of(ClassId global) const;

    /// Classes taking part in detection at `level`, shadowing applied.
    std::vector<ClassId> active_classes(std::size_t level) const;
    std::size_t max_level() const noexcept { return max_level_; }

    friend bool operator==(const ClassStore& a, const ClassStore& b) {
        return *a.basis_ == *b.basis_ && a.locals_ == b.locals_ && a.ancestors_ == b.ancestors_ && a.shadows_ == b.shadows_;
    }

private:
    std::shared_ptr<const Basis> basis_;
    std::vector<SimpleClass> locals_;
    std::vector<ClassId> ancestors_;
    std::map<ClassId, ClassId> shadows_;
    std::vector<std::size_t> basis_levels_;
    std::size_t max_level_ = 0;
};

struct ObjectInstance {
    ClassId class_id = 0;
    Block block;
    Bits qualities;  // one per declared quality
    Bits actions;    // one per declared action point
    friend bool operator==(const ObjectInstance&, const ObjectInstance&) = default;
};

struct SentenceRecord {
    ClassId noun_id = 0;
    std::size_t level = 1;
    std::size_t slot_begin = 0;
    std::vector<ClassId> constituents;
    /// Indices of the lower-level items (objects for level 1) the slots came from.
    std::vector<std::size_t> members;
    friend bool operator==(const SentenceRecord&, const SentenceRecord&) = default;
};

struct ActionRecord {
    std::size_t object = 0;   // index into the tick's object list
    std::size_t verb = 0;
    std::size_t trigger = 0;  // object whose qualities fed the verb
    std::size_t address = 0;
    bool value = false;
    friend bool operator==(const ActionRecord&, const ActionRecord&) = default;
};

std::vector<ObjectInstance> detect_objects(const Layer& layer, const ClassStore& store);

template <class T>
std::vector<T> project_dedup(std::span<const T> sequence) {
    std::vector<T> out;
    for (const auto& x : sequence)
        if (out.empty() || !(out.back() == x)) out.push_back(x);
    return out;
}

/// Writes one slot code per noun, back to back from address 0, through
/// excite_mask. capacity-error when the slots run past `limit` addresses.
Layer excite_projection(Layer target, std::span<const ClassId> sequence, const Basis& basis,
                        std::optional<std::size_t> limit = std::nullopt);

/// Slot ids read back from a projection layer, stopping at the first slot
/// without its guard bit.
std::vector<ClassId> read_slots(const Layer& layer, const Basis& basis, std::size_t limit);

/// Sentence nouns of `level` whose slot pattern matches a slot-aligned run
/// within the first `slot_count` slots. Ordered by slot, then class id.
std::vector<SentenceRecord> recognize_sentences(const Layer& layer, const ClassStore& store, std::size_t level,
                                                std::size_t slot_count);

void load_qualities(std::span<ObjectInstance> objects, const Layer& layer, const ClassStore& store);

struct VerbPass {
    Layer layer;
    std::vector<ObjectInstance> objects;
    std::vector<ActionRecord> log;
};

/// Objects in address order, verbs in declaration order, triggers in address
/// order. Each write is visible to every later evaluation.
VerbPass apply_verbs(Layer layer, std::vector<ObjectInstance> objects, const ClassStore& store);

struct StackConfig {
    std::size_t depth = 6;
    std::size_t layer_length = 256;
    /// Bits at the tail of layer 2 holding encoded classes (depth >= 4 only).
    std::size_t class_region = 128;
};

struct LevelTrace {
    std::size_t layer = 0;
    std::vector<ClassId> sequence;   // lower-level nouns in order, before dedup
    std::vector<ClassId> projected;  // written as slots
    std::size_t dropped = 0;         // slots that did not fit
    std::vector<SentenceRecord> sentences;
    friend bool operator==(const LevelTrace&, const LevelTrace&) = default;
};

struct ClassInstall {
    Bits data;
    std::optional<ClassId> installed;
    std::string error;
};

struct TickTrace {
    std::uint64_t tick = 0;
    Bits frame;
    std::vector<ObjectInstance> objects;
    std::vector<LevelTrace> levels;
    std::vector<ActionRecord> actions;
    std::optional<ClassInstall> install;
    std::vector<Bits> layers;  // every layer after the tick
};

class Stack {
public:
    explicit Stack(StackConfig config);

    const StackConfig& config() const noexcept { return config_; }
    std::size_t depth() const noexcept { return layers_.size(); }
    const Layer& layer(std::size_t k) const;
    std::uint64_t ticks() const noexcept { return ticks_; }

    bool has_class_region() const noexcept { return layers_.size() >= 4 && config_.class_region > 0; }
    Region class_region() const;
    /// Encoded class to be written into the class region on the next tick
    /// and decoded at its end.
    void deposit_class_data(std::span<const std::uint8_t> bits);

    TickTrace tick(std::span<const std::uint8_t> frame, ClassStore& store);

private:
    StackConfig config_;
    std::vector<Layer> layers_;
    std::optional<Bits> pending_class_data_;
    std::uint64_t ticks_ = 0;
};

}  // namespace laminar
