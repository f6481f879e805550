#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "laminar/options.hpp"
#include "laminar/stack.hpp"

namespace laminar {

/// One sighting of a lower object inside a parent's sentence.
struct Observation {
    std::uint64_t tick = 0;
    ClassId class_id = 0;
    Bits block;      // block bits (empty above the first level)
    Bits qualities;
    Bits actions;
    friend bool operator==(const Observation&, const Observation&) = default;
};

/// Members of one parent noun, plus what was last seen of them.
struct Context {
    ClassId parent = 0;     // global id of the sentence noun
    std::size_t level = 1;  // level of the parent noun
    std::vector<ClassId> classes;  // distinct lower classes, ascending
    std::vector<Observation> observations;  // newest last, bounded by the window
    std::vector<Observation> last_snapshot;  // members seen on the previous sighting
    std::uint32_t generation = 0;  // bumped on every fork
    bool packed = false;
    Bits pack_encoding;  // generator installed by the packing patch
    friend bool operator==(const Context&, const Context&) = default;
};

struct ArchivedContext {
    std::string key;  // triggering quality or action combination
    Context context;
    friend bool operator==(const ArchivedContext&, const ArchivedContext&) = default;
};

struct Modification {
    bool quality = false;
    bool action = false;
};

struct ForkOutcome {
    bool forked = false;
    Context current;
    std::optional<ArchivedContext> archived;
};

/// Static profiles fork on quality changes, dynamic ones on action changes;
/// anything else is modified in place.
ForkOutcome fork_context(const Context& context, Modification modification, const std::string& combination,
                         const OptionProfile& profile);

struct ForkEvent {
    ClassId parent = 0;
    std::string key;
    friend bool operator==(const ForkEvent&, const ForkEvent&) = default;
};

class MemoryTree {
public:
    MemoryTree(ClassStore store, std::size_t window = 16) : store_(std::move(store)), window_(window) {}

    ClassStore& store() noexcept { return store_; }
    const ClassStore& store() const noexcept { return store_; }
    std::size_t window() const noexcept { return window_; }

    const std::map<ClassId, Context>& contexts() const noexcept { return contexts_; }
    std::map<ClassId, Context>& contexts() noexcept { return contexts_; }
    const std::vector<ArchivedContext>& archive() const noexcept { return archive_; }

    /// Records every sentence of the tick into its parent's context.
    std::vector<ForkEvent> observe(const TickTrace& trace, const OptionProfile& profile);

    /// Child contexts of a context: the contexts of its member classes.
    std::vector<ClassId> children(const Context& context) const;

    /// Unpacked, has members, and every child context already packed.
    bool packable(const Context& context) const;

    /// Encoded state; equal fingerprints mean equal memories.
    Bits fingerprint() const;

    friend bool operator==(const MemoryTree&, const MemoryTree&) = default;

private:
    ClassStore store_;
    std::size_t window_;
    std::map<ClassId, Context> contexts_;
    std::vector<ArchivedContext> archive_;
};

}  // namespace laminar
