#pragma once

// Conditioning classes (self-contained automata run outside the stack),
// speech routing and the internal-speech gate for non-spontaneous
// operations.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "laminar/layout.hpp"
#include "laminar/options.hpp"
#include "laminar/stack.hpp"

namespace laminar {

struct Qualification {
    bool ok = true;
    std::string reason;  // "external-quality" when a verb reads a foreign quality
};

Qualification qualifies_conditioning(const SimpleClass& cls);

/// Block positions below the first action point are input; the rest is
/// state kept in the class's private region between frames.
struct ConditioningShape {
    std::size_t input_width = 0;
    std::size_t state_width = 0;
};
ConditioningShape conditioning_shape(const SimpleClass& cls);

/// A qualified class ready to run frame by frame.
class Conditioner {
public:
    /// invalid-argument when the class does not qualify.
    explicit Conditioner(SimpleClass cls);

    const SimpleClass& cls() const noexcept { return store_->at(0); }
    const ConditioningShape& shape() const noexcept { return shape_; }

    /// New state, or nullopt when the mask fails on (input, state).
    std::optional<Bits> step(std::span<const std::uint8_t> input, std::span<const std::uint8_t> state) const;

private:
    std::unique_ptr<ClassStore> store_;
    ConditioningShape shape_;
};

enum class RunStatus { running, detected, failed };
std::string_view to_string(RunStatus s) noexcept;

struct ConditioningRun {
    RunStatus status = RunStatus::running;
    std::size_t frames = 0;  // frames consumed
    std::optional<std::size_t> failed_at;
    std::vector<Bits> states;  // state after each applied frame
};

/// Steps through `inputs` until the mask fails (failed), it has applied on
/// `horizon` consecutive frames (detected), or inputs run out (running).
ConditioningRun run_conditioning(const Conditioner& r, std::span<const Bits> inputs, Bits state, std::size_t horizon);

enum class SpeechDirection { external, internal };
std::string_view to_string(SpeechDirection d) noexcept;

struct Binding {
    ClassId class_id = 0;
    SpeechDirection direction = SpeechDirection::external;
    Region region;  // private state region in the signal layer
    friend bool operator==(const Binding&, const Binding&) = default;
};

class Router {
public:
    explicit Router(SignalLayout layout) : layout_(layout) {}

    /// busy-error when the internal slot is taken; capacity-error when the
    /// output segment has no room.
    Binding route(SpeechDirection direction, ClassId id, std::size_t width);
    void release(ClassId id);

    std::optional<ClassId> internal_holder() const noexcept { return internal_; }
    const std::vector<Binding>& bindings() const noexcept { return bindings_; }
    const SignalLayout& layout() const noexcept { return layout_; }

    /// Bindings pairwise disjoint, internal inside the internal area,
    /// nothing over the external input.
    bool consistent() const;

private:
    SignalLayout layout_;
    std::optional<ClassId> internal_;
    std::vector<Binding> bindings_;
};

struct OperationRequest {
    ClassId target = 0;
    DerivationStep step;
};

/// Runs one class operation asked for by `requester`, which must hold the
/// internal slot (forbidden-error otherwise). The result is tagged as
/// internal speech and installed as a local shadow of the target's ancestor.
ClassId invoke_nonspontaneous(const OperationRequest& request, ClassId requester, const Router& router,
                              ClassStore& store);

/// Failure report written to the failed zone: class id then frame index.
Bits failure_report(ClassId id, std::size_t frame, std::size_t width);

}  // namespace laminar
