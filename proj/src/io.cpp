#include "laminar/io.hpp"

#include <algorithm>

namespace laminar {

Qualification qualifies_conditioning(const SimpleClass& cls) {
    for (const auto& v : cls.verbs) {
        for (Var x : v.poly.vars()) {
            if (!is_quality(x)) continue;
            const auto q = static_cast<QualityId>(var_index(x));
            const bool own = std::any_of(cls.adjectives.begin(), cls.adjectives.end(),
                                         [&](const AdjectivePredicate& a) { return a.output == q; });
            if (!own) return {false, "external-quality"};
        }
    }
    return {};
}

ConditioningShape conditioning_shape(const SimpleClass& cls) {
    const std::size_t span = cls.noun.mask.span();
    std::size_t first = span;
    for (const auto& v : cls.verbs) first = std::min<std::size_t>(first, v.action_point);
    return {first, span - first};
}

Conditioner::Conditioner(SimpleClass cls) {
    const auto q = qualifies_conditioning(cls);
    require(q.ok, Errc::invalid_argument, "class '" + cls.name + "' is not conditioning: " + q.reason);
    require(!cls.is_sentence(), Errc::invalid_argument, "a sentence cannot be a conditioning class");
    shape_ = conditioning_shape(cls);
    store_ = std::make_unique<ClassStore>(std::make_shared<const Basis>(std::vector<SimpleClass>{std::move(cls)}));
}

std::optional<Bits> Conditioner::step(std::span<const std::uint8_t> input, std::span<const std::uint8_t> state) const {
    require(input.size() == shape_.input_width && state.size() == shape_.state_width, Errc::invalid_argument,
            "conditioning input or state has the wrong width");
    const SimpleClass& c = cls();
    const std::size_t span = c.noun.mask.span();
    Layer view(span);
    for (std::size_t i = 0; i < input.size(); ++i) view.set(i, input[i] != 0);
    for (std::size_t i = 0; i < state.size(); ++i) view.set(shape_.input_width + i, state[i] != 0);
    if (!c.noun.mask.matches(view.bits())) return std::nullopt;

    std::vector<ObjectInstance> objects(1);
    objects[0].block = {0, span - 1, 0};
    objects[0].actions.assign(c.noun.actions.size(), 0);
    load_qualities(objects, view, *store_);
    const auto pass = apply_verbs(std::move(view), std::move(objects), *store_);
    if (shape_.state_width == 0) return Bits{};
    return pass.layer.slice(shape_.input_width, span - 1);
}

std::string_view to_string(RunStatus s) noexcept {
    switch (s) {
        case RunStatus::running: return "running";
        case RunStatus::detected: return "detected";
        case RunStatus::failed: return "failed";
    }
    return "?";
}

ConditioningRun run_conditioning(const Conditioner& r, std::span<const Bits> inputs, Bits state, std::size_t horizon) {
    require(horizon >= 1, Errc::invalid_argument, "detection horizon must be positive");
    ConditioningRun out;
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        ++out.frames;
        auto next = r.step(inputs[t], state);
        if (!next) {
            out.status = RunStatus::failed;
            out.failed_at = t;
            return out;
        }
        state = std::move(*next);
        out.states.push_back(state);
        if (out.states.size() >= horizon) {
            out.status = RunStatus::detected;
            return out;
        }
    }
    return out;
}

std::string_view to_string(SpeechDirection d) noexcept {
    return d == SpeechDirection::internal ? "internal" : "external";
}

Binding Router::route(SpeechDirection direction, ClassId id, std::size_t width) {
    width = std::max<std::size_t>(width, 1);
    Binding b{id, direction, {}};
    if (direction == SpeechDirection::internal) {
        require(!internal_, Errc::busy, "the internal speech slot is taken by class " + std::to_string(internal_.value_or(0)));
        require(width <= SignalLayout::width(layout_.internal), Errc::capacity, "state wider than the internal area");
        b.region = {layout_.internal.begin, layout_.internal.begin + width - 1};
        internal_ = id;
    } else {
        std::size_t at = layout_.output.begin;
        for (const auto& x : bindings_)
            if (x.direction == SpeechDirection::external) at = std::max(at, x.region.end + 1);
        require(at + width - 1 <= layout_.output.end, Errc::capacity, "no room left in the output segment");
        b.region = {at, at + width - 1};
    }
    bindings_.push_back(b);
    return b;
}

void Router::release(ClassId id) {
    if (internal_ == id) internal_.reset();
    std::erase_if(bindings_, [&](const Binding& b) { return b.class_id == id; });
}

bool Router::consistent() const {
    std::size_t internal = 0;
    for (std::size_t i = 0; i < bindings_.size(); ++i) {
        const auto& b = bindings_[i];
        if (b.region.intersects(layout_.external)) return false;
        if (b.direction == SpeechDirection::internal) {
            ++internal;
            if (b.region.begin < layout_.internal.begin || b.region.end > layout_.internal.end) return false;
        }
        for (std::size_t j = i + 1; j < bindings_.size(); ++j)
            if (b.region.intersects(bindings_[j].region)) return false;
    }
    return internal <= 1;
}

ClassId invoke_nonspontaneous(const OperationRequest& request, ClassId requester, const Router& router,
                              ClassStore& store) {
    require(router.internal_holder() == requester, Errc::forbidden,
            "class operations can only be requested through internal speech");
    DerivationStep step = request.step;
    step.provenance = Provenance::internal_speech;
    SimpleClass next = apply_step(store.at(request.target), step);
    return store.add_local(std::move(next), store.ancestor(request.target), true);
}

Bits failure_report(ClassId id, std::size_t frame, std::size_t width) {
    BitWriter w;
    const std::size_t half = width / 2;
    w.put(id & ((std::uint64_t{1} << half) - 1), static_cast<unsigned>(half));
    w.put(frame & ((std::uint64_t{1} << (width - half)) - 1), static_cast<unsigned>(width - half));
    return std::move(w).bits();
}

}  // namespace laminar
