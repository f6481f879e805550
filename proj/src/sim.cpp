#include "laminar/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace laminar {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), Errc::data, "cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

namespace {

template <class F>
void for_each_line(std::string_view text, F&& f) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
        if (!line.empty()) f(line_no, line);
    }
}

json region_json(const Region& r) { return json::array({r.begin, r.end}); }

}  // namespace

std::vector<Bits> parse_signal(std::string_view text, std::size_t width) {
    std::vector<Bits> frames;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        const std::string where = "signal line " + std::to_string(line_no) + ": ";
        require(line.find_first_not_of("01") == std::string_view::npos, Errc::data, where + "frame must be 0/1 only");
        require(line.size() == width, Errc::data,
                where + "frame has " + std::to_string(line.size()) + " bits, expected " + std::to_string(width));
        frames.push_back(parse_bits(line));
    });
    return frames;
}

std::vector<ControlEvent> parse_control(std::string_view text) {
    std::vector<ControlEvent> events;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        const std::string where = "control line " + std::to_string(line_no) + ": ";
        std::istringstream in{std::string(line)};
        std::uint64_t tick = 0;
        std::string word, extra;
        require(static_cast<bool>(in >> tick >> word) && !(in >> extra), Errc::data, where + "expected 'tick polarity'");
        require(word == "pleasure" || word == "pain", Errc::data, where + "polarity must be pleasure or pain");
        require(events.empty() || events.back().tick < tick, Errc::data, where + "ticks must be strictly ascending");
        events.push_back({tick, word == "pleasure" ? Polarity::pleasure : Polarity::pain});
    });
    return events;
}

Basis load_run_basis(const RunConfig& config) {
    if (config.basis.empty()) return parse_basis(builtin_basis_text());
    return load_basis_file(config.basis);
}

std::string bits_digest(std::span<const std::uint8_t> bits) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (auto b : bits) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// --- simulation -----------------------------------------------------------------------

namespace {

std::vector<ClassId> conditioning_ids(const Basis& basis, const std::string& selection) {
    std::vector<ClassId> ids;
    if (selection == "none") return ids;
    if (selection == "auto") {
        for (std::size_t i = 0; i < basis.size(); ++i) {
            const auto& c = basis.at(i);
            if (!c.is_sentence() && !c.verbs.empty() && qualifies_conditioning(c).ok) ids.push_back(static_cast<ClassId>(i));
        }
        return ids;
    }
    std::string_view rest = selection;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view name = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        const auto idx = basis.find(name);
        require(idx.has_value(), Errc::config, "io.conditioning: no class named '" + std::string(name) + "'");
        ids.push_back(static_cast<ClassId>(*idx));
    }
    return ids;
}

/// First operation the profile does not perform by itself.
std::optional<DerivationStep> first_nonspontaneous(const SimpleClass& cls, const OptionProfile& profile) {
    const auto ops = spontaneous_ops(profile);
    for (auto op : {ClassOp::verb_xor, ClassOp::verb_and, ClassOp::adjective_xor, ClassOp::adjective_and,
                    ClassOp::specialize, ClassOp::argument}) {
        if (ops.allows(op)) continue;
        const std::size_t range = is_noun_op(op) ? cls.noun.mask.span()
                                  : is_verb_op(op) ? cls.verbs.size()
                                                   : cls.adjectives.size();
        for (std::uint16_t l = 0; l < range; ++l)
            for (std::uint16_t m = 0; m < (is_noun_op(op) ? 1 : range); ++m) {
                DerivationStep s{op, l, m, Provenance::internal_speech};
                try {
                    (void)apply_step(cls, s);
                    return s;
                } catch (const Error&) {
                }
            }
    }
    return std::nullopt;
}

}  // namespace

Simulation::Simulation(RunConfig config, Basis basis)
    : config_(std::move(config)),
      layout_(SignalLayout::for_length(config_.stack.layer_length)),
      stack_(config_.stack),
      memory_(ClassStore(std::make_shared<const Basis>(std::move(basis))), config_.memory_window),
      packer_(default_packer(config_.profile, config_.pack)),
      router_(layout_),
      zones_(config_.stack.layer_length, 0),
      generator_(make_generator(config_.generator)),
      discriminator_(make_discriminator(config_.discriminator)),
      hormones_(config_.dynamics),
      priorities_(memory_.store().basis().size(), config_.dynamics.window),
      rng_(config_.seed) {
    config_.validate();
    bool internal_taken = false;
    for (auto id : conditioning_ids(memory_.store().basis(), config_.io_conditioning)) {
        ConditioningSlot slot{Conditioner(memory_.store().basis().at(id)), id, std::nullopt, 0, RunStatus::running};
        const std::size_t width = slot.conditioner.shape().state_width;
        if (width > 0) {
            // The first conditioning class speaks internally, the rest to effectors.
            const auto dir = internal_taken ? SpeechDirection::external : SpeechDirection::internal;
            try {
                slot.binding = router_.route(dir, id, width);
                internal_taken = internal_taken || dir == SpeechDirection::internal;
            } catch (const Error& e) {
                if (e.code() != Errc::capacity && e.code() != Errc::busy) throw;
            }
        }
        slots_.push_back(std::move(slot));
    }
}

json Simulation::header() const {
    json layout = json::object();
    for (const auto& [name, r] : layout_.named()) layout[name] = region_json(r);
    json cfg = json::object();
    for (const auto& [k, v] : config_.entries()) cfg[k] = v;
    json bindings = json::array();
    for (const auto& b : router_.bindings())
        bindings.push_back({{"class", b.class_id}, {"direction", to_string(b.direction)}, {"region", region_json(b.region)}});
    return {{"type", "header"},
            {"schema", kTraceSchema},
            {"profile", config_.profile.name()},
            {"gender", to_string(config_.profile.gender)},
            {"layout", layout},
            {"config", cfg},
            {"basis_classes", memory_.store().basis().size()},
            {"bindings", bindings}};
}

void Simulation::run_conditioning_slots(Bits& frame, json& record) {
    json out = json::array();
    for (auto& slot : slots_) {
        const auto& shape = slot.conditioner.shape();
        const Bits input(frame.begin() + static_cast<std::ptrdiff_t>(layout_.external.begin),
                         frame.begin() + static_cast<std::ptrdiff_t>(layout_.external.begin + shape.input_width));
        Bits state = slot.binding ? read_region(zones_, slot.binding->region) : Bits(shape.state_width, 0);
        const auto next = slot.conditioner.step(input, state);
        const bool was_detected = slot.status == RunStatus::detected;
        if (!next) {
            slot.status = RunStatus::failed;
            slot.streak = 0;
            state.assign(shape.state_width, 0);
            write_region(zones_, layout_.failed, failure_report(slot.id, tick_, SignalLayout::width(layout_.failed)));
        } else {
            state = *next;
            ++slot.streak;
            slot.status = slot.streak >= config_.io_horizon ? RunStatus::detected : RunStatus::running;
        }
        if (slot.binding) {
            write_region(zones_, slot.binding->region, state);
            write_region(frame, slot.binding->region, state);
        }
        json entry{{"class", slot.id}, {"status", to_string(slot.status)}, {"streak", slot.streak}};
        if (slot.binding) entry["direction"] = to_string(slot.binding->direction);

        // A class speaking internally asks for one operation the memory would
        // not perform on its own, once per detection.
        if (slot.status == RunStatus::detected && !was_detected && router_.internal_holder() == slot.id) {
            const ClassId target = slot.id;
            const auto& cls = memory_.store().at(memory_.store().shadow_of(target).value_or(target));
            if (const auto step = first_nonspontaneous(cls, config_.profile)) {
                try {
                    const ClassId made = invoke_nonspontaneous({target, *step}, slot.id, router_, memory_.store());
                    entry["operation"] = {{"op", to_string(step->op)}, {"l", step->l}, {"m", step->m}, {"local", made}};
                } catch (const Error& e) {
                    entry["operation_error"] = std::string(to_string(e.code()));
                }
            }
        }
        out.push_back(std::move(entry));
    }
    record["conditioning"] = std::move(out);
}

void Simulation::run_training(json& record) {
    const ClassStore& store = memory_.store();
    for (const auto& [id, ctx] : memory_.contexts()) {
        TestTree tree;
        try {
            tree = imaginator_generate(id, memory_, *generator_, *discriminator_, rng_);
        } catch (const Error& e) {
            if (e.code() != Errc::scope) throw;
            continue;
        }
        if (tree.items.empty()) continue;
        const SimpleClass& parent = store.at(store.shadow_of(id).value_or(id));
        const GaResult ga = genetic_search(parent, tree, store, config_.profile, config_.ga, rng_);
        const auto& best = ga.ranked.front();
        record["training"] = {{"parent", id},
                              {"items", tree.items.size()},
                              {"best_per_generation", ga.best_per_generation},
                              {"best_fitness", best.fitness},
                              {"best_steps", best.steps},
                              {"generator_reinforcements", generator_->reinforcements()},
                              {"discriminator_negatives", discriminator_->negatives()}};
        return;
    }
    record["training"] = nullptr;
}

json Simulation::step(const Bits& input, std::optional<Polarity> control) {
    require(input.size() == config_.stack.layer_length, Errc::data, "frame width differs from the layer length");
    json record{{"type", "tick"}, {"tick", tick_}};

    // Engine-owned zones overwrite whatever the receptors sent there.
    Bits frame = input;
    write_region(zones_, layout_.emotions, emotions_bits(history_, SignalLayout::width(layout_.emotions)));
    write_region(zones_, layout_.ego, Bits{});
    for (const auto& [name, r] : layout_.named())
        if (name != "external") write_region(frame, r, read_region(zones_, r));
    run_conditioning_slots(frame, record);

    Resolution res = resolve_sigma(memory_, stack_, frame, layout_, config_.profile, packer_, config_.decision);
    memory_ = std::move(res.memory);

    // Invariants checked on every tick.
    std::vector<Block> blocks;
    for (const auto& o : res.trace.objects) blocks.push_back(o.block);
    const bool disjoint = pairwise_disjoint(blocks);
    const bool routed = router_.consistent();
    const bool single_internal =
        std::count_if(router_.bindings().begin(), router_.bindings().end(),
                      [](const Binding& b) { return b.direction == SpeechDirection::internal; }) <= 1;
    if (!disjoint || !routed || !single_internal) ++invariant_failures_;

    for (const auto& level : res.trace.levels)
        for (const auto& s : level.sentences) discriminator_->learn(s.constituents);

    json patches = json::array();
    for (std::size_t i = 0; i < res.records.size(); ++i) {
        const auto& rec = res.records[i];
        const auto it = memory_.contexts().find(rec.target);
        pending_.push_back({rec, it == memory_.contexts().end() ? Sequence{} : it->second.classes});
        history_.push_back({rec.patch, true});
        patches.push_back({{"patch", rec.patch}, {"target", rec.target}, {"after", bits_digest(res.applied[i].after)}});
    }
    for (std::size_t i = 0; i < res.dropped; ++i) history_.push_back({0, false});

    std::size_t pain_dropped = 0;
    json dispositions = json::array();
    if (control) {
        const auto out = apply_control({tick_, *control}, pending_, *generator_, *discriminator_, memory_);
        for (const auto& d : out) {
            dispositions.push_back({{"patch", d.patch}, {"applied", d.applied}});
            if (!d.applied) {
                history_.push_back(d);
                ++pain_dropped;
            }
        }
    }
    const std::size_t applied = res.applied.size();
    const std::size_t dropped = res.dropped + pain_dropped;
    applied_total_ += applied;
    dropped_total_ += dropped;
    ++outcomes_[std::string(to_string(res.outcome))];
    if (res.response) ++responses_;

    // Dynamics.
    hormones_.accumulate(tick_, applied, dropped);
    const Frequencies freq = detector_frequencies(hormones_);
    recent_frames_.push_back(read_region(frame, layout_.external));
    if (recent_frames_.size() > config_.dynamics.window) recent_frames_.erase(recent_frames_.begin());
    const auto runs = schedule_.step(freq, config_.dynamics.window);
    json detector = nullptr;
    if (runs.discriminator || runs.generator) {
        const auto report = detector_scan(recent_frames_, config_.detector);
        detector = json::object();
        if (runs.discriminator) {
            json masks = json::array();
            for (const auto& m : report.masks) masks.push_back(to_string(m));
            detector["masks"] = masks;
        }
        if (runs.generator) {
            json seqs = json::array();
            for (const auto& s : report.sequences) seqs.push_back(to_string(s));
            detector["sequences"] = seqs;
        }
    }

    std::set<ClassId> active_set;
    for (const auto& o : res.trace.objects) active_set.insert(memory_.store().ancestor(o.class_id));
    for (const auto& level : res.trace.levels)
        for (const auto& s : level.sentences) active_set.insert(memory_.store().ancestor(s.noun_id));
    const std::vector<ClassId> active(active_set.begin(), active_set.end());
    const Bits output = read_region(res.trace.frame, layout_.output);
    const IoActivity io = !previous_output_ ? IoActivity::neutral
                          : *previous_output_ == output ? IoActivity::stable
                                                        : IoActivity::churn;
    previous_output_ = output;
    const ActivePriority ap = priorities_.active_priority(active);
    priorities_.record(ap.total);
    priorities_ = update_priorities(std::move(priorities_), {active, control, io, applied, dropped},
                                    config_.profile.gender, config_.dynamics.delta);

    if ((tick_ + 1) % config_.training_interval == 0) run_training(record);

    json levels = json::array();
    for (const auto& l : res.trace.levels) {
        json sentences = json::array();
        for (const auto& s : l.sentences) sentences.push_back(s.noun_id);
        levels.push_back({{"layer", l.layer}, {"projected", l.projected.size()}, {"dropped", l.dropped}, {"sentences", sentences}});
    }
    json decision = json::array();
    for (const auto& d : res.log) {
        json e{{"depth", d.depth}, {"leaves", d.leaves}, {"nodes", d.nodes}, {"outcome", to_string(d.outcome)}};
        if (d.chosen) e["chosen"] = *d.chosen;
        decision.push_back(e);
    }

    record["objects"] = res.trace.objects.size();
    record["levels"] = levels;
    record["forks"] = res.forks.size();
    record["outcome"] = to_string(res.outcome);
    record["decision"] = decision;
    record["response"] = res.response ? json(to_string(*res.response)) : json(nullptr);
    record["patches"] = patches;
    record["dropped"] = dropped;
    record["control"] = control ? json(to_string(*control)) : json(nullptr);
    record["dispositions"] = dispositions;
    record["pending"] = pending_.size();
    record["internal_holder"] = router_.internal_holder() ? json(*router_.internal_holder()) : json(nullptr);
    record["hormones"] = {{"H", hormones_.happiness()}, {"S", hormones_.sadness()}};
    record["omega"] = {{"lD", freq.discriminator}, {"lG", freq.generator}};
    record["priority"] = {{"P", ap.total}, {"average", ap.average}, {"state", to_string(ap.state)}};
    record["detector"] = detector;
    record["memory"] = {{"contexts", memory_.contexts().size()},
                        {"locals", memory_.store().size() - memory_.store().basis().size()},
                        {"digest", bits_digest(memory_.fingerprint())}};
    record["invariants"] = {{"blocks_disjoint", disjoint}, {"router_consistent", routed}, {"single_internal", single_internal}};
    ++tick_;
    return record;
}

json Simulation::summary() const {
    return {{"type", "summary"},
            {"ticks", tick_},
            {"outcomes", outcomes_},
            {"responses", responses_},
            {"applied", applied_total_},
            {"dropped", dropped_total_},
            {"invariant_failures", invariant_failures_},
            {"memory_digest", bits_digest(memory_.fingerprint())}};
}

RunResult simulate(const RunConfig& config, const Basis& basis, const std::vector<Bits>& frames,
                   const std::vector<ControlEvent>& control, std::ostream& trace) {
    Simulation sim(config, basis);
    trace << sim.header().dump() << '\n';
    auto next = control.begin();
    for (const auto& frame : frames) {
        while (next != control.end() && next->tick < sim.ticks()) ++next;
        std::optional<Polarity> polarity;
        if (next != control.end() && next->tick == sim.ticks()) polarity = next->polarity;
        trace << sim.step(frame, polarity).dump() << '\n';
    }
    trace << sim.summary().dump() << '\n';
    return {static_cast<std::size_t>(sim.ticks()), sim.invariant_failures()};
}

}  // namespace laminar
