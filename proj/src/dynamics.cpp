#include "laminar/dynamics.hpp"

#include <cmath>
#include <numeric>

namespace laminar {

void validate(const DynamicsParams& p) {
    for (double v : {p.h, p.s, p.k_d, p.k_g, p.delta})
        require(std::isfinite(v) && v >= 0.0, Errc::config, "dynamics constants must be finite and nonnegative");
    require(p.window >= 1, Errc::config, "dynamics window must be positive");
}

HormoneState::HormoneState(DynamicsParams params) : params_(params) { validate(params_); }

void HormoneState::advance(std::uint64_t now) {
    while (!events_.empty() && events_.front().tick + params_.window <= now) {
        happiness_ -= events_.front().happy;
        sadness_ -= events_.front().sad;
        events_.pop_front();
    }
    if (events_.empty()) happiness_ = sadness_ = 0.0;  // no drift from rounding
}

void HormoneState::accumulate(std::uint64_t tick, std::size_t applied, std::size_t dropped) {
    advance(tick);
    if (applied == 0 && dropped == 0) return;
    const Event e{tick, params_.h * static_cast<double>(applied), params_.s * static_cast<double>(dropped)};
    events_.push_back(e);
    happiness_ += e.happy;
    sadness_ += e.sad;
}

Frequencies detector_frequencies(const HormoneState& state) {
    return {state.params().k_d * state.happiness(), state.params().k_g * state.sadness()};
}

DetectorSchedule::Runs DetectorSchedule::step(const Frequencies& f, std::size_t window) {
    const double w = static_cast<double>(window);
    Runs runs;
    phase_d_ += f.discriminator / w;
    phase_g_ += f.generator / w;
    if (phase_d_ >= 1.0) {
        runs.discriminator = true;
        phase_d_ = std::fmod(phase_d_, 1.0);
    }
    if (phase_g_ >= 1.0) {
        runs.generator = true;
        phase_g_ = std::fmod(phase_g_, 1.0);
    }
    return runs;
}

std::string_view to_string(Arousal e) noexcept {
    switch (e) {
        case Arousal::excited: return "excited";
        case Arousal::depressed: return "depressed";
        case Arousal::neutral: break;
    }
    return "neutral";
}

PriorityTable::PriorityTable(std::size_t classes, std::size_t window) : p_(classes, 0.0), window_(window) {
    require(window >= 1, Errc::config, "priority window must be positive");
}

double PriorityTable::at(ClassId id) const {
    require(id < p_.size(), Errc::invalid_argument, "class " + std::to_string(id) + " has no priority");
    return p_[id];
}

void PriorityTable::add(ClassId id, double amount) {
    require(id < p_.size(), Errc::invalid_argument, "class " + std::to_string(id) + " has no priority");
    p_[id] += amount;
}

ActivePriority PriorityTable::active_priority(std::span<const ClassId> active) const {
    ActivePriority out;
    for (auto id : active) out.total += at(id);
    out.average = recent_.empty() ? out.total
                                  : std::accumulate(recent_.begin(), recent_.end(), 0.0) / static_cast<double>(recent_.size());
    if (out.total > out.average) {
        out.state = Arousal::excited;
    } else if (out.total < out.average) {
        out.state = Arousal::depressed;
    }
    return out;
}

void PriorityTable::record(double total) {
    recent_.push_back(total);
    if (recent_.size() > window_) recent_.pop_front();
}

int internal_net(IoActivity io, std::size_t applied, std::size_t dropped, Gender gender) noexcept {
    const int s = io == IoActivity::stable ? 1 : io == IoActivity::churn ? -1 : 0;
    const int a = applied > dropped ? 1 : applied < dropped ? -1 : 0;
    return gender == Gender::male ? 2 * s + a : s + 2 * a;
}

PriorityTable update_priorities(PriorityTable table, const PriorityEvents& events, Gender gender, double delta) {
    int net = internal_net(events.io, events.applied, events.dropped, gender);
    if (events.external) net += *events.external == Polarity::pleasure ? 1 : -1;
    if (net != 0)
        for (auto id : events.active) table.add(id, delta * net);
    return table;
}

}  // namespace laminar
