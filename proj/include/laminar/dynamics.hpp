#pragma once

// Hormones, Detector learning frequencies and class priorities.

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "laminar/options.hpp"
#include "laminar/stack.hpp"
#include "laminar/training.hpp"

namespace laminar {

struct DynamicsParams {
    double h = 1.0;  // happiness per applied patch
    double s = 1.0;  // sadness per dropped patch
    double k_d = 1.0;
    double k_g = 1.0;
    double delta = 1.0;  // priority step
    std::size_t window = 32;
};

void validate(const DynamicsParams& params);

/// Windowed happiness/sadness. An event at tick t counts while t > now - W.
class HormoneState {
public:
    explicit HormoneState(DynamicsParams params = {});

    void accumulate(std::uint64_t tick, std::size_t applied, std::size_t dropped);
    /// Evicts contributions that left the window at `now`.
    void advance(std::uint64_t now);

    double happiness() const noexcept { return happiness_; }
    double sadness() const noexcept { return sadness_; }
    const DynamicsParams& params() const noexcept { return params_; }

private:
    struct Event {
        std::uint64_t tick;
        double happy;
        double sad;
    };
    DynamicsParams params_;
    std::deque<Event> events_;
    double happiness_ = 0.0;
    double sadness_ = 0.0;
};

struct Frequencies {
    double discriminator = 0.0;  // omega_lD
    double generator = 0.0;      // omega_lG
};

Frequencies detector_frequencies(const HormoneState& state);

/// Turns frequencies (runs per window) into run decisions tick by tick.
class DetectorSchedule {
public:
    struct Runs {
        bool discriminator = false;
        bool generator = false;
    };
    Runs step(const Frequencies& f, std::size_t window);

private:
    double phase_d_ = 0.0;
    double phase_g_ = 0.0;
};

enum class Arousal { neutral, excited, depressed };
std::string_view to_string(Arousal e) noexcept;

struct ActivePriority {
    double total = 0.0;
    double average = 0.0;
    Arousal state = Arousal::neutral;
};

/// One priority per global class, plus the recent totals for the average.
class PriorityTable {
public:
    PriorityTable(std::size_t classes, std::size_t window);

    std::size_t size() const noexcept { return p_.size(); }
    double at(ClassId id) const;
    void add(ClassId id, double amount);
    std::span<const double> values() const noexcept { return p_; }

    /// Sum over the active classes, compared with the running mean of the
    /// recorded totals. argument-error on an unknown class.
    ActivePriority active_priority(std::span<const ClassId> active) const;
    void record(double total);

    friend bool operator==(const PriorityTable&, const PriorityTable&) = default;

private:
    std::vector<double> p_;
    std::deque<double> recent_;
    std::size_t window_;
};

enum class IoActivity { neutral, stable, churn };

struct PriorityEvents {
    std::vector<ClassId> active;
    std::optional<Polarity> external;
    IoActivity io = IoActivity::neutral;
    std::size_t applied = 0;
    std::size_t dropped = 0;
};

/// Net internal change in units of delta: male weighs I/O stability twice,
/// female weighs the patch outcome twice.
int internal_net(IoActivity io, std::size_t applied, std::size_t dropped, Gender gender) noexcept;

PriorityTable update_priorities(PriorityTable table, const PriorityEvents& events, Gender gender, double delta);

}  // namespace laminar
