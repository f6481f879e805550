#pragma once

// Run orchestration: input files, the per-tick loop and the JSON-lines trace.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "laminar/config.hpp"
#include "laminar/io.hpp"

namespace laminar {

inline constexpr const char* kTraceSchema = "laminar-trace/1";

std::string read_text_file(const std::string& path);

/// One frame of '0'/'1' per line; blank lines and '#' comments are skipped.
/// data-error naming the line when a frame has the wrong width.
std::vector<Bits> parse_signal(std::string_view text, std::size_t width);

/// Lines "tick polarity", ticks ascending.
std::vector<ControlEvent> parse_control(std::string_view text);

Basis load_run_basis(const RunConfig& config);

/// 64-bit FNV-1a of a bit string, as 16 hex digits.
std::string bits_digest(std::span<const std::uint8_t> bits);

struct ConditioningSlot {
    Conditioner conditioner;
    ClassId id = 0;
    std::optional<Binding> binding;
    std::size_t streak = 0;
    RunStatus status = RunStatus::running;
};

class Simulation {
public:
    Simulation(RunConfig config, Basis basis);

    nlohmann::json header() const;
    /// Runs one frame (full layer width) and returns its trace record.
    nlohmann::json step(const Bits& input, std::optional<Polarity> control);
    nlohmann::json summary() const;

    const MemoryTree& memory() const noexcept { return memory_; }
    const Router& router() const noexcept { return router_; }
    std::uint64_t ticks() const noexcept { return tick_; }
    std::size_t invariant_failures() const noexcept { return invariant_failures_; }

private:
    void run_conditioning_slots(Bits& frame, nlohmann::json& record);
    void run_training(nlohmann::json& record);

    RunConfig config_;
    SignalLayout layout_;
    Stack stack_;
    MemoryTree memory_;
    Packer packer_;
    Router router_;
    std::vector<ConditioningSlot> slots_;
    Bits zones_;  // engine-owned bits of the signal layer
    std::unique_ptr<GeneratorStrategy> generator_;
    std::unique_ptr<DiscriminatorStrategy> discriminator_;
    std::vector<PendingPatch> pending_;
    std::vector<Disposition> history_;
    HormoneState hormones_;
    DetectorSchedule schedule_;
    PriorityTable priorities_;
    std::vector<Bits> recent_frames_;
    std::optional<Bits> previous_output_;
    std::mt19937_64 rng_;
    std::uint64_t tick_ = 0;
    std::size_t invariant_failures_ = 0;
    std::size_t applied_total_ = 0;
    std::size_t dropped_total_ = 0;
    std::size_t responses_ = 0;
    std::map<std::string, std::size_t> outcomes_;
};

struct RunResult {
    std::size_t ticks = 0;
    std::size_t invariant_failures = 0;
};

/// Writes header, one record per frame and a summary, one JSON object per line.
RunResult simulate(const RunConfig& config, const Basis& basis, const std::vector<Bits>& frames,
                   const std::vector<ControlEvent>& control, std::ostream& trace);

}  // namespace laminar
