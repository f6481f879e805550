#pragma once

// Flat key=value run configuration.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "laminar/decisions.hpp"
#include "laminar/dynamics.hpp"
#include "laminar/options.hpp"
#include "laminar/packer.hpp"
#include "laminar/stack.hpp"
#include "laminar/training.hpp"

namespace laminar {

struct RunConfig {
    OptionProfile profile;
    StackConfig stack;
    std::uint64_t seed = 1;
    std::string basis;  // path; empty selects the built-in basis
    std::size_t memory_window = 16;
    PackParams pack;
    SigmaConfig decision;
    std::size_t io_horizon = 4;
    std::string io_conditioning = "auto";  // "auto", "none" or comma-separated class names
    GaParams ga;
    std::string generator = "frequency";
    std::string discriminator = "ngram";
    std::size_t training_interval = 8;
    DetectorParams detector;
    DynamicsParams dynamics;

    /// config-error on unknown keys or malformed values.
    void set(std::string_view key, std::string_view value);
    /// Every key with its current value, in a fixed order.
    std::vector<std::pair<std::string, std::string>> entries() const;
    void validate() const;
};

/// Lines "key = value"; '#' starts a comment. `origin` names the source in errors.
RunConfig parse_config(std::string_view text, std::string_view origin = "config");
void apply_config(RunConfig& config, std::string_view text, std::string_view origin = "config");

/// Applies LAMINAR_<KEY> variables, the key upper-cased with '.' as '_'.
void apply_env_overrides(RunConfig& config, const std::map<std::string, std::string>& env);
std::map<std::string, std::string> laminar_environment();

/// The basis used when the configuration names none.
std::string_view builtin_basis_text();

}  // namespace laminar
