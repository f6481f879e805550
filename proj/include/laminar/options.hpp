#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "laminar/boolalg.hpp"
#include "laminar/classes.hpp"

namespace laminar {

enum class ContextOption { static_context, dynamic_context };
enum class NounOption { ratio, irratio };
enum class VerbOption { logic, ethics };
enum class AdjectiveOption { intuition, sensorics };
enum class Gender { male, female };

/// The four behavioral dichotomies plus gender. Fixed for a whole run.
struct OptionProfile {
    ContextOption context = ContextOption::static_context;
    NounOption noun = NounOption::ratio;
    VerbOption verb = VerbOption::logic;
    AdjectiveOption adjective = AdjectiveOption::intuition;
    Gender gender = Gender::male;

    /// "static-ratio-logic-intuition"; gender is not part of the name.
    std::string name() const;
    /// Inverse of name(). Raises config-error.
    static OptionProfile from_name(std::string_view name, Gender gender = Gender::male);
    /// key=value fragment accepted by the run configuration.
    std::string config_fragment(bool with_gender = false) const;

    friend bool operator==(const OptionProfile&, const OptionProfile&) = default;
};

std::string_view to_string(ContextOption o) noexcept;
std::string_view to_string(NounOption o) noexcept;
std::string_view to_string(VerbOption o) noexcept;
std::string_view to_string(AdjectiveOption o) noexcept;
std::string_view to_string(Gender g) noexcept;

std::optional<ContextOption> parse_context_option(std::string_view s) noexcept;
std::optional<NounOption> parse_noun_option(std::string_view s) noexcept;
std::optional<VerbOption> parse_verb_option(std::string_view s) noexcept;
std::optional<AdjectiveOption> parse_adjective_option(std::string_view s) noexcept;
std::optional<Gender> parse_gender(std::string_view s) noexcept;

struct SpontaneousOps {
    ClassOp noun;        // specialize or argument
    BoolOp verb;
    BoolOp adjective;

    ClassOp verb_op() const noexcept { return verb == BoolOp::xor_op ? ClassOp::verb_xor : ClassOp::verb_and; }
    ClassOp adjective_op() const noexcept {
        return adjective == BoolOp::xor_op ? ClassOp::adjective_xor : ClassOp::adjective_and;
    }
    bool allows(ClassOp op) const noexcept { return op == noun || op == verb_op() || op == adjective_op(); }

    friend bool operator==(const SpontaneousOps&, const SpontaneousOps&) = default;
};

SpontaneousOps spontaneous_ops(const OptionProfile& profile) noexcept;

/// All 16 option combinations in canonical order, male first when genders
/// are included (32 entries).
std::vector<OptionProfile> all_profiles(bool with_gender = false);

}  // namespace laminar
