#include "laminar/options.hpp"

namespace laminar {

std::string_view to_string(ContextOption o) noexcept { return o == ContextOption::static_context ? "static" : "dynamic"; }
std::string_view to_string(NounOption o) noexcept { return o == NounOption::ratio ? "ratio" : "irratio"; }
std::string_view to_string(VerbOption o) noexcept { return o == VerbOption::logic ? "logic" : "ethics"; }
std::string_view to_string(AdjectiveOption o) noexcept { return o == AdjectiveOption::intuition ? "intuition" : "sensorics"; }
std::string_view to_string(Gender g) noexcept { return g == Gender::male ? "male" : "female"; }

std::optional<ContextOption> parse_context_option(std::string_view s) noexcept {
    if (s == "static") return ContextOption::static_context;
    if (s == "dynamic") return ContextOption::dynamic_context;
    return std::nullopt;
}

std::optional<NounOption> parse_noun_option(std::string_view s) noexcept {
    if (s == "ratio") return NounOption::ratio;
    if (s == "irratio") return NounOption::irratio;
    return std::nullopt;
}

std::optional<VerbOption> parse_verb_option(std::string_view s) noexcept {
    if (s == "logic") return VerbOption::logic;
    if (s == "ethics") return VerbOption::ethics;
    return std::nullopt;
}

std::optional<AdjectiveOption> parse_adjective_option(std::string_view s) noexcept {
    if (s == "intuition") return AdjectiveOption::intuition;
    if (s == "sensorics") return AdjectiveOption::sensorics;
    return std::nullopt;
}

std::optional<Gender> parse_gender(std::string_view s) noexcept {
    if (s == "male") return Gender::male;
    if (s == "female") return Gender::female;
    return std::nullopt;
}

std::string OptionProfile::name() const {
    std::string s(to_string(context));
    s += '-';
    s += to_string(noun);
    s += '-';
    s += to_string(verb);
    s += '-';
    s += to_string(adjective);
    return s;
}

OptionProfile OptionProfile::from_name(std::string_view name, Gender gender) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (pos <= name.size()) {
        const std::size_t dash = std::min(name.find('-', pos), name.size());
        parts.push_back(name.substr(pos, dash - pos));
        pos = dash + 1;
    }
    require(parts.size() == 4, Errc::config, "profile name '" + std::string(name) + "' needs four parts");
    const auto c = parse_context_option(parts[0]);
    const auto n = parse_noun_option(parts[1]);
    const auto v = parse_verb_option(parts[2]);
    const auto a = parse_adjective_option(parts[3]);
    require(c && n && v && a, Errc::config, "unknown profile name '" + std::string(name) + "'");
    return {*c, *n, *v, *a, gender};
}

std::string OptionProfile::config_fragment(bool with_gender) const {
    std::string s = "option.context=" + std::string(to_string(context)) + " option.noun=" + std::string(to_string(noun)) +
                    " option.verb=" + std::string(to_string(verb)) + " option.adjective=" + std::string(to_string(adjective));
    if (with_gender) s += " gender=" + std::string(to_string(gender));
    return s;
}

SpontaneousOps spontaneous_ops(const OptionProfile& p) noexcept {
    return {p.noun == NounOption::ratio ? ClassOp::specialize : ClassOp::argument,
            p.verb == VerbOption::logic ? BoolOp::xor_op : BoolOp::and_op,
            p.adjective == AdjectiveOption::intuition ? BoolOp::xor_op : BoolOp::and_op};
}

std::vector<OptionProfile> all_profiles(bool with_gender) {
    std::vector<OptionProfile> out;
    for (int g = 0; g < (with_gender ? 2 : 1); ++g)
        for (int c = 0; c < 2; ++c)
            for (int n = 0; n < 2; ++n)
                for (int v = 0; v < 2; ++v)
                    for (int a = 0; a < 2; ++a)
                        out.push_back({static_cast<ContextOption>(c), static_cast<NounOption>(n), static_cast<VerbOption>(v),
                                       static_cast<AdjectiveOption>(a), static_cast<Gender>(g)});
    return out;
}

}  // namespace laminar
