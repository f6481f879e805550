#include "laminar/config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <sstream>

#include "basis_text.hpp"

extern char** environ;

namespace laminar {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::size_t to_size(std::string_view key, std::string_view v) {
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    require(ec == std::errc() && p == v.data() + v.size(), Errc::config,
            std::string(key) + ": expected a nonnegative integer, got '" + std::string(v) + "'");
    return static_cast<std::size_t>(out);
}

double to_double(std::string_view key, std::string_view v) {
    try {
        std::size_t used = 0;
        const std::string s(v);
        const double d = std::stod(s, &used);
        if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
    fail(Errc::config, std::string(key) + ": expected a number, got '" + std::string(v) + "'");
}

std::string fmt(double d) {
    std::ostringstream os;
    os << d;
    return os.str();
}

struct Field {
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define LAMINAR_SIZE(path) \
    Field { [](RunConfig& c, std::string_view v) { c.path = to_size(#path, v); }, [](const RunConfig& c) { return std::to_string(c.path); } }
#define LAMINAR_REAL(path) \
    Field { [](RunConfig& c, std::string_view v) { c.path = to_double(#path, v); }, [](const RunConfig& c) { return fmt(c.path); } }

template <class E>
Field option_field(E OptionProfile::*member, std::optional<E> (*parse)(std::string_view), const char* key) {
    return {[=](RunConfig& c, std::string_view v) {
                const auto o = parse(v);
                require(o.has_value(), Errc::config, std::string(key) + ": unknown value '" + std::string(v) + "'");
                c.profile.*member = *o;
            },
            [=](const RunConfig& c) { return std::string(to_string(c.profile.*member)); }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table{
        {"profile", {[](RunConfig& c, std::string_view v) { c.profile = OptionProfile::from_name(v, c.profile.gender); },
                     [](const RunConfig& c) { return c.profile.name(); }}},
        {"option.context", option_field(&OptionProfile::context, &parse_context_option, "option.context")},
        {"option.noun", option_field(&OptionProfile::noun, &parse_noun_option, "option.noun")},
        {"option.verb", option_field(&OptionProfile::verb, &parse_verb_option, "option.verb")},
        {"option.adjective", option_field(&OptionProfile::adjective, &parse_adjective_option, "option.adjective")},
        {"gender", option_field(&OptionProfile::gender, &parse_gender, "gender")},
        {"stack.layers", LAMINAR_SIZE(stack.depth)},
        {"stack.length", LAMINAR_SIZE(stack.layer_length)},
        {"stack.class_region", LAMINAR_SIZE(stack.class_region)},
        {"seed", {[](RunConfig& c, std::string_view v) { c.seed = to_size("seed", v); },
                  [](const RunConfig& c) { return std::to_string(c.seed); }}},
        {"basis", {[](RunConfig& c, std::string_view v) { c.basis = std::string(v); },
                   [](const RunConfig& c) { return c.basis; }}},
        {"memory.window", LAMINAR_SIZE(memory_window)},
        {"pack.max_adjectives", LAMINAR_SIZE(pack.max_adjectives)},
        {"pack.depth", LAMINAR_SIZE(pack.depth)},
        {"pack.max_candidates", LAMINAR_SIZE(pack.max_candidates)},
        {"pack.window", LAMINAR_SIZE(pack.window)},
        {"pack.max_differing", LAMINAR_SIZE(pack.max_differing)},
        {"pack.pool_limit", LAMINAR_SIZE(pack.pool_limit)},
        {"pack.search_limit", LAMINAR_SIZE(pack.search_limit)},
        {"decision.ego_depth", LAMINAR_SIZE(decision.ego_depth)},
        {"decision.max_depth", LAMINAR_SIZE(decision.limits.max_depth)},
        {"decision.max_leaves", LAMINAR_SIZE(decision.limits.max_leaves)},
        {"io.horizon", LAMINAR_SIZE(io_horizon)},
        {"io.conditioning", {[](RunConfig& c, std::string_view v) { c.io_conditioning = std::string(v); },
                             [](const RunConfig& c) { return c.io_conditioning; }}},
        {"ga.population", LAMINAR_SIZE(ga.population)},
        {"ga.generations", LAMINAR_SIZE(ga.generations)},
        {"ga.elitism", LAMINAR_SIZE(ga.elitism)},
        {"ga.tournament", LAMINAR_SIZE(ga.tournament)},
        {"ga.max_steps", LAMINAR_SIZE(ga.max_steps)},
        {"training.generator", {[](RunConfig& c, std::string_view v) { c.generator = std::string(v); },
                                [](const RunConfig& c) { return c.generator; }}},
        {"training.discriminator", {[](RunConfig& c, std::string_view v) { c.discriminator = std::string(v); },
                                    [](const RunConfig& c) { return c.discriminator; }}},
        {"training.interval", LAMINAR_SIZE(training_interval)},
        {"detector.repeat", LAMINAR_SIZE(detector.repeat)},
        {"detector.min_length", LAMINAR_SIZE(detector.min_length)},
        {"detector.max_length", LAMINAR_SIZE(detector.max_length)},
        {"detector.proposals", LAMINAR_SIZE(detector.proposals)},
        {"dynamics.h", LAMINAR_REAL(dynamics.h)},
        {"dynamics.s", LAMINAR_REAL(dynamics.s)},
        {"dynamics.k_d", LAMINAR_REAL(dynamics.k_d)},
        {"dynamics.k_g", LAMINAR_REAL(dynamics.k_g)},
        {"dynamics.delta", LAMINAR_REAL(dynamics.delta)},
        {"dynamics.window", LAMINAR_SIZE(dynamics.window)},
    };
    return table;
}

#undef LAMINAR_SIZE
#undef LAMINAR_REAL

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
    for (const auto& [name, field] : fields()) {
        if (name == key) {
            field.set(*this, trim(value));
            return;
        }
    }
    fail(Errc::config, "unknown key '" + std::string(key) + "'");
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [name, field] : fields()) out.emplace_back(name, field.get(*this));
    return out;
}

void RunConfig::validate() const {
    require(stack.depth >= 1 && stack.depth <= 16, Errc::config, "stack.layers must be in 1..16");
    (void)SignalLayout::for_length(stack.layer_length);
    require(stack.class_region < stack.layer_length, Errc::config, "stack.class_region must be shorter than the layer");
    require(memory_window >= 1, Errc::config, "memory.window must be positive");
    require(pack.depth >= 1 && pack.max_adjectives >= 1, Errc::config, "pack.depth and pack.max_adjectives must be positive");
    require(decision.limits.max_leaves >= 1 && decision.limits.max_depth >= 1, Errc::config,
            "decision limits must be positive");
    require(io_horizon >= 1, Errc::config, "io.horizon must be positive");
    require(ga.population >= 1 && ga.elitism <= ga.population && ga.tournament >= 1, Errc::config,
            "inconsistent ga parameters");
    require(training_interval >= 1, Errc::config, "training.interval must be positive");
    (void)make_generator(generator);
    (void)make_discriminator(discriminator);
    require(detector.min_length >= 1 && detector.min_length <= detector.max_length && detector.max_length <= 24,
            Errc::config, "detector lengths must satisfy 1 <= min <= max <= 24");
    laminar::validate(dynamics);
}

void apply_config(RunConfig& config, std::string_view text, std::string_view origin) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = std::string(origin) + " line " + std::to_string(line_no) + ": ";
        require(eq != std::string_view::npos, Errc::config, where + "expected 'key = value'");
        try {
            config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const Error& e) {
            fail(Errc::config, where + e.what());
        }
    }
}

RunConfig parse_config(std::string_view text, std::string_view origin) {
    RunConfig c;
    apply_config(c, text, origin);
    return c;
}

void apply_env_overrides(RunConfig& config, const std::map<std::string, std::string>& env) {
    for (const auto& [name, field] : fields()) {
        std::string var = "LAMINAR_" + name;
        std::transform(var.begin(), var.end(), var.begin(), [](char ch) {
            return ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        });
        if (auto it = env.find(var); it != env.end()) {
            try {
                field.set(config, trim(it->second));
            } catch (const Error& e) {
                fail(Errc::config, var + ": " + e.what());
            }
        }
    }
}

std::map<std::string, std::string> laminar_environment() {
    std::map<std::string, std::string> out;
    for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
        std::string_view kv(*e);
        if (!kv.starts_with("LAMINAR_")) continue;
        const auto eq = kv.find('=');
        if (eq != std::string_view::npos) out.emplace(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return out;
}

std::string_view builtin_basis_text() { return kBuiltinBasis; }

}  // namespace laminar
