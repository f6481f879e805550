// laminar: run simulations, list option profiles, query the reference oracles.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "laminar/oracle.hpp"
#include "laminar/sim.hpp"

using namespace laminar;
using nlohmann::json;

namespace {

enum Exit { ok = 0, data_error = 1, config_error = 2 };

// Oracle refusal limits; anything larger is slow enough to be useless.
constexpr std::size_t kMaxScanBits = 4096;
constexpr std::size_t kMaxPackMembers = 8;
constexpr std::size_t kMaxPackWidth = 16;
constexpr std::size_t kMaxDfaBits = 16;
constexpr std::size_t kMaxTruthVars = 16;

Mask parse_mask_arg(const std::string& text) {
    if (text.empty() || text.front() != '{') return Mask::parse(text);
    // {offset:value,...}
    require(text.back() == '}', Errc::config, "mask '" + text + "' is missing '}'");
    std::vector<Mask::Entry> entries;
    std::stringstream in(text.substr(1, text.size() - 2));
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        require(colon != std::string::npos, Errc::config, "mask entry '" + item + "' needs offset:value");
        const auto offset = std::stoul(item.substr(0, colon));
        const auto value = std::stoul(item.substr(colon + 1));
        require(value <= 1, Errc::config, "mask values are 0 or 1");
        entries.push_back({static_cast<std::uint32_t>(offset), value == 1});
    }
    return Mask(entries);
}

void refuse(bool over, const std::string& what) {
    require(!over, Errc::config, "instance over the oracle cap: " + what);
}

int run_simulate(const std::string& config_path, const std::string& input, const std::string& control,
                 const std::string& trace_path, std::optional<std::uint64_t> seed, const std::string& profile,
                 const std::string& gender) {
    RunConfig cfg;
    try {
        if (!config_path.empty()) apply_config(cfg, read_text_file(config_path), config_path);
        apply_env_overrides(cfg, laminar_environment());
        if (!profile.empty()) cfg.set("profile", profile);
        if (!gender.empty()) cfg.set("gender", gender);
        if (seed) cfg.seed = *seed;
        cfg.validate();
    } catch (const Error& e) {
        std::cerr << "laminar: " << e.what() << '\n';
        return config_error;
    }
    const Basis basis = load_run_basis(cfg);
    const auto frames = parse_signal(read_text_file(input), cfg.stack.layer_length);
    const auto events = control.empty() ? std::vector<ControlEvent>{} : parse_control(read_text_file(control));
    RunResult result;
    if (trace_path.empty() || trace_path == "-") {
        result = simulate(cfg, basis, frames, events, std::cout);
    } else {
        std::ofstream out(trace_path, std::ios::binary);
        require(out.good(), Errc::data, "cannot write '" + trace_path + "'");
        result = simulate(cfg, basis, frames, events, out);
    }
    if (result.invariant_failures > 0) {
        std::cerr << "laminar: " << result.invariant_failures << " ticks broke an invariant\n";
        return data_error;
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Layered speech-model simulator"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "Run a signal file through the engine");
    std::string config_path, input, control, trace_path, profile, gender;
    std::optional<std::uint64_t> seed;
    sim->add_option("--config", config_path, "key=value configuration file");
    sim->add_option("--input", input, "signal file, one frame per line")->required();
    sim->add_option("--control", control, "control file, 'tick polarity' per line");
    sim->add_option("--trace", trace_path, "trace output (JSON lines); '-' for stdout");
    sim->add_option("--seed", seed, "overrides the configured seed");
    sim->add_option("--profile", profile, "overrides the configured option profile");
    sim->add_option("--gender", gender, "male or female");

    auto* enumerate = app.add_subcommand("enumerate-profiles", "List the option profiles");
    bool with_gender = false;
    enumerate->add_flag("--gender", with_gender, "list both genders (32 lines)");

    auto* oracle_cmd = app.add_subcommand("oracle", "Reference computations for fixtures");
    oracle_cmd->require_subcommand(1);

    auto* scan = oracle_cmd->add_subcommand("mask-scan", "Offsets where a mask matches");
    std::string layer_text, mask_text;
    scan->add_option("--layer", layer_text)->required();
    scan->add_option("--mask", mask_text, "'1.0' or '{0:1,2:0}'")->required();

    auto* table = oracle_cmd->add_subcommand("truth-table", "Truth table of a polynomial");
    std::string poly_text;
    std::size_t vars = 0;
    table->add_option("--poly", poly_text, "e.g. 'b0 + b1 + b0*b1'")->required();
    table->add_option("--vars", vars, "bit variables b0..b(n-1); default: enough for the support");

    auto* pack = oracle_cmd->add_subcommand("pack", "Exhaustive adjective-set search");
    std::string members_text, op_text = "xor";
    std::size_t depth = 2, max_adjectives = 4;
    pack->add_option("--members", members_text, "comma-separated equal-width bit strings")->required();
    pack->add_option("--op", op_text, "xor or and");
    pack->add_option("--depth", depth);
    pack->add_option("--max-adjectives", max_adjectives);

    auto* dfa = oracle_cmd->add_subcommand("dfa", "Explicit automaton run of a conditioning class");
    std::string basis_path, class_name, inputs_text, state_text;
    std::size_t horizon = 4;
    dfa->add_option("--basis", basis_path, "basis file; default: built-in");
    dfa->add_option("--class", class_name)->required();
    dfa->add_option("--inputs", inputs_text, "comma-separated input bit strings")->required();
    dfa->add_option("--state", state_text, "initial state bits");
    dfa->add_option("--horizon", horizon);

    auto* hormone = oracle_cmd->add_subcommand("hormone", "Windowed hormone sum");
    std::string events_text;
    std::uint64_t now = 0;
    std::size_t window = 32;
    hormone->add_option("--events", events_text, "tick:amount,...")->required();
    hormone->add_option("--now", now)->required();
    hormone->add_option("--window", window);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : config_error;
    }

    try {
        if (*sim) return run_simulate(config_path, input, control, trace_path, seed, profile, gender);

        if (*enumerate) {
            for (const auto& p : all_profiles(with_gender))
                std::cout << "profile=" << p.name() << ' ' << p.config_fragment(with_gender) << '\n';
            return ok;
        }

        if (*scan) {
            const Bits layer = parse_bits(layer_text);
            refuse(layer.size() > kMaxScanBits, "layer longer than " + std::to_string(kMaxScanBits) + " bits");
            std::cout << json(oracle::scan_mask(layer, parse_mask_arg(mask_text))).dump() << '\n';
            return ok;
        }

        if (*table) {
            const Poly p = Poly::parse(poly_text);
            std::size_t n = vars;
            for (Var v : p.vars()) {
                require(!is_quality(v), Errc::config, "truth tables take bit variables only");
                n = std::max<std::size_t>(n, var_index(v) + 1);
            }
            refuse(n > kMaxTruthVars, "more than " + std::to_string(kMaxTruthVars) + " variables");
            std::string out;
            for (std::uint32_t x = 0; x < (1u << n); ++x) {
                Assignment a;
                for (std::size_t j = 0; j < n; ++j) a[bit_var(static_cast<std::uint32_t>(j))] = ((x >> j) & 1u) != 0;
                out.push_back(oracle::eval(p, a) ? '1' : '0');
            }
            std::cout << out << '\n';
            return ok;
        }

        if (*pack) {
            std::vector<Bits> members;
            std::stringstream in(members_text);
            std::string item;
            while (std::getline(in, item, ',')) members.push_back(parse_bits(item));
            refuse(members.size() > kMaxPackMembers, "more than " + std::to_string(kMaxPackMembers) + " members");
            for (const auto& m : members) {
                refuse(m.size() > kMaxPackWidth, "member wider than " + std::to_string(kMaxPackWidth) + " bits");
                require(m.size() == members.front().size(), Errc::config, "members must have equal width");
            }
            require(op_text == "xor" || op_text == "and", Errc::config, "--op must be xor or and");
            const auto r = oracle::pack_search(members, op_text == "xor" ? BoolOp::xor_op : BoolOp::and_op, depth,
                                               max_adjectives);
            json solutions = json::array();
            for (const auto& s : r.solutions) {
                json one = json::array();
                for (const auto& p : s) one.push_back(p.to_string());
                solutions.push_back(one);
            }
            std::cout << json{{"min_size", r.min_size ? json(*r.min_size) : json(nullptr)},
                              {"direct_bits", r.direct_bits},
                              {"exhausted", r.exhausted},
                              {"solutions", solutions}}
                             .dump()
                      << '\n';
            return ok;
        }

        if (*dfa) {
            const Basis basis = basis_path.empty() ? parse_basis(builtin_basis_text()) : load_basis_file(basis_path);
            const auto idx = basis.find(class_name);
            require(idx.has_value(), Errc::config, "no class named '" + class_name + "'");
            const SimpleClass& cls = basis.at(*idx);
            refuse(cls.noun.mask.span() > kMaxDfaBits, "mask spans more than " + std::to_string(kMaxDfaBits) + " bits");
            const auto automaton = oracle::build_dfa(cls);
            auto to_index = [](const Bits& b) {
                std::uint32_t v = 0;
                for (std::size_t j = 0; j < b.size(); ++j) v |= static_cast<std::uint32_t>(b[j] != 0) << j;
                return v;
            };
            std::vector<std::uint32_t> inputs;
            std::stringstream in(inputs_text);
            std::string item;
            while (std::getline(in, item, ',')) {
                const Bits b = parse_bits(item);
                require(b.size() == automaton.input_width, Errc::config, "input '" + item + "' has the wrong width");
                inputs.push_back(to_index(b));
            }
            Bits state = state_text.empty() ? Bits(automaton.state_width, 0) : parse_bits(state_text);
            require(state.size() == automaton.state_width, Errc::config, "state has the wrong width");
            const auto run = oracle::simulate_dfa(automaton, inputs, to_index(state), horizon);
            static const char* names[] = {"running", "detected", "failed"};
            json states = json::array();
            for (auto s : run.states) {
                std::string bits;
                for (std::size_t j = 0; j < automaton.state_width; ++j) bits.push_back(((s >> j) & 1u) ? '1' : '0');
                states.push_back(bits);
            }
            std::cout << json{{"status", names[run.status]},
                              {"frames", run.frames},
                              {"failed_at", run.failed_at ? json(*run.failed_at) : json(nullptr)},
                              {"states", states}}
                             .dump()
                      << '\n';
            return ok;
        }

        if (*hormone) {
            std::vector<std::pair<std::uint64_t, double>> events;
            std::stringstream in(events_text);
            std::string item;
            while (std::getline(in, item, ',')) {
                const auto colon = item.find(':');
                require(colon != std::string::npos, Errc::config, "event '" + item + "' needs tick:amount");
                events.emplace_back(std::stoull(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
            }
            std::cout << oracle::windowed_sum(events, now, window) << '\n';
            return ok;
        }
    } catch (const Error& e) {
        std::cerr << "laminar: " << e.what() << '\n';
        return e.code() == Errc::config ? config_error : data_error;
    } catch (const std::exception& e) {
        std::cerr << "laminar: " << e.what() << '\n';
        return config_error;
    }
    return ok;
}
