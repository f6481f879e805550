#include "laminar/training.hpp"

#include <algorithm>
#include <tuple>

namespace laminar {

// --- strategies -------------------------------------------------------------------

std::vector<Sequence> FrequencyGenerator::generate(const std::vector<ClassId>& alphabet, std::size_t length,
                                                   std::size_t count, std::mt19937_64& rng) {
    std::vector<Sequence> out;
    if (alphabet.empty() || length == 0 || count == 0) return out;
    // Small spaces are listed completely, in lexicographic order.
    std::size_t space = 1;
    for (std::size_t i = 0; i < length && space <= count; ++i) space *= alphabet.size();
    if (space <= count) {
        std::vector<std::size_t> idx(length, 0);
        while (true) {
            Sequence s;
            for (auto i : idx) s.push_back(alphabet[i]);
            out.push_back(std::move(s));
            std::size_t k = length;
            while (k > 0 && ++idx[k - 1] == alphabet.size()) idx[--k] = 0;
            if (k == 0) return out;
        }
    }
    std::uint64_t total = 0;
    for (auto c : alphabet) total += 1 + weight_[c];
    std::set<Sequence> seen;
    for (std::size_t attempt = 0; attempt < count * 8 && out.size() < count; ++attempt) {
        Sequence s;
        for (std::size_t i = 0; i < length; ++i) {
            std::uint64_t r = rng() % total;
            for (auto c : alphabet) {
                const std::uint64_t w = 1 + weight_[c];
                if (r < w) {
                    s.push_back(c);
                    break;
                }
                r -= w;
            }
        }
        if (seen.insert(s).second) out.push_back(std::move(s));
    }
    return out;
}

void FrequencyGenerator::reinforce(const Sequence& sample, bool positive) {
    ++reinforcements_;
    for (auto c : sample) {
        auto& w = weight_[c];
        if (positive) {
            ++w;
        } else if (w > 0) {
            --w;
        }
    }
}

bool NgramDiscriminator::judge(const Sequence& s) const {
    if (negative_.contains(s)) return false;
    const std::size_t n = std::min(n_, s.size());
    for (std::size_t i = 0; i + n <= s.size(); ++i)
        if (!grams_.contains(Sequence(s.begin() + static_cast<std::ptrdiff_t>(i), s.begin() + static_cast<std::ptrdiff_t>(i + n))))
            return false;
    return true;
}

void NgramDiscriminator::learn(const Sequence& observed) {
    for (std::size_t n = 1; n <= n_; ++n)
        for (std::size_t i = 0; i + n <= observed.size(); ++i)
            grams_.insert(Sequence(observed.begin() + static_cast<std::ptrdiff_t>(i),
                                   observed.begin() + static_cast<std::ptrdiff_t>(i + n)));
}

void NgramDiscriminator::reinforce(const Sequence& sample, bool positive) {
    if (positive) {
        negative_.erase(sample);
        learn(sample);
    } else {
        negative_.insert(sample);
    }
}

std::unique_ptr<GeneratorStrategy> make_generator(const std::string& name) {
    if (name == "frequency") return std::make_unique<FrequencyGenerator>();
    fail(Errc::config, "unknown generator strategy '" + name + "'");
}

std::unique_ptr<DiscriminatorStrategy> make_discriminator(const std::string& name) {
    if (name == "ngram") return std::make_unique<NgramDiscriminator>();
    if (name == "permissive") return std::make_unique<PermissiveDiscriminator>();
    fail(Errc::config, "unknown discriminator strategy '" + name + "'");
}

// --- Imaginator -----------------------------------------------------------------------

Bits sequence_code(const Sequence& s, const ClassStore& store) {
    Bits out;
    for (auto id : s) {
        const Bits code = store.basis().slot_code(store.ancestor(id));
        out.insert(out.end(), code.begin(), code.end());
    }
    return out;
}

TestTree imaginator_generate(ClassId parent, const MemoryTree& memory, GeneratorStrategy& generator,
                             const DiscriminatorStrategy& discriminator, std::mt19937_64& rng, std::size_t batch) {
    const ClassStore& store = memory.store();
    const ClassId target = store.ancestor(parent);
    const Context* grand = nullptr;
    for (const auto& [id, ctx] : memory.contexts()) {
        if (std::any_of(ctx.classes.begin(), ctx.classes.end(), [&](ClassId c) { return store.ancestor(c) == target; })) {
            grand = &ctx;
            break;
        }
    }
    require(grand != nullptr, Errc::scope, "class " + std::to_string(parent) + " has no grand-parent context");

    TestTree tree;
    std::set<ClassId> expanded;
    auto recombine = [&](ClassId owner, std::size_t level) {
        const ClassId g = store.ancestor(owner);
        if (!expanded.insert(g).second) return std::vector<Sequence>{};
        auto it = memory.contexts().find(g);
        const SimpleClass& cls = store.at(store.shadow_of(g).value_or(g));
        std::vector<Sequence> kept;
        if (it == memory.contexts().end() || !cls.is_sentence()) return kept;
        for (auto& s : generator.generate(it->second.classes, cls.sentence.size(), batch, rng)) {
            if (!cls.noun.mask.matches(sequence_code(s, store))) continue;
            if (!discriminator.judge(s)) continue;
            tree.items.push_back({g, s, level});
            kept.push_back(std::move(s));
        }
        return kept;
    };
    for (auto d : grand->classes) {
        std::set<ClassId> nested;
        for (const auto& s : recombine(d, 1))
            for (auto p : s) nested.insert(store.ancestor(p));
        for (auto p : nested) recombine(p, 2);
    }
    return tree;
}

// --- genetic search ---------------------------------------------------------------------

std::size_t ga_fitness(const SimpleClass& cls, const std::vector<Bits>& codes) {
    return static_cast<std::size_t>(
        std::count_if(codes.begin(), codes.end(), [&](const Bits& c) { return cls.noun.mask.matches(c); }));
}

std::vector<DerivationStep> spontaneous_steps(const SimpleClass& cls, const OptionProfile& profile) {
    const SpontaneousOps ops = spontaneous_ops(profile);
    std::vector<DerivationStep> candidates;
    for (std::uint16_t l = 0; l < cls.verbs.size(); ++l)
        for (std::uint16_t m = 0; m < cls.verbs.size(); ++m)
            if (l != m) candidates.push_back({ops.verb_op(), l, m, Provenance::spontaneous});
    for (std::uint16_t l = 0; l < cls.adjectives.size(); ++l)
        for (std::uint16_t m = 0; m < cls.adjectives.size(); ++m)
            if (l != m) candidates.push_back({ops.adjective_op(), l, m, Provenance::spontaneous});
    for (const auto& e : cls.noun.mask.entries())
        candidates.push_back({ops.noun, static_cast<std::uint16_t>(e.offset), 0, Provenance::spontaneous});
    std::vector<DerivationStep> out;
    for (const auto& s : candidates) {
        try {
            (void)apply_step(cls, s);
            out.push_back(s);
        } catch (const Error&) {
        }
    }
    return out;
}

namespace {

auto step_key(const DerivationStep& s) { return std::make_tuple(static_cast<int>(s.op), s.l, s.m); }

bool ranks_before(const Individual& a, const Individual& b) {
    if (a.fitness != b.fitness) return a.fitness > b.fitness;
    if (a.steps != b.steps) return a.steps < b.steps;
    return std::lexicographical_compare(a.added.begin(), a.added.end(), b.added.begin(), b.added.end(),
                                        [](const DerivationStep& x, const DerivationStep& y) { return step_key(x) < step_key(y); });
}

Individual mutate(const Individual& ind, const OptionProfile& profile, const GaParams& params,
                  const std::vector<Bits>& codes, std::mt19937_64& rng) {
    if (ind.steps >= params.max_steps) return ind;
    const auto steps = spontaneous_steps(ind.cls, profile);
    if (steps.empty()) return ind;
    const auto& s = steps[rng() % steps.size()];
    Individual out = ind;
    out.cls = apply_step(ind.cls, s);
    out.added.push_back(s);
    ++out.steps;
    out.fitness = ga_fitness(out.cls, codes);
    return out;
}

}  // namespace

GaResult genetic_search(const SimpleClass& parent, const TestTree& tree, const ClassStore& store,
                        const OptionProfile& profile, const GaParams& params, std::mt19937_64& rng) {
    require(params.population >= 1 && params.elitism <= params.population && params.tournament >= 1,
            Errc::config, "inconsistent GA parameters");
    std::vector<Bits> codes;
    for (const auto& item : tree.items) codes.push_back(sequence_code(item.sequence, store));

    Individual seed{parent, ga_fitness(parent, codes), 0, {}};
    std::vector<Individual> pop{seed};
    while (pop.size() < params.population) pop.push_back(mutate(seed, profile, params, codes, rng));
    std::stable_sort(pop.begin(), pop.end(), ranks_before);

    GaResult result;
    result.best_per_generation.push_back(pop.front().fitness);
    for (std::size_t g = 0; g < params.generations; ++g) {
        std::vector<Individual> next(pop.begin(), pop.begin() + static_cast<std::ptrdiff_t>(params.elitism));
        while (next.size() < params.population) {
            std::size_t best = rng() % pop.size();
            for (std::size_t t = 1; t < params.tournament; ++t) {
                const std::size_t other = rng() % pop.size();
                if (ranks_before(pop[other], pop[best])) best = other;
            }
            next.push_back(mutate(pop[best], profile, params, codes, rng));
        }
        std::stable_sort(next.begin(), next.end(), ranks_before);
        pop = std::move(next);
        result.best_per_generation.push_back(pop.front().fitness);
    }
    result.ranked = std::move(pop);
    return result;
}

// --- Detector -----------------------------------------------------------------------------

DetectorReport detector_scan(std::span<const Bits> window, const DetectorParams& params) {
    require(!window.empty(), Errc::invalid_argument, "detector window is empty");
    require(params.min_length >= 1 && params.min_length <= params.max_length && params.max_length <= 24,
            Errc::config, "detector lengths out of range");
    std::map<Bits, std::size_t> counts;
    std::vector<std::set<Bits>> present(params.max_length + 2);
    for (const auto& frame : window) {
        for (std::size_t len = params.min_length; len <= params.max_length + 1; ++len) {
            for (std::size_t at = 0; at + len <= frame.size(); ++at) {
                Bits sub(frame.begin() + static_cast<std::ptrdiff_t>(at), frame.begin() + static_cast<std::ptrdiff_t>(at + len));
                present[len].insert(sub);
                if (std::find(sub.begin(), sub.end(), 1) != sub.end()) ++counts[sub];
            }
        }
    }
    auto repeated = [&](const Bits& s) {
        auto it = counts.find(s);
        return it != counts.end() && it->second >= params.repeat;
    };
    DetectorReport out;
    for (const auto& [sub, n] : counts) {
        if (sub.size() > params.max_length || n < params.repeat) continue;
        bool maximal = true;
        for (std::uint8_t b : {0, 1}) {
            Bits right = sub;
            right.push_back(b);
            Bits left{b};
            left.insert(left.end(), sub.begin(), sub.end());
            if (repeated(right) || repeated(left)) maximal = false;
        }
        if (maximal) out.masks.push_back(sub);
    }
    std::stable_sort(out.masks.begin(), out.masks.end(), [](const Bits& a, const Bits& b) { return a.size() > b.size(); });

    for (std::size_t len = params.min_length; len <= params.max_length && out.sequences.empty(); ++len) {
        if (present[len].size() == (std::size_t{1} << len)) continue;
        for (std::uint32_t x = 0; x < (1u << len) && out.sequences.size() < params.proposals; ++x) {
            Bits s(len);
            for (std::size_t j = 0; j < len; ++j) s[j] = (x >> (len - 1 - j)) & 1u;
            if (!present[len].contains(s)) out.sequences.push_back(std::move(s));
        }
    }
    return out;
}

// --- control ---------------------------------------------------------------------------------

std::string_view to_string(Polarity p) noexcept { return p == Polarity::pleasure ? "pleasure" : "pain"; }

std::vector<Disposition> apply_control(const ControlEvent& event, std::vector<PendingPatch>& pending,
                                       GeneratorStrategy& generator, DiscriminatorStrategy& discriminator,
                                       MemoryTree& memory) {
    std::vector<Disposition> out;
    if (event.polarity == Polarity::pleasure) {
        for (const auto& p : pending) {
            generator.reinforce(p.sample, true);
            out.push_back({p.record.patch, true});
        }
    } else {
        for (auto it = pending.rbegin(); it != pending.rend(); ++it) {
            rollback(memory, it->record);
            discriminator.reinforce(it->sample, false);
            out.push_back({it->record.patch, false});
        }
    }
    pending.clear();
    return out;
}

Bits emotions_bits(std::span<const Disposition> history, std::size_t width) {
    Bits out(width, 0);
    const std::size_t slots = width / 2;
    const std::size_t from = history.size() > slots ? history.size() - slots : 0;
    for (std::size_t i = from; i < history.size(); ++i) {
        out[2 * (i - from)] = 1;
        out[2 * (i - from) + 1] = history[i].applied ? 1 : 0;
    }
    return out;
}

}  // namespace laminar
