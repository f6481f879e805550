#include "laminar/oracle.hpp"

#include <algorithm>
#include <map>

namespace laminar::oracle {

std::vector<std::size_t> scan_mask(const Bits& layer, const Mask& mask) {
    std::vector<std::size_t> out;
    if (mask.empty() || layer.size() < mask.span()) return out;
    for (std::size_t o = 0; o + mask.span() <= layer.size(); ++o) {
        bool ok = true;
        for (std::size_t i = 0; i < mask.span(); ++i) {
            const auto want = mask.at(i);
            if (want && (layer[o + i] != 0) != *want) ok = false;
        }
        if (ok) out.push_back(o);
    }
    return out;
}

std::vector<Block> cover(const Bits& layer, std::span<const Mask> masks) {
    std::vector<Block> out;
    std::size_t pos = 0;
    while (pos < layer.size()) {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < masks.size(); ++i) {
            if (masks[i].empty()) continue;
            const auto hits = scan_mask(layer, masks[i]);
            if (!std::binary_search(hits.begin(), hits.end(), pos)) continue;
            if (!best || masks[i].span() > masks[*best].span()) best = i;
        }
        if (!best) {
            ++pos;
            continue;
        }
        out.push_back({pos, pos + masks[*best].span() - 1, *best});
        pos += masks[*best].span();
    }
    return out;
}

bool eval(const Poly& p, const Assignment& a) {
    bool v = false;
    for (const auto& mono : p.monomials()) {
        bool term = true;
        for (Var x : mono) term = term && a.at(x);
        v = v != term;
    }
    return v;
}

namespace {

struct Item {
    Poly poly;
    std::size_t level = 0;
};

bool separates_all(const std::vector<const Poly*>& chosen, const std::vector<std::uint32_t>& observed, std::size_t n) {
    auto signature = [&](std::uint32_t x) {
        Assignment a;
        for (std::size_t j = 0; j < n; ++j) a[bit_var(static_cast<std::uint32_t>(j))] = (x >> j) & 1u;
        Bits s;
        for (const Poly* p : chosen) {
            Assignment sub;
            for (Var v : p->vars()) sub[v] = a.at(v);
            s.push_back(eval(*p, sub) ? 1 : 0);
        }
        return s;
    };
    const std::uint32_t cube = 1u << n;
    std::vector<Bits> sigs(cube);
    for (std::uint32_t x = 0; x < cube; ++x) sigs[x] = signature(x);
    for (auto o : observed)
        for (std::uint32_t y = 0; y < cube; ++y)
            if (y != o && sigs[y] == sigs[o]) return false;
    return true;
}

// Calls f on each k-subset of [0, n) in lexicographic order; stops when f
// returns false.
template <class F>
bool each_subset(std::size_t n, std::size_t k, F&& f) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    if (k > n) return true;
    while (true) {
        if (!f(idx)) return false;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return true;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

PackSearch pack_search(std::span<const Bits> members, BoolOp op, std::size_t depth, std::size_t max_adjectives,
                       std::size_t pool_limit, std::size_t subset_limit) {
    PackSearch out;
    std::size_t width = 0;
    for (const auto& m : members) width = std::max(width, m.size());
    std::set<Bits> uniq;
    for (auto m : members) {
        m.resize(width, 0);
        uniq.insert(m);
    }
    std::vector<std::uint32_t> differing;
    for (std::size_t i = 0; i < width; ++i) {
        std::set<std::uint8_t> seen;
        for (const auto& m : uniq) seen.insert(m[i]);
        if (seen.size() > 1) differing.push_back(static_cast<std::uint32_t>(i));
    }
    const std::size_t n = differing.size();
    if (n == 0) {
        out.min_size = 0;
        out.solutions.insert(std::vector<Poly>{});
        return out;
    }
    std::vector<std::uint32_t> observed;
    for (const auto& m : uniq) {
        std::uint32_t x = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (m[differing[j]]) x |= 1u << j;
        observed.push_back(x);
    }

    std::vector<Item> pool;
    for (std::size_t j = 0; j < n; ++j) pool.push_back({Poly::variable(bit_var(static_cast<std::uint32_t>(j))), 0});
    for (std::size_t level = 1; level <= depth; ++level) {
        const std::size_t existing = pool.size();
        for (std::size_t a = 0; a < existing; ++a)
            for (std::size_t b = a; b < existing; ++b) {
                if (pool[a].level != level - 1 && pool[b].level != level - 1) continue;
                if (pool.size() >= pool_limit) continue;
                Poly p = op == BoolOp::xor_op ? xor_poly(pool[a].poly, pool[b].poly) : and_poly(pool[a].poly, pool[b].poly);
                if (p.is_zero() || p.is_one()) continue;
                if (std::any_of(pool.begin(), pool.end(), [&](const Item& it) { return it.poly == p; })) continue;
                pool.push_back({std::move(p), level});
            }
    }
    auto to_positions = [&](const Poly& p) {
        std::vector<Monomial> monos;
        for (auto mono : p.monomials()) {
            for (auto& v : mono) v = bit_var(differing[var_index(v)]);
            monos.push_back(std::move(mono));
        }
        return Poly::from_monomials(monos);
    };

    std::size_t visited = 0;
    for (const bool with_atoms : {false, true}) {
        std::vector<std::size_t> allowed;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (with_atoms || pool[i].level > 0) allowed.push_back(i);
        // Adding adjectives only refines fibers, so if the whole allowed set
        // fails, every subset fails too.
        std::vector<const Poly*> all;
        for (auto i : allowed) all.push_back(&pool[i].poly);
        if (!separates_all(all, observed, n)) continue;
        for (std::size_t k = 0; k <= max_adjectives; ++k) {
            const bool complete = each_subset(allowed.size(), k, [&](const std::vector<std::size_t>& idx) {
                if (++visited > subset_limit) return false;
                std::vector<const Poly*> chosen;
                for (auto i : idx) chosen.push_back(&pool[allowed[i]].poly);
                if (separates_all(chosen, observed, n)) {
                    std::vector<Poly> sol;
                    for (const Poly* p : chosen) sol.push_back(to_positions(*p));
                    std::sort(sol.begin(), sol.end());
                    out.solutions.insert(std::move(sol));
                }
                return true;
            });
            if (!complete) {
                out.exhausted = true;
                out.solutions.clear();
                return out;
            }
            if (!out.solutions.empty()) {
                out.min_size = k;
                out.direct_bits = with_atoms;
                return out;
            }
        }
    }
    return out;
}

Dfa build_dfa(const SimpleClass& cls) {
    const std::size_t span = cls.noun.mask.span();
    std::size_t k = span;
    for (const auto& v : cls.verbs) k = std::min<std::size_t>(k, v.action_point);
    Dfa d;
    d.input_width = k;
    d.state_width = span - k;
    require(span <= 20, Errc::capacity, "automaton too large to tabulate");
    const std::uint32_t states = 1u << d.state_width;
    const std::uint32_t symbols = 1u << k;
    d.delta.resize(std::size_t{states} * symbols);
    for (std::uint32_t q = 0; q < states; ++q) {
        for (std::uint32_t a = 0; a < symbols; ++a) {
            Bits view(span);
            for (std::size_t j = 0; j < k; ++j) view[j] = (a >> j) & 1u;
            for (std::size_t j = 0; j < d.state_width; ++j) view[k + j] = (q >> j) & 1u;
            bool alive = true;
            for (const auto& e : cls.noun.mask.entries()) alive = alive && (view[e.offset] != 0) == e.value;
            const std::size_t index = (std::size_t{q} << k) | a;
            if (!alive) continue;
            auto bits_of = [&](const Poly& p) {
                Assignment as;
                for (Var v : p.vars())
                    if (!is_quality(v)) as[v] = view.at(var_index(v)) != 0;
                return as;
            };
            std::map<QualityId, bool> quality;
            for (const auto& adj : cls.adjectives) quality[adj.output] = eval(adj.poly, bits_of(adj.poly));
            for (const auto& verb : cls.verbs) {
                Assignment as = bits_of(verb.poly);
                for (Var v : verb.poly.vars())
                    if (is_quality(v)) as[v] = quality.at(static_cast<QualityId>(var_index(v)));
                view[verb.action_point] = eval(verb.poly, as) ? 1 : 0;
            }
            std::uint32_t next = 0;
            for (std::size_t j = 0; j < d.state_width; ++j)
                if (view[k + j]) next |= 1u << j;
            d.delta[index] = next;
        }
    }
    return d;
}

DfaRun simulate_dfa(const Dfa& dfa, std::span<const std::uint32_t> inputs, std::uint32_t state, std::size_t horizon) {
    DfaRun run;
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        ++run.frames;
        const auto next = dfa.delta.at((std::size_t{state} << dfa.input_width) | inputs[t]);
        if (!next) {
            run.status = DfaRun::failed;
            run.failed_at = t;
            return run;
        }
        state = *next;
        run.states.push_back(state);
        if (run.states.size() >= horizon) {
            run.status = DfaRun::detected;
            return run;
        }
    }
    return run;
}

double windowed_sum(std::span<const std::pair<std::uint64_t, double>> events, std::uint64_t now, std::size_t window) {
    double sum = 0;
    for (const auto& [tick, amount] : events)
        if (tick <= now && tick + window > now) sum += amount;
    return sum;
}

SingleOpBest best_single_op(const SimpleClass& cls, std::span<const Bits> codes, std::span<const ClassOp> ops) {
    auto coverage = [&](const SimpleClass& c) {
        std::size_t n = 0;
        for (const auto& code : codes) {
            bool ok = code.size() >= c.noun.mask.span();
            for (std::size_t o = 0; ok && o < c.noun.mask.span(); ++o) {
                const auto want = c.noun.mask.at(o);
                if (want && (code[o] != 0) != *want) ok = false;
            }
            n += ok ? 1 : 0;
        }
        return n;
    };
    SingleOpBest best{coverage(cls), {}};
    const std::size_t range = std::max({cls.verbs.size(), cls.adjectives.size(), cls.noun.mask.span()});
    for (auto op : ops)
        for (std::uint16_t l = 0; l < range; ++l)
            for (std::uint16_t m = 0; m < (is_noun_op(op) ? 1 : range); ++m) {
                if (l == m && !is_noun_op(op)) continue;
                const DerivationStep step{op, l, m, Provenance::spontaneous};
                std::size_t f = 0;
                try {
                    f = coverage(apply_step(cls, step));
                } catch (const Error&) {
                    continue;
                }
                if (f > best.fitness) best = {f, {}};
                if (f == best.fitness && f > coverage(cls)) best.steps.push_back(step);
            }
    return best;
}

std::size_t count_occurrences(std::span<const Bits> frames, const Bits& pattern) {
    std::size_t n = 0;
    for (const auto& f : frames)
        for (std::size_t at = 0; at + pattern.size() <= f.size(); ++at)
            if (std::equal(pattern.begin(), pattern.end(), f.begin() + static_cast<std::ptrdiff_t>(at))) ++n;
    return n;
}

}  // namespace laminar::oracle
