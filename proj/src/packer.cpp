#include "laminar/packer.hpp"

#include <algorithm>
#include <bit>
#include <set>

namespace laminar {

namespace {

constexpr QualityId kFirstGeneratorQuality = 0x8000;

struct Prepared {
    std::vector<Bits> members;  // distinct, ascending, padded to width
    std::size_t width = 0;
    Bits template_bits;
    std::vector<std::uint32_t> differing;
};

Prepared prepare(std::span<const Bits> raw) {
    Prepared p;
    for (const auto& b : raw) p.width = std::max(p.width, b.size());
    std::set<Bits> uniq;
    for (const auto& b : raw) {
        Bits padded = b;
        padded.resize(p.width, 0);
        uniq.insert(std::move(padded));
    }
    p.members.assign(uniq.begin(), uniq.end());
    p.template_bits.assign(p.width, 0);
    for (std::size_t i = 0; i < p.width; ++i) {
        bool same = true;
        for (const auto& m : p.members) same = same && m[i] == p.members.front()[i];
        if (same) {
            p.template_bits[i] = p.members.empty() ? 0 : p.members.front()[i];
        } else {
            p.differing.push_back(static_cast<std::uint32_t>(i));
        }
    }
    return p;
}

std::uint32_t cube_index(const Bits& member, std::span<const std::uint32_t> differing) {
    std::uint32_t x = 0;
    for (std::size_t j = 0; j < differing.size(); ++j)
        if (member[differing[j]]) x |= 1u << j;
    return x;
}

Bits signature_of(const Bits& member, const PackCandidate& c) {
    Bits s;
    if (!c.writers.empty()) {
        for (auto d : c.differing) s.push_back(member[d]);
        return s;
    }
    for (const auto& a : c.adjectives) s.push_back(a.poly.eval([&](Var v) { return member.at(var_index(v)) != 0; }) ? 1 : 0);
    return s;
}

PackCandidate base_candidate(const Prepared& p, PackAlgorithm algorithm) {
    PackCandidate c;
    c.algorithm = algorithm;
    c.width = p.width;
    c.template_bits = p.template_bits;
    c.differing = p.differing;
    c.regenerated = p.members;
    return c;
}

void fill_signatures(PackCandidate& c) {
    c.signatures.clear();
    for (const auto& m : c.regenerated) c.signatures.push_back(signature_of(m, c));
}

// --- generator search ------------------------------------------------------------

using Words = std::vector<std::uint64_t>;

struct PoolItem {
    Poly poly;  // over bit_var(j), j indexing the differing positions
    PackStep step;
    std::vector<std::uint32_t> parents;  // pool indices this item was combined from
    std::size_t level = 0;
    Words table;
};

bool test(const Words& w, std::size_t i) { return (w[i / 64] >> (i % 64)) & 1u; }

std::vector<PoolItem> build_pool(std::size_t n, std::span<const std::uint32_t> differing, BoolOp op,
                                 const PackParams& params) {
    std::vector<Var> universe;
    for (std::size_t j = 0; j < n; ++j) universe.push_back(bit_var(static_cast<std::uint32_t>(j)));
    const std::size_t cube = std::size_t{1} << n;
    auto table_of = [&](const Poly& p) {
        const Bits t = p.truth_table(universe);
        Words w(std::max<std::size_t>(1, (cube + 63) / 64), 0);
        for (std::size_t x = 0; x < cube; ++x)
            if (t[x]) w[x / 64] |= 1ull << (x % 64);
        return w;
    };
    std::vector<PoolItem> pool;
    std::set<Poly> seen;
    for (std::size_t j = 0; j < n; ++j) {
        PoolItem it;
        it.poly = Poly::variable(bit_var(static_cast<std::uint32_t>(j)));
        it.step = {PackStepKind::direct_bit, ClassOp::specialize, differing[j], 0};
        it.table = table_of(it.poly);
        seen.insert(it.poly);
        pool.push_back(std::move(it));
    }
    const ClassOp class_op = op == BoolOp::xor_op ? ClassOp::adjective_xor : ClassOp::adjective_and;
    for (std::size_t level = 1; level <= params.depth; ++level) {
        const std::size_t existing = pool.size();
        for (std::size_t a = 0; a < existing; ++a) {
            for (std::size_t b = a; b < existing; ++b) {
                if (pool[a].level != level - 1 && pool[b].level != level - 1) continue;
                if (pool.size() >= params.pool_limit) break;
                Poly p = apply(op, pool[a].poly, pool[b].poly);
                if (p.is_zero() || p.is_one() || !seen.insert(p).second) continue;
                PoolItem it;
                it.poly = std::move(p);
                it.step = {PackStepKind::combine, class_op, static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
                it.parents = {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
                it.level = level;
                it.table = table_of(it.poly);
                pool.push_back(std::move(it));
            }
        }
    }
    return pool;
}

// Finds adjective sets under which every observed point is alone in its
// fiber. Each uncovered (observed, other) pair must be separated by some
// chosen adjective; branching only on separators of the first open pair
// keeps the search small. Iterative deepening returns minimum-size sets.
class CoverSearch {
public:
    CoverSearch(const std::vector<PoolItem>& pool, std::vector<std::uint32_t> observed, std::size_t n,
                const PackParams& params)
        : pool_(pool), observed_(std::move(observed)), cube_(std::size_t{1} << n), params_(params) {
        words_ = std::max<std::size_t>(1, (cube_ + 63) / 64);
        full_.assign(words_, 0);
        for (std::size_t x = 0; x < cube_; ++x) full_[x / 64] |= 1ull << (x % 64);
    }

    std::vector<std::vector<std::uint32_t>> run(const std::vector<std::uint32_t>& allowed) {
        allowed_ = allowed;
        const std::size_t stride = observed_.size() * words_;
        frames_.assign((params_.max_adjectives + 1) * stride, 0);
        for (std::size_t k = 0; k < observed_.size(); ++k) {
            const auto o = observed_[k];
            std::copy(full_.begin(), full_.end(), frames_.begin() + static_cast<std::ptrdiff_t>(k * words_));
            frames_[k * words_ + o / 64] &= ~(1ull << (o % 64));
        }
        for (std::size_t size = 0; size <= params_.max_adjectives && !exhausted_; ++size) {
            found_.clear();
            std::vector<std::uint32_t> chosen;
            dfs(0, chosen, size);
            if (!found_.empty()) break;
        }
        std::vector<std::vector<std::uint32_t>> out(found_.begin(), found_.end());
        if (out.size() > params_.max_candidates) out.resize(params_.max_candidates);
        return out;
    }

    bool exhausted() const noexcept { return exhausted_; }

private:
    // frames_ holds one open-pair set per observed point for each search
    // depth; depth d+1 is derived from depth d.
    void dfs(std::size_t depth, std::vector<std::uint32_t>& chosen, std::size_t left) {
        if (exhausted_ || found_.size() >= params_.max_candidates) return;
        if (++nodes_ > params_.search_limit) {
            exhausted_ = true;
            return;
        }
        const std::size_t stride = observed_.size() * words_;
        const std::uint64_t* open = frames_.data() + depth * stride;
        std::size_t oi = observed_.size();
        std::size_t y = 0;
        for (std::size_t i = 0; i < stride; ++i) {
            if (open[i]) {
                oi = i / words_;
                y = (i % words_) * 64 + static_cast<std::size_t>(std::countr_zero(open[i]));
                break;
            }
        }
        if (oi == observed_.size()) {
            auto sorted = chosen;
            std::sort(sorted.begin(), sorted.end());
            found_.insert(std::move(sorted));
            return;
        }
        if (left == 0) return;
        const std::uint32_t o = observed_[oi];
        std::uint64_t* next = frames_.data() + (depth + 1) * stride;
        for (auto i : allowed_) {
            const Words& t = pool_[i].table;
            if (test(t, o) == test(t, y)) continue;
            if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
            for (std::size_t k = 0; k < observed_.size(); ++k) {
                const bool at = test(t, observed_[k]);
                for (std::size_t w = 0; w < words_; ++w) {
                    // Points whose value differs from the observed one are separated.
                    const std::uint64_t sep = at ? (~t[w] & full_[w]) : t[w];
                    next[k * words_ + w] = open[k * words_ + w] & ~sep;
                }
            }
            chosen.push_back(i);
            dfs(depth + 1, chosen, left - 1);
            chosen.pop_back();
            if (exhausted_) return;
        }
    }

    const std::vector<PoolItem>& pool_;
    std::vector<std::uint32_t> observed_;
    std::size_t cube_;
    const PackParams& params_;
    std::size_t words_ = 1;
    Words full_;
    std::vector<std::uint32_t> allowed_;
    std::vector<std::uint64_t> frames_;
    std::set<std::vector<std::uint32_t>> found_;
    std::size_t nodes_ = 0;
    bool exhausted_ = false;
};

PackCandidate candidate_from(const Prepared& p, const std::vector<PoolItem>& pool,
                             const std::vector<std::uint32_t>& chosen) {
    PackCandidate c = base_candidate(p, PackAlgorithm::abstraction);
    // Pull in every pool item the chosen ones were built from, in pool order.
    std::set<std::uint32_t> needed;
    std::vector<std::uint32_t> stack(chosen.begin(), chosen.end());
    while (!stack.empty()) {
        const auto i = stack.back();
        stack.pop_back();
        if (!needed.insert(i).second) continue;
        for (auto parent : pool[i].parents) stack.push_back(parent);
    }
    std::map<std::uint32_t, std::uint32_t> step_of;
    for (auto i : needed) {
        PackStep s = pool[i].step;
        if (s.kind == PackStepKind::combine) {
            s.a = step_of.at(s.a);
            s.b = step_of.at(s.b);
        }
        step_of[i] = static_cast<std::uint32_t>(c.steps.size());
        c.steps.push_back(s);
    }
    for (std::size_t k = 0; k < chosen.size(); ++k) {
        const PoolItem& it = pool[chosen[k]];
        std::vector<Var> vars;
        for (Var v : it.poly.vars()) vars.push_back(bit_var(p.differing[var_index(v)]));
        AdjectivePredicate a{Poly(std::move(vars), std::vector<std::uint32_t>(it.poly.terms().begin(), it.poly.terms().end())),
                             static_cast<QualityId>(kFirstGeneratorQuality + k)};
        c.adjectives.push_back(std::move(a));
        c.outputs.push_back(step_of.at(chosen[k]));
        c.direct_bits = c.direct_bits || it.step.kind == PackStepKind::direct_bit;
    }
    fill_signatures(c);
    return c;
}

void number(PackReport& r) {
    for (std::size_t i = 0; i < r.candidates.size(); ++i) r.candidates[i].id = i;
}

}  // namespace

bool PackCandidate::same_output(const PackCandidate& o) const {
    return width == o.width && template_bits == o.template_bits && differing == o.differing &&
           adjectives == o.adjectives && writers == o.writers && signatures == o.signatures &&
           regenerated == o.regenerated && parent_after == o.parent_after && extra_verbs == o.extra_verbs;
}

PackReport abstraction_bits(std::span<const Bits> members, const OptionProfile& profile, const PackParams& params) {
    require(!members.empty(), Errc::invalid_argument, "cannot pack an empty context");
    PackReport report;
    const Prepared p = prepare(members);
    if (p.differing.empty()) {
        PackCandidate c = base_candidate(p, PackAlgorithm::abstraction);
        fill_signatures(c);
        report.candidates.push_back(std::move(c));
        return report;
    }
    if (p.differing.size() > params.max_differing) {
        report.direct_bits_tried = true;
        report.budget_exhausted = true;
        report.note = std::to_string(p.differing.size()) + " differing positions exceed the search budget";
        return report;
    }
    const std::size_t n = p.differing.size();
    const auto pool = build_pool(n, p.differing, spontaneous_ops(profile).adjective, params);
    std::vector<std::uint32_t> observed;
    for (const auto& m : p.members) observed.push_back(cube_index(m, p.differing));

    std::vector<std::uint32_t> combined, everything;
    for (std::uint32_t i = 0; i < pool.size(); ++i) {
        everything.push_back(i);
        if (pool[i].step.kind == PackStepKind::combine) combined.push_back(i);
    }
    CoverSearch search(pool, observed, n, params);
    auto sets = search.run(combined);
    if (sets.empty() && !search.exhausted()) {
        // Fallback: let adjectives read representation bits directly.
        report.direct_bits_tried = true;
        sets = search.run(everything);
    }
    report.budget_exhausted = search.exhausted();
    for (const auto& s : sets) report.candidates.push_back(candidate_from(p, pool, s));
    if (report.candidates.empty())
        report.note = report.budget_exhausted ? "search budget exhausted" : "no generator within the adjective budget";
    number(report);
    return report;
}

PackReport detalisation_bits(std::span<const Bits> members, const OptionProfile& profile, const PackParams& params) {
    require(!members.empty(), Errc::invalid_argument, "cannot pack an empty context");
    const Prepared p = prepare(members);
    PackReport report;
    std::size_t prefix = 0;
    while (prefix < p.width &&
           std::all_of(p.members.begin(), p.members.end(), [&](const Bits& m) { return m[prefix] == p.members[0][prefix]; }))
        ++prefix;
    std::size_t suffix = 0;
    while (suffix < p.width - prefix && std::all_of(p.members.begin(), p.members.end(), [&](const Bits& m) {
               return m[p.width - 1 - suffix] == p.members[0][p.width - 1 - suffix];
           }))
        ++suffix;
    if (prefix == 0 && suffix == 0) return abstraction_bits(members, profile, params);
    if (p.differing.size() > params.max_differing) {
        report.budget_exhausted = true;
        report.note = std::to_string(p.differing.size()) + " differing positions exceed the search budget";
        return report;
    }

    PackCandidate c = base_candidate(p, PackAlgorithm::detalisation);
    c.prefix = prefix;
    c.suffix = suffix;
    for (const auto& m : p.members)
        c.residues.emplace_back(m.begin() + static_cast<std::ptrdiff_t>(prefix),
                                m.end() - static_cast<std::ptrdiff_t>(suffix));
    const ClassOp noun = spontaneous_ops(profile).noun;
    for (std::size_t j = 0; j < p.differing.size(); ++j) {
        const auto d = p.differing[j];
        c.steps.push_back({PackStepKind::noun_op, noun, d, 0});
        c.outputs.push_back(static_cast<std::uint32_t>(j));
        const auto q = static_cast<QualityId>(kFirstGeneratorQuality + j);
        if (noun == ClassOp::specialize) {
            c.adjectives.push_back({Poly::variable(bit_var(d)), q});
        } else {
            c.writers.push_back({Poly::variable(quality_var(q)), d, false});
        }
    }
    fill_signatures(c);
    report.candidates.push_back(std::move(c));
    return report;
}

std::vector<Bits> regenerate(const PackCandidate& c) {
    std::set<Bits> out;
    if (!c.writers.empty()) {
        for (const auto& s : c.signatures) {
            Bits m = c.template_bits;
            for (std::size_t j = 0; j < c.writers.size(); ++j) {
                const auto& w = c.writers[j];
                m.at(w.action_point) = w.poly.eval([&](Var v) {
                    return is_quality(v) && var_index(v) - kFirstGeneratorQuality < s.size() &&
                           s[var_index(v) - kFirstGeneratorQuality] != 0;
                }) ? 1 : 0;
            }
            out.insert(std::move(m));
        }
        return {out.begin(), out.end()};
    }
    const std::set<Bits> wanted(c.signatures.begin(), c.signatures.end());
    const std::size_t n = c.differing.size();
    require(n <= 24, Errc::capacity, "too many differing positions to enumerate");
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
        Bits m = c.template_bits;
        for (std::size_t j = 0; j < n; ++j) m[c.differing[j]] = (x >> j) & 1u;
        Bits sig;
        for (const auto& a : c.adjectives) sig.push_back(a.poly.eval([&](Var v) { return m.at(var_index(v)) != 0; }) ? 1 : 0);
        if (wanted.contains(sig)) out.insert(std::move(m));
    }
    return {out.begin(), out.end()};
}

bool validate_candidate(const PackCandidate& c, std::span<const Bits> observed) {
    const auto produced = regenerate(c);
    for (const auto& o : observed) {
        Bits padded = o;
        if (padded.size() > c.width) return false;
        padded.resize(c.width, 0);
        if (!std::binary_search(produced.begin(), produced.end(), padded)) return false;
    }
    return true;
}

std::vector<ClassOp> candidate_ops(const PackCandidate& c, std::size_t parent_steps) {
    std::vector<ClassOp> ops;
    for (const auto& s : c.steps)
        if (s.kind != PackStepKind::direct_bit) ops.push_back(s.op);
    if (c.parent_after && c.parent_after->origin) {
        const auto& steps = c.parent_after->origin->steps;
        for (std::size_t i = parent_steps; i < steps.size(); ++i) ops.push_back(steps[i].op);
    }
    return ops;
}

Bits encode_candidate(const PackCandidate& c) {
    BitWriter w;
    w.put(static_cast<std::uint64_t>(c.algorithm), 1);
    w.put(c.width, 16);
    w.append(c.template_bits);
    w.put(c.differing.size(), 16);
    for (auto d : c.differing) w.put(d, 16);
    w.put(c.steps.size(), 16);
    for (const auto& s : c.steps) {
        w.put(static_cast<std::uint64_t>(s.kind), 2);
        w.put(static_cast<std::uint64_t>(s.op), 3);
        w.put(s.a, 16);
        w.put(s.b, 16);
    }
    w.put(c.outputs.size(), 16);
    for (auto o : c.outputs) w.put(o, 16);
    w.put(c.signatures.size(), 16);
    for (const auto& s : c.signatures) w.append(s);
    w.put(c.extra_verbs.size(), 16);
    for (const auto& e : c.extra_verbs) {
        w.put(e.target, 16);
        write_verb(w, e.verb);
    }
    return std::move(w).bits();
}

// --- class level ------------------------------------------------------------------

Bits binary_repr(const SimpleClass& cls, const Basis& basis) { return phi_encode(cls, basis); }

namespace {

std::vector<std::uint32_t> bit_args(const Poly& p) {
    std::vector<std::uint32_t> out;
    for (Var v : p.vars())
        if (!is_quality(v)) out.push_back(var_index(v));
    return out;
}

// Verb composition: chains V_l -> V_m where V_m reads V_l's action point and the two
// argument sets do not intersect.
SimpleClass compose_verbs(const SimpleClass& parent, BoolOp op, const PackParams& params) {
    SimpleClass cur = parent;
    std::size_t added = 0;
    const std::size_t n = parent.verbs.size();
    for (std::size_t l = 0; l < n && added < params.depth; ++l) {
        for (std::size_t m = 0; m < n && added < params.depth; ++m) {
            if (l == m) continue;
            const auto al = bit_args(parent.verbs[l].poly);
            const auto am = bit_args(parent.verbs[m].poly);
            if (!std::binary_search(am.begin(), am.end(), parent.verbs[l].action_point)) continue;
            std::vector<std::uint32_t> common;
            std::set_intersection(al.begin(), al.end(), am.begin(), am.end(), std::back_inserter(common));
            if (!common.empty()) continue;
            try {
                cur = apply_predicate_op(cur, PredicateTarget::verb, op, l, m, Provenance::spontaneous);
                ++added;
            } catch (const Error& e) {
                if (e.code() != Errc::ambiguity) throw;
            }
        }
    }
    return cur;
}

// Correlation fallback: a quality that equals one block bit on every recent sighting
// (at least two) yields a verb writing that quality to the bit.
std::vector<CorrelationVerb> correlation_verbs(const PackInput& input, const PackParams& params) {
    std::vector<CorrelationVerb> out;
    const std::size_t from = input.observations.size() > params.window ? input.observations.size() - params.window : 0;
    for (std::size_t k = 0; k < input.member_ids.size(); ++k) {
        const ClassId id = input.member_ids[k];
        const auto& cls = input.members[k];
        std::vector<const Observation*> seen;
        for (std::size_t i = from; i < input.observations.size(); ++i)
            if (input.observations[i].class_id == id && !input.observations[i].block.empty())
                seen.push_back(&input.observations[i]);
        if (seen.size() < 2) continue;
        for (std::size_t qi = 0; qi < cls.noun.qualities.size(); ++qi) {
            for (std::size_t x = 0; x < seen.front()->block.size(); ++x) {
                const bool agree = std::all_of(seen.begin(), seen.end(), [&](const Observation* o) {
                    return qi < o->qualities.size() && x < o->block.size() && o->qualities[qi] == o->block[x];
                });
                if (!agree) continue;
                out.push_back({id, {Poly::variable(quality_var(cls.noun.qualities[qi])), static_cast<std::uint32_t>(x), false}});
                if (out.size() >= 16) return out;
            }
        }
    }
    return out;
}

PackReport finish(PackReport report, const PackInput& input, const OptionProfile& profile, const PackParams& params) {
    const SimpleClass after = compose_verbs(input.parent, spontaneous_ops(profile).verb, params);
    const bool composed = after.verbs.size() > input.parent.verbs.size();
    const auto extra = composed ? std::vector<CorrelationVerb>{} : correlation_verbs(input, params);
    for (auto& c : report.candidates) {
        c.parent_after = after;
        c.extra_verbs = extra;
        c.correlation = !composed && !extra.empty();
    }
    return report;
}

std::vector<Bits> member_reprs(const PackInput& input, const Basis& basis) {
    require(!input.members.empty(), Errc::invalid_argument, "cannot pack an empty context");
    std::vector<Bits> out;
    for (const auto& m : input.members) out.push_back(binary_repr(m, basis));
    return out;
}

}  // namespace

PackReport abstraction_pack(const PackInput& input, const Basis& basis, const OptionProfile& profile,
                            const PackParams& params) {
    return finish(abstraction_bits(member_reprs(input, basis), profile, params), input, profile, params);
}

PackReport detalisation_pack(const PackInput& input, const Basis& basis, const OptionProfile& profile,
                             const PackParams& params) {
    return finish(detalisation_bits(member_reprs(input, basis), profile, params), input, profile, params);
}

PackInput pack_input(const MemoryTree& memory, const Context& context) {
    const ClassStore& store = memory.store();
    PackInput in;
    in.parent = store.at(store.shadow_of(context.parent).value_or(context.parent));
    for (auto c : context.classes) {
        in.members.push_back(store.at(c));
        in.member_ids.push_back(c);
    }
    in.observations = context.observations;
    return in;
}

}  // namespace laminar
