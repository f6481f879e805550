#include "laminar/boolalg.hpp"

#include <algorithm>
#include <bit>
#include <cctype>

#include "laminar/kernels.hpp"

namespace laminar {

namespace {

// Lexicographic order on the ascending variable-index tuple of a monomial.
bool canonical_less(std::uint32_t a, std::uint32_t b) {
    while (true) {
        if (a == 0) return b != 0;
        if (b == 0) return false;
        const int la = std::countr_zero(a);
        const int lb = std::countr_zero(b);
        if (la != lb) return la < lb;
        a &= a - 1;
        b &= b - 1;
    }
}

std::vector<Var> merge_vars(std::span<const Var> a, std::span<const Var> b) {
    std::vector<Var> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    require(out.size() <= Poly::max_vars, Errc::invalid_argument,
            "polynomial would exceed " + std::to_string(Poly::max_vars) + " variables");
    return out;
}

// Re-expresses monomial masks over `from` as masks over the superset `to`.
std::vector<std::uint32_t> remap(std::span<const std::uint32_t> terms, std::span<const Var> from,
                                 std::span<const Var> to) {
    std::vector<unsigned> index(from.size());
    for (std::size_t j = 0; j < from.size(); ++j)
        index[j] = static_cast<unsigned>(std::lower_bound(to.begin(), to.end(), from[j]) - to.begin());
    std::vector<std::uint32_t> out;
    out.reserve(terms.size());
    for (auto t : terms) {
        std::uint32_t m = 0;
        for (std::size_t j = 0; j < from.size(); ++j)
            if (t & (1u << j)) m |= 1u << index[j];
        out.push_back(m);
    }
    return out;
}

std::string var_name(Var v) {
    return (is_quality(v) ? "q" : "b") + std::to_string(var_index(v));
}

}  // namespace

Poly::Poly(std::vector<Var> vars, std::vector<std::uint32_t> terms) : vars_(std::move(vars)), terms_(std::move(terms)) {
    require(std::is_sorted(vars_.begin(), vars_.end()) &&
                std::adjacent_find(vars_.begin(), vars_.end()) == vars_.end(),
            Errc::invalid_argument, "polynomial variables must be strictly ascending");
    require(vars_.size() <= 32, Errc::invalid_argument, "too many polynomial variables");
    canonicalize();
}

void Poly::canonicalize() {
    // XOR semantics: equal monomials cancel in pairs.
    std::sort(terms_.begin(), terms_.end());
    std::vector<std::uint32_t> kept;
    for (std::size_t i = 0; i < terms_.size();) {
        std::size_t j = i;
        while (j < terms_.size() && terms_[j] == terms_[i]) ++j;
        if ((j - i) % 2 == 1) kept.push_back(terms_[i]);
        i = j;
    }
    std::uint32_t used = 0;
    for (auto t : kept) used |= t;
    std::vector<Var> support;
    std::vector<unsigned> to_new(vars_.size(), 0);
    for (std::size_t j = 0; j < vars_.size(); ++j) {
        if (used & (1u << j)) {
            to_new[j] = static_cast<unsigned>(support.size());
            support.push_back(vars_[j]);
        }
    }
    require(support.size() <= max_vars, Errc::invalid_argument,
            "polynomial exceeds " + std::to_string(max_vars) + " variables");
    for (auto& t : kept) {
        std::uint32_t m = 0;
        for (std::size_t j = 0; j < vars_.size(); ++j)
            if (t & (1u << j)) m |= 1u << to_new[j];
        t = m;
    }
    std::sort(kept.begin(), kept.end(), canonical_less);
    vars_ = std::move(support);
    terms_ = std::move(kept);
}

Poly Poly::one() { return Poly({}, {0u}); }

Poly Poly::variable(Var v) { return Poly({v}, {1u}); }

Poly Poly::from_monomials(std::span<const Monomial> monomials) {
    std::vector<Var> vars;
    for (const auto& m : monomials) vars.insert(vars.end(), m.begin(), m.end());
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    require(vars.size() <= 32, Errc::invalid_argument, "too many polynomial variables");
    std::vector<std::uint32_t> terms;
    for (const auto& m : monomials) {
        std::uint32_t mask = 0;
        for (Var v : m) mask |= 1u << (std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
        terms.push_back(mask);
    }
    return Poly(std::move(vars), std::move(terms));
}

Poly Poly::parse(std::string_view text) {
    std::vector<Monomial> monomials;
    std::string clean;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) clean.push_back(c);
    if (clean.empty() || clean == "0") return {};
    std::size_t pos = 0;
    while (pos <= clean.size()) {
        const std::size_t plus = std::min(clean.find('+', pos), clean.size());
        const std::string term = clean.substr(pos, plus - pos);
        require(!term.empty(), Errc::data, "empty term in polynomial '" + std::string(text) + "'");
        Monomial mono;
        std::size_t fpos = 0;
        bool zero = false;
        while (fpos <= term.size()) {
            const std::size_t star = std::min(term.find('*', fpos), term.size());
            const std::string factor = term.substr(fpos, star - fpos);
            if (factor == "1") {
            } else if (factor == "0") {
                zero = true;
            } else if (factor.size() >= 2 && (factor[0] == 'b' || factor[0] == 'q') &&
                       std::all_of(factor.begin() + 1, factor.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
                const auto idx = static_cast<std::uint32_t>(std::stoul(factor.substr(1)));
                mono.push_back(factor[0] == 'b' ? bit_var(idx) : quality_var(idx));
            } else {
                fail(Errc::data, "bad factor '" + factor + "' in polynomial");
            }
            fpos = star + 1;
        }
        if (!zero) {
            std::sort(mono.begin(), mono.end());
            mono.erase(std::unique(mono.begin(), mono.end()), mono.end());
            monomials.push_back(std::move(mono));
        }
        pos = plus + 1;
    }
    return from_monomials(monomials);
}

std::vector<Monomial> Poly::monomials() const {
    std::vector<Monomial> out;
    out.reserve(terms_.size());
    for (auto t : terms_) {
        Monomial m;
        for (std::size_t j = 0; j < vars_.size(); ++j)
            if (t & (1u << j)) m.push_back(vars_[j]);
        out.push_back(std::move(m));
    }
    return out;
}

bool Poly::eval_local(std::uint32_t local) const noexcept {
    bool acc = false;
    for (auto t : terms_)
        if ((t & ~local) == 0) acc = !acc;
    return acc;
}

bool Poly::eval(const Assignment& assignment) const {
    std::uint32_t local = 0;
    for (std::size_t j = 0; j < vars_.size(); ++j) {
        auto it = assignment.find(vars_[j]);
        require(it != assignment.end(), Errc::invalid_argument, "no value for variable " + var_name(vars_[j]));
        if (it->second) local |= 1u << j;
    }
    return eval_local(local);
}

bool Poly::eval(const std::function<bool(Var)>& value) const {
    std::uint32_t local = 0;
    for (std::size_t j = 0; j < vars_.size(); ++j)
        if (value(vars_[j])) local |= 1u << j;
    return eval_local(local);
}

Bits Poly::truth_table(std::span<const Var> universe) const {
    const auto n = static_cast<unsigned>(universe.size());
    require(n <= max_vars, Errc::invalid_argument, "truth table universe too large");
    std::vector<Var> sorted(universe.begin(), universe.end());
    std::vector<unsigned> position(vars_.size());
    for (std::size_t j = 0; j < vars_.size(); ++j) {
        auto it = std::find(universe.begin(), universe.end(), vars_[j]);
        require(it != universe.end(), Errc::invalid_argument, "universe lacks variable " + var_name(vars_[j]));
        position[j] = static_cast<unsigned>(it - universe.begin());
    }
    const std::size_t size = std::size_t{1} << n;
    std::vector<std::uint64_t> table(kernels::word_count(size), 0);
    for (auto t : terms_) {
        std::size_t idx = 0;
        for (std::size_t j = 0; j < vars_.size(); ++j)
            if (t & (1u << j)) idx |= std::size_t{1} << position[j];
        table[idx / 64] ^= 1ull << (idx % 64);
    }
    kernels::active().mobius(table, n);
    Bits out(size);
    for (std::size_t x = 0; x < size; ++x) out[x] = (table[x / 64] >> (x % 64)) & 1u;
    return out;
}

std::string Poly::to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto t : terms_) {
        if (!s.empty()) s += " + ";
        if (t == 0) {
            s += "1";
            continue;
        }
        bool first = true;
        for (std::size_t j = 0; j < vars_.size(); ++j) {
            if (!(t & (1u << j))) continue;
            if (!first) s += "*";
            s += var_name(vars_[j]);
            first = false;
        }
    }
    return s;
}

Poly xor_poly(const Poly& p, const Poly& q) {
    auto vars = merge_vars(p.vars(), q.vars());
    auto terms = remap(p.terms(), p.vars(), vars);
    auto more = remap(q.terms(), q.vars(), vars);
    terms.insert(terms.end(), more.begin(), more.end());
    return Poly(std::move(vars), std::move(terms));
}

Poly and_poly(const Poly& p, const Poly& q) {
    auto vars = merge_vars(p.vars(), q.vars());
    const auto a = remap(p.terms(), p.vars(), vars);
    const auto b = remap(q.terms(), q.vars(), vars);
    std::vector<std::uint32_t> terms;
    terms.reserve(a.size() * b.size());
    for (auto x : a)
        for (auto y : b) terms.push_back(x | y);
    return Poly(std::move(vars), std::move(terms));
}

Poly apply(BoolOp op, const Poly& p, const Poly& q) {
    return op == BoolOp::xor_op ? xor_poly(p, q) : and_poly(p, q);
}

Poly from_truth_table(std::span<const std::uint8_t> table) {
    const std::size_t size = table.size();
    require(size >= 1 && std::has_single_bit(size), Errc::invalid_argument, "truth table length must be a power of two");
    const auto n = static_cast<unsigned>(std::countr_zero(size));
    require(n <= Poly::max_vars, Errc::invalid_argument, "truth table too large");
    std::vector<std::uint64_t> words(kernels::word_count(size), 0);
    for (std::size_t x = 0; x < size; ++x)
        if (table[x]) words[x / 64] |= 1ull << (x % 64);
    kernels::active().mobius(words, n);
    std::vector<Var> vars(n);
    for (unsigned j = 0; j < n; ++j) vars[j] = bit_var(j);
    std::vector<std::uint32_t> terms;
    for (std::size_t x = 0; x < size; ++x)
        if ((words[x / 64] >> (x % 64)) & 1u) terms.push_back(static_cast<std::uint32_t>(x));
    return Poly(std::move(vars), std::move(terms));
}

// --- serialization ---------------------------------------------------------

namespace {

void write_coefficients(BitWriter& out, const Poly& p) {
    const std::size_t count = std::size_t{1} << p.vars().size();
    Bits coeff(count, 0);
    for (auto t : p.terms()) coeff[t] = 1;
    out.append(coeff);
}

Poly read_coefficients(BitReader& in, std::vector<Var> vars) {
    const std::size_t count = std::size_t{1} << vars.size();
    const Bits coeff = in.take(count);
    std::vector<std::uint32_t> terms;
    std::uint32_t used = 0;
    for (std::size_t m = 0; m < count; ++m) {
        if (coeff[m]) {
            terms.push_back(static_cast<std::uint32_t>(m));
            used |= static_cast<std::uint32_t>(m);
        }
    }
    const std::uint32_t all = vars.empty() ? 0u : static_cast<std::uint32_t>((std::uint64_t{1} << vars.size()) - 1);
    require(used == all, Errc::decode, "argument list names a variable no monomial uses");
    return Poly(std::move(vars), std::move(terms));
}

std::vector<Var> read_ascending(BitReader& in, unsigned count, unsigned width, bool quality) {
    std::vector<Var> out;
    for (unsigned i = 0; i < count; ++i) {
        const auto idx = static_cast<std::uint32_t>(in.get(width));
        const Var v = quality ? quality_var(idx) : bit_var(idx);
        require(out.empty() || out.back() < v, Errc::decode, "arguments not strictly ascending");
        out.push_back(v);
    }
    return out;
}

}  // namespace

void write_adjective(BitWriter& out, const AdjectivePredicate& a) {
    const auto vars = a.poly.vars();
    for (Var v : vars) {
        require(!is_quality(v), Errc::invalid_argument, "adjective polynomial reads a quality");
        require(var_index(v) < (1u << kOffsetBits), Errc::invalid_argument, "adjective argument offset too large");
    }
    out.put(vars.size(), kArgCountBits);
    for (Var v : vars) out.put(var_index(v), kOffsetBits);
    write_coefficients(out, a.poly);
    out.put(a.output, kQualityBits);
}

void write_verb(BitWriter& out, const VerbPredicate& v) {
    std::vector<Var> bits;
    std::vector<Var> qualities;
    for (Var x : v.poly.vars()) (is_quality(x) ? qualities : bits).push_back(x);
    for (Var x : bits)
        require(var_index(x) < (1u << kOffsetBits), Errc::invalid_argument, "verb argument offset too large");
    for (Var x : qualities)
        require(var_index(x) < (1u << kQualityBits), Errc::invalid_argument, "verb quality id too large");
    require(v.action_point < (1u << kOffsetBits), Errc::invalid_argument, "action point too large");
    out.put(qualities.size(), kArgCountBits);
    for (Var x : qualities) out.put(var_index(x), kQualityBits);
    out.put(bits.size(), kArgCountBits);
    for (Var x : bits) out.put(var_index(x), kOffsetBits);
    write_coefficients(out, v.poly);
    out.put(v.action_point, kOffsetBits);
    out.put(v.op_bit);
}

AdjectivePredicate read_adjective(BitReader& in) {
    const auto n = static_cast<unsigned>(in.get(kArgCountBits));
    require(n <= Poly::max_vars, Errc::decode, "adjective argument count too large");
    auto vars = read_ascending(in, n, kOffsetBits, false);
    AdjectivePredicate a;
    a.poly = read_coefficients(in, std::move(vars));
    a.output = static_cast<QualityId>(in.get(kQualityBits));
    return a;
}

VerbPredicate read_verb(BitReader& in) {
    const auto nq = static_cast<unsigned>(in.get(kArgCountBits));
    auto qualities = read_ascending(in, nq, kQualityBits, true);
    const auto nb = static_cast<unsigned>(in.get(kArgCountBits));
    require(nq + nb <= Poly::max_vars, Errc::decode, "verb argument count too large");
    auto vars = read_ascending(in, nb, kOffsetBits, false);
    vars.insert(vars.end(), qualities.begin(), qualities.end());
    VerbPredicate v;
    v.poly = read_coefficients(in, std::move(vars));
    v.action_point = static_cast<std::uint32_t>(in.get(kOffsetBits));
    v.op_bit = in.get();
    return v;
}

Bits serialize_adjective(const AdjectivePredicate& a) {
    BitWriter w;
    write_adjective(w, a);
    return std::move(w).bits();
}

Bits serialize_verb(const VerbPredicate& v) {
    BitWriter w;
    write_verb(w, v);
    return std::move(w).bits();
}

Predicate deserialize_predicate(std::span<const std::uint8_t> bits, PredicateKind kind) {
    require(!bits.empty(), Errc::decode, "empty predicate encoding");
    BitReader in(bits);
    Predicate p = kind == PredicateKind::adjective ? Predicate(read_adjective(in)) : Predicate(read_verb(in));
    require(in.remaining() == 0, Errc::decode, "trailing bits after predicate");
    return p;
}

}  // namespace laminar
