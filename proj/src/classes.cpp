#include "laminar/classes.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <fstream>
#include <sstream>

namespace laminar {

std::string_view to_string(ClassOp op) noexcept {
    switch (op) {
        case ClassOp::verb_xor: return "verb-xor";
        case ClassOp::verb_and: return "verb-and";
        case ClassOp::adjective_xor: return "adjective-xor";
        case ClassOp::adjective_and: return "adjective-and";
        case ClassOp::specialize: return "specialize";
        case ClassOp::argument: return "argument";
    }
    return "unknown";
}

bool is_verb_op(ClassOp op) noexcept { return op == ClassOp::verb_xor || op == ClassOp::verb_and; }
bool is_adjective_op(ClassOp op) noexcept { return op == ClassOp::adjective_xor || op == ClassOp::adjective_and; }
bool is_noun_op(ClassOp op) noexcept { return op == ClassOp::specialize || op == ClassOp::argument; }

std::vector<std::uint32_t> SimpleClass::adjective_arguments(std::size_t index) const {
    require(index < adjectives.size(), Errc::invalid_argument, "adjective index out of range");
    std::vector<std::uint32_t> out;
    for (Var v : adjectives[index].poly.vars())
        if (!is_quality(v)) out.push_back(var_index(v));
    return out;
}

void validate_class(const SimpleClass& cls) {
    const std::size_t span = cls.noun.mask.span();
    require(span >= 1, Errc::invalid_argument, "class '" + cls.name + "' has no mask");
    for (auto a : cls.noun.actions)
        require(a < span, Errc::invalid_argument, "action point outside mask span in '" + cls.name + "'");
    for (const auto& adj : cls.adjectives) {
        for (Var v : adj.poly.vars()) {
            require(!is_quality(v), Errc::invalid_argument, "adjective reads a quality in '" + cls.name + "'");
            require(var_index(v) < span, Errc::invalid_argument, "adjective argument outside mask span in '" + cls.name + "'");
        }
        require(std::find(cls.noun.qualities.begin(), cls.noun.qualities.end(), adj.output) != cls.noun.qualities.end(),
                Errc::invalid_argument, "adjective outputs an undeclared quality in '" + cls.name + "'");
    }
    for (const auto& verb : cls.verbs) {
        require(std::find(cls.noun.actions.begin(), cls.noun.actions.end(), verb.action_point) != cls.noun.actions.end(),
                Errc::invalid_argument, "verb writes an undeclared action point in '" + cls.name + "'");
        for (Var v : verb.poly.vars())
            if (!is_quality(v))
                require(var_index(v) < span, Errc::invalid_argument, "verb argument outside mask span in '" + cls.name + "'");
    }
}

QualityId fresh_quality(const SimpleClass& cls) noexcept {
    std::uint32_t next = 0x8000;
    for (auto q : cls.noun.qualities) next = std::max<std::uint32_t>(next, std::uint32_t{q} + 1);
    return static_cast<QualityId>(std::min<std::uint32_t>(next, 0xFFFF));
}

namespace {

void record(SimpleClass& cls, DerivationStep step) {
    if (cls.origin) cls.origin->steps.push_back(step);
}

void add_action(Noun& noun, std::uint32_t point) {
    if (std::find(noun.actions.begin(), noun.actions.end(), point) == noun.actions.end()) noun.actions.push_back(point);
}

bool reads(const AdjectivePredicate& a, std::uint32_t offset) {
    const auto vars = a.poly.vars();
    return std::binary_search(vars.begin(), vars.end(), bit_var(offset));
}

}  // namespace

std::uint32_t resolve_action_point(const SimpleClass& cls, std::span<const std::size_t> active_adjectives) {
    require(!active_adjectives.empty(), Errc::invalid_argument, "no active adjectives given");
    std::vector<bool> active(cls.adjectives.size(), false);
    for (auto i : active_adjectives) {
        require(i < cls.adjectives.size(), Errc::invalid_argument, "active adjective index out of range");
        active[i] = true;
    }
    for (std::uint32_t o = 0; o < cls.noun.mask.span(); ++o) {
        bool ok = true;
        for (std::size_t i = 0; i < cls.adjectives.size() && ok; ++i) ok = reads(cls.adjectives[i], o) == active[i];
        if (ok) return o;
    }
    fail(Errc::ambiguity, "no offset is read by exactly the active adjectives of '" + cls.name + "'");
}

SimpleClass apply_predicate_op(const SimpleClass& cls, PredicateTarget target, BoolOp op, std::size_t l,
                               std::size_t m, Provenance provenance) {
    SimpleClass out = cls;
    if (target == PredicateTarget::adjective) {
        require(l < cls.adjectives.size() && m < cls.adjectives.size(), Errc::invalid_argument,
                "adjective index out of range");
        AdjectivePredicate a{apply(op, cls.adjectives[l].poly, cls.adjectives[m].poly), fresh_quality(cls)};
        out.noun.qualities.push_back(a.output);
        out.adjectives.push_back(std::move(a));
        record(out, {op == BoolOp::xor_op ? ClassOp::adjective_xor : ClassOp::adjective_and,
                     static_cast<std::uint16_t>(l), static_cast<std::uint16_t>(m), provenance});
        return out;
    }
    require(l < cls.verbs.size() && m < cls.verbs.size(), Errc::invalid_argument, "verb index out of range");
    const auto pl = cls.verbs[l].action_point;
    const auto pm = cls.verbs[m].action_point;
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < cls.adjectives.size(); ++i)
        if (reads(cls.adjectives[i], pl) || reads(cls.adjectives[i], pm)) active.push_back(i);
    std::uint32_t point = 0;
    if (active.empty()) {
        require(pl == pm, Errc::ambiguity, "operand verbs act on different points and no adjective selects one");
        point = pl;
    } else {
        point = resolve_action_point(cls, active);
    }
    VerbPredicate v{apply(op, cls.verbs[l].poly, cls.verbs[m].poly), point, op == BoolOp::and_op};
    add_action(out.noun, point);
    out.verbs.push_back(std::move(v));
    record(out, {op == BoolOp::xor_op ? ClassOp::verb_xor : ClassOp::verb_and, static_cast<std::uint16_t>(l),
                 static_cast<std::uint16_t>(m), provenance});
    return out;
}

SimpleClass noun_specialize(const SimpleClass& cls, std::size_t offset, Provenance provenance) {
    SimpleClass out = cls;
    out.noun.mask = cls.noun.mask.without(offset);
    AdjectivePredicate a{Poly::variable(bit_var(static_cast<std::uint32_t>(offset))), fresh_quality(cls)};
    out.noun.qualities.push_back(a.output);
    out.adjectives.push_back(std::move(a));
    record(out, {ClassOp::specialize, static_cast<std::uint16_t>(offset), 0, provenance});
    return out;
}

SimpleClass noun_argument(const SimpleClass& cls, std::size_t offset, Provenance provenance) {
    const auto constant = cls.noun.mask.at(offset);
    require(constant.has_value(), Errc::invalid_argument, "mask has no constant at offset " + std::to_string(offset));
    SimpleClass out = cls;
    out.noun.mask = cls.noun.mask.without(offset);
    const auto point = static_cast<std::uint32_t>(offset);
    add_action(out.noun, point);
    out.verbs.push_back({*constant ? Poly::one() : Poly::zero(), point, false});
    record(out, {ClassOp::argument, static_cast<std::uint16_t>(offset), 0, provenance});
    return out;
}

SimpleClass apply_step(const SimpleClass& cls, const DerivationStep& step) {
    switch (step.op) {
        case ClassOp::verb_xor:
            return apply_predicate_op(cls, PredicateTarget::verb, BoolOp::xor_op, step.l, step.m, step.provenance);
        case ClassOp::verb_and:
            return apply_predicate_op(cls, PredicateTarget::verb, BoolOp::and_op, step.l, step.m, step.provenance);
        case ClassOp::adjective_xor:
            return apply_predicate_op(cls, PredicateTarget::adjective, BoolOp::xor_op, step.l, step.m, step.provenance);
        case ClassOp::adjective_and:
            return apply_predicate_op(cls, PredicateTarget::adjective, BoolOp::and_op, step.l, step.m, step.provenance);
        case ClassOp::specialize: return noun_specialize(cls, step.l, step.provenance);
        case ClassOp::argument: return noun_argument(cls, step.l, step.provenance);
    }
    fail(Errc::invalid_argument, "unknown class operation");
}

// --- basis -------------------------------------------------------------------

Basis::Basis(std::vector<SimpleClass> classes, std::size_t derived_budget) : classes_(std::move(classes)) {
    require(!classes_.empty(), Errc::invalid_argument, "basis must hold at least one class");
    require(classes_.size() < 0xFFFF, Errc::invalid_argument, "basis too large");
    const std::size_t total = std::max<std::size_t>(classes_.size() + derived_budget, 2);
    slot_width_ = static_cast<std::size_t>(std::bit_width(total - 1)) + 1;

    for (std::size_t i = 0; i < classes_.size(); ++i) {
        auto& cls = classes_[i];
        if (cls.is_sentence()) {
            std::vector<Mask::Entry> entries;
            for (std::size_t k = 0; k < cls.sentence.size(); ++k) {
                const auto& slot = cls.sentence[k];
                if (!slot) continue;
                require(*slot < classes_.size(), Errc::invalid_argument, "sentence of '" + cls.name + "' names an unknown class");
                const Bits code = slot_code(*slot);
                for (std::size_t b = 0; b < code.size(); ++b)
                    entries.push_back({static_cast<std::uint32_t>(k * slot_width_ + b), code[b] != 0});
            }
            cls.noun.mask = Mask(std::move(entries), cls.sentence.size() * slot_width_);
        }
        cls.origin = ClassOrigin{static_cast<std::uint16_t>(i), {}};
        validate_class(cls);
    }
}

const SimpleClass& Basis::at(std::size_t index) const {
    require(index < classes_.size(), Errc::invalid_argument, "basis index " + std::to_string(index) + " out of range");
    return classes_[index];
}

std::optional<std::size_t> Basis::find(std::string_view name) const noexcept {
    for (std::size_t i = 0; i < classes_.size(); ++i)
        if (classes_[i].name == name) return i;
    return std::nullopt;
}

Bits Basis::slot_code(std::size_t class_id) const {
    require(class_id < id_capacity(), Errc::capacity, "class id " + std::to_string(class_id) + " does not fit a slot");
    BitWriter w;
    w.put(true);
    w.put(class_id, static_cast<unsigned>(slot_width_ - 1));
    return std::move(w).bits();
}

Mask Basis::slot_mask(std::size_t class_id) const {
    const Bits code = slot_code(class_id);
    std::vector<Mask::Entry> entries;
    for (std::size_t b = 0; b < code.size(); ++b) entries.push_back({static_cast<std::uint32_t>(b), code[b] != 0});
    return Mask(std::move(entries));
}

bool operator==(const Basis& a, const Basis& b) {
    return a.slot_width() == b.slot_width() && std::ranges::equal(a.classes(), b.classes());
}

// --- overclass mapping ---------------------------------------------------------

namespace {

constexpr unsigned kIndexBits = 16;
constexpr unsigned kStepCountBits = 8;
constexpr unsigned kOpBits = 3;
constexpr unsigned kOperandBits = 8;

bool adds_adjective(ClassOp op) { return is_adjective_op(op) || op == ClassOp::specialize; }

}  // namespace

Bits phi_encode(const SimpleClass& cls, const Basis& basis) {
    if (!cls.origin) fail(Errc::not_encodable, "class '" + cls.name + "' has no derivation record");
    const auto& origin = *cls.origin;
    if (origin.basis_index >= basis.size()) fail(Errc::not_encodable, "derivation names an unknown basis class");
    if (origin.steps.size() >= (1u << kStepCountBits)) fail(Errc::not_encodable, "derivation too long");

    BitWriter out;
    out.put(origin.basis_index, kIndexBits);
    out.put(origin.steps.size(), kStepCountBits);
    SimpleClass current = basis.at(origin.basis_index);
    for (const auto& step : origin.steps) {
        if (step.l >= (1u << kOperandBits) || step.m >= (1u << kOperandBits))
            fail(Errc::not_encodable, "derivation operand too large");
        try {
            current = apply_step(current, step);
        } catch (const Error& e) {
            fail(Errc::not_encodable, std::string("derivation does not replay: ") + e.what());
        }
        out.put(static_cast<std::uint64_t>(step.op), kOpBits);
        out.put(step.provenance == Provenance::internal_speech);
        out.put(step.l, kOperandBits);
        out.put(step.m, kOperandBits);
        if (adds_adjective(step.op)) {
            write_adjective(out, current.adjectives.back());
        } else {
            write_verb(out, current.verbs.back());
        }
    }
    if (!(current == cls)) fail(Errc::not_encodable, "class '" + cls.name + "' differs from its derivation replay");
    return std::move(out).bits();
}

SimpleClass phi_decode(std::span<const std::uint8_t> bits, const Basis& basis) {
    BitReader in(bits);
    const auto index = in.get(kIndexBits);
    require(index < basis.size(), Errc::decode, "basis index " + std::to_string(index) + " out of range");
    const auto count = in.get(kStepCountBits);
    SimpleClass current = basis.at(index);
    for (std::uint64_t s = 0; s < count; ++s) {
        DerivationStep step;
        const auto op = in.get(kOpBits);
        require(op <= static_cast<std::uint64_t>(ClassOp::argument), Errc::decode, "unknown class operation code");
        step.op = static_cast<ClassOp>(op);
        step.provenance = in.get() ? Provenance::internal_speech : Provenance::spontaneous;
        step.l = static_cast<std::uint16_t>(in.get(kOperandBits));
        step.m = static_cast<std::uint16_t>(in.get(kOperandBits));
        try {
            current = apply_step(current, step);
        } catch (const Error& e) {
            fail(Errc::decode, std::string("derivation step does not apply: ") + e.what());
        }
        if (adds_adjective(step.op)) {
            require(read_adjective(in) == current.adjectives.back(), Errc::decode, "recorded adjective disagrees with replay");
        } else {
            require(read_verb(in) == current.verbs.back(), Errc::decode, "recorded verb disagrees with replay");
        }
    }
    require(in.rest_is_zero(), Errc::decode, "unexpected bits after class encoding");
    return current;
}

}  // namespace laminar

// --- basis text format ---------------------------------------------------------

namespace laminar {

namespace {

std::vector<std::string> split_words(std::string_view line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.emplace_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::uint32_t parse_number(const std::string& word, std::size_t line_no) {
    std::size_t used = 0;
    unsigned long value = 0;
    try {
        value = std::stoul(word, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    require(used == word.size() && !word.empty(), Errc::data,
            "line " + std::to_string(line_no) + ": expected a number, got '" + word + "'");
    return static_cast<std::uint32_t>(value);
}

// "<head words> : <polynomial>"
std::pair<std::vector<std::string>, Poly> split_predicate(std::string_view rest, std::size_t line_no) {
    const auto colon = rest.find(':');
    require(colon != std::string_view::npos, Errc::data, "line " + std::to_string(line_no) + ": expected ':' before polynomial");
    return {split_words(rest.substr(0, colon)), Poly::parse(rest.substr(colon + 1))};
}

}  // namespace

Basis parse_basis(std::string_view text, std::size_t derived_budget) {
    struct Pending {
        SimpleClass cls;
        std::vector<std::string> sentence;
        bool has_mask = false;
    };
    std::vector<Pending> pending;
    std::optional<Pending> open;
    std::size_t line_no = 0;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto words = split_words(line);
        if (words.empty()) continue;
        const std::string& key = words[0];
        const std::string where = "line " + std::to_string(line_no) + ": ";

        if (key == "class") {
            require(!open, Errc::data, where + "class blocks cannot nest");
            require(words.size() == 2, Errc::data, where + "expected 'class <name>'");
            open.emplace();
            open->cls.name = words[1];
            continue;
        }
        require(open.has_value(), Errc::data, where + "'" + key + "' outside a class block");
        auto& cls = open->cls;
        const auto rest = line.substr(line.find(key) + key.size());

        if (key == "end") {
            require(open->has_mask != !open->sentence.empty(), Errc::data,
                    where + "class '" + cls.name + "' needs exactly one of 'mask' or 'sentence'");
            pending.push_back(std::move(*open));
            open.reset();
        } else if (key == "mask") {
            require(words.size() == 2, Errc::data, where + "expected 'mask <pattern>'");
            cls.noun.mask = Mask::parse(words[1]);
            open->has_mask = true;
        } else if (key == "quality") {
            for (std::size_t i = 1; i < words.size(); ++i) {
                const auto q = parse_number(words[i], line_no);
                require(q <= 0xFFFF, Errc::data, where + "quality id too large");
                cls.noun.qualities.push_back(static_cast<QualityId>(q));
            }
        } else if (key == "action") {
            for (std::size_t i = 1; i < words.size(); ++i) cls.noun.actions.push_back(parse_number(words[i], line_no));
        } else if (key == "adjective") {
            auto [head, poly] = split_predicate(rest, line_no);
            require(head.size() == 1, Errc::data, where + "expected 'adjective <quality> : <poly>'");
            const auto q = parse_number(head[0], line_no);
            require(q <= 0xFFFF, Errc::data, where + "quality id too large");
            cls.adjectives.push_back({std::move(poly), static_cast<QualityId>(q)});
        } else if (key == "verb") {
            auto [head, poly] = split_predicate(rest, line_no);
            require(!head.empty() && head.size() <= 2 && (head.size() == 1 || head[1] == "and"), Errc::data,
                    where + "expected 'verb <action point> [and] : <poly>'");
            cls.verbs.push_back({std::move(poly), parse_number(head[0], line_no), head.size() == 2});
        } else if (key == "adjective-bits" || key == "verb-bits") {
            require(words.size() == 2, Errc::data, where + "expected '" + key + " <bits>'");
            const Bits bits = parse_bits(words[1]);
            try {
                if (key == "adjective-bits") {
                    cls.adjectives.push_back(std::get<AdjectivePredicate>(deserialize_predicate(bits, PredicateKind::adjective)));
                } else {
                    cls.verbs.push_back(std::get<VerbPredicate>(deserialize_predicate(bits, PredicateKind::verb)));
                }
            } catch (const Error& e) {
                fail(Errc::data, where + e.what());
            }
        } else if (key == "sentence") {
            require(words.size() >= 2, Errc::data, where + "empty sentence");
            open->sentence.assign(words.begin() + 1, words.end());
        } else {
            fail(Errc::data, where + "unknown keyword '" + key + "'");
        }
    }
    require(!open, Errc::data, "class '" + (open ? open->cls.name : std::string()) + "' is missing 'end'");

    std::vector<SimpleClass> classes;
    for (const auto& p : pending) {
        for (const auto& c : classes) require(c.name != p.cls.name, Errc::data, "duplicate class name '" + p.cls.name + "'");
        classes.push_back(p.cls);
    }
    for (std::size_t i = 0; i < pending.size(); ++i) {
        for (const auto& word : pending[i].sentence) {
            if (word == "*") {
                classes[i].sentence.push_back(std::nullopt);
                continue;
            }
            std::optional<std::size_t> idx;
            for (std::size_t k = 0; k < classes.size(); ++k)
                if (classes[k].name == word) idx = k;
            require(idx.has_value(), Errc::data, "sentence of '" + classes[i].name + "' names unknown class '" + word + "'");
            classes[i].sentence.push_back(static_cast<std::uint16_t>(*idx));
        }
        // Sentence-only rows need a provisional span; Basis replaces the mask.
        if (classes[i].is_sentence()) classes[i].noun.mask = Mask({}, 1);
    }
    try {
        return Basis(std::move(classes), derived_budget);
    } catch (const Error& e) {
        if (e.code() == Errc::data) throw;
        fail(Errc::data, e.what());
    }
}

Basis load_basis_file(const std::string& path, std::size_t derived_budget) {
    std::ifstream in(path);
    require(in.good(), Errc::data, "cannot open basis file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_basis(buffer.str(), derived_budget);
}

}  // namespace laminar
