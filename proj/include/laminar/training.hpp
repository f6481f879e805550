#pragma once

// Test-data generation (Imaginator), the genetic packing search, mask
// discovery (Detector) and pleasure/pain control.

#include <cstdint>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "laminar/decisions.hpp"
#include "laminar/memory.hpp"
#include "laminar/options.hpp"

namespace laminar {

using Sequence = std::vector<ClassId>;

class GeneratorStrategy {
public:
    virtual ~GeneratorStrategy() = default;
    virtual std::string name() const = 0;
    /// Up to `count` distinct sequences of `length` over `alphabet`.
    virtual std::vector<Sequence> generate(const std::vector<ClassId>& alphabet, std::size_t length, std::size_t count,
                                           std::mt19937_64& rng) = 0;
    virtual void reinforce(const Sequence& sample, bool positive) = 0;
    virtual std::size_t reinforcements() const = 0;
};

class DiscriminatorStrategy {
public:
    virtual ~DiscriminatorStrategy() = default;
    virtual std::string name() const = 0;
    virtual bool judge(const Sequence& s) const = 0;
    /// Observed data from the stack.
    virtual void learn(const Sequence& observed) = 0;
    virtual void reinforce(const Sequence& sample, bool positive) = 0;
    virtual std::size_t negatives() const = 0;
};

/// Samples sequences weighted by how often each class was reinforced.
class FrequencyGenerator final : public GeneratorStrategy {
public:
    std::string name() const override { return "frequency"; }
    std::vector<Sequence> generate(const std::vector<ClassId>& alphabet, std::size_t length, std::size_t count,
                                   std::mt19937_64& rng) override;
    void reinforce(const Sequence& sample, bool positive) override;
    std::size_t reinforcements() const override { return reinforcements_; }

private:
    std::map<ClassId, std::uint64_t> weight_;
    std::size_t reinforcements_ = 0;
};

/// Passes sequences whose every bigram was seen in stack data, unless the
/// exact sequence was marked negative.
class NgramDiscriminator final : public DiscriminatorStrategy {
public:
    explicit NgramDiscriminator(std::size_t n = 2) : n_(n) {}
    std::string name() const override { return "ngram"; }
    bool judge(const Sequence& s) const override;
    void learn(const Sequence& observed) override;
    void reinforce(const Sequence& sample, bool positive) override;
    std::size_t negatives() const override { return negative_.size(); }

private:
    std::size_t n_;
    std::set<Sequence> grams_;
    std::set<Sequence> negative_;
};

/// Accepts everything; useful as a control.
class PermissiveDiscriminator final : public DiscriminatorStrategy {
public:
    std::string name() const override { return "permissive"; }
    bool judge(const Sequence&) const override { return true; }
    void learn(const Sequence&) override {}
    void reinforce(const Sequence&, bool) override {}
    std::size_t negatives() const override { return 0; }
};

std::unique_ptr<GeneratorStrategy> make_generator(const std::string& name);
std::unique_ptr<DiscriminatorStrategy> make_discriminator(const std::string& name);

struct TestItem {
    ClassId owner = 0;  // class whose children were recombined
    Sequence sequence;
    std::size_t level = 1;
    friend bool operator==(const TestItem&, const TestItem&) = default;
};

struct TestTree {
    std::vector<TestItem> items;
};

/// Slot codes of the sequence's global ancestors, back to back.
Bits sequence_code(const Sequence& s, const ClassStore& store);

/// scope-error when no context has `parent` as a member.
TestTree imaginator_generate(ClassId parent, const MemoryTree& memory, GeneratorStrategy& generator,
                             const DiscriminatorStrategy& discriminator, std::mt19937_64& rng, std::size_t batch = 16);

struct GaParams {
    std::size_t population = 32;
    std::size_t generations = 16;
    std::size_t elitism = 2;
    std::size_t tournament = 2;
    std::size_t max_steps = 6;  // derivation steps added on top of the parent
};

struct Individual {
    SimpleClass cls;
    std::size_t fitness = 0;
    std::size_t steps = 0;  // mutations applied
    std::vector<DerivationStep> added;
};

struct GaResult {
    std::vector<Individual> ranked;           // best first
    std::vector<std::size_t> best_per_generation;  // index 0 is the seeded population
};

/// Number of test items whose slot code the class's mask accepts.
std::size_t ga_fitness(const SimpleClass& cls, const std::vector<Bits>& codes);

/// Every single-step spontaneous operation applicable to `cls`.
std::vector<DerivationStep> spontaneous_steps(const SimpleClass& cls, const OptionProfile& profile);

GaResult genetic_search(const SimpleClass& parent, const TestTree& tree, const ClassStore& store,
                        const OptionProfile& profile, const GaParams& params, std::mt19937_64& rng);

struct DetectorParams {
    std::size_t repeat = 3;
    std::size_t min_length = 3;
    std::size_t max_length = 8;
    std::size_t proposals = 4;
};

struct DetectorReport {
    std::vector<Bits> masks;      // repeating substrings, maximal
    std::vector<Bits> sequences;  // absent from the window
};

DetectorReport detector_scan(std::span<const Bits> window, const DetectorParams& params = {});

enum class Polarity { pleasure, pain };
std::string_view to_string(Polarity p) noexcept;

struct ControlEvent {
    std::uint64_t tick = 0;
    Polarity polarity = Polarity::pleasure;
    friend bool operator==(const ControlEvent&, const ControlEvent&) = default;
};

/// Patches applied but not yet judged by control data.
struct PendingPatch {
    AppliedPatch record;
    Sequence sample;  // member classes of the patched context
};

struct Disposition {
    std::size_t patch = 0;
    bool applied = false;
};

/// Pleasure keeps every pending patch and reinforces the generator; pain
/// rolls them back newest first and feeds them to the discriminator as
/// negatives. Either way the pending list is emptied.
std::vector<Disposition> apply_control(const ControlEvent& event, std::vector<PendingPatch>& pending,
                                       GeneratorStrategy& generator, DiscriminatorStrategy& discriminator,
                                       MemoryTree& memory);

/// Two bits per event, newest last: 11 applied, 10 dropped; zero padded.
Bits emotions_bits(std::span<const Disposition> history, std::size_t width);

}  // namespace laminar
