#include "doctest.h"

#include <random>
#include <utility>
#include <vector>

#include "laminar/dynamics.hpp"
#include "laminar/oracle.hpp"

using namespace laminar;

TEST_SUITE("dynamics") {

TEST_CASE("hormones grow with patch outcomes") {
    HormoneState state;
    state.accumulate(0, 3, 0);
    CHECK(state.happiness() == 3.0);
    CHECK(state.sadness() == 0.0);
    state.accumulate(1, 0, 0);
    CHECK(state.happiness() == 3.0);
    state.accumulate(2, 1, 2);
    CHECK(state.happiness() == 4.0);
    CHECK(state.sadness() == 2.0);
    state.advance(32);
    CHECK(state.happiness() == 1.0);
    state.advance(34);
    CHECK(state.happiness() == 0.0);
    CHECK(state.sadness() == 0.0);

    DynamicsParams bad;
    bad.window = 0;
    CHECK_THROWS_AS(HormoneState{bad}, Error);
}

TEST_CASE("hormone accumulators match the windowed replay") {
    std::mt19937_64 rng(8);
    for (int round = 0; round < 200; ++round) {
        DynamicsParams params;
        params.window = 1 + rng() % 40;
        params.h = 0.5 + static_cast<double>(rng() % 4);
        params.s = 0.25 * static_cast<double>(1 + rng() % 8);
        HormoneState state(params);
        std::vector<std::pair<std::uint64_t, double>> happy, sad;
        std::uint64_t tick = 0;
        for (int e = 0; e < 60; ++e) {
            tick += rng() % 5;
            const std::size_t a = rng() % 4, d = rng() % 4;
            state.accumulate(tick, a, d);
            happy.emplace_back(tick, params.h * static_cast<double>(a));
            sad.emplace_back(tick, params.s * static_cast<double>(d));
            CHECK(state.happiness() == doctest::Approx(oracle::windowed_sum(happy, tick, params.window)));
            CHECK(state.sadness() == doctest::Approx(oracle::windowed_sum(sad, tick, params.window)));
            CHECK(state.happiness() >= 0.0);
            CHECK(state.sadness() >= 0.0);
        }
    }
}

TEST_CASE("frequencies are linear in the accumulators") {
    DynamicsParams params;
    params.k_d = 0.75;
    params.k_g = 2.0;
    for (double scale : {1.0, 2.0, 10.0}) {
        HormoneState state(params);
        state.accumulate(0, static_cast<std::size_t>(3 * scale), static_cast<std::size_t>(2 * scale));
        const auto f = detector_frequencies(state);
        CHECK(f.discriminator == doctest::Approx(0.75 * 3 * scale));
        CHECK(f.generator == doctest::Approx(2.0 * 2 * scale));
    }
    HormoneState calm(params);
    calm.accumulate(0, 5, 0);
    CHECK(detector_frequencies(calm).generator == 0.0);
}

TEST_CASE("sustained drops schedule a generator run within the window") {
    HormoneState state;
    DetectorSchedule schedule;
    std::optional<std::uint64_t> first;
    for (std::uint64_t t = 0; t < 32 && !first; ++t) {
        state.accumulate(t, 0, 1);
        if (schedule.step(detector_frequencies(state), 32).generator) first = t;
    }
    REQUIRE(first.has_value());
    CHECK(*first < 32);

    DetectorSchedule idle;
    HormoneState none;
    for (int t = 0; t < 100; ++t) CHECK_FALSE(idle.step(detector_frequencies(none), 32).generator);
}

TEST_CASE("active priority sums and classifies against the average") {
    PriorityTable table(4, 8);
    table.add(1, 2);
    table.add(2, 3);
    const std::vector<ClassId> active{1, 2};
    auto ap = table.active_priority(active);
    CHECK(ap.total == 5.0);
    CHECK(ap.state == Arousal::neutral);
    table.record(5.0);
    table.record(1.0);
    ap = table.active_priority(active);
    CHECK(ap.average == 3.0);
    CHECK(ap.state == Arousal::excited);
    const std::vector<ClassId> low{0};
    CHECK(table.active_priority(low).state == Arousal::depressed);
    table.record(3.0);
    const std::vector<ClassId> bad{9};
    CHECK_THROWS_AS(table.active_priority(bad), Error);
    // Comparing two active contexts ranks them by their totals.
    const std::vector<ClassId> one{1};
    CHECK(table.active_priority(active).total > table.active_priority(one).total);
}

TEST_CASE("external events move only the active classes") {
    std::mt19937_64 rng(4);
    for (int round = 0; round < 100; ++round) {
        PriorityTable table(8, 32);
        PriorityEvents ev;
        for (ClassId id = 0; id < 8; ++id)
            if (rng() % 2) ev.active.push_back(id);
        ev.external = rng() % 2 ? Polarity::pleasure : Polarity::pain;
        const double delta = 0.5 + static_cast<double>(rng() % 3);
        const auto next = update_priorities(table, ev, rng() % 2 ? Gender::male : Gender::female, delta);
        for (ClassId id = 0; id < 8; ++id) {
            const bool active = std::find(ev.active.begin(), ev.active.end(), id) != ev.active.end();
            const double want = active ? (*ev.external == Polarity::pleasure ? delta : -delta) : 0.0;
            CHECK(next.at(id) == want);
        }
    }
}

TEST_CASE("gender gate on the two conflicting fixtures") {
    const PriorityTable table(2, 32);
    PriorityEvents stable_dropped{{0, 1}, std::nullopt, IoActivity::stable, 0, 1};
    PriorityEvents churn_applied{{0, 1}, std::nullopt, IoActivity::churn, 1, 0};
    CHECK(update_priorities(table, stable_dropped, Gender::male, 1).at(0) > 0);
    CHECK(update_priorities(table, stable_dropped, Gender::female, 1).at(0) <= 0);
    CHECK(update_priorities(table, churn_applied, Gender::female, 1).at(1) > 0);
    CHECK(update_priorities(table, churn_applied, Gender::male, 1).at(1) <= 0);
    // Where both signals agree the genders agree.
    for (auto g : {Gender::male, Gender::female}) {
        CHECK(internal_net(IoActivity::stable, 2, 0, g) > 0);
        CHECK(internal_net(IoActivity::churn, 0, 2, g) < 0);
        CHECK(internal_net(IoActivity::neutral, 0, 0, g) == 0);
    }
}

}  // TEST_SUITE
