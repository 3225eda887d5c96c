#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "suffmon/scorer.hpp"
#include "suffmon/sufficiency.hpp"

using namespace suffmon;

namespace {

constexpr double kTableTol = 5e-3;

PredictionEvent event_at(double t, double score, std::optional<int> label = std::nullopt,
                         std::optional<double> arrival = std::nullopt) {
    PredictionEvent e;
    static int counter = 0;
    e.event_id = "f" + std::to_string(counter++);
    e.t = t;
    e.score = score;
    e.features = {score};
    e.label = label;
    e.label_arrival_t = arrival;
    return e;
}

}  // namespace

TEST_CASE("completeness counts confirmed labels") {
    MonitoringWindow w;
    w.start_t = 0.0;
    w.end_t = 30.0;
    for (int i = 0; i < 100; ++i) {
        const double t = 0.3 * i;
        // 88 of 100 arrive before day 30
        w.events.push_back(event_at(t, 0.5, 0, i < 88 ? t + 1.0 : t + 100.0));
    }
    CHECK(completeness(w, 30.0) == doctest::Approx(0.88));
    CHECK(completeness(w, 1000.0) == doctest::Approx(1.0));
    CHECK(completeness(w, -1.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS((void)completeness(MonitoringWindow{}, 0.0), std::invalid_argument);
}

TEST_CASE("freshness decay matches the calibrated table") {
    CHECK(freshness(0.0, 0.02) == doctest::Approx(1.0));
    CHECK(std::abs(freshness(30.0, 0.02) - 0.5488) < 1e-3);
    CHECK(std::abs(freshness(60.0, 0.02) - 0.3012) < 1e-3);
    CHECK(std::abs(freshness(90.0, 0.02) - 0.1653) < 1e-3);
    CHECK(std::abs(freshness(120.0, 0.02) - 0.0907) < 1e-3);
    CHECK(std::abs(freshness(150.0, 0.02) - 0.0498) < 1e-3);
    CHECK_THROWS_AS((void)freshness(-1.0, 0.02), std::invalid_argument);
    CHECK_THROWS_AS((void)freshness(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("label staleness keys on the latest arrival-day cohort") {
    SUBCASE("labels confirmed today for today's events") {
        std::vector<PredictionEvent> history{event_at(10.0, 0.5, 1, 10.0)};
        CHECK(*label_staleness(history, 10.0) == doctest::Approx(0.0));
    }
    SUBCASE("reference cohort ending day 0, assessed at day 30") {
        std::vector<PredictionEvent> history;
        for (int i = 0; i < 5; ++i) history.push_back(event_at(0.0, 0.5, 0, 0.5));
        CHECK(*label_staleness(history, 30.0) == doctest::Approx(30.0));
    }
    SUBCASE("two cohorts: only the latest one counts") {
        std::vector<PredictionEvent> history{
            event_at(2.0, 0.5, 0, 10.2), event_at(4.0, 0.5, 0, 10.7),  // day-10 cohort
            event_at(14.0, 0.5, 1, 20.1), event_at(16.0, 0.5, 0, 20.9),
            event_at(18.0, 0.5, 0, 20.5),  // day-20 cohort, median t = 16
        };
        CHECK(*label_staleness(history, 25.0) == doctest::Approx(25.0 - 16.0));
    }
    SUBCASE("unconfirmed labels are invisible") {
        std::vector<PredictionEvent> history{event_at(2.0, 0.5, 0, 50.0)};
        CHECK(!label_staleness(history, 25.0));
    }
}

TEST_CASE("dimension aggregation reproduces the table vectors") {
    const std::vector<WeightedSignal> reliability{{0.854, 0.25}, {0.722, 0.5}};
    const auto r = aggregate_dimension(reliability, std::nullopt);
    CHECK(std::abs(r.value - 0.766) < kTableTol);
    CHECK(!r.impaired);

    const std::vector<WeightedSignal> representativeness{{0.854, 1.0}, {0.952, 1.0}};
    const auto p = aggregate_dimension(representativeness, std::nullopt);
    CHECK(std::abs(p.value - 0.903) < kTableTol);
    CHECK(!p.impaired);
}

TEST_CASE("empty signal sets carry forward or bottom out") {
    const auto carried = aggregate_dimension({}, 0.7);
    CHECK(carried.value == doctest::Approx(0.7));
    CHECK(carried.impaired);

    const auto bottom = aggregate_dimension({}, std::nullopt);
    CHECK(bottom.value == doctest::Approx(0.0));
    CHECK(bottom.impaired);

    const std::vector<WeightedSignal> bad{{1.2, 0.5}};
    CHECK_THROWS_AS((void)aggregate_dimension(bad, std::nullopt), std::invalid_argument);
}

TEST_CASE("aggregation is bounded by its inputs") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> hdist(0.0, 1.0);
    const double weights[] = {0.25, 0.5, 1.0};
    std::uniform_int_distribution<int> widx(0, 2);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<WeightedSignal> signals;
        double lo = 1.0, hi = 0.0;
        for (int i = 0; i < 1 + trial % 5; ++i) {
            const double h = hdist(rng);
            signals.push_back({h, weights[widx(rng)]});
            lo = std::min(lo, h);
            hi = std::max(hi, h);
        }
        const auto out = aggregate_dimension(signals, std::nullopt);
        CHECK(out.value >= lo - 1e-12);
        CHECK(out.value <= hi + 1e-12);
    }
}

TEST_CASE("readiness gate reproduces table values and compounds") {
    CHECK(std::abs(readiness_gate(0.52, 0.165, 0.6, 0.15) - 0.8667) < 2e-3);
    CHECK(std::abs(readiness_gate(0.40, 0.142, 0.6, 0.15) - 0.6311) < 2e-3);
    CHECK(readiness_gate(0.9, 0.5, 0.6, 0.15) == doctest::Approx(1.0));
    CHECK(std::abs(readiness_gate(0.400, 0.368, 0.6, 0.55) - 0.446) < kTableTol);
    // both components at half threshold -> exactly 0.25
    CHECK(readiness_gate(0.3, 0.075, 0.6, 0.15) == 0.25);
}

TEST_CASE("status classification") {
    StatusThresholds th;
    CHECK(classify_status(0.85, th) == Status::sufficient);
    CHECK(classify_status(0.8, th) == Status::sufficient);
    CHECK(classify_status(0.524, th) == Status::degraded);
    CHECK(classify_status(0.5, th) == Status::degraded);
    CHECK(classify_status(0.408, th) == Status::insufficient);
}

TEST_CASE("composite sufficiency reproduces the table rows") {
    DimensionWeights weights;
    StatusThresholds th;

    SUBCASE("actual-mode baseline window 1") {
        DimensionScores d{0.880, 0.549, 0.178, 0.650, {}};
        const auto a = composite_sufficiency(d, 1.0, weights, th, AssessmentMode::actual, 1);
        CHECK(std::abs(a.score - 0.524) < kTableTol);
        CHECK(a.status == Status::degraded);
    }
    SUBCASE("proxy-mode baseline window 1") {
        DimensionScores d{0.880, 0.549, 0.766, 0.903, {}};
        const auto a = composite_sufficiency(d, 1.0, weights, th, AssessmentMode::proxy, 1);
        CHECK(std::abs(a.score - 0.751) < kTableTol);
    }
    SUBCASE("actual-mode covariate window 5") {
        DimensionScores d{0.400, 0.050, 0.123, 0.447, {}};
        const double gate = readiness_gate(0.400, 0.123, 0.6, 0.15);
        CHECK(std::abs(gate - 0.548) < 2e-3);
        const auto a =
            composite_sufficiency(d, gate, weights, th, AssessmentMode::actual, 5);
        CHECK(std::abs(a.score - 0.121) < kTableTol);
        CHECK(a.status == Status::insufficient);
    }
    SUBCASE("proxy-mode baseline window 5") {
        const std::vector<WeightedSignal> rel{{0.770, 0.25}, {0.576, 0.5}};
        const std::vector<WeightedSignal> rep{{0.770, 1.0}, {0.772, 1.0}};
        const double r = aggregate_dimension(rel, std::nullopt).value;
        const double p = aggregate_dimension(rep, std::nullopt).value;
        CHECK(std::abs(r - 0.641) < kTableTol);
        CHECK(std::abs(p - 0.771) < kTableTol);
        const double gate = readiness_gate(0.400, r, 0.6, 0.55);
        CHECK(std::abs(gate - 0.667) < 2e-3);
        DimensionScores d{0.400, 0.050, r, p, {}};
        const auto a =
            composite_sufficiency(d, gate, weights, th, AssessmentMode::proxy, 5);
        CHECK(std::abs(a.score - 0.294) < kTableTol);
    }
    SUBCASE("proxy-mode covariate window 5") {
        const std::vector<WeightedSignal> rel{{0.309, 0.25}, {0.397, 0.5}};
        const double r = aggregate_dimension(rel, std::nullopt).value;
        CHECK(std::abs(r - 0.368) < kTableTol);
        const double gate = readiness_gate(0.400, r, 0.6, 0.55);
        CHECK(std::abs(gate - 0.446) < 2e-3);
        const std::vector<WeightedSignal> rep{{0.309, 1.0}, {0.000, 1.0}};
        const double p = aggregate_dimension(rep, std::nullopt).value;
        DimensionScores d{0.400, 0.050, r, p, {}};
        const auto a =
            composite_sufficiency(d, gate, weights, th, AssessmentMode::proxy, 5);
        CHECK(std::abs(a.score - 0.105) < kTableTol);
    }
}

TEST_CASE("composite invariants: identity, monotonicity, gate undercut") {
    DimensionWeights weights;
    StatusThresholds th;
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        DimensionScores d{u(rng), u(rng), u(rng), u(rng), {}};
        const double gate = readiness_gate(d.completeness, d.reliability, 0.6, 0.15);
        const auto a = composite_sufficiency(d, gate, weights, th, AssessmentMode::actual, 0);
        // S = A * weighted sum to 1e-9
        const double expect = gate * (0.2 * d.completeness + 0.3 * d.freshness +
                                      0.3 * d.reliability + 0.2 * d.representativeness);
        CHECK(a.score == doctest::Approx(expect).epsilon(1e-9));
        CHECK(a.score >= 0.0);
        CHECK(a.score <= 1.0);

        // raising any dimension never lowers S (gate recomputed)
        DimensionScores better = d;
        better.completeness = std::min(1.0, d.completeness + 0.1);
        const double g2 = readiness_gate(better.completeness, better.reliability, 0.6, 0.15);
        CHECK(composite_sufficiency(better, g2, weights, th, AssessmentMode::actual, 0)
                  .score >= a.score - 1e-12);
    }

    // the gate can pull S below the worst dimension score
    DimensionScores d{0.15, 0.9, 0.03, 0.9, {}};
    const double gate = readiness_gate(d.completeness, d.reliability, 0.6, 0.15);
    const auto a = composite_sufficiency(d, gate, weights, th, AssessmentMode::actual, 0);
    CHECK(a.score < std::min({d.completeness, d.freshness, d.reliability,
                              d.representativeness}));
}

TEST_CASE("proxy assessment: fixpoint, label blindness, and carry-forward") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MonitoringWindow reference;
    reference.start_t = 0.0;
    reference.end_t = 30.0;
    for (int i = 0; i < 2000; ++i) {
        const double t = 30.0 * u(rng);
        auto e = event_at(t, u(rng), 0, t);
        e.features = {u(rng), u(rng)};
        reference.events.push_back(std::move(e));
    }
    std::sort(reference.events.begin(), reference.events.end(),
              [](const auto& a, const auto& b) { return a.t < b.t; });

    Config config;
    const auto profile = ReferenceProfile::build(reference, config);

    SUBCASE("window identical to reference with fresh complete labels scores ~1") {
        // labels arrive instantly (arrival = t), so staleness is ~0 at day 30
        const MonitoringWindow& w = reference;
        const auto out = assess_window_proxy(w, profile, config, 30.0, w.events);
        CHECK(out.assessment.dims.completeness == doctest::Approx(1.0));
        CHECK(out.assessment.score > 0.97);
        CHECK(out.assessment.status == Status::sufficient);
    }

    SUBCASE("flipping labels leaves S_proxy bit-identical") {
        MonitoringWindow w = reference;
        const auto before = assess_window_proxy(w, profile, config, 30.0, w.events);
        for (size_t i = 0; i < w.events.size(); i += 2) {
            w.events[i].label = 1 - *w.events[i].label;
        }
        const auto after = assess_window_proxy(w, profile, config, 30.0, w.events);
        CHECK(before.assessment.score == after.assessment.score);  // exact
        CHECK(before.score_reading.health == after.score_reading.health);
        CHECK(before.feature_reading.health == after.feature_reading.health);
        CHECK(before.uncertainty_reading.health == after.uncertainty_reading.health);
    }

    SUBCASE("no proxy coverage carries last-valid forward and flags impairment") {
        CarryForwardState carry;
        const auto live = assess_window_proxy(reference, profile, config, 30.0,
                                              reference.events, {}, &carry);
        CHECK(!live.assessment.monitoring_impaired);
        REQUIRE(carry.reliability.has_value());

        const auto impaired = assess_window_proxy(reference, profile, config, 30.0,
                                                  reference.events, {}, &carry,
                                                  /*disable_builtin_monitors=*/true);
        CHECK(impaired.assessment.monitoring_impaired);
        CHECK(impaired.assessment.dims.impaired.count(Dimension::reliability) == 1);
        CHECK(impaired.assessment.dims.impaired.count(Dimension::representativeness) == 1);
        CHECK(impaired.assessment.dims.reliability ==
              doctest::Approx(live.assessment.dims.reliability));
        // impairment is a monitoring problem, not evidence degradation: the
        // carried values keep S equal to the live assessment
        CHECK(impaired.assessment.score == doctest::Approx(live.assessment.score));
    }

    SUBCASE("external signals join the aggregation through coverage weights") {
        const std::vector<ExternalSignal> ext{{"shadow-model", 0.2, 1.0, 0.0}};
        const auto with = assess_window_proxy(reference, profile, config, 30.0,
                                              reference.events, ext);
        const auto without =
            assess_window_proxy(reference, profile, config, 30.0, reference.events);
        CHECK(with.assessment.dims.reliability < without.assessment.dims.reliability);
        CHECK(with.assessment.dims.representativeness ==
              doctest::Approx(without.assessment.dims.representativeness));
    }
}

TEST_CASE("actual assessment requires labels and uses F1 and 1-KS") {
    MonitoringWindow reference;
    reference.start_t = 0.0;
    reference.end_t = 10.0;
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double t = 10.0 * u(rng);
        const int label = u(rng) < 0.5 ? 1 : 0;
        const double score = label ? 0.7 + 0.3 * u(rng) : 0.3 * u(rng);
        reference.events.push_back(event_at(t, score, label, t));
    }
    Config config;
    const auto profile = ReferenceProfile::build(reference, config);

    const auto a =
        assess_window_actual(reference, profile, config, 10.0, reference.events);
    CHECK(a.dims.reliability == doctest::Approx(1.0));  // perfectly separated scores
    CHECK(a.dims.representativeness == doctest::Approx(1.0));  // same scores as reference
    CHECK(a.mode == AssessmentMode::actual);

    MonitoringWindow unlabeled = reference;
    unlabeled.events[0].label.reset();
    unlabeled.events[0].label_arrival_t.reset();
    CHECK_THROWS_AS((void)assess_window_actual(unlabeled, profile, config, 10.0,
                                               unlabeled.events),
                    std::invalid_argument);
}

TEST_CASE("divergence detection uses a strict gap") {
    CHECK(detect_divergence(0.653, 0.751, 0.05));
    CHECK(!detect_divergence(0.573, 0.573, 0.05));
    CHECK(!detect_divergence(0.70, 0.75, 0.05));  // gap exactly delta
    CHECK(detect_divergence(0.6999, 0.7500, 0.05));
    CHECK_THROWS_AS((void)detect_divergence(0.1, 0.9, 0.0), std::invalid_argument);
}
