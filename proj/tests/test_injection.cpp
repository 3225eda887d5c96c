#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "suffmon/drift_stats.hpp"
#include "suffmon/injection.hpp"
#include "suffmon/proxy_monitors.hpp"
#include "suffmon/runner.hpp"

using namespace suffmon;

namespace {

MonitoringWindow synthetic_window(uint64_t seed = 1, int n = 10000) {
    SyntheticSpec spec;
    spec.n_events = n;
    spec.n_features = 52;
    spec.span_days = 30.0;
    spec.seed = seed;
    MonitoringWindow w;
    w.start_t = 0.0;
    w.end_t = 30.0;
    w.events = generate_synthetic(spec);
    return w;
}

bool features_identical(const MonitoringWindow& a, const MonitoringWindow& b) {
    if (a.events.size() != b.events.size()) return false;
    for (size_t i = 0; i < a.events.size(); ++i) {
        if (a.events[i].features != b.events[i].features) return false;
        if (a.events[i].score != b.events[i].score) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("linear schedules interpolate between their endpoints") {
    const auto s = linear_schedule(0.3, 2.0, 5);
    REQUIRE(s.size() == 5);
    CHECK(s.front() == doctest::Approx(0.3));
    CHECK(s[1] == doctest::Approx(0.725));
    CHECK(s[2] == doctest::Approx(1.15));
    CHECK(s[3] == doctest::Approx(1.575));
    CHECK(s.back() == doctest::Approx(2.0));
    CHECK_THROWS_AS((void)linear_schedule(0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("scenario defaults mirror the published schedules") {
    const auto cov = ScenarioSpec::defaults(ScenarioKind::covariate, 5, 1);
    CHECK(cov.sigma_schedule == linear_schedule(0.3, 2.0, 5));
    CHECK(cov.noise_features == std::vector<int>{0, 1, 2});
    CHECK(cov.violations(5).empty());

    const auto mixed = ScenarioSpec::defaults(ScenarioKind::mixed, 5, 1);
    CHECK(mixed.sigma_schedule == linear_schedule(0.2, 1.5, 5));
    CHECK(mixed.flip_schedule == linear_schedule(0.03, 0.30, 5));

    const auto concept_spec = ScenarioSpec::defaults(ScenarioKind::concept_prior, 5, 1);
    CHECK(concept_spec.target_prevalence ==
          std::vector<double>{0.036, 0.030, 0.020, 0.009, 0.002});

    auto bad = cov;
    bad.sigma_schedule.pop_back();
    CHECK(!bad.violations(5).empty());
}

TEST_CASE("covariate injection: identity at 0, determinism, targeted effect") {
    const auto w = synthetic_window(3, 4000);
    const std::vector<double> sigma(52, 1.0);
    const std::vector<int> features{0, 1, 2};

    CHECK(features_identical(inject_covariate(w, features, 0.0, sigma, 9), w));

    const auto a = inject_covariate(w, features, 2.0, sigma, 9);
    const auto b = inject_covariate(w, features, 2.0, sigma, 9);
    CHECK(features_identical(a, b));
    const auto c = inject_covariate(w, features, 2.0, sigma, 10);
    CHECK(!features_identical(a, c));

    // labels and timestamps untouched
    for (size_t i = 0; i < w.events.size(); ++i) {
        CHECK(a.events[i].label == w.events[i].label);
        CHECK(a.events[i].t == w.events[i].t);
    }

    // perturbed features drift past the alert threshold, untouched ones do not
    const auto ref_cols = feature_columns(w);
    const auto cur_cols = feature_columns(a);
    for (int f : {0, 1, 2}) {
        const auto bins = quantile_bins(ref_cols[static_cast<size_t>(f)], 10);
        CHECK(psi(ref_cols[static_cast<size_t>(f)], cur_cols[static_cast<size_t>(f)],
                  bins) > 0.25);
    }
    for (int f : {3, 20, 51}) {
        CHECK(ref_cols[static_cast<size_t>(f)] == cur_cols[static_cast<size_t>(f)]);
    }

    CHECK_THROWS_AS((void)inject_covariate(w, std::vector<int>{99}, 1.0, sigma, 1),
                    std::invalid_argument);
}

TEST_CASE("label flips: prevalence algebra and feature bit-identity") {
    const auto w = synthetic_window(4);
    const double p0 = positive_fraction(w);
    CHECK(p0 > 0.02);

    SUBCASE("rate 0 is the identity") {
        const auto out = inject_label_flips(w, 0.0, FlipDirection::positive_to_negative, 5);
        for (size_t i = 0; i < w.events.size(); ++i) {
            CHECK(out.events[i].label == w.events[i].label);
        }
    }

    SUBCASE("positive_to_negative lands on p*(1-f) up to count rounding") {
        for (double f : {0.2, 0.5, 0.9429}) {
            const auto out =
                inject_label_flips(w, f, FlipDirection::positive_to_negative, 5);
            size_t pos = 0, labeled = 0;
            for (const auto& e : out.events) {
                if (e.label) {
                    ++labeled;
                    if (*e.label == 1) ++pos;
                }
            }
            const double expect = p0 * (1.0 - f);
            CHECK(std::abs(static_cast<double>(pos) / static_cast<double>(labeled) -
                           expect) <= 1.5 / static_cast<double>(labeled));
            CHECK(features_identical(out, w));  // proxy-blindness precondition
        }
    }

    SUBCASE("symmetric flips touch floor(rate*n) labels of any class") {
        const auto out = inject_label_flips(w, 0.1, FlipDirection::symmetric, 6);
        size_t flipped = 0;
        for (size_t i = 0; i < w.events.size(); ++i) {
            if (out.events[i].label != w.events[i].label) ++flipped;
        }
        CHECK(flipped == w.events.size() / 10);
        CHECK(features_identical(out, w));
    }

    CHECK_THROWS_AS((void)inject_label_flips(w, 1.5, FlipDirection::symmetric, 1),
                    std::invalid_argument);
}

TEST_CASE("flip-rate calibration") {
    CHECK(calibrate_flip_rate(0.035, 0.002) == doctest::Approx(1.0 - 0.002 / 0.035));
    CHECK(calibrate_flip_rate(0.035, 0.035) == doctest::Approx(0.0));
    CHECK_THROWS_AS((void)calibrate_flip_rate(0.02, 0.03), std::invalid_argument);
}

TEST_CASE("synthetic stream structure") {
    SyntheticSpec spec;
    spec.n_events = 20000;
    spec.seed = 77;
    const auto events = generate_synthetic(spec);
    REQUIRE(events.size() == 20000);

    double prev = -1.0;
    size_t positives = 0;
    for (const auto& e : events) {
        CHECK(e.t >= prev);
        prev = e.t;
        CHECK(e.t >= 0.0);
        CHECK(e.t <= spec.span_days);
        CHECK(e.features.size() == 52);
        REQUIRE(e.label.has_value());
        REQUIRE(e.label_arrival_t.has_value());
        CHECK(*e.label_arrival_t >= e.t);
        CHECK(*e.label_arrival_t <= e.t + spec.max_label_delay);
        if (*e.label == 1) ++positives;
        CHECK(!event_violation(e));
    }
    const double prevalence = static_cast<double>(positives) / 20000.0;
    CHECK(prevalence == doctest::Approx(0.035).epsilon(0.2));

    // informative features separate the classes; the rest do not
    double mean_pos0 = 0.0, mean_neg0 = 0.0, mean_pos9 = 0.0, mean_neg9 = 0.0;
    for (const auto& e : events) {
        if (*e.label == 1) {
            mean_pos0 += e.features[0];
            mean_pos9 += e.features[9];
        } else {
            mean_neg0 += e.features[0];
            mean_neg9 += e.features[9];
        }
    }
    mean_pos0 /= static_cast<double>(positives);
    mean_neg0 /= static_cast<double>(20000 - positives);
    mean_pos9 /= static_cast<double>(positives);
    mean_neg9 /= static_cast<double>(20000 - positives);
    CHECK(mean_pos0 - mean_neg0 > 1.5);
    CHECK(std::abs(mean_pos9 - mean_neg9) < 0.3);

    // determinism
    const auto again = generate_synthetic(spec);
    CHECK(events.size() == again.size());
    CHECK(events[123].features == again[123].features);
    CHECK(events[123].t == again[123].t);
}

TEST_CASE("180-day synthetic stream partitions into 6 windows") {
    SyntheticSpec spec;
    spec.n_events = 6000;
    spec.seed = 8;
    const auto events = generate_synthetic(spec);
    const auto windows = window_partition(events, 30.0);
    REQUIRE(windows.size() == 6);
    for (size_t k = 0; k < windows.size(); ++k) {
        CHECK(windows[k].index == static_cast<int>(k));
        CHECK(windows[k].start_t == doctest::Approx(30.0 * static_cast<double>(k)));
        for (const auto& e : windows[k].events) {
            CHECK(e.t >= windows[k].start_t);
            CHECK(e.t < windows[k].end_t);
        }
    }
}
