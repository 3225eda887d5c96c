#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "suffmon/simulator.hpp"

using namespace suffmon;

namespace {

SimulationTrajectory run(DriftRegime regime, int horizon = 180) {
    SimulationSpec spec;
    spec.drift = regime;
    spec.horizon_days = horizon;
    return simulate(spec, Config{});
}

double score_at(const SimulationTrajectory& t, int day) {
    return t.days.at(static_cast<size_t>(day - 1)).score;
}

}  // namespace

TEST_CASE("freshness sub-trajectory is exactly exp(-lambda d)") {
    const auto t = run(DriftRegime::none);
    for (int day : {1, 30, 60, 90, 120, 150, 180}) {
        CHECK(t.days[static_cast<size_t>(day - 1)].dims.freshness ==
              doctest::Approx(std::exp(-0.02 * day)).epsilon(1e-12));
    }
    CHECK(t.days.size() == 180);
    for (size_t i = 0; i < t.days.size(); ++i) {
        CHECK(t.days[i].day == static_cast<int>(i) + 1);
    }
}

TEST_CASE("no-drift day 30 lands in the calibrated band") {
    const auto t = run(DriftRegime::none);
    CHECK(score_at(t, 30) >= 0.48);
    CHECK(score_at(t, 30) <= 0.54);
}

TEST_CASE("regime ordering holds at every checkpoint") {
    const auto none = run(DriftRegime::none);
    const auto cov = run(DriftRegime::covariate);
    const auto mixed = run(DriftRegime::mixed);
    const auto concept_run = run(DriftRegime::concept_prior);
    for (int day : {30, 60, 90, 180}) {
        CHECK(score_at(concept_run, day) <= score_at(mixed, day) + 1e-12);
        CHECK(score_at(mixed, day) <= score_at(cov, day) + 1e-12);
        CHECK(score_at(cov, day) <= score_at(none, day) + 1e-12);
    }
}

TEST_CASE("trajectories are monotone non-increasing") {
    for (DriftRegime regime : {DriftRegime::none, DriftRegime::covariate,
                               DriftRegime::concept_prior, DriftRegime::mixed}) {
        const auto t = run(regime);
        for (size_t i = 1; i < t.days.size(); ++i) {
            CHECK(t.days[i].score <= t.days[i - 1].score + 1e-12);
        }
    }
}

TEST_CASE("drifted regimes are near zero by day 180") {
    // The no-drift regime floors higher: R and P never decay there, so the
    // completeness and freshness terms keep S around 0.13 at the horizon.
    for (DriftRegime regime : {DriftRegime::covariate, DriftRegime::concept_prior,
                               DriftRegime::mixed}) {
        CHECK(score_at(run(regime), 180) <= 0.05 + 0.02);
    }
}

TEST_CASE("no-drift crossing in [28, 36]; drifted regimes cross earlier") {
    const auto none_cross = threshold_crossing(run(DriftRegime::none), 0.5);
    REQUIRE(none_cross.has_value());
    CHECK(*none_cross >= 28);
    CHECK(*none_cross <= 36);
    for (DriftRegime regime : {DriftRegime::covariate, DriftRegime::concept_prior,
                               DriftRegime::mixed}) {
        const auto cross = threshold_crossing(run(regime), 0.5);
        REQUIRE(cross.has_value());
        CHECK(*cross <= *none_cross);
    }
    CHECK(!threshold_crossing(run(DriftRegime::none), 0.0));
}

TEST_CASE("no decay source means constant S") {
    SimulationSpec spec;
    spec.drift = DriftRegime::none;
    spec.lambda = 1e-12;  // effectively zero while staying positive
    spec.completeness_slope = 0.0;
    spec.initial_reliability = 0.5;  // above tau_r
    spec.horizon_days = 90;
    const auto t = simulate(spec, Config{});
    for (const auto& p : t.days) {
        CHECK(p.score == doctest::Approx(t.days.front().score).epsilon(1e-9));
        CHECK(p.gate == doctest::Approx(1.0));
    }
}

TEST_CASE("custom completeness schedule overrides the linear default") {
    SimulationSpec spec;
    spec.completeness_schedule = [](int) { return 0.42; };
    spec.horizon_days = 10;
    const auto t = simulate(spec, Config{});
    for (const auto& p : t.days) CHECK(p.dims.completeness == doctest::Approx(0.42));
}

TEST_CASE("trajectory export is one tab-separated row per day") {
    const auto t = run(DriftRegime::covariate, 5);
    std::ostringstream out;
    write_trajectory(out, t);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);  // header
    CHECK(line.substr(0, 3) == "day");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), '\t') == 7);
    }
    CHECK(rows == 5);
}
