#pragma once

#include <functional>
#include <map>
#include <optional>
#include <ostream>

#include "suffmon/sufficiency.hpp"

namespace suffmon {

enum class DriftRegime { none, covariate, concept_prior, mixed };

const char* to_string(DriftRegime r);
std::optional<DriftRegime> drift_regime_from(const std::string& name);

// Daily multiplicative decay applied to reliability and representativeness.
struct DecayFactors {
    double reliability = 1.0;
    double representativeness = 1.0;
};

std::map<DriftRegime, DecayFactors> default_decay_factors();

struct SimulationSpec {
    double initial_completeness = 1.000;
    double initial_reliability = 0.133;
    double initial_representativeness = 1.000;
    DriftRegime drift = DriftRegime::none;
    int horizon_days = 180;
    double lambda = 0.02;
    // Default completeness schedule is linear: C(d) = C0 - slope * d,
    // clamped to [0,1]. A custom schedule overrides it when set.
    double completeness_slope = 0.004;
    std::function<double(int)> completeness_schedule;
    std::map<DriftRegime, DecayFactors> decay = default_decay_factors();
};

struct TrajectoryPoint {
    int day = 0;
    DimensionScores dims;
    double gate = 1.0;
    double score = 1.0;
    Status status = Status::sufficient;
};

struct SimulationTrajectory {
    std::vector<TrajectoryPoint> days;  // consecutive, day 1..horizon
};

// Per-day analytic degradation: F(d) = exp(-lambda d), C from the schedule,
// R and P decay multiplicatively per regime; S through the engine formula
// with the actual-mode gate (tau_c, tau_r).
SimulationTrajectory simulate(const SimulationSpec& spec, const Config& config);

// Smallest day with S < threshold, empty if never.
std::optional<int> threshold_crossing(const SimulationTrajectory& trajectory,
                                      double threshold);

// One row per day: day, C, F, R, P, A, S, status. Tab-separated.
void write_trajectory(std::ostream& out, const SimulationTrajectory& trajectory);

}  // namespace suffmon
