#include "suffmon/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <stdexcept>

namespace suffmon {

const char* to_string(DriftRegime r) {
    switch (r) {
        case DriftRegime::none: return "none";
        case DriftRegime::covariate: return "covariate";
        case DriftRegime::concept_prior: return "concept_prior";
        case DriftRegime::mixed: return "mixed";
    }
    return "?";
}

std::optional<DriftRegime> drift_regime_from(const std::string& name) {
    if (name == "none") return DriftRegime::none;
    if (name == "covariate") return DriftRegime::covariate;
    if (name == "concept_prior") return DriftRegime::concept_prior;
    if (name == "mixed") return DriftRegime::mixed;
    return std::nullopt;
}

std::map<DriftRegime, DecayFactors> default_decay_factors() {
    return {
        {DriftRegime::none, {1.0, 1.0}},
        {DriftRegime::covariate, {0.9995, 0.995}},
        {DriftRegime::concept_prior, {0.97, 1.0}},
        {DriftRegime::mixed, {0.985, 0.997}},
    };
}

SimulationTrajectory simulate(const SimulationSpec& spec, const Config& config) {
    auto in01 = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in01(spec.initial_completeness) || !in01(spec.initial_reliability) ||
        !in01(spec.initial_representativeness)) {
        throw std::invalid_argument("simulate: initial dimension values must be in [0,1]");
    }
    if (spec.horizon_days < 1) throw std::invalid_argument("simulate: horizon must be >= 1");
    if (!(spec.lambda >= 0.0)) throw std::invalid_argument("simulate: lambda must be >= 0");
    auto it = spec.decay.find(spec.drift);
    if (it == spec.decay.end()) {
        throw std::invalid_argument("simulate: no decay factors for drift regime");
    }
    const DecayFactors& decay = it->second;
    if (!(decay.reliability > 0.0 && decay.reliability <= 1.0) ||
        !(decay.representativeness > 0.0 && decay.representativeness <= 1.0)) {
        throw std::invalid_argument("simulate: decay factors must lie in (0,1]");
    }

    SimulationTrajectory trajectory;
    trajectory.days.reserve(static_cast<size_t>(spec.horizon_days));
    for (int day = 1; day <= spec.horizon_days; ++day) {
        DimensionScores dims;
        dims.freshness = std::exp(-spec.lambda * day);
        const double c = spec.completeness_schedule
                             ? spec.completeness_schedule(day)
                             : spec.initial_completeness - spec.completeness_slope * day;
        dims.completeness = std::clamp(c, 0.0, 1.0);
        dims.reliability =
            spec.initial_reliability * std::pow(decay.reliability, day);
        dims.representativeness =
            spec.initial_representativeness * std::pow(decay.representativeness, day);

        const double gate = readiness_gate(dims.completeness, dims.reliability,
                                           config.gates.tau_c, config.gates.tau_r);
        const auto a = composite_sufficiency(dims, gate, config.weights, config.status,
                                             AssessmentMode::actual, day);
        trajectory.days.push_back({day, a.dims, a.gate, a.score, a.status});
    }
    return trajectory;
}

std::optional<int> threshold_crossing(const SimulationTrajectory& trajectory,
                                      double threshold) {
    if (trajectory.days.empty()) {
        throw std::invalid_argument("threshold_crossing: empty trajectory");
    }
    for (const auto& p : trajectory.days) {
        if (p.score < threshold) return p.day;
    }
    return std::nullopt;
}

void write_trajectory(std::ostream& out, const SimulationTrajectory& trajectory) {
    out << "day\tC\tF\tR\tP\tA\tS\tstatus\n";
    out << std::fixed << std::setprecision(3);
    for (const auto& p : trajectory.days) {
        out << p.day << '\t' << p.dims.completeness << '\t' << p.dims.freshness << '\t'
            << p.dims.reliability << '\t' << p.dims.representativeness << '\t' << p.gate
            << '\t' << p.score << '\t' << to_string(p.status) << '\n';
    }
}

}  // namespace suffmon
