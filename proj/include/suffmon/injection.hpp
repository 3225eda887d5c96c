#pragma once

#include <cstdint>
#include <span>

#include "suffmon/core.hpp"

namespace suffmon {

enum class ScenarioKind { baseline, covariate, mixed, concept_prior };
enum class FlipDirection { positive_to_negative, symmetric };

const char* to_string(ScenarioKind k);
std::optional<ScenarioKind> scenario_from(const std::string& name);

// Per-window perturbation plan. Schedule lengths equal the number of
// monitoring windows; the reference window is never perturbed.
struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::baseline;
    std::vector<double> sigma_schedule;        // noise multipliers per window
    std::vector<int> noise_features;           // feature indices receiving noise
    std::vector<double> flip_schedule;         // flip fractions per window
    std::vector<double> target_prevalence;     // concept_prior only
    uint64_t seed = 0;

    static ScenarioSpec defaults(ScenarioKind kind, int n_windows, uint64_t seed);
    std::vector<std::string> violations(int n_windows) const;
};

// Endpoint-interpolated schedule: from, ..., to over n windows.
std::vector<double> linear_schedule(double from, double to, int n);

// Adds N(0, (sigma_mult * ref_sigma[f])^2) noise to the listed features.
// ref_sigma comes from the unperturbed reference window. Labels and scores
// untouched; deterministic under seed.
MonitoringWindow inject_covariate(const MonitoringWindow& window,
                                  std::span<const int> features, double sigma_mult,
                                  std::span<const double> ref_sigma, uint64_t seed);

// positive_to_negative flips floor(rate * n_pos) positive labels chosen
// uniformly; symmetric flips floor(rate * n) labels of any class. Features
// untouched.
MonitoringWindow inject_label_flips(const MonitoringWindow& window, double rate,
                                    FlipDirection direction, uint64_t seed);

// rate = 1 - target / current.
double calibrate_flip_rate(double current_prevalence, double target_prevalence);

struct SyntheticSpec {
    int n_events = 10000;
    int n_features = 52;
    int n_informative = 3;
    double prevalence = 0.035;
    double class_separation = 2.0;  // positive-class mean on informative features
    double span_days = 180.0;
    double max_label_delay = 60.0;  // arrival delay ~ U(0, max)
    uint64_t seed = 0;
};

// Two-class Gaussian stream: negatives N(0, I), positives shifted by
// class_separation on the informative features. Timestamps uniform over the
// span, events sorted by time, labels carry uniform arrival delays.
// Deterministic under seed. Scores are left at 0.5 for a scorer to fill.
std::vector<PredictionEvent> generate_synthetic(const SyntheticSpec& spec);

double positive_fraction(const MonitoringWindow& window);

}  // namespace suffmon
