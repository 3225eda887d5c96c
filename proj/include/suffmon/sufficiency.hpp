#pragma once

#include <optional>
#include <span>
#include <string>

#include "suffmon/core.hpp"
#include "suffmon/proxy_monitors.hpp"

namespace suffmon {

enum class Status { sufficient, degraded, insufficient };
enum class AssessmentMode { proxy, actual };

const char* to_string(Status s);

// Impaired marks dimensions whose value is a carried-forward last-valid
// reading rather than a fresh estimate; only reliability and
// representativeness can be impaired.
struct DimensionScores {
    double completeness = 1.0;
    double freshness = 1.0;
    double reliability = 1.0;
    double representativeness = 1.0;
    std::set<Dimension> impaired;
};

struct SufficiencyAssessment {
    int window_index = 0;
    DimensionScores dims;
    double gate = 1.0;
    double score = 1.0;
    Status status = Status::sufficient;
    bool monitoring_impaired = false;
    AssessmentMode mode = AssessmentMode::proxy;
};

// Fraction of window events whose label had arrived by as_of_t.
double completeness(const MonitoringWindow& window, double as_of_t);

// exp(-lambda * delta_t).
double freshness(double delta_t_days, double lambda);

// Days between as_of_t and the median event time of the most recent
// label-bearing cohort (labels sharing the latest arrival day, confirmed by
// as_of_t). Empty when no label has been confirmed anywhere in the history.
std::optional<double> label_staleness(std::span<const PredictionEvent> history,
                                      double as_of_t);

struct WeightedSignal {
    double health = 0.0;   // in [0,1]
    double weight = 0.0;   // coverage weight, one of {0.25, 0.5, 1.0}
};

struct AggregateResult {
    double value = 0.0;
    bool impaired = false;
};

// Weighted mean when any weight applies; otherwise the last valid reading is
// carried forward and the dimension is flagged impaired (0 when nothing to
// carry).
AggregateResult aggregate_dimension(std::span<const WeightedSignal> signals,
                                    std::optional<double> last_valid);

// min(1, c/tau_c) * min(1, r/tau_r).
double readiness_gate(double c, double r, double tau_c, double tau_r);

Status classify_status(double score, const StatusThresholds& thresholds);

SufficiencyAssessment composite_sufficiency(const DimensionScores& dims, double gate,
                                            const DimensionWeights& weights,
                                            const StatusThresholds& thresholds,
                                            AssessmentMode mode, int window_index);

// Everything the monitors need from the calibrated reference window.
struct ReferenceProfile {
    std::vector<double> scores;
    std::vector<std::vector<double>> feature_columns;
    std::vector<double> feature_sigmas;  // per-feature stddev, for injection
    BinningSpec score_bins;
    std::vector<BinningSpec> feature_bins;
    NormalizationCaps caps;

    // Builds binnings from the reference window; caps come from the config
    // unless calibrate_from_sub_windows is set.
    static ReferenceProfile build(const MonitoringWindow& reference, const Config& config,
                                  bool calibrate_from_sub_windows = false);
};

// Externally supplied proxy signal (categories the engine does not compute
// itself), pre-normalized to the health scale and routed to the estimated
// dimensions with coverage weights.
struct ExternalSignal {
    std::string name;
    double health = 1.0;
    double reliability_weight = 0.0;
    double representativeness_weight = 0.0;
};

// Last-valid dimension values carried across windows of one stream;
// single-writer per stream.
struct CarryForwardState {
    std::optional<double> reliability;
    std::optional<double> representativeness;
};

struct ProxyAssessment {
    SufficiencyAssessment assessment;
    ProxyReading score_reading;
    ProxyReading feature_reading;
    ProxyReading uncertainty_reading;
};

// Label-blind except for C and F, which are operational metadata. The
// reliability gate component uses tau_r_proxy (health scale).
ProxyAssessment assess_window_proxy(const MonitoringWindow& window,
                                    const ReferenceProfile& reference,
                                    const Config& config, double as_of_t,
                                    std::span<const PredictionEvent> history,
                                    std::span<const ExternalSignal> external_signals = {},
                                    CarryForwardState* carry = nullptr,
                                    bool disable_builtin_monitors = false);

// Requires labels on every event: R = F1 at the classification threshold,
// representativeness = 1 - KS(reference scores, current scores), gate uses
// tau_r (F1 scale).
SufficiencyAssessment assess_window_actual(const MonitoringWindow& window,
                                           const ReferenceProfile& reference,
                                           const Config& config, double as_of_t,
                                           std::span<const PredictionEvent> history);

// True iff the drifted run's proxy score falls below the paired baseline
// run's score by strictly more than delta.
bool detect_divergence(double s_proxy_drift, double s_proxy_baseline, double delta);

}  // namespace suffmon
