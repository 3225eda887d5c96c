#include "suffmon/sufficiency.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "suffmon/scorer.hpp"

namespace suffmon {

const char* to_string(Status s) {
    switch (s) {
        case Status::sufficient: return "sufficient";
        case Status::degraded: return "degraded";
        case Status::insufficient: return "insufficient";
    }
    return "?";
}

double completeness(const MonitoringWindow& window, double as_of_t) {
    if (window.events.empty()) throw std::invalid_argument("completeness: empty window");
    size_t confirmed = 0;
    for (const auto& e : window.events) {
        if (e.label_arrival_t && *e.label_arrival_t <= as_of_t) ++confirmed;
    }
    return static_cast<double>(confirmed) / static_cast<double>(window.events.size());
}

double freshness(double delta_t_days, double lambda) {
    if (delta_t_days < 0.0) throw std::invalid_argument("freshness: delta_t must be >= 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("freshness: lambda must be > 0");
    return std::exp(-lambda * delta_t_days);
}

std::optional<double> label_staleness(std::span<const PredictionEvent> history,
                                      double as_of_t) {
    // Cohort = confirmed labels sharing the latest whole-day arrival batch.
    double latest_day = -std::numeric_limits<double>::infinity();
    for (const auto& e : history) {
        if (e.label_arrival_t && *e.label_arrival_t <= as_of_t) {
            latest_day = std::max(latest_day, std::floor(*e.label_arrival_t));
        }
    }
    if (!std::isfinite(latest_day)) return std::nullopt;

    std::vector<double> cohort_times;
    for (const auto& e : history) {
        if (e.label_arrival_t && *e.label_arrival_t <= as_of_t &&
            std::floor(*e.label_arrival_t) == latest_day) {
            cohort_times.push_back(e.t);
        }
    }
    std::sort(cohort_times.begin(), cohort_times.end());
    const size_t n = cohort_times.size();
    const double median = (n % 2 == 1)
                              ? cohort_times[n / 2]
                              : 0.5 * (cohort_times[n / 2 - 1] + cohort_times[n / 2]);
    return std::max(0.0, as_of_t - median);
}

AggregateResult aggregate_dimension(std::span<const WeightedSignal> signals,
                                    std::optional<double> last_valid) {
    double num = 0.0, denom = 0.0;
    for (const auto& s : signals) {
        if (!(s.health >= 0.0 && s.health <= 1.0)) {
            throw std::invalid_argument("aggregate_dimension: health outside [0,1]");
        }
        num += s.weight * s.health;
        denom += s.weight;
    }
    if (denom > 0.0) return {num / denom, false};
    return {last_valid.value_or(0.0), true};
}

double readiness_gate(double c, double r, double tau_c, double tau_r) {
    if (!(tau_c > 0.0 && tau_r > 0.0)) {
        throw std::invalid_argument("readiness_gate: thresholds must be > 0");
    }
    return std::min(1.0, c / tau_c) * std::min(1.0, r / tau_r);
}

Status classify_status(double score, const StatusThresholds& thresholds) {
    if (score >= thresholds.sufficient_min) return Status::sufficient;
    if (score >= thresholds.degraded_min) return Status::degraded;
    return Status::insufficient;
}

SufficiencyAssessment composite_sufficiency(const DimensionScores& dims, double gate,
                                            const DimensionWeights& weights,
                                            const StatusThresholds& thresholds,
                                            AssessmentMode mode, int window_index) {
    SufficiencyAssessment a;
    a.window_index = window_index;
    a.dims = dims;
    a.gate = gate;
    a.score = gate * (weights.completeness * dims.completeness +
                      weights.freshness * dims.freshness +
                      weights.reliability * dims.reliability +
                      weights.representativeness * dims.representativeness);
    a.status = classify_status(a.score, thresholds);
    a.monitoring_impaired = !dims.impaired.empty();
    a.mode = mode;
    return a;
}

ReferenceProfile ReferenceProfile::build(const MonitoringWindow& reference,
                                         const Config& config,
                                         bool calibrate_from_sub_windows) {
    if (reference.events.empty()) {
        throw std::invalid_argument("ReferenceProfile: empty reference window");
    }
    ReferenceProfile p;
    p.scores = window_scores(reference);
    p.feature_columns = ::suffmon::feature_columns(reference);
    p.score_bins = quantile_bins(p.scores, config.psi_bins, config.psi_epsilon);
    p.feature_bins.reserve(p.feature_columns.size());
    p.feature_sigmas.reserve(p.feature_columns.size());
    for (const auto& col : p.feature_columns) {
        p.feature_bins.push_back(quantile_bins(col, config.psi_bins, config.psi_epsilon));
        double mean = 0.0;
        for (double v : col) mean += v;
        mean /= static_cast<double>(col.size());
        double var = 0.0;
        for (double v : col) var += (v - mean) * (v - mean);
        var /= static_cast<double>(col.size());
        p.feature_sigmas.push_back(std::sqrt(var));
    }
    p.caps = calibrate_from_sub_windows
                 ? calibrate_caps(reference, config.calibration_sub_windows,
                                  config.calibration_multiplier, config)
                 : config.caps;
    return p;
}

namespace {

// Shared C/F computation; identical for proxy and actual modes.
void observed_dimensions(const MonitoringWindow& window, const Config& config,
                         double as_of_t, std::span<const PredictionEvent> history,
                         DimensionScores& dims) {
    dims.completeness = completeness(window, as_of_t);
    auto staleness = label_staleness(history, as_of_t);
    double delta;
    if (staleness) {
        delta = *staleness;
    } else {
        // No confirmed label anywhere: fall back to age of the oldest
        // history event (the whole evidence base is that stale).
        double origin = window.start_t;
        for (const auto& e : history) origin = std::min(origin, e.t);
        delta = std::max(0.0, as_of_t - origin);
    }
    dims.freshness = freshness(delta, config.freshness_lambda);
}

}  // namespace

ProxyAssessment assess_window_proxy(const MonitoringWindow& window,
                                    const ReferenceProfile& reference,
                                    const Config& config, double as_of_t,
                                    std::span<const PredictionEvent> history,
                                    std::span<const ExternalSignal> external_signals,
                                    CarryForwardState* carry,
                                    bool disable_builtin_monitors) {
    if (window.events.empty()) {
        throw std::invalid_argument("assess_window_proxy: empty window");
    }
    ProxyAssessment out;
    DimensionScores dims;
    observed_dimensions(window, config, as_of_t, history, dims);

    std::vector<WeightedSignal> reliability_signals;
    std::vector<WeightedSignal> representativeness_signals;
    const auto& cov = config.coverage;
    auto route = [&](ProxyCategory cat, double health) {
        if (double w = cov.weight(cat, Dimension::reliability); w > 0.0) {
            reliability_signals.push_back({health, w});
        }
        if (double w = cov.weight(cat, Dimension::representativeness); w > 0.0) {
            representativeness_signals.push_back({health, w});
        }
    };

    if (!disable_builtin_monitors) {
        const auto cur_scores = window_scores(window);
        const auto cur_columns = feature_columns(window);
        out.score_reading = score_distribution_health(
            reference.scores, cur_scores, reference.caps, reference.score_bins,
            window.index);
        out.feature_reading = feature_drift_health(
            reference.feature_columns, cur_columns, reference.caps,
            reference.feature_bins, config.feature_aggregate, window.index);
        out.uncertainty_reading = uncertainty_health(reference.scores, cur_scores,
                                                     reference.caps, window.index);
        route(ProxyCategory::score_distribution, out.score_reading.health);
        route(ProxyCategory::feature_drift, out.feature_reading.health);
        route(ProxyCategory::uncertainty, out.uncertainty_reading.health);
    }
    for (const auto& ext : external_signals) {
        if (ext.reliability_weight > 0.0) {
            reliability_signals.push_back({ext.health, ext.reliability_weight});
        }
        if (ext.representativeness_weight > 0.0) {
            representativeness_signals.push_back({ext.health, ext.representativeness_weight});
        }
    }

    const auto rel = aggregate_dimension(
        reliability_signals, carry ? carry->reliability : std::nullopt);
    const auto rep = aggregate_dimension(
        representativeness_signals, carry ? carry->representativeness : std::nullopt);
    dims.reliability = rel.value;
    dims.representativeness = rep.value;
    if (rel.impaired) dims.impaired.insert(Dimension::reliability);
    if (rep.impaired) dims.impaired.insert(Dimension::representativeness);
    if (carry) {
        if (!rel.impaired) carry->reliability = rel.value;
        if (!rep.impaired) carry->representativeness = rep.value;
    }

    const double gate = readiness_gate(dims.completeness, dims.reliability,
                                       config.gates.tau_c, config.gates.tau_r_proxy);
    out.assessment = composite_sufficiency(dims, gate, config.weights, config.status,
                                           AssessmentMode::proxy, window.index);
    return out;
}

SufficiencyAssessment assess_window_actual(const MonitoringWindow& window,
                                           const ReferenceProfile& reference,
                                           const Config& config, double as_of_t,
                                           std::span<const PredictionEvent> history) {
    if (window.events.empty()) {
        throw std::invalid_argument("assess_window_actual: empty window");
    }
    std::vector<int> labels;
    std::vector<double> scores;
    labels.reserve(window.events.size());
    scores.reserve(window.events.size());
    for (const auto& e : window.events) {
        if (!e.label) {
            throw std::invalid_argument("assess_window_actual: unlabeled events present");
        }
        labels.push_back(*e.label);
        scores.push_back(e.score);
    }

    DimensionScores dims;
    observed_dimensions(window, config, as_of_t, history, dims);
    dims.reliability = f1_score(labels, scores, config.classification_threshold);
    dims.representativeness = 1.0 - ks_statistic(reference.scores, scores);

    const double gate = readiness_gate(dims.completeness, dims.reliability,
                                       config.gates.tau_c, config.gates.tau_r);
    return composite_sufficiency(dims, gate, config.weights, config.status,
                                 AssessmentMode::actual, window.index);
}

bool detect_divergence(double s_proxy_drift, double s_proxy_baseline, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("detect_divergence: delta must be > 0");
    return s_proxy_drift < s_proxy_baseline - delta;
}

}  // namespace suffmon
