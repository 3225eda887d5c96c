#include "suffmon/proxy_monitors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace suffmon {

double health_from_divergence(double raw, double cap) {
    if (raw < 0.0) throw std::invalid_argument("health_from_divergence: raw must be >= 0");
    if (!(cap > 0.0)) throw std::invalid_argument("health_from_divergence: cap must be > 0");
    return std::max(0.0, 1.0 - raw / cap);
}

ProxyReading score_distribution_health(std::span<const double> ref_scores,
                                       std::span<const double> cur_scores,
                                       const NormalizationCaps& caps,
                                       const BinningSpec& bins, int window_index) {
    ProxyReading r;
    r.category = ProxyCategory::score_distribution;
    r.window_index = window_index;
    r.raw = psi(ref_scores, cur_scores, bins);
    r.health = health_from_divergence(*r.raw, caps.psi);
    return r;
}

ProxyReading feature_drift_health(std::span<const std::vector<double>> ref_columns,
                                  std::span<const std::vector<double>> cur_columns,
                                  const NormalizationCaps& caps,
                                  std::span<const BinningSpec> feature_bins,
                                  FeatureAggregate aggregate, int window_index) {
    if (ref_columns.size() != cur_columns.size() ||
        ref_columns.size() != feature_bins.size()) {
        throw std::invalid_argument("feature_drift_health: feature dimensionality mismatch");
    }
    if (ref_columns.empty()) {
        throw std::invalid_argument("feature_drift_health: no features");
    }
    double agg = 0.0;
    for (size_t f = 0; f < ref_columns.size(); ++f) {
        const double v = psi(ref_columns[f], cur_columns[f], feature_bins[f]);
        if (aggregate == FeatureAggregate::mean) {
            agg += v;
        } else {
            agg = std::max(agg, v);
        }
    }
    if (aggregate == FeatureAggregate::mean) {
        agg /= static_cast<double>(ref_columns.size());
    }
    ProxyReading r;
    r.category = ProxyCategory::feature_drift;
    r.window_index = window_index;
    r.raw = agg;
    r.health = health_from_divergence(agg, caps.fpsi);
    return r;
}

ProxyReading uncertainty_health(std::span<const double> ref_scores,
                                std::span<const double> cur_scores,
                                const NormalizationCaps& caps, int window_index) {
    const double ent_div = std::abs(mean_entropy(cur_scores) - mean_entropy(ref_scores));
    const double conf_div =
        std::abs(mean_confidence(cur_scores) - mean_confidence(ref_scores));
    ProxyReading r;
    r.category = ProxyCategory::uncertainty;
    r.window_index = window_index;
    r.raw = ent_div;
    r.raw_secondary = conf_div;
    r.health = 0.5 * (health_from_divergence(ent_div, caps.entropy) +
                      health_from_divergence(conf_div, caps.confidence));
    return r;
}

std::vector<std::vector<double>> feature_columns(const MonitoringWindow& window) {
    std::vector<std::vector<double>> columns;
    if (window.events.empty()) return columns;
    const size_t dim = window.events.front().features.size();
    columns.resize(dim);
    for (auto& col : columns) col.reserve(window.events.size());
    for (const auto& e : window.events) {
        if (e.features.size() != dim) {
            throw std::invalid_argument("feature_columns: inconsistent feature dimension");
        }
        for (size_t f = 0; f < dim; ++f) columns[f].push_back(e.features[f]);
    }
    return columns;
}

std::vector<double> window_scores(const MonitoringWindow& window) {
    std::vector<double> scores;
    scores.reserve(window.events.size());
    for (const auto& e : window.events) scores.push_back(e.score);
    return scores;
}

NormalizationCaps calibrate_caps(const MonitoringWindow& reference_window,
                                 int sub_window_count, double multiplier,
                                 const Config& config) {
    if (sub_window_count < 2) {
        throw std::invalid_argument("calibrate_caps: sub_window_count must be >= 2");
    }
    if (!(multiplier > 0.0)) {
        throw std::invalid_argument("calibrate_caps: multiplier must be > 0");
    }
    const double span = reference_window.end_t - reference_window.start_t;
    if (!(span > 0.0)) throw std::invalid_argument("calibrate_caps: empty reference span");
    const double slice = span / sub_window_count;

    // Assign events to equal-duration slices.
    std::vector<std::vector<size_t>> members(sub_window_count);
    for (size_t i = 0; i < reference_window.events.size(); ++i) {
        int k = static_cast<int>((reference_window.events[i].t - reference_window.start_t) / slice);
        k = std::clamp(k, 0, sub_window_count - 1);
        members[static_cast<size_t>(k)].push_back(i);
    }
    for (const auto& m : members) {
        if (static_cast<int>(m.size()) < config.calibration_min_events) {
            throw std::invalid_argument(
                "calibrate_caps: sub-window has fewer than " +
                std::to_string(config.calibration_min_events) + " events");
        }
    }

    const auto all_scores = window_scores(reference_window);
    const auto all_columns = feature_columns(reference_window);
    const size_t dim = all_columns.size();

    double max_psi = 0.0, max_fpsi = 0.0, max_ent = 0.0, max_conf = 0.0;
    for (int k = 0; k < sub_window_count; ++k) {
        std::vector<double> in_scores, out_scores;
        std::vector<std::vector<double>> in_cols(dim), out_cols(dim);
        std::vector<char> is_member(reference_window.events.size(), 0);
        for (size_t i : members[static_cast<size_t>(k)]) is_member[i] = 1;
        for (size_t i = 0; i < reference_window.events.size(); ++i) {
            auto& scores = is_member[i] ? in_scores : out_scores;
            scores.push_back(all_scores[i]);
            for (size_t f = 0; f < dim; ++f) {
                (is_member[i] ? in_cols[f] : out_cols[f]).push_back(all_columns[f][i]);
            }
        }

        const auto score_bins = quantile_bins(out_scores, config.psi_bins, config.psi_epsilon);
        max_psi = std::max(max_psi, psi(out_scores, in_scores, score_bins));

        if (dim > 0) {
            double agg = 0.0;
            for (size_t f = 0; f < dim; ++f) {
                const auto bins = quantile_bins(out_cols[f], config.psi_bins, config.psi_epsilon);
                const double v = psi(out_cols[f], in_cols[f], bins);
                if (config.feature_aggregate == FeatureAggregate::mean) agg += v;
                else agg = std::max(agg, v);
            }
            if (config.feature_aggregate == FeatureAggregate::mean) {
                agg /= static_cast<double>(dim);
            }
            max_fpsi = std::max(max_fpsi, agg);
        }

        max_ent = std::max(max_ent,
                           std::abs(mean_entropy(in_scores) - mean_entropy(out_scores)));
        max_conf = std::max(
            max_conf, std::abs(mean_confidence(in_scores) - mean_confidence(out_scores)));
    }

    constexpr double kFloor = 1e-3;
    NormalizationCaps caps;
    caps.psi = std::max(kFloor, multiplier * max_psi);
    caps.fpsi = std::max(kFloor, multiplier * max_fpsi);
    caps.entropy = std::max(kFloor, multiplier * max_ent);
    caps.confidence = std::max(kFloor, multiplier * max_conf);
    return caps;
}

}  // namespace suffmon
