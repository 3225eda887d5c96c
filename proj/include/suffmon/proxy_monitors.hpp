#pragma once

#include <optional>
#include <span>

#include "suffmon/core.hpp"
#include "suffmon/drift_stats.hpp"

namespace suffmon {

// One proxy category's reading for a window. For divergence categories the
// health is max(0, 1 - raw/cap); external signals arrive pre-normalized and
// carry no raw value.
struct ProxyReading {
    ProxyCategory category = ProxyCategory::external;
    std::optional<double> raw;            // primary divergence
    std::optional<double> raw_secondary;  // second divergence (uncertainty pair)
    double health = 1.0;                  // in [0,1]
    int window_index = 0;
};

double health_from_divergence(double raw, double cap);

ProxyReading score_distribution_health(std::span<const double> ref_scores,
                                       std::span<const double> cur_scores,
                                       const NormalizationCaps& caps,
                                       const BinningSpec& bins,
                                       int window_index = 0);

// Columns are per-feature samples; ref and cur must agree on dimensionality.
// Raw divergence is the mean (or max) of per-feature PSI.
ProxyReading feature_drift_health(std::span<const std::vector<double>> ref_columns,
                                  std::span<const std::vector<double>> cur_columns,
                                  const NormalizationCaps& caps,
                                  std::span<const BinningSpec> feature_bins,
                                  FeatureAggregate aggregate,
                                  int window_index = 0);

// Health is the equal-weight mean of the entropy-shift and confidence-shift
// sub-signals, each an absolute difference of window means against its cap.
ProxyReading uncertainty_health(std::span<const double> ref_scores,
                                std::span<const double> cur_scores,
                                const NormalizationCaps& caps,
                                int window_index = 0);

// Leave-one-sub-window-out calibration: split the reference window into
// equal-duration slices, compute each divergence family between every slice
// and the remainder, and set cap = multiplier * max observed, floored at
// 1e-3. Uses reference data only.
NormalizationCaps calibrate_caps(const MonitoringWindow& reference_window,
                                 int sub_window_count, double multiplier,
                                 const Config& config);

// Per-feature value extraction; column f holds events[i].features[f].
std::vector<std::vector<double>> feature_columns(const MonitoringWindow& window);
std::vector<double> window_scores(const MonitoringWindow& window);

}  // namespace suffmon
