#pragma once

#include <span>
#include <vector>

namespace suffmon {

// Bin edges partition the real line into edges.size()+1 intervals with open
// outer bins. Duplicate quantiles collapse, so a degenerate reference can
// yield a single bin (no edges).
struct BinningSpec {
    std::vector<double> edges;  // strictly increasing
    double smoothing_epsilon = 1e-4;
};

// Linear-interpolation quantile over the sorted sample: index (n-1)*p,
// interpolated between neighbouring order statistics. Fixed convention so
// results are identical across platforms.
double quantile_sorted(std::span<const double> sorted, double p);

BinningSpec quantile_bins(std::span<const double> reference, int n_bins,
                          double smoothing_epsilon = 1e-4);

// Population Stability Index with additive smoothing: each raw bin
// proportion is replaced by (count + eps) / (N + eps * B) before
// sum (q - p) * ln(q / p). Symmetric in its two samples and nonnegative.
double psi(std::span<const double> reference, std::span<const double> current,
           const BinningSpec& bins);

// Exact two-sample Kolmogorov-Smirnov statistic over the merged support.
double ks_statistic(std::span<const double> reference, std::span<const double> current);

// H(p) = -p ln p - (1-p) ln(1-p), in nats, with H(0) = H(1) = 0.
double binary_entropy(double p);

double mean_entropy(std::span<const double> scores);

// Mean of max(p, 1-p); lies in [0.5, 1].
double mean_confidence(std::span<const double> scores);

}  // namespace suffmon
