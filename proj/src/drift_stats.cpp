#include "suffmon/drift_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace suffmon {

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
    if (sorted.size() == 1) return sorted[0];
    const double idx = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<size_t>(std::floor(idx));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = idx - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BinningSpec quantile_bins(std::span<const double> reference, int n_bins,
                          double smoothing_epsilon) {
    if (reference.empty()) throw std::invalid_argument("quantile_bins: empty reference");
    if (n_bins < 2) throw std::invalid_argument("quantile_bins: n_bins must be >= 2");
    if (!(smoothing_epsilon > 0.0)) {
        throw std::invalid_argument("quantile_bins: smoothing_epsilon must be > 0");
    }
    std::vector<double> sorted(reference.begin(), reference.end());
    std::sort(sorted.begin(), sorted.end());

    BinningSpec spec;
    spec.smoothing_epsilon = smoothing_epsilon;
    if (sorted.front() == sorted.back()) return spec;  // degenerate: single bin
    for (int k = 1; k < n_bins; ++k) {
        double edge = quantile_sorted(sorted, static_cast<double>(k) / n_bins);
        if (spec.edges.empty() || edge > spec.edges.back()) {
            spec.edges.push_back(edge);  // ties collapse to fewer bins
        }
    }
    return spec;
}

namespace {

std::vector<double> smoothed_proportions(std::span<const double> sample,
                                         const BinningSpec& bins) {
    const size_t n_bins = bins.edges.size() + 1;
    std::vector<double> counts(n_bins, 0.0);
    for (double x : sample) {
        size_t b = std::upper_bound(bins.edges.begin(), bins.edges.end(), x) -
                   bins.edges.begin();
        counts[b] += 1.0;
    }
    const double eps = bins.smoothing_epsilon;
    const double denom = static_cast<double>(sample.size()) +
                         eps * static_cast<double>(n_bins);
    for (double& c : counts) c = (c + eps) / denom;
    return counts;
}

}  // namespace

double psi(std::span<const double> reference, std::span<const double> current,
           const BinningSpec& bins) {
    if (reference.empty() || current.empty()) {
        throw std::invalid_argument("psi: empty sample");
    }
    const auto p = smoothed_proportions(reference, bins);
    const auto q = smoothed_proportions(current, bins);
    double total = 0.0;
    for (size_t b = 0; b < p.size(); ++b) {
        total += (q[b] - p[b]) * std::log(q[b] / p[b]);
    }
    return std::max(0.0, total);  // clamp tiny negative round-off
}

double ks_statistic(std::span<const double> reference, std::span<const double> current) {
    if (reference.empty() || current.empty()) {
        throw std::invalid_argument("ks_statistic: empty sample");
    }
    std::vector<double> a(reference.begin(), reference.end());
    std::vector<double> b(current.begin(), current.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());

    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
    }
    return d;
}

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

namespace {

void check_scores(std::span<const double> scores, const char* who) {
    if (scores.empty()) throw std::invalid_argument(std::string(who) + ": empty sample");
    for (double s : scores) {
        if (!(s >= 0.0 && s <= 1.0)) {
            throw std::invalid_argument(std::string(who) + ": score outside [0,1]");
        }
    }
}

}  // namespace

double mean_entropy(std::span<const double> scores) {
    check_scores(scores, "mean_entropy");
    double sum = 0.0;
    for (double s : scores) sum += binary_entropy(s);
    return sum / static_cast<double>(scores.size());
}

double mean_confidence(std::span<const double> scores) {
    check_scores(scores, "mean_confidence");
    double sum = 0.0;
    for (double s : scores) sum += std::max(s, 1.0 - s);
    return sum / static_cast<double>(scores.size());
}

}  // namespace suffmon
