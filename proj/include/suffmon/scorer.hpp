#pragma once

#include <span>
#include <string>
#include <vector>

#include "suffmon/core.hpp"

namespace suffmon {

// Class-weighted logistic regression over standardized features. Constant
// features (zero stddev in training data) are dropped and excluded from the
// affine map.
struct LogisticModel {
    std::vector<double> weights;   // one per active feature
    double bias = 0.0;
    std::vector<double> means;     // per active feature
    std::vector<double> stddevs;   // per active feature, all > 0
    std::vector<int> active;       // indices into the original feature vector
    std::vector<int> dropped;      // constant features removed at training

    double predict_one(std::span<const double> features) const;
    std::vector<double> predict(std::span<const std::vector<double>> rows) const;
    void score_window(MonitoringWindow& window) const;

    void save(const std::string& path) const;
    static LogisticModel load(const std::string& path);
};

struct TrainParams {
    double learn_rate = 0.5;
    int epochs = 400;
    double l2 = 1e-4;
};

// Full-batch gradient descent on weighted cross-entropy, per-class weight
// n / (2 * n_class), zero initialization. Deterministic.
LogisticModel train_logistic(const MonitoringWindow& train, const TrainParams& params);

// Harmonic mean of precision and recall at score >= threshold; 0 when there
// are no predicted positives or no true positives.
double f1_score(std::span<const int> labels, std::span<const double> scores,
                double threshold);

}  // namespace suffmon
