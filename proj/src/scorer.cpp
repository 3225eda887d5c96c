#include "suffmon/scorer.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace suffmon {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

double LogisticModel::predict_one(std::span<const double> features) const {
    double z = bias;
    for (size_t k = 0; k < active.size(); ++k) {
        const auto f = static_cast<size_t>(active[k]);
        if (f >= features.size()) {
            throw std::invalid_argument("predict: feature dimension mismatch");
        }
        z += weights[k] * (features[f] - means[k]) / stddevs[k];
    }
    return sigmoid(z);
}

std::vector<double> LogisticModel::predict(std::span<const std::vector<double>> rows) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(predict_one(row));
    return out;
}

void LogisticModel::score_window(MonitoringWindow& window) const {
    for (auto& e : window.events) e.score = predict_one(e.features);
}

LogisticModel train_logistic(const MonitoringWindow& train, const TrainParams& params) {
    const auto& events = train.events;
    if (events.empty()) throw std::invalid_argument("train_logistic: empty window");
    const size_t n = events.size();
    const size_t dim = events.front().features.size();

    size_t n_pos = 0;
    for (const auto& e : events) {
        if (!e.label) throw std::invalid_argument("train_logistic: unlabeled event");
        for (double f : e.features) {
            if (!std::isfinite(f)) {
                throw std::invalid_argument("train_logistic: non-finite feature");
            }
        }
        if (*e.label == 1) ++n_pos;
    }
    const size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw std::invalid_argument("train_logistic: single-class window");
    }

    LogisticModel model;
    for (size_t f = 0; f < dim; ++f) {
        double mean = 0.0;
        for (const auto& e : events) mean += e.features[f];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (const auto& e : events) {
            const double d = e.features[f] - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        const double sd = std::sqrt(var);
        if (sd > 0.0) {
            model.active.push_back(static_cast<int>(f));
            model.means.push_back(mean);
            model.stddevs.push_back(sd);
        } else {
            model.dropped.push_back(static_cast<int>(f));
        }
    }
    if (!model.dropped.empty()) {
        std::cerr << "train_logistic: dropped " << model.dropped.size()
                  << " constant feature(s)\n";
    }

    const size_t d = model.active.size();
    model.weights.assign(d, 0.0);
    model.bias = 0.0;

    // Standardize once up front.
    std::vector<double> x(n * d);
    std::vector<double> y(n);
    std::vector<double> sample_weight(n);
    const double w_pos = static_cast<double>(n) / (2.0 * static_cast<double>(n_pos));
    const double w_neg = static_cast<double>(n) / (2.0 * static_cast<double>(n_neg));
    for (size_t i = 0; i < n; ++i) {
        y[i] = static_cast<double>(*events[i].label);
        sample_weight[i] = (y[i] == 1.0) ? w_pos : w_neg;
        for (size_t k = 0; k < d; ++k) {
            const auto f = static_cast<size_t>(model.active[k]);
            x[i * d + k] = (events[i].features[f] - model.means[k]) / model.stddevs[k];
        }
    }

    std::vector<double> grad(d);
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_bias = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double z = model.bias;
            for (size_t k = 0; k < d; ++k) z += model.weights[k] * x[i * d + k];
            const double err = sample_weight[i] * (sigmoid(z) - y[i]);
            for (size_t k = 0; k < d; ++k) grad[k] += err * x[i * d + k];
            grad_bias += err;
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        for (size_t k = 0; k < d; ++k) {
            grad[k] = grad[k] * inv_n + params.l2 * model.weights[k];
            model.weights[k] -= params.learn_rate * grad[k];
        }
        model.bias -= params.learn_rate * grad_bias * inv_n;
    }
    return model;
}

double f1_score(std::span<const int> labels, std::span<const double> scores,
                double threshold) {
    if (labels.size() != scores.size()) {
        throw std::invalid_argument("f1_score: length mismatch");
    }
    if (labels.empty()) throw std::invalid_argument("f1_score: empty input");
    size_t tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < labels.size(); ++i) {
        const bool pred = scores[i] >= threshold;
        if (pred && labels[i] == 1) ++tp;
        else if (pred && labels[i] == 0) ++fp;
        else if (!pred && labels[i] == 1) ++fn;
    }
    if (tp == 0) return 0.0;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return 2.0 * precision * recall / (precision + recall);
}

void LogisticModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out.precision(17);
    out << "logistic-model v1\n";
    out << "bias " << bias << "\n";
    out << "active";
    for (int a : active) out << " " << a;
    out << "\nweights";
    for (double w : weights) out << " " << w;
    out << "\nmeans";
    for (double m : means) out << " " << m;
    out << "\nstddevs";
    for (double s : stddevs) out << " " << s;
    out << "\n";
}

LogisticModel LogisticModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::string line;
    std::getline(in, line);
    if (line != "logistic-model v1") {
        throw std::runtime_error("unrecognized model file format: " + path);
    }
    LogisticModel model;
    auto read_row = [&](const std::string& tag, auto& vec) {
        std::getline(in, line);
        std::istringstream ss(line);
        std::string got;
        ss >> got;
        if (got != tag) throw std::runtime_error("model file: expected '" + tag + "' row");
        typename std::remove_reference_t<decltype(vec)>::value_type v;
        while (ss >> v) vec.push_back(v);
    };
    std::getline(in, line);
    {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag >> model.bias;
        if (tag != "bias") throw std::runtime_error("model file: expected 'bias' row");
    }
    read_row("active", model.active);
    read_row("weights", model.weights);
    read_row("means", model.means);
    read_row("stddevs", model.stddevs);
    if (model.weights.size() != model.active.size() ||
        model.means.size() != model.active.size() ||
        model.stddevs.size() != model.active.size()) {
        throw std::runtime_error("model file: inconsistent row lengths");
    }
    return model;
}

}  // namespace suffmon
