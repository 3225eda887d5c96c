#include "suffmon/injection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace suffmon {

const char* to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::baseline: return "baseline";
        case ScenarioKind::covariate: return "covariate";
        case ScenarioKind::mixed: return "mixed";
        case ScenarioKind::concept_prior: return "concept_prior";
    }
    return "?";
}

std::optional<ScenarioKind> scenario_from(const std::string& name) {
    if (name == "baseline") return ScenarioKind::baseline;
    if (name == "covariate") return ScenarioKind::covariate;
    if (name == "mixed") return ScenarioKind::mixed;
    if (name == "concept_prior") return ScenarioKind::concept_prior;
    return std::nullopt;
}

std::vector<double> linear_schedule(double from, double to, int n) {
    if (n < 1) throw std::invalid_argument("linear_schedule: n must be >= 1");
    std::vector<double> out(static_cast<size_t>(n));
    if (n == 1) {
        out[0] = to;
        return out;
    }
    for (int i = 0; i < n; ++i) {
        out[static_cast<size_t>(i)] = from + (to - from) * i / (n - 1);
    }
    return out;
}

ScenarioSpec ScenarioSpec::defaults(ScenarioKind kind, int n_windows, uint64_t seed) {
    ScenarioSpec spec;
    spec.kind = kind;
    spec.seed = seed;
    switch (kind) {
        case ScenarioKind::baseline:
            break;
        case ScenarioKind::covariate:
            spec.sigma_schedule = linear_schedule(0.3, 2.0, n_windows);
            spec.noise_features = {0, 1, 2};
            break;
        case ScenarioKind::mixed:
            spec.sigma_schedule = linear_schedule(0.2, 1.5, n_windows);
            spec.noise_features = {0, 1, 2};
            spec.flip_schedule = linear_schedule(0.03, 0.30, n_windows);
            break;
        case ScenarioKind::concept_prior:
            spec.target_prevalence = {0.036, 0.030, 0.020, 0.009, 0.002};
            spec.target_prevalence.resize(static_cast<size_t>(n_windows),
                                          spec.target_prevalence.empty()
                                              ? 0.002
                                              : spec.target_prevalence.back());
            break;
    }
    return spec;
}

std::vector<std::string> ScenarioSpec::violations(int n_windows) const {
    std::vector<std::string> out;
    auto check_len = [&](const auto& v, const char* name) {
        if (!v.empty() && static_cast<int>(v.size()) != n_windows) {
            out.push_back(std::string(name) + ": schedule length must equal window count");
        }
    };
    check_len(sigma_schedule, "sigma_schedule");
    check_len(flip_schedule, "flip_schedule");
    check_len(target_prevalence, "target_prevalence");
    for (double s : sigma_schedule) {
        if (s < 0.0) out.push_back("sigma_schedule: multipliers must be >= 0");
    }
    for (double r : flip_schedule) {
        if (!(r >= 0.0 && r <= 1.0)) out.push_back("flip_schedule: rates must be in [0,1]");
    }
    return out;
}

MonitoringWindow inject_covariate(const MonitoringWindow& window,
                                  std::span<const int> features, double sigma_mult,
                                  std::span<const double> ref_sigma, uint64_t seed) {
    if (sigma_mult < 0.0) {
        throw std::invalid_argument("inject_covariate: sigma_mult must be >= 0");
    }
    MonitoringWindow out = window;
    if (sigma_mult == 0.0 || features.empty()) return out;

    for (int f : features) {
        if (f < 0 || static_cast<size_t>(f) >= ref_sigma.size()) {
            throw std::invalid_argument("inject_covariate: invalid feature index");
        }
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    for (auto& e : out.events) {
        for (int f : features) {
            if (static_cast<size_t>(f) >= e.features.size()) {
                throw std::invalid_argument("inject_covariate: invalid feature index");
            }
            e.features[static_cast<size_t>(f)] +=
                unit(rng) * sigma_mult * ref_sigma[static_cast<size_t>(f)];
        }
    }
    return out;
}

MonitoringWindow inject_label_flips(const MonitoringWindow& window, double rate,
                                    FlipDirection direction, uint64_t seed) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
        throw std::invalid_argument("inject_label_flips: rate must be in [0,1]");
    }
    MonitoringWindow out = window;
    if (rate == 0.0) return out;

    std::vector<size_t> candidates;
    for (size_t i = 0; i < out.events.size(); ++i) {
        const auto& label = out.events[i].label;
        if (!label) continue;
        if (direction == FlipDirection::symmetric || *label == 1) candidates.push_back(i);
    }
    const auto n_flips = static_cast<size_t>(
        std::floor(rate * static_cast<double>(candidates.size())));
    if (n_flips == 0) return out;

    std::mt19937_64 rng(seed);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    for (size_t k = 0; k < n_flips; ++k) {
        auto& label = out.events[candidates[k]].label;
        label = 1 - *label;
    }
    return out;
}

double calibrate_flip_rate(double current_prevalence, double target_prevalence) {
    if (!(current_prevalence > 0.0 && current_prevalence <= 1.0)) {
        throw std::invalid_argument("calibrate_flip_rate: current prevalence must be in (0,1]");
    }
    if (target_prevalence < 0.0 || target_prevalence > current_prevalence) {
        throw std::invalid_argument(
            "calibrate_flip_rate: target must lie in [0, current prevalence]");
    }
    return 1.0 - target_prevalence / current_prevalence;
}

std::vector<PredictionEvent> generate_synthetic(const SyntheticSpec& spec) {
    if (spec.n_events < 1) throw std::invalid_argument("generate_synthetic: n_events >= 1");
    if (spec.n_features < 1) {
        throw std::invalid_argument("generate_synthetic: n_features >= 1");
    }
    if (spec.n_informative < 0 || spec.n_informative > spec.n_features) {
        throw std::invalid_argument("generate_synthetic: bad n_informative");
    }
    if (!(spec.prevalence > 0.0 && spec.prevalence < 1.0)) {
        throw std::invalid_argument("generate_synthetic: prevalence must be in (0,1)");
    }
    if (!(spec.span_days > 0.0)) {
        throw std::invalid_argument("generate_synthetic: span_days must be > 0");
    }

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> unit(0.0, 1.0);

    std::vector<PredictionEvent> events;
    events.reserve(static_cast<size_t>(spec.n_events));
    for (int i = 0; i < spec.n_events; ++i) {
        PredictionEvent e;
        e.t = uniform(rng) * spec.span_days;
        const bool positive = uniform(rng) < spec.prevalence;
        e.features.resize(static_cast<size_t>(spec.n_features));
        for (int f = 0; f < spec.n_features; ++f) {
            double v = unit(rng);
            if (positive && f < spec.n_informative) v += spec.class_separation;
            e.features[static_cast<size_t>(f)] = v;
        }
        e.score = 0.5;
        e.label = positive ? 1 : 0;
        e.label_arrival_t = e.t + uniform(rng) * spec.max_label_delay;
        events.push_back(std::move(e));
    }
    std::sort(events.begin(), events.end(),
              [](const PredictionEvent& a, const PredictionEvent& b) { return a.t < b.t; });
    for (size_t i = 0; i < events.size(); ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "e%08zu", i);
        events[i].event_id = id;
    }
    return events;
}

double positive_fraction(const MonitoringWindow& window) {
    if (window.events.empty()) return 0.0;
    size_t pos = 0, labeled = 0;
    for (const auto& e : window.events) {
        if (e.label) {
            ++labeled;
            if (*e.label == 1) ++pos;
        }
    }
    return labeled == 0 ? 0.0
                        : static_cast<double>(pos) / static_cast<double>(labeled);
}

}  // namespace suffmon
