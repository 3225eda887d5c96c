#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace suffmon {

// One scored decision. Timestamps are real-valued day offsets from the
// stream origin; ingestion converts whatever the source uses.
struct PredictionEvent {
    std::string event_id;
    double t = 0.0;
    std::vector<double> features;
    double score = 0.0;  // predicted positive-class probability, in [0,1]
    std::optional<int> label;            // binary outcome, present iff confirmed
    std::optional<double> label_arrival_t;  // day the label became known, >= t
};

// Contiguous time slice of the stream. Events are ordered by t and every
// event satisfies start_t <= t < end_t.
struct MonitoringWindow {
    int index = 0;
    double start_t = 0.0;
    double end_t = 0.0;
    std::vector<PredictionEvent> events;
};

enum class Dimension { completeness, freshness, reliability, representativeness };

enum class ProxyCategory { score_distribution, feature_drift, uncertainty, external };

const char* to_string(Dimension d);
const char* to_string(ProxyCategory c);

// Weights must sum to 1 (checked to 1e-9). Defaults are the fraud
// calibration used throughout.
struct DimensionWeights {
    double completeness = 0.20;
    double freshness = 0.30;
    double reliability = 0.30;
    double representativeness = 0.20;
};

struct GateThresholds {
    double tau_c = 0.6;
    double tau_r = 0.15;        // raw-F1 scale, actual mode
    double tau_r_proxy = 0.55;  // normalized health scale, proxy mode
};

// Caps map raw divergences onto the [0,1] health scale; health is zero at
// or beyond the cap.
struct NormalizationCaps {
    double psi = 0.500;
    double fpsi = 1.000;
    double entropy = 0.150;
    double confidence = 0.414;
};

struct StatusThresholds {
    double sufficient_min = 0.8;
    double degraded_min = 0.5;
};

// Proxy-category x dimension weights. Only reliability and
// representativeness are proxy-estimated; completeness and freshness are
// deterministic operational quantities and never appear here.
// Weight vocabulary: strong = 1.0, moderate = 0.5, weak = 0.25, none = 0.
class CoverageMatrix {
public:
    static constexpr double kStrong = 1.0;
    static constexpr double kModerate = 0.5;
    static constexpr double kWeak = 0.25;

    static CoverageMatrix defaults();

    void set(ProxyCategory c, Dimension d, double weight);
    double weight(ProxyCategory c, Dimension d) const;

    const std::map<std::pair<ProxyCategory, Dimension>, double>& entries() const {
        return entries_;
    }

private:
    std::map<std::pair<ProxyCategory, Dimension>, double> entries_;
};

enum class FeatureAggregate { mean, max };

struct Config {
    DimensionWeights weights;
    GateThresholds gates;
    NormalizationCaps caps;
    StatusThresholds status;
    CoverageMatrix coverage = CoverageMatrix::defaults();

    double freshness_lambda = 0.02;       // decay per day
    int psi_bins = 10;
    double psi_epsilon = 1e-4;            // additive smoothing per bin
    FeatureAggregate feature_aggregate = FeatureAggregate::mean;
    double classification_threshold = 0.5;
    double detection_delta = 0.05;

    int calibration_sub_windows = 4;
    double calibration_multiplier = 3.0;
    int calibration_min_events = 30;
};

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

// Returns one message per violated invariant, empty when valid.
std::vector<std::string> config_violations(const Config& config);

// Throws ValidationError naming every violated field.
Config validate_config(Config config);

// Flat key-value configuration document. Unknown keys are rejected.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);
std::string write_config(const Config& config);

// Event-level invariant checks, used by ingestion and the generator.
std::optional<std::string> event_violation(const PredictionEvent& event);

}  // namespace suffmon
