#include "suffmon/core.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace suffmon {

const char* to_string(Dimension d) {
    switch (d) {
        case Dimension::completeness: return "completeness";
        case Dimension::freshness: return "freshness";
        case Dimension::reliability: return "reliability";
        case Dimension::representativeness: return "representativeness";
    }
    return "?";
}

const char* to_string(ProxyCategory c) {
    switch (c) {
        case ProxyCategory::score_distribution: return "score_distribution";
        case ProxyCategory::feature_drift: return "feature_drift";
        case ProxyCategory::uncertainty: return "uncertainty";
        case ProxyCategory::external: return "external";
    }
    return "?";
}

CoverageMatrix CoverageMatrix::defaults() {
    CoverageMatrix m;
    m.set(ProxyCategory::score_distribution, Dimension::reliability, kWeak);
    m.set(ProxyCategory::score_distribution, Dimension::representativeness, kStrong);
    m.set(ProxyCategory::feature_drift, Dimension::representativeness, kStrong);
    m.set(ProxyCategory::uncertainty, Dimension::reliability, kModerate);
    return m;
}

void CoverageMatrix::set(ProxyCategory c, Dimension d, double weight) {
    if (d != Dimension::reliability && d != Dimension::representativeness) {
        throw ValidationError(
            {"CoverageMatrix: only reliability and representativeness are proxy-estimated"});
    }
    if (weight != 0.0 && weight != kWeak && weight != kModerate && weight != kStrong) {
        throw ValidationError({"CoverageMatrix: weight must be one of {0, 0.25, 0.5, 1.0}"});
    }
    if (weight == 0.0) {
        entries_.erase({c, d});
    } else {
        entries_[{c, d}] = weight;
    }
}

double CoverageMatrix::weight(ProxyCategory c, Dimension d) const {
    auto it = entries_.find({c, d});
    return it == entries_.end() ? 0.0 : it->second;
}

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::runtime_error([&] {
          std::string msg = "configuration invalid:";
          for (const auto& v : violations) msg += "\n  - " + v;
          return msg;
      }()),
      violations_(std::move(violations)) {}

std::vector<std::string> config_violations(const Config& config) {
    std::vector<std::string> out;
    const auto& w = config.weights;
    const double sum = w.completeness + w.freshness + w.reliability + w.representativeness;
    auto in01 = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in01(w.completeness) || !in01(w.freshness) || !in01(w.reliability) ||
        !in01(w.representativeness)) {
        out.push_back("DimensionWeights: each weight must lie in [0,1]");
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        out.push_back("DimensionWeights: weights must sum to 1 (got " +
                      std::to_string(sum) + ")");
    }
    const auto& g = config.gates;
    if (!(g.tau_c > 0.0 && g.tau_c <= 1.0)) out.push_back("GateThresholds: tau_c must be in (0,1]");
    if (!(g.tau_r > 0.0 && g.tau_r <= 1.0)) out.push_back("GateThresholds: tau_r must be in (0,1]");
    if (!(g.tau_r_proxy > 0.0 && g.tau_r_proxy <= 1.0)) {
        out.push_back("GateThresholds: tau_r_proxy must be in (0,1]");
    }
    const auto& c = config.caps;
    if (!(c.psi > 0.0 && c.fpsi > 0.0 && c.entropy > 0.0 && c.confidence > 0.0)) {
        out.push_back("NormalizationCaps: all caps must be > 0");
    }
    const auto& s = config.status;
    if (!(0.0 < s.degraded_min && s.degraded_min < s.sufficient_min && s.sufficient_min <= 1.0)) {
        out.push_back("StatusThresholds: require 0 < degraded_min < sufficient_min <= 1");
    }
    if (!(config.freshness_lambda > 0.0)) out.push_back("freshness_lambda must be > 0");
    if (config.psi_bins < 2) out.push_back("psi_bins must be >= 2");
    if (!(config.psi_epsilon > 0.0)) out.push_back("psi_epsilon must be > 0");
    if (!in01(config.classification_threshold)) {
        out.push_back("classification_threshold must be in [0,1]");
    }
    if (!(config.detection_delta > 0.0)) out.push_back("detection_delta must be > 0");
    if (config.calibration_sub_windows < 2) out.push_back("calibration_sub_windows must be >= 2");
    if (!(config.calibration_multiplier > 0.0)) {
        out.push_back("calibration_multiplier must be > 0");
    }
    if (config.calibration_min_events < 1) out.push_back("calibration_min_events must be >= 1");

    bool rel = false, rep = false;
    for (const auto& [key, weight] : config.coverage.entries()) {
        if (key.second == Dimension::reliability && weight > 0.0) rel = true;
        if (key.second == Dimension::representativeness && weight > 0.0) rep = true;
    }
    if (!rel) out.push_back("CoverageMatrix: no proxy category covers reliability");
    if (!rep) out.push_back("CoverageMatrix: no proxy category covers representativeness");
    return out;
}

Config validate_config(Config config) {
    auto violations = config_violations(config);
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return config;
}

namespace {

std::optional<ProxyCategory> category_from(const std::string& s) {
    if (s == "score_distribution") return ProxyCategory::score_distribution;
    if (s == "feature_drift") return ProxyCategory::feature_drift;
    if (s == "uncertainty") return ProxyCategory::uncertainty;
    if (s == "external") return ProxyCategory::external;
    return std::nullopt;
}

std::optional<Dimension> dimension_from(const std::string& s) {
    if (s == "completeness") return Dimension::completeness;
    if (s == "freshness") return Dimension::freshness;
    if (s == "reliability") return Dimension::reliability;
    if (s == "representativeness") return Dimension::representativeness;
    return std::nullopt;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ValidationError({"config: non-numeric value for " + key + ": '" + value + "'"});
    }
}

}  // namespace

Config parse_config(const std::string& text) {
    Config config;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        size_t eq = s.find('=');
        if (eq == std::string::npos) {
            throw ValidationError({"config line " + std::to_string(line_no) +
                                     ": expected 'key = value'"});
        }
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        double v = 0.0;

        if (key == "feature_aggregate") {
            if (value == "mean") config.feature_aggregate = FeatureAggregate::mean;
            else if (value == "max") config.feature_aggregate = FeatureAggregate::max;
            else throw ValidationError({"config: feature_aggregate must be mean or max"});
            continue;
        }
        if (key.rfind("coverage.", 0) == 0) {
            std::string rest = key.substr(9);
            size_t dot = rest.find('.');
            if (dot == std::string::npos) {
                throw ValidationError({"config: malformed coverage key '" + key + "'"});
            }
            auto cat = category_from(rest.substr(0, dot));
            auto dim = dimension_from(rest.substr(dot + 1));
            if (!cat || !dim) {
                throw ValidationError({"config: unknown coverage key '" + key + "'"});
            }
            config.coverage.set(*cat, *dim, parse_double(key, value));
            continue;
        }
        v = parse_double(key, value);
        if (key == "weights.completeness") config.weights.completeness = v;
        else if (key == "weights.freshness") config.weights.freshness = v;
        else if (key == "weights.reliability") config.weights.reliability = v;
        else if (key == "weights.representativeness") config.weights.representativeness = v;
        else if (key == "gates.tau_c") config.gates.tau_c = v;
        else if (key == "gates.tau_r") config.gates.tau_r = v;
        else if (key == "gates.tau_r_proxy") config.gates.tau_r_proxy = v;
        else if (key == "caps.psi") config.caps.psi = v;
        else if (key == "caps.fpsi") config.caps.fpsi = v;
        else if (key == "caps.entropy") config.caps.entropy = v;
        else if (key == "caps.confidence") config.caps.confidence = v;
        else if (key == "status.sufficient_min") config.status.sufficient_min = v;
        else if (key == "status.degraded_min") config.status.degraded_min = v;
        else if (key == "freshness.lambda") config.freshness_lambda = v;
        else if (key == "psi.bins") config.psi_bins = static_cast<int>(v);
        else if (key == "psi.epsilon") config.psi_epsilon = v;
        else if (key == "classification.threshold") config.classification_threshold = v;
        else if (key == "detection.delta") config.detection_delta = v;
        else if (key == "calibration.sub_windows") config.calibration_sub_windows = static_cast<int>(v);
        else if (key == "calibration.multiplier") config.calibration_multiplier = v;
        else if (key == "calibration.min_events") config.calibration_min_events = static_cast<int>(v);
        else throw ValidationError({"config: unknown key '" + key + "'"});
    }
    return config;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string write_config(const Config& c) {
    std::ostringstream out;
    out.precision(17);
    out << "# evidence sufficiency monitor configuration\n";
    out << "weights.completeness = " << c.weights.completeness << "\n";
    out << "weights.freshness = " << c.weights.freshness << "\n";
    out << "weights.reliability = " << c.weights.reliability << "\n";
    out << "weights.representativeness = " << c.weights.representativeness << "\n";
    out << "gates.tau_c = " << c.gates.tau_c << "\n";
    out << "gates.tau_r = " << c.gates.tau_r << "\n";
    out << "gates.tau_r_proxy = " << c.gates.tau_r_proxy << "\n";
    out << "caps.psi = " << c.caps.psi << "\n";
    out << "caps.fpsi = " << c.caps.fpsi << "\n";
    out << "caps.entropy = " << c.caps.entropy << "\n";
    out << "caps.confidence = " << c.caps.confidence << "\n";
    out << "status.sufficient_min = " << c.status.sufficient_min << "\n";
    out << "status.degraded_min = " << c.status.degraded_min << "\n";
    out << "freshness.lambda = " << c.freshness_lambda << "\n";
    out << "psi.bins = " << c.psi_bins << "\n";
    out << "psi.epsilon = " << c.psi_epsilon << "\n";
    out << "feature_aggregate = "
        << (c.feature_aggregate == FeatureAggregate::mean ? "mean" : "max") << "\n";
    out << "classification.threshold = " << c.classification_threshold << "\n";
    out << "detection.delta = " << c.detection_delta << "\n";
    out << "calibration.sub_windows = " << c.calibration_sub_windows << "\n";
    out << "calibration.multiplier = " << c.calibration_multiplier << "\n";
    out << "calibration.min_events = " << c.calibration_min_events << "\n";
    for (const auto& [key, weight] : c.coverage.entries()) {
        out << "coverage." << to_string(key.first) << "." << to_string(key.second)
            << " = " << weight << "\n";
    }
    return out.str();
}

std::optional<std::string> event_violation(const PredictionEvent& e) {
    if (!(e.score >= 0.0 && e.score <= 1.0)) {
        return "score " + std::to_string(e.score) + " outside [0,1]";
    }
    if (e.label.has_value() != e.label_arrival_t.has_value()) {
        return "label and label_arrival_t must be present together";
    }
    if (e.label && (*e.label != 0 && *e.label != 1)) {
        return "label must be 0 or 1";
    }
    if (e.label_arrival_t && *e.label_arrival_t < e.t) {
        return "label_arrival_t precedes event time";
    }
    if (!std::isfinite(e.t)) return "non-finite timestamp";
    for (double f : e.features) {
        if (!std::isfinite(f)) return "non-finite feature value";
    }
    return std::nullopt;
}

}  // namespace suffmon
