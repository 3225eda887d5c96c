#include "suffmon/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace suffmon {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<StreamFormat> format_from(const std::string& name) {
    if (name == "csv") return StreamFormat::csv;
    if (name == "jsonl") return StreamFormat::jsonl;
    return std::nullopt;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_field_double(const std::string& value, int line_no, const char* what) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw IngestError("line " + std::to_string(line_no) + ": non-numeric " +
                          std::string(what) + " '" + value + "'");
    }
}

std::vector<PredictionEvent> ingest_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IngestError("empty file");
    const auto header = split_csv_line(line);
    if (header.size() < 5 || header[0] != "event_id" || header[1] != "t" ||
        header[2] != "score" || header[3] != "label" || header[4] != "label_arrival_t") {
        throw IngestError(
            "missing required columns; expected header "
            "event_id,t,score,label,label_arrival_t,f_0,...");
    }
    const size_t n_features = header.size() - 5;
    for (size_t f = 0; f < n_features; ++f) {
        if (header[5 + f] != "f_" + std::to_string(f)) {
            throw IngestError("feature columns must be named f_0..f_" +
                              std::to_string(n_features - 1));
        }
    }

    std::vector<PredictionEvent> events;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw IngestError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(header.size()) + " fields, got " +
                              std::to_string(fields.size()));
        }
        PredictionEvent e;
        e.event_id = fields[0];
        e.t = parse_field_double(fields[1], line_no, "t");
        e.score = parse_field_double(fields[2], line_no, "score");
        const bool has_label = !fields[3].empty();
        const bool has_arrival = !fields[4].empty();
        if (has_label) {
            e.label = static_cast<int>(parse_field_double(fields[3], line_no, "label"));
        }
        if (has_arrival) {
            e.label_arrival_t = parse_field_double(fields[4], line_no, "label_arrival_t");
        }
        e.features.reserve(n_features);
        for (size_t f = 0; f < n_features; ++f) {
            e.features.push_back(parse_field_double(fields[5 + f], line_no, "feature"));
        }
        if (auto violation = event_violation(e)) {
            throw IngestError("line " + std::to_string(line_no) + ": " + *violation);
        }
        events.push_back(std::move(e));
    }
    return events;
}

std::vector<PredictionEvent> ingest_jsonl(std::istream& in) {
    std::vector<PredictionEvent> events;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& err) {
            throw IngestError("line " + std::to_string(line_no) + ": " + err.what());
        }
        try {
            PredictionEvent e;
            e.event_id = obj.at("event_id").get<std::string>();
            e.t = obj.at("t").get<double>();
            e.score = obj.at("score").get<double>();
            if (obj.contains("label") && !obj["label"].is_null()) {
                e.label = obj["label"].get<int>();
            }
            if (obj.contains("label_arrival_t") && !obj["label_arrival_t"].is_null()) {
                e.label_arrival_t = obj["label_arrival_t"].get<double>();
            }
            e.features = obj.at("features").get<std::vector<double>>();
            if (auto violation = event_violation(e)) {
                throw IngestError("line " + std::to_string(line_no) + ": " + *violation);
            }
            events.push_back(std::move(e));
        } catch (const json::exception& err) {
            throw IngestError("line " + std::to_string(line_no) + ": " + err.what());
        }
    }
    return events;
}

}  // namespace

std::vector<PredictionEvent> ingest(const std::string& path, StreamFormat format,
                                    bool allow_unsorted) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open file: " + path);
    auto events = format == StreamFormat::csv ? ingest_csv(in) : ingest_jsonl(in);

    size_t dim = events.empty() ? 0 : events.front().features.size();
    bool sorted = true;
    for (size_t i = 0; i < events.size(); ++i) {
        if (events[i].features.size() != dim) {
            throw IngestError("inconsistent feature dimensionality at event " +
                              events[i].event_id);
        }
        if (i > 0 && events[i].t < events[i - 1].t) sorted = false;
    }
    if (!sorted) {
        if (!allow_unsorted) {
            throw IngestError("input not sorted by t (pass --allow-unsorted to sort)");
        }
        std::stable_sort(events.begin(), events.end(),
                         [](const auto& a, const auto& b) { return a.t < b.t; });
    }
    return events;
}

void export_stream(const std::string& path, std::span<const PredictionEvent> events,
                   StreamFormat format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out.precision(17);
    if (format == StreamFormat::csv) {
        const size_t dim = events.empty() ? 0 : events.front().features.size();
        out << "event_id,t,score,label,label_arrival_t";
        for (size_t f = 0; f < dim; ++f) out << ",f_" << f;
        out << "\n";
        for (const auto& e : events) {
            out << e.event_id << ',' << e.t << ',' << e.score << ',';
            if (e.label) out << *e.label;
            out << ',';
            if (e.label_arrival_t) out << *e.label_arrival_t;
            for (double f : e.features) out << ',' << f;
            out << "\n";
        }
    } else {
        for (const auto& e : events) {
            json obj;
            obj["event_id"] = e.event_id;
            obj["t"] = e.t;
            obj["score"] = e.score;
            if (e.label) obj["label"] = *e.label;
            if (e.label_arrival_t) obj["label_arrival_t"] = *e.label_arrival_t;
            obj["features"] = e.features;
            out << obj.dump() << "\n";
        }
    }
}

std::vector<MonitoringWindow> window_partition(std::span<const PredictionEvent> stream,
                                               double window_days, std::string* warning) {
    if (stream.empty()) throw std::invalid_argument("window_partition: empty stream");
    if (!(window_days > 0.0)) {
        throw std::invalid_argument("window_partition: window_days must be > 0");
    }
    double max_t = stream.front().t;
    for (const auto& e : stream) max_t = std::max(max_t, e.t);
    const int n_windows = static_cast<int>(std::floor(max_t / window_days)) + 1;
    // The trailing window counts as complete when the stream reaches within
    // 1% of its end; otherwise it is a partial tail and is dropped.
    int n_complete = n_windows;
    if (max_t < n_windows * window_days - 0.01 * window_days) n_complete = n_windows - 1;
    if (n_complete < 1) {
        throw std::invalid_argument("window_partition: no complete window in span");
    }
    if (warning && n_complete < n_windows) {
        std::ostringstream ss;
        ss << "dropped trailing partial window covering "
           << (max_t - n_complete * window_days) << " day(s)";
        *warning = ss.str();
    }

    std::vector<MonitoringWindow> windows(static_cast<size_t>(n_complete));
    for (int k = 0; k < n_complete; ++k) {
        windows[static_cast<size_t>(k)].index = k;
        windows[static_cast<size_t>(k)].start_t = k * window_days;
        windows[static_cast<size_t>(k)].end_t = (k + 1) * window_days;
    }
    for (const auto& e : stream) {
        const int k = static_cast<int>(std::floor(e.t / window_days));
        if (k >= 0 && k < n_complete) {
            windows[static_cast<size_t>(k)].events.push_back(e);
        }
    }
    return windows;
}

namespace {

uint64_t derive_seed(uint64_t base, uint64_t scenario, uint64_t window) {
    // splitmix64 over a simple combination; stable across platforms.
    uint64_t z = base + 0x9e3779b97f4a7c15ULL * (scenario * 1000003ULL + window + 1ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

MonitoringWindow inject_for_scenario(const MonitoringWindow& base_window,
                                     const ScenarioSpec& spec, int monitor_index,
                                     const ReferenceProfile& profile,
                                     const LogisticModel* model) {
    const auto idx = static_cast<size_t>(monitor_index);
    const uint64_t seed =
        derive_seed(spec.seed, static_cast<uint64_t>(spec.kind), idx);
    switch (spec.kind) {
        case ScenarioKind::baseline:
            return base_window;
        case ScenarioKind::covariate: {
            auto w = inject_covariate(base_window, spec.noise_features,
                                      spec.sigma_schedule[idx], profile.feature_sigmas,
                                      seed);
            if (model) model->score_window(w);
            return w;
        }
        case ScenarioKind::mixed: {
            auto w = inject_covariate(base_window, spec.noise_features,
                                      spec.sigma_schedule[idx], profile.feature_sigmas,
                                      seed);
            if (model) model->score_window(w);
            w = inject_label_flips(w, spec.flip_schedule[idx], FlipDirection::symmetric,
                                   seed ^ 0x5bf03635ULL);
            return w;
        }
        case ScenarioKind::concept_prior: {
            const double current = positive_fraction(base_window);
            const double target = std::min(spec.target_prevalence[idx], current);
            const double rate = current > 0.0 ? calibrate_flip_rate(current, target) : 0.0;
            // Features and scores untouched: proxies must stay bit-identical.
            return inject_label_flips(base_window, rate,
                                      FlipDirection::positive_to_negative, seed);
        }
    }
    return base_window;
}

}  // namespace

ExperimentReport run_experiment(std::span<const PredictionEvent> stream,
                                const Config& config, const ExperimentOptions& options) {
    auto windows = window_partition(stream, options.window_days);
    if (windows.size() < 2) {
        throw std::invalid_argument(
            "run_experiment: need at least one monitoring window after the reference");
    }
    const int n_monitoring = static_cast<int>(windows.size()) - 1;

    std::optional<LogisticModel> model;
    if (options.rescore_with_trained_model) {
        model = train_logistic(windows.front(), options.train);
        for (auto& w : windows) model->score_window(w);
    }

    const auto profile = ReferenceProfile::build(windows.front(), config,
                                                 options.calibrate_caps_from_reference);

    // Baseline is the detection comparator and always runs.
    std::vector<ScenarioKind> kinds = options.scenarios;
    if (std::find(kinds.begin(), kinds.end(), ScenarioKind::baseline) == kinds.end()) {
        kinds.insert(kinds.begin(), ScenarioKind::baseline);
    }
    std::stable_partition(kinds.begin(), kinds.end(),
                          [](ScenarioKind k) { return k == ScenarioKind::baseline; });

    ExperimentReport report;
    report.seed = options.seed;
    report.window_days = options.window_days;
    report.n_windows = n_monitoring;

    const std::vector<PredictionEvent>* history_source = nullptr;
    std::vector<PredictionEvent> scored_stream;
    for (const auto& w : windows) {
        scored_stream.insert(scored_stream.end(), w.events.begin(), w.events.end());
    }
    history_source = &scored_stream;

    std::vector<double> baseline_proxy_scores;
    for (ScenarioKind kind : kinds) {
        ScenarioSpec spec = ScenarioSpec::defaults(kind, n_monitoring, options.seed);
        if (auto violations = spec.violations(n_monitoring); !violations.empty()) {
            throw ValidationError(std::move(violations));
        }

        ScenarioResult result;
        result.kind = kind;
        CarryForwardState carry;
        int detected = 0;
        for (int m = 0; m < n_monitoring; ++m) {
            const auto& base_window = windows[static_cast<size_t>(m + 1)];
            auto injected = inject_for_scenario(base_window, spec, m, profile,
                                                model ? &*model : nullptr);
            const double as_of = injected.end_t;

            WindowResult wr;
            wr.window_index = injected.index;
            wr.positive_rate = positive_fraction(injected);
            wr.proxy = assess_window_proxy(injected, profile, config, as_of,
                                           *history_source, {}, &carry);
            bool all_labeled = true;
            for (const auto& e : injected.events) {
                if (!e.label) { all_labeled = false; break; }
            }
            if (all_labeled) {
                wr.actual = assess_window_actual(injected, profile, config, as_of,
                                                 *history_source);
            }
            if (kind == ScenarioKind::baseline) {
                baseline_proxy_scores.push_back(wr.proxy.assessment.score);
            } else {
                const double baseline_s = baseline_proxy_scores[static_cast<size_t>(m)];
                wr.baseline_gap = baseline_s - wr.proxy.assessment.score;
                wr.detected = detect_divergence(wr.proxy.assessment.score, baseline_s,
                                                config.detection_delta);
                if (wr.detected) ++detected;
            }
            result.windows.push_back(std::move(wr));
        }
        result.detection_rate = kind == ScenarioKind::baseline
                                    ? 0.0
                                    : static_cast<double>(detected) / n_monitoring;
        report.scenarios.push_back(std::move(result));
    }
    return report;
}

void write_scenario_table(std::ostream& out, const ScenarioResult& scenario) {
    out << "scenario\twin\tfraud_rate\tP_scr\tP_fea\tP_unc\tR_proxy\tP_proxy\tA_proxy"
           "\tS_proxy\tS_actual\tstatus\tdetected\n";
    out << std::fixed << std::setprecision(3);
    for (const auto& w : scenario.windows) {
        const auto& a = w.proxy.assessment;
        out << to_string(scenario.kind) << '\t' << w.window_index << '\t'
            << w.positive_rate << '\t' << w.proxy.score_reading.health << '\t'
            << w.proxy.feature_reading.health << '\t'
            << w.proxy.uncertainty_reading.health << '\t' << a.dims.reliability << '\t'
            << a.dims.representativeness << '\t' << a.gate << '\t' << a.score << '\t';
        if (w.actual) out << w.actual->score;
        else out << "n/a";
        out << '\t' << to_string(a.status) << '\t' << (w.detected ? "yes" : "no") << '\n';
    }
}

std::string machine_rows_json(const ExperimentReport& report) {
    std::ostringstream out;
    for (const auto& scenario : report.scenarios) {
        for (const auto& w : scenario.windows) {
            const auto& a = w.proxy.assessment;
            json row;
            row["scenario"] = to_string(scenario.kind);
            row["window"] = w.window_index;
            row["seed"] = report.seed;
            row["positive_rate"] = w.positive_rate;
            row["p_scr"] = w.proxy.score_reading.health;
            row["p_fea"] = w.proxy.feature_reading.health;
            row["p_unc"] = w.proxy.uncertainty_reading.health;
            row["completeness"] = a.dims.completeness;
            row["freshness"] = a.dims.freshness;
            row["r_proxy"] = a.dims.reliability;
            row["rep_proxy"] = a.dims.representativeness;
            row["a_proxy"] = a.gate;
            row["s_proxy"] = a.score;
            row["status_proxy"] = to_string(a.status);
            row["monitoring_impaired"] = a.monitoring_impaired;
            if (w.actual) {
                row["s_actual"] = w.actual->score;
                row["r_actual"] = w.actual->dims.reliability;
                row["rep_actual"] = w.actual->dims.representativeness;
                row["a_actual"] = w.actual->gate;
                row["status_actual"] = to_string(w.actual->status);
                row["proxy_actual_gap"] = a.score - w.actual->score;
            }
            row["detected"] = w.detected;
            row["baseline_gap"] = w.baseline_gap;
            out << row.dump() << "\n";
        }
    }
    return out.str();
}

void emit_report(const ExperimentReport& report, const std::string& out_dir,
                 bool overwrite) {
    if (report.scenarios.empty()) {
        throw std::runtime_error("emit_report: empty report, nothing to emit");
    }
    fs::create_directories(out_dir);
    std::vector<fs::path> targets;
    for (const auto& scenario : report.scenarios) {
        targets.push_back(fs::path(out_dir) /
                          ("scenario_" + std::string(to_string(scenario.kind)) + ".tsv"));
    }
    targets.push_back(fs::path(out_dir) / "summary.txt");
    targets.push_back(fs::path(out_dir) / "rows.jsonl");
    if (!overwrite) {
        for (const auto& p : targets) {
            if (fs::exists(p)) {
                throw std::runtime_error("emit_report: refusing to overwrite " +
                                         p.string() + " (pass --overwrite)");
            }
        }
    }

    for (size_t i = 0; i < report.scenarios.size(); ++i) {
        std::ofstream out(targets[i]);
        if (!out) throw std::runtime_error("cannot write " + targets[i].string());
        write_scenario_table(out, report.scenarios[i]);
    }

    {
        std::ofstream out(targets[report.scenarios.size()]);
        if (!out) throw std::runtime_error("cannot write summary.txt");
        out << std::fixed << std::setprecision(3);
        out << "windows\t" << report.n_windows << "\n";
        out << "window_days\t" << report.window_days << "\n";
        out << "seed\t" << report.seed << "\n\n";
        out << "scenario\tdetection_rate\tfirst_proxy_crossing\tfirst_actual_crossing\n";
        for (const auto& scenario : report.scenarios) {
            std::optional<int> proxy_cross, actual_cross;
            for (const auto& w : scenario.windows) {
                if (!proxy_cross && w.proxy.assessment.status == Status::insufficient) {
                    proxy_cross = w.window_index;
                }
                if (!actual_cross && w.actual && w.actual->status == Status::insufficient) {
                    actual_cross = w.window_index;
                }
            }
            out << to_string(scenario.kind) << '\t' << scenario.detection_rate << '\t';
            if (proxy_cross) out << *proxy_cross; else out << "-";
            out << '\t';
            if (actual_cross) out << *actual_cross; else out << "-";
            out << '\n';
        }
        out << "\nscenario\twin\tproxy_actual_gap\n";
        for (const auto& scenario : report.scenarios) {
            for (const auto& w : scenario.windows) {
                if (!w.actual) continue;
                out << to_string(scenario.kind) << '\t' << w.window_index << '\t'
                    << (w.proxy.assessment.score - w.actual->score) << '\n';
            }
        }
    }
    {
        std::ofstream out(targets.back());
        if (!out) throw std::runtime_error("cannot write rows.jsonl");
        out << machine_rows_json(report);
    }
}

}  // namespace suffmon
