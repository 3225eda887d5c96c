#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "suffmon/injection.hpp"
#include "suffmon/scorer.hpp"
#include "suffmon/sufficiency.hpp"

namespace suffmon {

enum class StreamFormat { csv, jsonl };

std::optional<StreamFormat> format_from(const std::string& name);

class IngestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parses and validates a stream file. Malformed rows are reported with
// their line number. Unsorted input is rejected unless allow_unsorted, in
// which case events are sorted by t.
std::vector<PredictionEvent> ingest(const std::string& path, StreamFormat format,
                                    bool allow_unsorted = false);

void export_stream(const std::string& path, std::span<const PredictionEvent> events,
                   StreamFormat format);

// Consecutive non-overlapping [k*w, (k+1)*w) windows from the stream
// origin. A trailing partial window is dropped (warning appended when a
// sink is supplied). Window 0 is the reference.
std::vector<MonitoringWindow> window_partition(std::span<const PredictionEvent> stream,
                                               double window_days,
                                               std::string* warning = nullptr);

struct WindowResult {
    int window_index = 0;
    double positive_rate = 0.0;  // labeled prevalence after any injection
    ProxyAssessment proxy;
    std::optional<SufficiencyAssessment> actual;
    bool detected = false;       // vs the paired baseline window
    double baseline_gap = 0.0;   // S_proxy(baseline) - S_proxy(this)
};

struct ScenarioResult {
    ScenarioKind kind = ScenarioKind::baseline;
    std::vector<WindowResult> windows;
    double detection_rate = 0.0;
};

struct ExperimentReport {
    std::vector<ScenarioResult> scenarios;
    uint64_t seed = 0;
    double window_days = 30.0;
    int n_windows = 0;  // monitoring windows (reference excluded)
};

struct ExperimentOptions {
    std::vector<ScenarioKind> scenarios = {ScenarioKind::baseline, ScenarioKind::covariate,
                                           ScenarioKind::mixed,
                                           ScenarioKind::concept_prior};
    double window_days = 30.0;
    uint64_t seed = 0;
    bool calibrate_caps_from_reference = false;
    bool rescore_with_trained_model = true;  // train on the reference window
    TrainParams train;
};

// The full injection experiment end to end: partition, train on window 0,
// build the reference profile, inject per scenario, assess every monitoring
// window in proxy and actual mode, and compare against the baseline
// scenario run under the same seed. Baseline always runs first.
ExperimentReport run_experiment(std::span<const PredictionEvent> stream,
                                const Config& config, const ExperimentOptions& options);

// One tab-separated table per scenario plus a summary file. Text output is
// rounded to 3 decimals; machine-readable rows (JSONL) keep full precision.
void emit_report(const ExperimentReport& report, const std::string& out_dir,
                 bool overwrite = false);

void write_scenario_table(std::ostream& out, const ScenarioResult& scenario);
std::string machine_rows_json(const ExperimentReport& report);

}  // namespace suffmon
