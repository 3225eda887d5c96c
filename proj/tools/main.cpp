// Command-line surface for the evidence sufficiency monitor.
//
// Subcommands:
//   monitor     assess a stream file window by window
//   experiment  run the drift-injection scenario suite
//   simulate    blind-period sufficiency trajectories
//   calibrate   normalization caps from a reference file
//   gen         seeded synthetic stream generator
//
// Exit codes: 0 success, 1 validation error, 2 runtime error.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "suffmon/injection.hpp"
#include "suffmon/runner.hpp"
#include "suffmon/scorer.hpp"
#include "suffmon/simulator.hpp"

namespace fs = std::filesystem;
using namespace suffmon;

namespace {

Config load_or_default_config(const std::string& path) {
    Config config = path.empty() ? Config{} : load_config(path);
    return validate_config(std::move(config));
}

StreamFormat parse_format(const std::string& name) {
    auto f = format_from(name);
    if (!f) throw ValidationError({"--format must be csv or jsonl"});
    return *f;
}

int run_monitor(const std::string& input, const std::string& config_path,
                const std::string& format_name, double window_days, bool allow_unsorted,
                bool calibrate, const std::string& external_path) {
    const Config config = load_or_default_config(config_path);
    auto stream = ingest(input, parse_format(format_name), allow_unsorted);
    std::string warning;
    auto windows = window_partition(stream, window_days, &warning);
    if (!warning.empty()) std::cerr << "warning: " << warning << "\n";
    if (windows.size() < 2) {
        throw ValidationError({"need at least one monitoring window after the reference"});
    }

    // External proxy signals, one JSON object per line:
    // {"window": k, "name": ..., "health": h,
    //  "reliability_weight": w, "representativeness_weight": w}
    std::map<int, std::vector<ExternalSignal>> external;
    if (!external_path.empty()) {
        std::ifstream in(external_path);
        if (!in) throw std::runtime_error("cannot open " + external_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto obj = nlohmann::json::parse(line);
            ExternalSignal sig;
            sig.name = obj.at("name").get<std::string>();
            sig.health = obj.at("health").get<double>();
            sig.reliability_weight = obj.value("reliability_weight", 0.0);
            sig.representativeness_weight = obj.value("representativeness_weight", 0.0);
            external[obj.at("window").get<int>()].push_back(std::move(sig));
        }
    }

    const auto profile = ReferenceProfile::build(windows.front(), config, calibrate);
    CarryForwardState carry;
    std::cout << "win\tC\tF\tR_proxy\tP_proxy\tA_proxy\tS_proxy\tstatus\timpaired\n";
    std::cout << std::fixed << std::setprecision(3);
    for (size_t k = 1; k < windows.size(); ++k) {
        const auto& w = windows[k];
        std::span<const ExternalSignal> sigs;
        if (auto it = external.find(w.index); it != external.end()) sigs = it->second;
        const auto result =
            assess_window_proxy(w, profile, config, w.end_t, stream, sigs, &carry);
        const auto& a = result.assessment;
        std::cout << w.index << '\t' << a.dims.completeness << '\t' << a.dims.freshness
                  << '\t' << a.dims.reliability << '\t' << a.dims.representativeness
                  << '\t' << a.gate << '\t' << a.score << '\t' << to_string(a.status)
                  << '\t' << (a.monitoring_impaired ? "yes" : "no") << '\n';
    }
    return 0;
}

int run_experiment_cmd(const std::string& input, const std::string& config_path,
                       const std::string& format_name, double window_days, uint64_t seed,
                       const std::string& scenario_name, const std::string& out_dir,
                       bool overwrite, bool calibrate) {
    const Config config = load_or_default_config(config_path);
    auto stream = ingest(input, parse_format(format_name));

    ExperimentOptions options;
    options.window_days = window_days;
    options.seed = seed;
    options.calibrate_caps_from_reference = calibrate;
    if (scenario_name != "all") {
        auto kind = scenario_from(scenario_name);
        if (!kind) {
            throw ValidationError({"--scenario must be one of baseline, covariate, "
                                   "mixed, concept_prior, all"});
        }
        options.scenarios = {ScenarioKind::baseline, *kind};
    }

    const auto report = run_experiment(stream, config, options);
    emit_report(report, out_dir, overwrite);
    for (const auto& scenario : report.scenarios) {
        if (scenario.kind == ScenarioKind::baseline) continue;
        std::cout << to_string(scenario.kind) << " detection rate: " << std::fixed
                  << std::setprecision(3) << scenario.detection_rate << "\n";
    }
    std::cout << "report written to " << out_dir << "\n";
    return 0;
}

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 bool overwrite, int horizon, double lambda) {
    const Config config = load_or_default_config(config_path);
    fs::create_directories(out_dir);
    std::cout << "regime\tday30\tday60\tday90\tday180\tS<0.5_at\n";
    std::cout << std::fixed << std::setprecision(3);
    for (DriftRegime regime : {DriftRegime::none, DriftRegime::covariate,
                               DriftRegime::concept_prior, DriftRegime::mixed}) {
        SimulationSpec spec;
        spec.drift = regime;
        spec.horizon_days = horizon;
        spec.lambda = lambda;
        const auto trajectory = simulate(spec, config);

        const fs::path path =
            fs::path(out_dir) / ("trajectory_" + std::string(to_string(regime)) + ".tsv");
        if (!overwrite && fs::exists(path)) {
            throw std::runtime_error("refusing to overwrite " + path.string());
        }
        std::ofstream out(path);
        write_trajectory(out, trajectory);

        auto at = [&](int day) -> std::string {
            if (day > horizon) return "-";
            std::ostringstream ss;
            ss << std::fixed << std::setprecision(3)
               << trajectory.days[static_cast<size_t>(day - 1)].score;
            return ss.str();
        };
        const auto crossing = threshold_crossing(trajectory, 0.5);
        std::cout << to_string(regime) << '\t' << at(30) << '\t' << at(60) << '\t'
                  << at(90) << '\t' << at(180) << '\t'
                  << (crossing ? std::to_string(*crossing) : "-") << '\n';
    }
    return 0;
}

int run_calibrate(const std::string& input, const std::string& config_path,
                  const std::string& format_name, double window_days) {
    const Config config = load_or_default_config(config_path);
    auto stream = ingest(input, parse_format(format_name));
    auto windows = window_partition(stream, window_days);
    const auto caps = calibrate_caps(windows.front(), config.calibration_sub_windows,
                                     config.calibration_multiplier, config);
    std::cout.precision(6);
    std::cout << "caps.psi = " << caps.psi << "\n";
    std::cout << "caps.fpsi = " << caps.fpsi << "\n";
    std::cout << "caps.entropy = " << caps.entropy << "\n";
    std::cout << "caps.confidence = " << caps.confidence << "\n";
    return 0;
}

int run_gen(const std::string& out_path, const std::string& format_name, int n_events,
            int n_features, int n_informative, double prevalence, double separation,
            double span_days, double max_delay, uint64_t seed, bool overwrite,
            bool score) {
    if (!overwrite && fs::exists(out_path)) {
        throw std::runtime_error("refusing to overwrite " + out_path);
    }
    SyntheticSpec spec;
    spec.n_events = n_events;
    spec.n_features = n_features;
    spec.n_informative = n_informative;
    spec.prevalence = prevalence;
    spec.class_separation = separation;
    spec.span_days = span_days;
    spec.max_label_delay = max_delay;
    spec.seed = seed;
    auto events = generate_synthetic(spec);

    if (score) {
        auto windows = window_partition(events, span_days / 6.0);
        const auto model = train_logistic(windows.front(), TrainParams{});
        for (auto& e : events) e.score = model.predict_one(e.features);
    }
    export_stream(out_path, events, parse_format(format_name));
    std::cout << "wrote " << events.size() << " events to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evidence sufficiency monitor for delayed-label ML systems"};
    app.require_subcommand(1);

    std::string config_path, input, out_dir = "out", format_name = "csv";
    std::string scenario_name = "all", external_path, out_path;
    double window_days = 30.0, lambda = 0.02;
    double prevalence = 0.035, separation = 2.0, span_days = 180.0, max_delay = 60.0;
    uint64_t seed = 0;
    int horizon = 180, n_events = 30000, n_features = 52, n_informative = 3;
    bool overwrite = false, allow_unsorted = false, calibrate = false, score = true;

    auto add_common = [&](CLI::App* cmd, bool needs_input) {
        cmd->add_option("--config", config_path, "configuration file");
        if (needs_input) {
            cmd->add_option("--input", input, "stream file")->required();
            cmd->add_option("--format", format_name, "csv or jsonl");
            cmd->add_option("--window-days", window_days, "window length in days");
        }
    };

    auto* monitor = app.add_subcommand("monitor", "assess a stream window by window");
    add_common(monitor, true);
    monitor->add_flag("--allow-unsorted", allow_unsorted, "sort unsorted input");
    monitor->add_flag("--calibrate", calibrate, "calibrate caps from the reference window");
    monitor->add_option("--external", external_path, "external proxy signals (jsonl)");

    auto* experiment = app.add_subcommand("experiment", "drift-injection scenario suite");
    add_common(experiment, true);
    experiment->add_option("--seed", seed, "experiment seed");
    experiment->add_option("--scenario", scenario_name,
                           "baseline|covariate|mixed|concept_prior|all");
    experiment->add_option("--out", out_dir, "output directory");
    experiment->add_flag("--overwrite", overwrite, "allow overwriting report files");
    experiment->add_flag("--calibrate", calibrate, "calibrate caps from the reference window");

    auto* simulate_cmd = app.add_subcommand("simulate", "blind-period trajectories");
    add_common(simulate_cmd, false);
    simulate_cmd->add_option("--out", out_dir, "output directory");
    simulate_cmd->add_option("--horizon", horizon, "days to simulate");
    simulate_cmd->add_option("--lambda", lambda, "freshness decay per day");
    simulate_cmd->add_flag("--overwrite", overwrite, "allow overwriting trajectory files");

    auto* calibrate_cmd = app.add_subcommand("calibrate", "caps from a reference file");
    add_common(calibrate_cmd, true);

    auto* gen = app.add_subcommand("gen", "generate a synthetic stream");
    gen->add_option("--out", out_path, "output file")->required();
    gen->add_option("--format", format_name, "csv or jsonl");
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--events", n_events, "number of events");
    gen->add_option("--features", n_features, "feature dimension");
    gen->add_option("--informative", n_informative, "informative feature count");
    gen->add_option("--prevalence", prevalence, "positive-class prevalence");
    gen->add_option("--separation", separation, "class separation");
    gen->add_option("--span-days", span_days, "stream span in days");
    gen->add_option("--max-label-delay", max_delay, "max label arrival delay (days)");
    gen->add_flag("--overwrite", overwrite, "allow overwriting the output file");
    gen->add_flag("!--no-score", score, "skip training a scorer for the stream");

    CLI11_PARSE(app, argc, argv);

    try {
        if (monitor->parsed()) {
            return run_monitor(input, config_path, format_name, window_days,
                               allow_unsorted, calibrate, external_path);
        }
        if (experiment->parsed()) {
            return run_experiment_cmd(input, config_path, format_name, window_days, seed,
                                      scenario_name, out_dir, overwrite, calibrate);
        }
        if (simulate_cmd->parsed()) {
            return run_simulate(config_path, out_dir, overwrite, horizon, lambda);
        }
        if (calibrate_cmd->parsed()) {
            return run_calibrate(input, config_path, format_name, window_days);
        }
        if (gen->parsed()) {
            return run_gen(out_path, format_name, n_events, n_features, n_informative,
                           prevalence, separation, span_days, max_delay, seed, overwrite,
                           score);
        }
    } catch (const ValidationError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const IngestError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 0;
}
