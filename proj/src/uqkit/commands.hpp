#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uqkit/harness.hpp"
#include "uqkit/metrics.hpp"

namespace uqkit::cmd {

// Each command is a pure function of its options: same inputs and seeds
// give byte-identical outputs. The CLI and the C interface both parse into
// these structs and call the run functions.

struct SynthOptions {
    SynthSpec spec;
    std::string out_dir;
};

// Writes features.csv, labels.csv, oracle.csv and scores.csv (posterior
// pushed through the distortion, paired with labels) into out_dir.
void synth(const SynthOptions& options);

struct FeaturesOptions {
    std::optional<std::string> input_csv;       // sample_id + named columns
    std::optional<std::string> dose_manifest;   // sample_id,path rows
    bool eqd2 = false;
    int fractions = 1;
    double alpha_beta = 3.0;
    std::vector<double> vx_thresholds;          // one v{x} column each
    std::optional<double> geud_a;               // emit a geud column when set
    bool scale = true;
    double prune_threshold = 0.8;
    std::string out_csv;
    std::string sidecar;                        // default: out_csv + ".prune.json"
};

// Assembles the feature matrix (tabular input, dosimetric extraction, or
// both), scales to [0,1], prunes correlated columns and writes the kept
// matrix plus a provenance sidecar.
void features(const FeaturesOptions& options);

struct RunOptions {
    std::string features_csv;
    std::string labels_csv;
    std::string config_path;
    std::string out_dir;
};

// Executes the leave-one-out experiment; writes predictions.csv and
// run_meta.json into out_dir.
void run(const RunOptions& options);

struct ReportOptions {
    std::string predictions_csv;
    std::string out_dir;
    int ace_ranges = 10;
    std::vector<double> cutoffs = {0.5, 0.8, 0.9};
    std::vector<double> levels;                 // empty: the default ladder
    BinMode bin_mode = BinMode::equal_frequency;
    bool metrics_only = false;                  // true for the metrics command
};

// Per (model, uq_method) group: metrics.json always; coverage_curve.csv,
// threshold_table.csv and reliability.csv unless metrics_only.
void report(const ReportOptions& options);

struct CalibrateOptions {
    std::string scores_csv;                     // needs the label column
    std::string method;                         // ps | ir | va | cp
    std::string out_path;
};

void calibrate(const CalibrateOptions& options);

struct ApplyOptions {
    std::string calibrator_path;
    std::string scores_csv;                     // label column optional
    std::string out_csv;
    std::string model_name = "external";
};

void apply(const ApplyOptions& options);

// Run-config JSON -> RunConfig. Unknown or ill-typed keys raise
// input_error naming every offending key. Grids may be given as an array
// of parameter objects or as an object of value lists (expanded as a
// cartesian product, first key slowest).
RunConfig parse_run_config(const nlohmann::ordered_json& j);
RunConfig load_run_config(const std::string& path);

// Options-struct parsers for the JSON-driven C interface.
SynthOptions synth_options_from_json(const nlohmann::json& j);
FeaturesOptions features_options_from_json(const nlohmann::json& j);
RunOptions run_options_from_json(const nlohmann::json& j);
ReportOptions report_options_from_json(const nlohmann::json& j);
CalibrateOptions calibrate_options_from_json(const nlohmann::json& j);
ApplyOptions apply_options_from_json(const nlohmann::json& j);

} // namespace uqkit::cmd
