// uqkit command-line tool. Flags are serialized to the option JSON the
// shared library's command drivers accept, so the CLI and programmatic
// callers exercise identical code paths.
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uqkit.h"

namespace {

using nlohmann::json;

int exit_code_for(int status) {
    if (status == UQ_OK) return 0;
    return status == UQ_ERR_INTERNAL ? 2 : 1;
}

struct SynthFlags {
    int n = 100;
    int d = 2;
    double class_sep = 1.0;
    double base_rate = 0.5;
    double gamma = 1.0;
    std::uint64_t seed = 0;
    std::string out_dir;
};

struct FeatureFlags {
    std::string input;
    std::string dose_manifest;
    bool eqd2 = false;
    int fractions = 1;
    double alpha_beta = 3.0;
    std::vector<double> vx;
    double geud_a = 1.0;
    bool no_scale = false;
    double prune_threshold = 0.8;
    std::string out;
    std::string sidecar;
};

struct RunFlags {
    std::string features;
    std::string labels;
    std::string config;
    std::string out_dir;
};

struct ReportFlags {
    std::string predictions;
    std::string out_dir;
    int ace_ranges = 10;
    std::vector<double> cutoffs;
    std::vector<double> levels;
    std::string bin_mode = "equal_frequency";
};

struct CalibrateFlags {
    std::string scores;
    std::string method;
    std::string out;
};

struct ApplyFlags {
    std::string calibrator;
    std::string scores;
    std::string out;
    std::string model_name = "external";
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"post-hoc uncertainty quantification for binary classifiers"};
    app.require_subcommand(1);
    app.set_version_flag("--version", uq_version());

    int status = UQ_OK;

    SynthFlags synth;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
    synth_cmd->add_option("--n", synth.n, "sample count")->capture_default_str();
    synth_cmd->add_option("--d", synth.d, "feature count")->capture_default_str();
    synth_cmd->add_option("--class-sep", synth.class_sep, "mean separation along the first axis")
        ->capture_default_str();
    synth_cmd->add_option("--base-rate", synth.base_rate, "positive-class prior, open (0,1)")
        ->capture_default_str();
    synth_cmd->add_option("--distort-gamma", synth.gamma,
                          "distortion applied to the posterior for scores.csv")
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "rng seed")->capture_default_str();
    synth_cmd->add_option("--out", synth.out_dir, "output directory")->required();
    synth_cmd->callback([&] {
        json o;
        o["n"] = synth.n;
        o["d"] = synth.d;
        o["class_sep"] = synth.class_sep;
        o["base_rate"] = synth.base_rate;
        o["distortion_gamma"] = synth.gamma;
        o["seed"] = synth.seed;
        o["out_dir"] = synth.out_dir;
        status = uq_cmd_synth(o.dump().c_str());
    });

    FeatureFlags feat;
    auto* feat_cmd = app.add_subcommand("features", "preprocess a feature matrix");
    auto* feat_in = feat_cmd->add_option("--in", feat.input, "feature CSV (sample_id + columns)");
    auto* feat_dose = feat_cmd->add_option("--dose-manifest", feat.dose_manifest,
                                           "CSV of sample_id,path rows pointing at dose grids");
    feat_cmd->add_flag("--eqd2", feat.eqd2, "convert dose grids to EQD2 before extraction");
    feat_cmd->add_option("--fractions", feat.fractions, "fraction count for EQD2")
        ->capture_default_str();
    feat_cmd->add_option("--alpha-beta", feat.alpha_beta, "alpha/beta in Gy")
        ->capture_default_str();
    feat_cmd->add_option("--vx", feat.vx, "V_x thresholds in Gy (one column each)");
    auto* feat_geud = feat_cmd->add_option("--geud-a", feat.geud_a, "gEUD exponent");
    feat_cmd->add_flag("--no-scale", feat.no_scale, "skip min-max scaling");
    feat_cmd->add_option("--prune-threshold", feat.prune_threshold,
                         "max allowed |spearman rho| between kept columns")
        ->capture_default_str();
    feat_cmd->add_option("--out", feat.out, "output CSV")->required();
    feat_cmd->add_option("--sidecar", feat.sidecar,
                         "provenance JSON path (default: <out>.prune.json)");
    feat_cmd->callback([&] {
        json o;
        if (feat_in->count()) o["input"] = feat.input;
        if (feat_dose->count()) o["dose_manifest"] = feat.dose_manifest;
        o["eqd2"] = feat.eqd2;
        o["fractions"] = feat.fractions;
        o["alpha_beta"] = feat.alpha_beta;
        if (!feat.vx.empty()) o["vx"] = feat.vx;
        if (feat_geud->count()) o["geud_a"] = feat.geud_a;
        o["scale"] = !feat.no_scale;
        o["prune_threshold"] = feat.prune_threshold;
        o["out"] = feat.out;
        if (!feat.sidecar.empty()) o["sidecar"] = feat.sidecar;
        status = uq_cmd_features(o.dump().c_str());
    });

    RunFlags run;
    auto* run_cmd = app.add_subcommand("run", "leave-one-out experiment");
    run_cmd->add_option("--features", run.features, "feature CSV")->required();
    run_cmd->add_option("--labels", run.labels, "label CSV")->required();
    run_cmd->add_option("--config", run.config, "run config JSON")->required();
    run_cmd->add_option("--out", run.out_dir, "output directory")->required();
    run_cmd->callback([&] {
        json o;
        o["features"] = run.features;
        o["labels"] = run.labels;
        o["config"] = run.config;
        o["out_dir"] = run.out_dir;
        status = uq_cmd_run(o.dump().c_str());
    });

    ReportFlags rep;
    auto add_report_flags = [](CLI::App* cmd, ReportFlags& flags) {
        cmd->add_option("--predictions", flags.predictions, "predictions CSV")->required();
        cmd->add_option("--out", flags.out_dir, "output directory")->required();
        cmd->add_option("--ace-ranges", flags.ace_ranges, "adaptive bin count")
            ->capture_default_str();
    };
    auto report_json = [](const ReportFlags& flags, bool metrics_only) {
        json o;
        o["predictions"] = flags.predictions;
        o["out_dir"] = flags.out_dir;
        o["ace_ranges"] = flags.ace_ranges;
        if (!flags.cutoffs.empty()) o["cutoffs"] = flags.cutoffs;
        if (!flags.levels.empty()) o["levels"] = flags.levels;
        o["bin_mode"] = flags.bin_mode;
        o["metrics_only"] = metrics_only;
        return o;
    };

    auto* metrics_cmd = app.add_subcommand("metrics", "per-group metrics.json only");
    add_report_flags(metrics_cmd, rep);
    metrics_cmd->callback(
        [&] { status = uq_cmd_report(report_json(rep, true).dump().c_str()); });

    auto* report_cmd = app.add_subcommand(
        "report", "metrics plus coverage curve, threshold table and reliability bins");
    add_report_flags(report_cmd, rep);
    report_cmd->add_option("--cutoffs", rep.cutoffs, "certainty cutoffs (default 0.5 0.8 0.9)");
    report_cmd->add_option("--levels", rep.levels, "coverage levels (default 0.1..1.0)");
    report_cmd->add_option("--bin-mode", rep.bin_mode, "equal_frequency or equal_width")
        ->capture_default_str();
    report_cmd->callback(
        [&] { status = uq_cmd_report(report_json(rep, false).dump().c_str()); });

    CalibrateFlags cal;
    auto* cal_cmd = app.add_subcommand("calibrate", "fit a calibrator on scored labels");
    cal_cmd->add_option("--scores", cal.scores, "CSV sample_id,raw_score,label")->required();
    cal_cmd->add_option("--method", cal.method, "ps, ir, va or cp")->required();
    cal_cmd->add_option("--out", cal.out, "calibrator JSON path")->required();
    cal_cmd->callback([&] {
        json o;
        o["scores"] = cal.scores;
        o["method"] = cal.method;
        o["out"] = cal.out;
        status = uq_cmd_calibrate(o.dump().c_str());
    });

    ApplyFlags apply;
    auto* apply_cmd = app.add_subcommand("apply", "apply a calibrator to raw scores");
    apply_cmd->add_option("--calibrator", apply.calibrator, "calibrator JSON")->required();
    apply_cmd->add_option("--scores", apply.scores, "CSV sample_id,raw_score[,label]")
        ->required();
    apply_cmd->add_option("--out", apply.out, "output predictions CSV")->required();
    apply_cmd->add_option("--model-name", apply.model_name, "model tag for the records")
        ->capture_default_str();
    apply_cmd->callback([&] {
        json o;
        o["calibrator"] = apply.calibrator;
        o["scores"] = apply.scores;
        o["out"] = apply.out;
        o["model_name"] = apply.model_name;
        status = uq_cmd_apply(o.dump().c_str());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (status != UQ_OK) {
        std::cerr << "error: " << uq_last_error() << '\n';
    }
    return exit_code_for(status);
}
