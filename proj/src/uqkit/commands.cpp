#include "uqkit/commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <map>
#include <set>

#include "uqkit/calibrator_model.hpp"
#include "uqkit/dose.hpp"
#include "uqkit/errors.hpp"
#include "uqkit/features.hpp"
#include "uqkit/io.hpp"

namespace fs = std::filesystem;

namespace uqkit::cmd {

namespace {

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error("cannot create directory '" + dir + "': " + ec.message());
}

std::string join_keys(const std::vector<std::string>& keys) {
    std::string out;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (i > 0) out += ", ";
        out += "'" + keys[i] + "'";
    }
    return out;
}

} // namespace

void synth(const SynthOptions& options) {
    if (options.out_dir.empty()) throw input_error("synth needs an output directory");
    const Dataset ds = synth_generate(options.spec);
    ensure_dir(options.out_dir);
    io::write_features_csv(join_path(options.out_dir, "features.csv"), ds);
    io::write_labels_csv(join_path(options.out_dir, "labels.csv"), ds);
    io::write_oracle_csv(join_path(options.out_dir, "oracle.csv"), ds);

    // Raw-score file: the oracle posterior pushed through the distortion,
    // so downstream calibrate/apply runs have a miscalibrated-but-ranked
    // input when gamma != 1.
    const std::vector<double> scores =
        distort_scores(*ds.oracle_posterior, options.spec.distortion_gamma);
    std::vector<io::ScoreRow> rows(ds.n());
    for (std::size_t i = 0; i < ds.n(); ++i) {
        rows[i] = {ds.sample_ids[i], scores[i], ds.labels[i]};
    }
    io::write_scores_csv(join_path(options.out_dir, "scores.csv"), rows);
}

namespace {

struct DoseFeatures {
    std::vector<std::string> names;
    std::vector<double> values;   // row-major
    std::vector<std::string> sample_ids;
};

DoseFeatures extract_dose_features(const FeaturesOptions& options) {
    const io::CsvTable manifest = io::read_csv(*options.dose_manifest);
    if (manifest.header != std::vector<std::string>{"sample_id", "path"}) {
        throw parse_error("'" + *options.dose_manifest +
                          "': expected header 'sample_id,path'");
    }
    DoseFeatures out;
    out.names.push_back("mld");
    for (double x : options.vx_thresholds) {
        if (!(x >= 0.0)) throw input_error("v_x thresholds must be >= 0");
        out.names.push_back("v" + io::format_double(x));
    }
    if (options.geud_a) out.names.push_back("geud");

    const fs::path base = fs::path(*options.dose_manifest).parent_path();
    for (const auto& row : manifest.rows) {
        out.sample_ids.push_back(row[0]);
        fs::path grid_path(row[1]);
        if (grid_path.is_relative()) grid_path = base / grid_path;

        DoseGrid grid = io::read_dose_grid(grid_path.string());
        grid.n_fractions = options.fractions;
        grid.alpha_beta = options.alpha_beta;
        if (options.eqd2) grid.voxels = eqd2_transform(grid);

        out.values.push_back(mean_dose(grid.voxels, grid.mask));
        for (double x : options.vx_thresholds) {
            out.values.push_back(v_x(grid.voxels, grid.mask, x));
        }
        if (options.geud_a) {
            out.values.push_back(geud(grid.voxels, grid.mask, *options.geud_a));
        }
    }
    return out;
}

} // namespace

void features(const FeaturesOptions& options) {
    if (!options.input_csv && !options.dose_manifest) {
        throw input_error("features needs a feature CSV, a dose manifest, or both");
    }
    if (!(options.prune_threshold >= 0.0 && options.prune_threshold <= 1.0)) {
        throw input_error("prune threshold must lie in [0,1]");
    }
    if (options.out_csv.empty()) throw input_error("features needs an output path");

    std::vector<std::string> ids;
    FeatureMatrix m;
    if (options.input_csv) {
        m = io::read_feature_matrix(*options.input_csv, ids);
    }
    if (options.dose_manifest) {
        const DoseFeatures dose = extract_dose_features(options);
        if (options.input_csv) {
            if (dose.sample_ids != ids) {
                throw input_error("dose manifest sample_ids do not match the feature CSV");
            }
            const std::size_t old_cols = m.n_cols();
            const std::size_t new_cols = old_cols + dose.names.size();
            std::vector<double> merged;
            merged.reserve(m.n_rows * new_cols);
            for (std::size_t r = 0; r < m.n_rows; ++r) {
                for (std::size_t c = 0; c < old_cols; ++c) merged.push_back(m.at(r, c));
                for (std::size_t c = 0; c < dose.names.size(); ++c) {
                    merged.push_back(dose.values[r * dose.names.size() + c]);
                }
            }
            m.names.insert(m.names.end(), dose.names.begin(), dose.names.end());
            m.values = std::move(merged);
        } else {
            ids = dose.sample_ids;
            m.names = dose.names;
            m.values = dose.values;
            m.n_rows = ids.size();
        }
    }
    if (m.n_rows == 0) throw input_error("feature matrix has no rows");

    if (options.scale) minmax_fit_transform(m);
    const PruneResult prune = correlation_prune(m, options.prune_threshold);

    FeatureMatrix kept;
    kept.n_rows = m.n_rows;
    for (std::size_t idx : prune.kept) kept.names.push_back(m.names[idx]);
    kept.values.reserve(kept.n_rows * kept.names.size());
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        for (std::size_t idx : prune.kept) kept.values.push_back(m.at(r, idx));
    }
    io::write_feature_matrix(options.out_csv, ids, kept);

    nlohmann::ordered_json sidecar;
    sidecar["prune_threshold"] = options.prune_threshold;
    sidecar["n_input_columns"] = m.n_cols();
    sidecar["scaled"] = options.scale;
    sidecar["kept"] = kept.names;
    sidecar["dropped"] = nlohmann::ordered_json::array();
    for (const PruneDrop& drop : prune.dropped) {
        sidecar["dropped"].push_back({{"column", drop.column},
                                      {"name", drop.name},
                                      {"max_abs_rho", drop.max_abs_rho},
                                      {"partner", drop.partner}});
    }
    if (m.scale_params) {
        nlohmann::ordered_json scales;
        for (std::size_t idx : prune.kept) {
            scales[m.names[idx]] = {{"min", m.scale_params->min[idx]},
                                    {"max", m.scale_params->max[idx]}};
        }
        sidecar["scale_params"] = std::move(scales);
    }
    const std::string sidecar_path =
        options.sidecar.empty() ? options.out_csv + ".prune.json" : options.sidecar;
    io::write_text_file(sidecar_path, sidecar.dump(2) + "\n");
}

void run(const RunOptions& options) {
    const nlohmann::ordered_json raw_config = [&] {
        const std::string text = io::read_text_file(options.config_path);
        try {
            return nlohmann::ordered_json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw parse_error("'" + options.config_path + "': " + e.what());
        }
    }();
    const RunConfig config = parse_run_config(raw_config);
    const Dataset ds = io::read_dataset(options.features_csv, options.labels_csv);

    const auto t0 = std::chrono::steady_clock::now();
    const RunResult result = loocv_run(ds, config);
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - t0);

    ensure_dir(options.out_dir);
    io::write_predictions_csv(join_path(options.out_dir, "predictions.csv"), result.records);

    nlohmann::ordered_json meta;
    meta["seed"] = config.seed;
    meta["n_samples"] = ds.n();
    meta["n_features"] = ds.d();
    meta["n_records"] = result.records.size();
    meta["skipped_single_class_folds"] = result.skipped_folds;
    meta["calibration"] = config.resubstitution ? "resubstitution" : "out_of_fold";
    meta["calibration_folds"] = config.calibration_folds;
    meta["elapsed_ms"] = elapsed.count();
    meta["config"] = raw_config;
    io::write_text_file(join_path(options.out_dir, "run_meta.json"), meta.dump(2) + "\n");
}

namespace {

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

} // namespace

void report(const ReportOptions& options) {
    if (options.ace_ranges < 1) throw input_error("ace_ranges must be >= 1");
    for (double c : options.cutoffs) {
        if (!(c >= 0.0 && c <= 1.0)) throw input_error("cutoffs must lie in [0,1]");
    }
    const std::vector<double> levels =
        options.levels.empty() ? default_coverage_levels() : options.levels;

    const std::vector<PredictionRecord> records =
        io::read_predictions_csv(options.predictions_csv);
    if (records.empty()) throw input_error("predictions file has no records");
    for (const auto& r : records) {
        if (!r.true_label) {
            throw input_error("record '" + r.sample_id +
                              "' has no true_label; reports need ground truth");
        }
    }

    // Group key keeps the method's enum order so files mirror record order.
    std::map<std::pair<std::string, UqMethod>, std::vector<PredictionRecord>> groups;
    for (const auto& r : records) {
        groups[{r.model_name, r.uq_method}].push_back(r);
    }

    ensure_dir(options.out_dir);
    nlohmann::ordered_json meta;
    meta["n_records"] = records.size();
    meta["ace_ranges"] = options.ace_ranges;
    meta["groups"] = nlohmann::ordered_json::array();

    io::CsvTable curve_csv;
    curve_csv.header = {"model", "uq_method", "level", "n", "auroc", "auprc"};
    io::CsvTable table_csv;
    table_csv.header = {"model", "uq_method", "cutoff", "coverage", "auroc", "auprc"};
    io::CsvTable reliability_csv;
    reliability_csv.header = {"model", "uq_method", "lo", "hi",
                              "mean_conf", "frac_positive", "count"};

    for (const auto& [key, group] : groups) {
        const auto& [model, method] = key;
        const std::string method_name = uq_method_name(method);
        const bool probabilistic = uq_method_outputs_probability(method);

        const MetricsReport mr = full_metrics(group, options.ace_ranges);
        nlohmann::ordered_json g;
        g["model"] = model;
        g["uq_method"] = method_name;
        g["n"] = mr.n_evaluated;
        g["auroc"] = optional_json(mr.auroc);
        g["auprc"] = optional_json(mr.auprc);
        g["ace"] = optional_json(mr.ace);
        if (!probabilistic) {
            g["note"] = "ace and reliability omitted: cp outputs p-values, not probabilities";
        }
        meta["groups"].push_back(std::move(g));

        if (options.metrics_only) continue;

        for (const CoveragePoint& pt : coverage_curve(group, levels)) {
            curve_csv.rows.push_back({model, method_name,
                                      io::format_double(pt.level),
                                      std::to_string(pt.metrics.n_evaluated),
                                      io::format_optional(pt.metrics.auroc),
                                      io::format_optional(pt.metrics.auprc)});
        }
        for (const ThresholdRow& row : threshold_table(group, options.cutoffs)) {
            table_csv.rows.push_back({model, method_name,
                                      io::format_double(row.cutoff),
                                      io::format_double(row.coverage),
                                      io::format_optional(row.auroc),
                                      io::format_optional(row.auprc)});
        }
        if (probabilistic) {
            std::vector<double> probs;
            std::vector<int> labels;
            probs.reserve(group.size());
            labels.reserve(group.size());
            for (const auto& r : group) {
                probs.push_back(*r.prob);
                labels.push_back(*r.true_label);
            }
            for (const ReliabilityBin& bin :
                 reliability_bins(probs, labels, options.ace_ranges, options.bin_mode)) {
                reliability_csv.rows.push_back({model, method_name,
                                                io::format_double(bin.lo),
                                                io::format_double(bin.hi),
                                                io::format_double(bin.mean_conf),
                                                io::format_double(bin.frac_positive),
                                                std::to_string(bin.count)});
            }
        }
    }

    io::write_text_file(join_path(options.out_dir, "metrics.json"), meta.dump(2) + "\n");
    if (!options.metrics_only) {
        io::write_csv(join_path(options.out_dir, "coverage_curve.csv"), curve_csv);
        io::write_csv(join_path(options.out_dir, "threshold_table.csv"), table_csv);
        io::write_csv(join_path(options.out_dir, "reliability.csv"), reliability_csv);
    }
}

void calibrate(const CalibrateOptions& options) {
    const UqMethod method = uq_method_from_name(options.method);
    if (method == UqMethod::uc) {
        throw input_error("calibrate fits ps, ir, va or cp; uc has nothing to fit");
    }
    const std::vector<io::ScoreRow> rows = io::read_scores_csv(options.scores_csv);
    if (rows.empty()) throw input_error("score file has no rows");
    std::vector<ScoreLabelPair> pairs;
    pairs.reserve(rows.size());
    for (const io::ScoreRow& row : rows) {
        if (!row.label) {
            throw input_error("'" + options.scores_csv +
                              "' needs a label column to fit a calibrator");
        }
        pairs.push_back({row.raw_score, *row.label});
    }
    const CalibratorModel calibrator = fit_calibrator(method, pairs);
    io::save_calibrator(options.out_path, calibrator);
}

void apply(const ApplyOptions& options) {
    const CalibratorModel calibrator = io::load_calibrator(options.calibrator_path);
    const std::vector<io::ScoreRow> rows = io::read_scores_csv(options.scores_csv);
    if (rows.empty()) throw input_error("score file has no rows");
    std::vector<PredictionRecord> records;
    records.reserve(rows.size());
    for (const io::ScoreRow& row : rows) {
        records.push_back(apply_calibrator(calibrator, row.raw_score, row.sample_id,
                                           options.model_name, 0, row.label));
    }
    std::sort(records.begin(), records.end(),
              [](const PredictionRecord& a, const PredictionRecord& b) {
                  return a.sample_id < b.sample_id;
              });
    io::write_predictions_csv(options.out_csv, records);
}

namespace {

// Collects schema complaints so a bad config reports every offending key
// at once.
struct ConfigErrors {
    std::vector<std::string> messages;

    void add(const std::string& msg) { messages.push_back(msg); }
    void raise_if_any() const {
        if (messages.empty()) return;
        std::string out = "run config: ";
        for (std::size_t i = 0; i < messages.size(); ++i) {
            if (i > 0) out += "; ";
            out += messages[i];
        }
        throw input_error(out);
    }
};

void check_unknown_keys(const nlohmann::ordered_json& obj,
                        const std::set<std::string>& known,
                        const std::string& where, ConfigErrors& errors) {
    std::vector<std::string> unknown;
    for (const auto& item : obj.items()) {
        if (!known.count(item.key())) unknown.push_back(item.key());
    }
    if (!unknown.empty()) {
        errors.add("unknown " + where + " key" + (unknown.size() > 1 ? "s " : " ") +
                   join_keys(unknown));
    }
}

std::vector<nlohmann::json> expand_grid(const nlohmann::ordered_json& grid,
                                        const std::string& where, ConfigErrors& errors) {
    std::vector<nlohmann::json> candidates;
    if (grid.is_array()) {
        for (const auto& entry : grid) {
            if (!entry.is_object()) {
                errors.add(where + " grid entries must be objects");
                return {};
            }
            candidates.push_back(nlohmann::json(entry));
        }
        return candidates;
    }
    if (!grid.is_object()) {
        errors.add(where + " grid must be an array of objects or an object of value lists");
        return {};
    }
    // Object form: cartesian product over the declared key order, first
    // key slowest.
    std::vector<std::string> keys;
    std::vector<std::vector<nlohmann::json>> values;
    for (const auto& item : grid.items()) {
        keys.push_back(item.key());
        std::vector<nlohmann::json> cell;
        if (item.value().is_array()) {
            for (const auto& v : item.value()) cell.push_back(nlohmann::json(v));
        } else {
            cell.push_back(nlohmann::json(item.value()));
        }
        if (cell.empty()) {
            errors.add(where + " grid key '" + item.key() + "' has an empty value list");
            return {};
        }
        values.push_back(std::move(cell));
    }
    std::size_t total = 1;
    for (const auto& cell : values) total *= cell.size();
    for (std::size_t idx = 0; idx < total; ++idx) {
        nlohmann::json candidate = nlohmann::json::object();
        std::size_t rem = idx;
        for (std::size_t k = keys.size(); k > 0; --k) {
            const std::size_t pos = rem % values[k - 1].size();
            rem /= values[k - 1].size();
            candidate[keys[k - 1]] = values[k - 1][pos];
        }
        candidates.push_back(std::move(candidate));
    }
    return candidates;
}

const std::set<std::string>& allowed_params(ModelKind kind) {
    static const std::set<std::string> logreg_keys = {"l2"};
    static const std::set<std::string> forest_keys = {"n_trees", "max_depth", "min_leaf",
                                                      "mtry", "bootstrap"};
    return kind == ModelKind::logreg ? logreg_keys : forest_keys;
}

} // namespace

RunConfig parse_run_config(const nlohmann::ordered_json& j) {
    ConfigErrors errors;
    if (!j.is_object()) throw input_error("run config must be a JSON object");
    check_unknown_keys(j,
                       {"seed", "models", "uq_methods", "calibration_folds", "ace_ranges",
                        "cutoffs", "coverage_levels", "calibration"},
                       "config", errors);

    RunConfig config;
    if (j.contains("seed")) {
        const auto& seed = j.at("seed");
        if (seed.is_number_unsigned()) {
            config.seed = seed.get<std::uint64_t>();
        } else {
            errors.add("'seed' must be a non-negative integer");
        }
    }

    if (!j.contains("models") || !j.at("models").is_array() || j.at("models").empty()) {
        errors.add("'models' must be a nonempty array");
    } else {
        for (std::size_t mi = 0; mi < j.at("models").size(); ++mi) {
            const auto& entry = j.at("models")[mi];
            const std::string where = "models[" + std::to_string(mi) + "]";
            if (!entry.is_object()) {
                errors.add(where + " must be an object");
                continue;
            }
            check_unknown_keys(entry, {"name", "kind", "grid"}, where, errors);
            if (!entry.contains("kind") || !entry.at("kind").is_string()) {
                errors.add(where + " needs a string 'kind'");
                continue;
            }
            ModelSpec spec;
            try {
                spec.kind = model_kind_from_name(entry.at("kind").get<std::string>());
            } catch (const input_error& e) {
                errors.add(where + ": " + e.what());
                continue;
            }
            spec.name = entry.contains("name") && entry.at("name").is_string()
                ? entry.at("name").get<std::string>()
                : model_kind_name(spec.kind);
            if (!entry.contains("grid")) {
                errors.add(where + " needs a 'grid'");
                continue;
            }
            spec.grid = expand_grid(entry.at("grid"), where, errors);
            for (std::size_t ci = 0; ci < spec.grid.size(); ++ci) {
                check_unknown_keys(spec.grid[ci], allowed_params(spec.kind),
                                   where + ".grid[" + std::to_string(ci) + "]", errors);
            }
            config.models.push_back(std::move(spec));
        }
    }

    if (!j.contains("uq_methods") || !j.at("uq_methods").is_array() ||
        j.at("uq_methods").empty()) {
        errors.add("'uq_methods' must be a nonempty array");
    } else {
        for (const auto& entry : j.at("uq_methods")) {
            if (!entry.is_string()) {
                errors.add("'uq_methods' entries must be strings");
                break;
            }
            try {
                config.uq_methods.push_back(uq_method_from_name(entry.get<std::string>()));
            } catch (const input_error& e) {
                errors.add(e.what());
            }
        }
    }

    auto read_int = [&](const char* key, int& target, int lo) {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_number_integer() || v.get<int>() < lo) {
            errors.add(std::string("'") + key + "' must be an integer >= " + std::to_string(lo));
            return;
        }
        target = v.get<int>();
    };
    read_int("calibration_folds", config.calibration_folds, 2);
    read_int("ace_ranges", config.ace_ranges, 1);

    auto read_reals = [&](const char* key, std::vector<double>& target) {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_array()) {
            errors.add(std::string("'") + key + "' must be an array of numbers");
            return;
        }
        std::vector<double> out;
        for (const auto& item : v) {
            if (!item.is_number()) {
                errors.add(std::string("'") + key + "' must be an array of numbers");
                return;
            }
            out.push_back(item.get<double>());
        }
        target = std::move(out);
    };
    read_reals("cutoffs", config.cutoffs);
    read_reals("coverage_levels", config.coverage_levels);

    if (j.contains("calibration")) {
        const auto& v = j.at("calibration");
        if (v.is_string() && v.get<std::string>() == "out_of_fold") {
            config.resubstitution = false;
        } else if (v.is_string() && v.get<std::string>() == "resubstitution") {
            config.resubstitution = true;
        } else {
            errors.add("'calibration' must be \"out_of_fold\" or \"resubstitution\"");
        }
    }

    errors.raise_if_any();
    validate_run_config(config);
    return config;
}

RunConfig load_run_config(const std::string& path) {
    const std::string text = io::read_text_file(path);
    try {
        return parse_run_config(nlohmann::ordered_json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error("'" + path + "': " + e.what());
    }
}

namespace {

// Typed option extraction for the JSON command interface; collects the
// known keys and rejects everything else.
class OptionReader {
public:
    explicit OptionReader(const nlohmann::json& j, std::string where)
        : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw input_error(where_ + " options must be a JSON object");
    }

    std::string require_string(const char* key) {
        mark(key);
        if (!j_.contains(key) || !j_.at(key).is_string()) {
            throw input_error(where_ + ": '" + key + "' must be a string");
        }
        return j_.at(key).get<std::string>();
    }

    std::string get_string(const char* key, const std::string& fallback) {
        mark(key);
        if (!j_.contains(key)) return fallback;
        if (!j_.at(key).is_string()) {
            throw input_error(where_ + ": '" + key + "' must be a string");
        }
        return j_.at(key).get<std::string>();
    }

    std::optional<std::string> get_optional_string(const char* key) {
        mark(key);
        if (!j_.contains(key)) return std::nullopt;
        if (!j_.at(key).is_string()) {
            throw input_error(where_ + ": '" + key + "' must be a string");
        }
        return j_.at(key).get<std::string>();
    }

    double get_number(const char* key, double fallback) {
        mark(key);
        if (!j_.contains(key)) return fallback;
        if (!j_.at(key).is_number()) {
            throw input_error(where_ + ": '" + key + "' must be a number");
        }
        return j_.at(key).get<double>();
    }

    std::optional<double> get_optional_number(const char* key) {
        mark(key);
        if (!j_.contains(key)) return std::nullopt;
        if (!j_.at(key).is_number()) {
            throw input_error(where_ + ": '" + key + "' must be a number");
        }
        return j_.at(key).get<double>();
    }

    int get_int(const char* key, int fallback) {
        mark(key);
        if (!j_.contains(key)) return fallback;
        if (!j_.at(key).is_number_integer()) {
            throw input_error(where_ + ": '" + key + "' must be an integer");
        }
        return j_.at(key).get<int>();
    }

    std::uint64_t get_seed(const char* key, std::uint64_t fallback) {
        mark(key);
        if (!j_.contains(key)) return fallback;
        if (!j_.at(key).is_number_unsigned()) {
            throw input_error(where_ + ": '" + key + "' must be a non-negative integer");
        }
        return j_.at(key).get<std::uint64_t>();
    }

    bool get_bool(const char* key, bool fallback) {
        mark(key);
        if (!j_.contains(key)) return fallback;
        if (!j_.at(key).is_boolean()) {
            throw input_error(where_ + ": '" + key + "' must be a boolean");
        }
        return j_.at(key).get<bool>();
    }

    std::vector<double> get_number_list(const char* key, std::vector<double> fallback) {
        mark(key);
        if (!j_.contains(key)) return fallback;
        if (!j_.at(key).is_array()) {
            throw input_error(where_ + ": '" + key + "' must be an array of numbers");
        }
        std::vector<double> out;
        for (const auto& v : j_.at(key)) {
            if (!v.is_number()) {
                throw input_error(where_ + ": '" + key + "' must be an array of numbers");
            }
            out.push_back(v.get<double>());
        }
        return out;
    }

    void finish() const {
        std::vector<std::string> unknown;
        for (const auto& item : j_.items()) {
            if (!seen_.count(item.key())) unknown.push_back(item.key());
        }
        if (!unknown.empty()) {
            throw input_error(where_ + ": unknown option" +
                              (unknown.size() > 1 ? "s " : " ") + join_keys(unknown));
        }
    }

private:
    void mark(const char* key) { seen_.insert(key); }

    const nlohmann::json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

} // namespace

SynthOptions synth_options_from_json(const nlohmann::json& j) {
    OptionReader r(j, "synth");
    SynthOptions options;
    const int n = r.get_int("n", 100);
    const int d = r.get_int("d", 2);
    if (n < 0 || d < 0) throw input_error("synth: n and d must be non-negative");
    options.spec.n = static_cast<std::size_t>(n);
    options.spec.d = static_cast<std::size_t>(d);
    options.spec.class_sep = r.get_number("class_sep", 1.0);
    options.spec.base_rate = r.get_number("base_rate", 0.5);
    options.spec.distortion_gamma = r.get_number("distortion_gamma", 1.0);
    options.spec.seed = r.get_seed("seed", 0);
    options.out_dir = r.require_string("out_dir");
    r.finish();
    return options;
}

FeaturesOptions features_options_from_json(const nlohmann::json& j) {
    OptionReader r(j, "features");
    FeaturesOptions options;
    options.input_csv = r.get_optional_string("input");
    options.dose_manifest = r.get_optional_string("dose_manifest");
    options.eqd2 = r.get_bool("eqd2", false);
    options.fractions = r.get_int("fractions", 1);
    options.alpha_beta = r.get_number("alpha_beta", 3.0);
    options.vx_thresholds = r.get_number_list("vx", {});
    options.geud_a = r.get_optional_number("geud_a");
    options.scale = r.get_bool("scale", true);
    options.prune_threshold = r.get_number("prune_threshold", 0.8);
    options.out_csv = r.require_string("out");
    options.sidecar = r.get_string("sidecar", "");
    r.finish();
    return options;
}

RunOptions run_options_from_json(const nlohmann::json& j) {
    OptionReader r(j, "run");
    RunOptions options;
    options.features_csv = r.require_string("features");
    options.labels_csv = r.require_string("labels");
    options.config_path = r.require_string("config");
    options.out_dir = r.require_string("out_dir");
    r.finish();
    return options;
}

ReportOptions report_options_from_json(const nlohmann::json& j) {
    OptionReader r(j, "report");
    ReportOptions options;
    options.predictions_csv = r.require_string("predictions");
    options.out_dir = r.require_string("out_dir");
    options.ace_ranges = r.get_int("ace_ranges", 10);
    options.cutoffs = r.get_number_list("cutoffs", options.cutoffs);
    options.levels = r.get_number_list("levels", {});
    const std::string mode = r.get_string("bin_mode", "equal_frequency");
    if (mode == "equal_frequency") {
        options.bin_mode = BinMode::equal_frequency;
    } else if (mode == "equal_width") {
        options.bin_mode = BinMode::equal_width;
    } else {
        throw input_error("report: 'bin_mode' must be equal_frequency or equal_width");
    }
    options.metrics_only = r.get_bool("metrics_only", false);
    r.finish();
    return options;
}

CalibrateOptions calibrate_options_from_json(const nlohmann::json& j) {
    OptionReader r(j, "calibrate");
    CalibrateOptions options;
    options.scores_csv = r.require_string("scores");
    options.method = r.require_string("method");
    options.out_path = r.require_string("out");
    r.finish();
    return options;
}

ApplyOptions apply_options_from_json(const nlohmann::json& j) {
    OptionReader r(j, "apply");
    ApplyOptions options;
    options.calibrator_path = r.require_string("calibrator");
    options.scores_csv = r.require_string("scores");
    options.out_csv = r.require_string("out");
    options.model_name = r.get_string("model_name", "external");
    r.finish();
    return options;
}

} // namespace uqkit::cmd
