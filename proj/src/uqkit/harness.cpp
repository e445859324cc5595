#include "uqkit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "uqkit/calibrator_model.hpp"
#include "uqkit/errors.hpp"
#include "uqkit/rng.hpp"

namespace uqkit {

void validate_run_config(const RunConfig& config) {
    if (config.models.empty()) throw input_error("run config needs at least one model");
    std::set<std::string> names;
    for (const ModelSpec& spec : config.models) {
        if (spec.name.empty()) throw input_error("model entries need a name");
        if (!names.insert(spec.name).second) {
            throw input_error("duplicate model name '" + spec.name + "'");
        }
        if (spec.grid.empty()) {
            throw input_error("model '" + spec.name + "' has an empty grid");
        }
    }
    if (config.uq_methods.empty()) throw input_error("run config needs at least one uq method");
    std::set<UqMethod> methods(config.uq_methods.begin(), config.uq_methods.end());
    if (methods.size() != config.uq_methods.size()) {
        throw input_error("uq_methods contains duplicates");
    }
    if (config.calibration_folds < 2) throw input_error("calibration_folds must be >= 2");
    if (config.ace_ranges < 1) throw input_error("ace_ranges must be >= 1");
    for (double c : config.cutoffs) {
        if (!(c >= 0.0 && c <= 1.0)) throw input_error("cutoffs must lie in [0,1]");
    }
    for (double level : config.coverage_levels) {
        if (!(level > 0.0 && level <= 1.0)) {
            throw input_error("coverage levels must lie in (0,1]");
        }
    }
}

void validate_synth_spec(const SynthSpec& spec) {
    if (spec.n < 10) throw input_error("synthetic datasets need n >= 10");
    if (spec.d < 1) throw input_error("synthetic datasets need d >= 1");
    if (!std::isfinite(spec.class_sep) || spec.class_sep < 0.0) {
        throw input_error("class_sep must be finite and >= 0");
    }
    if (!(spec.base_rate > 0.0 && spec.base_rate < 1.0)) {
        throw input_error("base_rate must lie in the open interval (0,1)");
    }
    if (!(spec.distortion_gamma > 0.0) || !std::isfinite(spec.distortion_gamma)) {
        throw input_error("distortion_gamma must be finite and > 0");
    }
}

RunResult loocv_run(const Dataset& dataset, const RunConfig& config) {
    validate_dataset(dataset);
    validate_run_config(config);
    const std::size_t n = dataset.n();
    const std::size_t d = dataset.d();
    if (n < 4) throw input_error("leave-one-out needs at least 4 samples");

    RunResult result;
    result.records.reserve(n * config.models.size() * config.uq_methods.size());

    std::vector<double> train_x;
    std::vector<int> train_y;
    for (std::size_t i = 0; i < n; ++i) {
        train_x.clear();
        train_y.clear();
        for (std::size_t r = 0; r < n; ++r) {
            if (r == i) continue;
            const double* row = dataset.features.data() + r * d;
            train_x.insert(train_x.end(), row, row + d);
            train_y.push_back(dataset.labels[r]);
        }
        std::size_t pos = 0;
        for (int v : train_y) pos += static_cast<std::size_t>(v);
        if (pos == 0 || pos == train_y.size()) {
            ++result.skipped_folds;
            continue;
        }

        const std::uint64_t fold_seed = config.seed ^ static_cast<std::uint64_t>(i);
        const MatrixView train_view{train_x.data(), train_y.size(), d};
        const std::vector<double> test_row = dataset.row(i);

        for (const ModelSpec& spec : config.models) {
            const GridSearchResult search =
                grid_search_cv(train_view, train_y, spec.kind, spec.grid,
                               config.calibration_folds, fold_seed,
                               SelectionObjective::auroc);
            const FittedModel refit = fit_model(spec.kind, search.best_params,
                                                train_view, train_y,
                                                mix_seed(fold_seed, 0));
            const double f_test = predict_model(refit, test_row.data(), d);

            std::vector<ScoreLabelPair> cal_pairs(train_y.size());
            for (std::size_t r = 0; r < train_y.size(); ++r) {
                const double score = config.resubstitution
                    ? predict_model(refit, train_view.row(r), d)
                    : search.oof_scores[r];
                cal_pairs[r] = {score, train_y[r]};
            }

            for (UqMethod method : config.uq_methods) {
                const CalibratorModel calibrator = fit_calibrator(method, cal_pairs);
                result.records.push_back(apply_calibrator(
                    calibrator, f_test, dataset.sample_ids[i], spec.name,
                    static_cast<int>(i), dataset.labels[i]));
            }
        }
    }

    std::sort(result.records.begin(), result.records.end(),
              [](const PredictionRecord& a, const PredictionRecord& b) {
                  if (a.model_name != b.model_name) return a.model_name < b.model_name;
                  if (a.uq_method != b.uq_method) return a.uq_method < b.uq_method;
                  return a.sample_id < b.sample_id;
              });
    return result;
}

Dataset synth_generate(const SynthSpec& spec) {
    validate_synth_spec(spec);
    Rng rng(spec.seed);

    Dataset ds;
    ds.sample_ids.reserve(spec.n);
    ds.feature_names.reserve(spec.d);
    ds.features.reserve(spec.n * spec.d);
    ds.labels.reserve(spec.n);
    std::vector<double> posterior;
    posterior.reserve(spec.n);

    for (std::size_t j = 0; j < spec.d; ++j) {
        ds.feature_names.push_back("x" + std::to_string(j));
    }
    std::size_t width = std::to_string(spec.n - 1).size();
    if (width < 4) width = 4;

    const double half_sep = 0.5 * spec.class_sep;
    const double prior_logit = std::log(spec.base_rate / (1.0 - spec.base_rate));
    for (std::size_t i = 0; i < spec.n; ++i) {
        std::string id = std::to_string(i);
        ds.sample_ids.push_back("s" + std::string(width - id.size(), '0') + id);

        const double component_mean = rng.bernoulli(spec.base_rate) ? half_sep : -half_sep;
        for (std::size_t j = 0; j < spec.d; ++j) {
            const double mean = j == 0 ? component_mean : 0.0;
            ds.features.push_back(mean + rng.normal());
        }
        const double x1 = ds.features[i * spec.d];
        const double z = prior_logit + spec.class_sep * x1;
        const double q = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                                  : std::exp(z) / (1.0 + std::exp(z));
        posterior.push_back(q);
        ds.labels.push_back(rng.bernoulli(q) ? 1 : 0);
    }
    ds.oracle_posterior = std::move(posterior);
    return ds;
}

std::vector<double> distort_scores(const std::vector<double>& probs, double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw input_error("gamma must be finite and > 0");
    }
    std::vector<double> out;
    out.reserve(probs.size());
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw input_error("probabilities must lie in [0,1]");
        const double a = std::pow(p, gamma);
        const double b = std::pow(1.0 - p, gamma);
        out.push_back(a + b == 0.0 ? p : a / (a + b));
    }
    return out;
}

} // namespace uqkit
