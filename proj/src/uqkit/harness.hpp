#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "uqkit/core.hpp"
#include "uqkit/models.hpp"

namespace uqkit {

// One entry of the run config's model list. name labels the records and
// must be unique within a run; grid holds candidate parameter objects in
// declaration order.
struct ModelSpec {
    std::string name;
    ModelKind kind = ModelKind::logreg;
    std::vector<nlohmann::json> grid;
};

struct RunConfig {
    std::vector<ModelSpec> models;
    std::vector<UqMethod> uq_methods;
    std::uint64_t seed = 0;
    int calibration_folds = 3;
    int ace_ranges = 10;
    std::vector<double> cutoffs = {0.5, 0.8, 0.9};
    std::vector<double> coverage_levels;   // empty means the default ladder
    // Calibrators normally train on out-of-fold scores from the inner CV;
    // this switches them to resubstitution scores of the refit model.
    bool resubstitution = false;
};

void validate_run_config(const RunConfig& config);

struct SynthSpec {
    std::size_t n = 10;
    std::size_t d = 1;
    double class_sep = 1.0;
    double base_rate = 0.5;
    double distortion_gamma = 1.0;
    std::uint64_t seed = 0;
};

void validate_synth_spec(const SynthSpec& spec);

struct RunResult {
    std::vector<PredictionRecord> records;
    std::size_t skipped_folds = 0;   // single-class training splits
};

// Leave-one-out experiment: per held-out sample, inner grid search on the
// rest, refit with the winning params, then every configured uq method
// scores the held-out point. Records come back sorted by
// (model, uq_method, sample_id); fold carries the held-out row index.
RunResult loocv_run(const Dataset& dataset, const RunConfig& config);

// Two-Gaussian mixture with means at +/-(class_sep/2) along the first
// axis, identity covariance and class prior base_rate. The closed-form
// posterior is stored and labels are drawn from it, so the oracle column
// is exactly calibrated by construction.
Dataset synth_generate(const SynthSpec& spec);

// g(p) = p^gamma / (p^gamma + (1-p)^gamma). Strictly increasing with
// fixed points {0, 0.5, 1}; gamma=1 is the identity.
std::vector<double> distort_scores(const std::vector<double>& probs, double gamma);

} // namespace uqkit
