#pragma once

#include <cstdint>
#include <vector>

#include "uqkit/core.hpp"

namespace uqkit {

// Sigmoid recalibration p = 1 / (1 + exp(a + b*f)).
struct PlattParams {
    double a = 0.0;
    double b = 0.0;
};

struct PlattOptions {
    double l2 = 1e-6;            // identifiability penalty on (a,b)
    int max_iterations = 100;
    double gradient_tol = 1e-8;
    bool smooth_targets = false; // classic (N+1)/(N+2) target smoothing
};

struct PlattFit {
    PlattParams params;
    bool converged = true;
    int iterations = 0;
};

// Minimizes the penalized negative log-likelihood by Newton iteration with
// step halving, starting from (a,b) = (0,-1). Requires both classes.
// Non-convergence returns the best iterate with converged=false.
PlattFit platt_fit(const std::vector<ScoreLabelPair>& pairs, const PlattOptions& opts = {});

double platt_apply(const PlattParams& params, double f);

// Non-decreasing step function from isotonic regression. Knot scores are
// strictly increasing (equal raw scores are pooled before fitting); values
// are weighted label means, hence in [0,1].
struct IsotonicModel {
    std::vector<double> knot_scores;
    std::vector<double> knot_values;
    std::vector<double> knot_weights;
};

// Pool-adjacent-violators: the unique minimizer of the weighted squared
// error over non-decreasing fits.
IsotonicModel pava_fit(const std::vector<ScoreLabelPair>& pairs);

// Step evaluation: value of the greatest knot with score <= f; inputs
// below every knot clamp to the first value.
double isotonic_predict(const IsotonicModel& model, double f);

// Venn-ABERS keeps the raw calibration set and refits two isotonic models
// per query (test point labeled 1, then 0).
struct VennAbersModel {
    std::vector<ScoreLabelPair> calibration_pairs;
};

struct VennAbersOutput {
    double p0 = 0.0;
    double p1 = 0.0;
    double p = 0.0;   // merged: p1 / (1 - p0 + p1)
};

VennAbersOutput venn_abers_predict(const VennAbersModel& model, double f_test);

} // namespace uqkit
