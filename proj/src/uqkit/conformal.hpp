#pragma once

#include <vector>

#include "uqkit/core.hpp"

namespace uqkit {

// Bag of training nonconformity scores for transductive p-values.
struct ConformalModel {
    std::vector<double> alphas;
    double epsilon_clip = 1e-12;
};

// alpha = -log(max(f, clip)); decreasing in f, zero at f = 1.
double nonconformity(double f, double epsilon_clip = 1e-12);

// Builds the score bag from raw calibration scores.
ConformalModel conformal_fit(const std::vector<double>& scores, double epsilon_clip = 1e-12);

// p = |{alpha in bag + test : alpha >= alpha_test}| / (m+1). The test score
// counts itself, so p >= 1/(m+1); ties count inclusively.
double p_value(const ConformalModel& model, double alpha_test);

struct ConformalPrediction {
    double p_value = 0.0;
    int predicted_label = 0;   // decided on the raw score, not the p-value
    double uncertainty = 0.0;
};

ConformalPrediction conformal_predict(const ConformalModel& model, double f_test);

} // namespace uqkit
