#include "uqkit/conformal.hpp"

#include <algorithm>
#include <cmath>

#include "uqkit/errors.hpp"

namespace uqkit {

double nonconformity(double f, double epsilon_clip) {
    return -std::log(std::max(f, epsilon_clip));
}

ConformalModel conformal_fit(const std::vector<double>& scores, double epsilon_clip) {
    if (scores.empty()) throw input_error("conformal fit needs at least 1 score");
    ConformalModel model;
    model.epsilon_clip = epsilon_clip;
    model.alphas.reserve(scores.size());
    for (double f : scores) {
        if (!std::isfinite(f) || f < 0.0 || f > 1.0) {
            throw input_error("conformal scores must be finite in [0,1]");
        }
        model.alphas.push_back(nonconformity(f, epsilon_clip));
    }
    return model;
}

double p_value(const ConformalModel& model, double alpha_test) {
    if (model.alphas.empty()) throw input_error("empty conformal model");
    std::size_t count = 1;   // the test score always counts itself
    for (double a : model.alphas) {
        if (a >= alpha_test) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(model.alphas.size() + 1);
}

ConformalPrediction conformal_predict(const ConformalModel& model, double f_test) {
    ConformalPrediction out;
    out.predicted_label = decide_label(f_test);
    out.p_value = p_value(model, nonconformity(f_test, model.epsilon_clip));
    out.uncertainty = uncertainty_score(out.p_value, out.predicted_label);
    return out;
}

} // namespace uqkit
