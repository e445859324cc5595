#include "uqkit/calibrator_model.hpp"

#include <cmath>

#include "uqkit/errors.hpp"

namespace uqkit {

CalibratorModel fit_calibrator(UqMethod method, const std::vector<ScoreLabelPair>& pairs) {
    CalibratorModel cal;
    cal.method = method;
    cal.meta.n = pairs.size();
    switch (method) {
        case UqMethod::uc:
            break;
        case UqMethod::ps: {
            const PlattFit fit = platt_fit(pairs);
            cal.model = fit.params;
            cal.meta.convergence_flag = fit.converged;
            break;
        }
        case UqMethod::ir:
            cal.model = pava_fit(pairs);
            break;
        case UqMethod::va: {
            validate_pairs(pairs);
            if (pairs.empty()) throw input_error("venn-abers needs a nonempty calibration set");
            bool has_pos = false, has_neg = false;
            for (const auto& p : pairs) (p.label == 1 ? has_pos : has_neg) = true;
            if (!has_pos || !has_neg) {
                throw input_error("venn-abers calibration set needs both classes");
            }
            cal.model = VennAbersModel{pairs};
            break;
        }
        case UqMethod::cp: {
            std::vector<double> scores;
            scores.reserve(pairs.size());
            for (const auto& p : pairs) scores.push_back(p.score);
            cal.model = conformal_fit(scores);
            break;
        }
    }
    return cal;
}

PredictionRecord apply_calibrator(const CalibratorModel& calibrator,
                                  double raw_score,
                                  const std::string& sample_id,
                                  const std::string& model_name,
                                  int fold,
                                  std::optional<int> true_label) {
    if (!std::isfinite(raw_score) || raw_score < 0.0 || raw_score > 1.0) {
        throw input_error("raw score must be finite in [0,1]");
    }
    PredictionRecord rec;
    rec.sample_id = sample_id;
    rec.model_name = model_name;
    rec.uq_method = calibrator.method;
    rec.fold = fold;
    rec.raw_score = raw_score;
    rec.true_label = true_label;

    switch (calibrator.method) {
        case UqMethod::uc:
            rec.prob = raw_score;
            break;
        case UqMethod::ps:
            rec.prob = platt_apply(std::get<PlattParams>(calibrator.model), raw_score);
            break;
        case UqMethod::ir:
            rec.prob = isotonic_predict(std::get<IsotonicModel>(calibrator.model), raw_score);
            break;
        case UqMethod::va:
            rec.prob = venn_abers_predict(std::get<VennAbersModel>(calibrator.model), raw_score).p;
            break;
        case UqMethod::cp: {
            const auto cp = conformal_predict(std::get<ConformalModel>(calibrator.model), raw_score);
            rec.p_value = cp.p_value;
            rec.predicted_label = cp.predicted_label;
            rec.uncertainty = cp.uncertainty;
            return rec;
        }
    }
    rec.predicted_label = decide_label(*rec.prob);
    rec.uncertainty = uncertainty_score(*rec.prob, rec.predicted_label);
    return rec;
}

} // namespace uqkit
