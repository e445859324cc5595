#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "uqkit/calibrators.hpp"
#include "uqkit/conformal.hpp"
#include "uqkit/core.hpp"

namespace uqkit {

struct FitMetadata {
    std::size_t n = 0;             // calibration pairs used
    std::uint64_t seed = 0;        // 0 when the fit is deterministic
    bool convergence_flag = true;  // false only for an unconverged platt fit
};

// One fitted post-hoc method. uc carries no state (pass-through baseline).
struct CalibratorModel {
    UqMethod method = UqMethod::uc;
    std::variant<std::monostate, PlattParams, IsotonicModel, VennAbersModel, ConformalModel> model;
    FitMetadata meta;
};

// Fits the requested method on score-label pairs. ps/ir/va keep their
// usual models; cp stores the nonconformity bag of the scores; uc ignores
// the pairs.
CalibratorModel fit_calibrator(UqMethod method, const std::vector<ScoreLabelPair>& pairs);

// Applies a fitted calibrator to one raw score, producing a full record:
// output probability or p-value, the label decision, and s(x). For cp the
// label comes from the raw score.
PredictionRecord apply_calibrator(const CalibratorModel& calibrator,
                                  double raw_score,
                                  const std::string& sample_id,
                                  const std::string& model_name,
                                  int fold = 0,
                                  std::optional<int> true_label = std::nullopt);

} // namespace uqkit
