#pragma once

#include <optional>
#include <string>
#include <vector>

namespace uqkit {

// Uncertainty methods attached to prediction records. Uncalibrated (uc) is
// the pass-through baseline; cp yields p-values, the rest probabilities.
enum class UqMethod { uc, ps, ir, va, cp };

const char* uq_method_name(UqMethod m);
UqMethod uq_method_from_name(const std::string& name);
bool uq_method_outputs_probability(UqMethod m);

// One raw classifier score in [0,1] with its binary label.
struct ScoreLabelPair {
    double score = 0.0;
    int label = 0;
};

// Throws input_error unless score is finite in [0,1] and label is 0/1.
void validate_pair(const ScoreLabelPair& p);
void validate_pairs(const std::vector<ScoreLabelPair>& pairs);

// Per-sample output of a (model, uq method) combination. Exactly one of
// prob / p_value is set: cp fills p_value, everything else prob. raw_score
// is kept so cp's label decision (raw score) stays reconstructible.
struct PredictionRecord {
    std::string sample_id;
    std::string model_name;
    UqMethod uq_method = UqMethod::uc;
    int fold = 0;
    double raw_score = 0.0;
    std::optional<double> prob;
    std::optional<double> p_value;
    int predicted_label = 0;
    double uncertainty = 0.0;
    std::optional<int> true_label;

    // Whichever of prob / p_value is present.
    double output() const;
};

void validate_record(const PredictionRecord& r);

// Feature matrix plus labels; oracle_posterior only exists for synthetic
// data where the true class probability is known.
struct Dataset {
    std::vector<std::string> sample_ids;          // length n
    std::vector<std::string> feature_names;       // length d
    std::vector<double> features;                 // row-major, n*d
    std::vector<int> labels;                      // length n
    std::optional<std::vector<double>> oracle_posterior;

    std::size_t n() const { return labels.size(); }
    std::size_t d() const { return feature_names.size(); }
    double at(std::size_t row, std::size_t col) const;
    std::vector<double> row(std::size_t i) const;
};

void validate_dataset(const Dataset& ds);

// Label rule: positive iff p >= 0.5 (boundary maps to positive).
int decide_label(double p);

// s(x): 1-p for a positive prediction, p for a negative one. For
// probability methods p is the calibrated probability; for cp it is the
// p-value, so the same rule reads typicalness rather than confidence.
double uncertainty_score(double p, int predicted_label);

} // namespace uqkit
