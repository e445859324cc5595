#include "uqkit/core.hpp"

#include <cmath>

#include "uqkit/errors.hpp"

namespace uqkit {

const char* uq_method_name(UqMethod m) {
    switch (m) {
        case UqMethod::uc: return "uc";
        case UqMethod::ps: return "ps";
        case UqMethod::ir: return "ir";
        case UqMethod::va: return "va";
        case UqMethod::cp: return "cp";
    }
    return "uc";
}

UqMethod uq_method_from_name(const std::string& name) {
    if (name == "uc") return UqMethod::uc;
    if (name == "ps") return UqMethod::ps;
    if (name == "ir") return UqMethod::ir;
    if (name == "va" || name == "vas") return UqMethod::va;
    if (name == "cp") return UqMethod::cp;
    throw input_error("unknown uq method '" + name + "' (expected uc, ps, ir, va or cp)");
}

bool uq_method_outputs_probability(UqMethod m) {
    return m != UqMethod::cp;
}

void validate_pair(const ScoreLabelPair& p) {
    if (!std::isfinite(p.score) || p.score < 0.0 || p.score > 1.0) {
        throw input_error("score must be finite in [0,1]");
    }
    if (p.label != 0 && p.label != 1) {
        throw input_error("label must be 0 or 1");
    }
}

void validate_pairs(const std::vector<ScoreLabelPair>& pairs) {
    for (const auto& p : pairs) validate_pair(p);
}

double PredictionRecord::output() const {
    if (prob) return *prob;
    if (p_value) return *p_value;
    throw input_error("prediction record carries neither prob nor p_value");
}

void validate_record(const PredictionRecord& r) {
    if (r.prob.has_value() == r.p_value.has_value()) {
        throw input_error("exactly one of prob / p_value must be present");
    }
    const bool wants_prob = uq_method_outputs_probability(r.uq_method);
    if (wants_prob != r.prob.has_value()) {
        throw input_error("prob/p_value does not match uq method");
    }
    if (!std::isfinite(r.raw_score) || r.raw_score < 0.0 || r.raw_score > 1.0) {
        throw input_error("raw_score must be finite in [0,1]");
    }
    const double out = r.output();
    if (!std::isfinite(out) || out < 0.0 || out > 1.0) {
        throw input_error("calibrated output must be finite in [0,1]");
    }
    if (r.predicted_label != 0 && r.predicted_label != 1) {
        throw input_error("predicted_label must be 0 or 1");
    }
    const double expect = uncertainty_score(out, r.predicted_label);
    if (std::abs(expect - r.uncertainty) > 1e-12) {
        throw input_error("uncertainty does not match the piecewise rule");
    }
    if (r.true_label && *r.true_label != 0 && *r.true_label != 1) {
        throw input_error("true_label must be 0 or 1");
    }
    if (r.fold < 0) throw input_error("fold must be >= 0");
}

double Dataset::at(std::size_t row, std::size_t col) const {
    return features[row * d() + col];
}

std::vector<double> Dataset::row(std::size_t i) const {
    const std::size_t dd = d();
    return std::vector<double>(features.begin() + i * dd,
                               features.begin() + (i + 1) * dd);
}

void validate_dataset(const Dataset& ds) {
    const std::size_t n = ds.labels.size();
    const std::size_t d = ds.feature_names.size();
    if (n < 2) throw input_error("dataset needs at least 2 samples");
    if (ds.sample_ids.size() != n) throw input_error("sample_ids length mismatch");
    if (ds.features.size() != n * d) throw input_error("feature matrix size mismatch");
    for (double v : ds.features) {
        if (!std::isfinite(v)) throw input_error("feature matrix contains non-finite values");
    }
    for (int y : ds.labels) {
        if (y != 0 && y != 1) throw input_error("labels must be 0 or 1");
    }
    if (ds.oracle_posterior) {
        if (ds.oracle_posterior->size() != n) {
            throw input_error("oracle_posterior length mismatch");
        }
        for (double q : *ds.oracle_posterior) {
            if (!std::isfinite(q) || q < 0.0 || q > 1.0) {
                throw input_error("oracle_posterior must lie in [0,1]");
            }
        }
    }
}

int decide_label(double p) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        throw input_error("probability must be finite in [0,1]");
    }
    return p >= 0.5 ? 1 : 0;
}

double uncertainty_score(double p, int predicted_label) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        throw input_error("probability must be finite in [0,1]");
    }
    if (predicted_label != 0 && predicted_label != 1) {
        throw input_error("predicted_label must be 0 or 1");
    }
    return predicted_label == 1 ? 1.0 - p : p;
}

} // namespace uqkit
