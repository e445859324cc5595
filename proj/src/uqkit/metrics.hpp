#pragma once

#include <optional>
#include <vector>

#include "uqkit/core.hpp"

namespace uqkit {

// Absent metrics mean "undefined on the evaluated subset" (single class,
// no positives, empty subset) and serialize as empty cells, never 0.
struct MetricsReport {
    std::optional<double> auroc;
    std::optional<double> auprc;
    std::optional<double> ace;
    double coverage = 1.0;
    std::size_t n_evaluated = 0;
};

// Mann-Whitney AUROC with average-rank tie handling. Absent when a class
// is missing. Invariant under strictly increasing score transforms.
std::optional<double> auroc(const std::vector<double>& scores, const std::vector<int>& labels);

// Average precision, stepwise; tied scores are admitted as one group.
// Absent when there are no positives.
std::optional<double> auprc(const std::vector<double>& scores, const std::vector<int>& labels);

// Adaptive calibration error over both classes (K = 2): per class, sort by
// that class's probability, cut into `ranges` equal-count bins (the first
// N mod R bins take one extra sample) and average |accuracy - confidence|.
double ace(const std::vector<double>& probs, const std::vector<int>& labels, int ranges);

enum class BinMode { equal_frequency, equal_width };

struct ReliabilityBin {
    double lo = 0.0;
    double hi = 0.0;
    double mean_conf = 0.0;
    double frac_positive = 0.0;
    std::size_t count = 0;
};

// Calibration-plot bins over positive-class probabilities. Empty bins are
// dropped; counts sum to N.
std::vector<ReliabilityBin> reliability_bins(const std::vector<double>& probs,
                                             const std::vector<int>& labels,
                                             int ranges,
                                             BinMode mode = BinMode::equal_frequency);

struct CoveragePoint {
    double level = 1.0;
    MetricsReport metrics;
};

// Selective evaluation: records sorted most-certain first (uncertainty
// ascending, ties by sample_id), then AUROC/AUPRC over the top ceil(c*N)
// at each coverage level c.
std::vector<CoveragePoint> coverage_curve(const std::vector<PredictionRecord>& records,
                                          const std::vector<double>& levels);

inline std::vector<double> default_coverage_levels() {
    return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
}

struct ThresholdRow {
    double cutoff = 0.5;
    double coverage = 0.0;
    std::size_t n_kept = 0;
    std::optional<double> auroc;
    std::optional<double> auprc;
};

// Keeps records with certainty (1 - s) >= cutoff and evaluates the kept
// subset; an empty subset reports coverage 0 with absent metrics.
std::vector<ThresholdRow> threshold_table(const std::vector<PredictionRecord>& records,
                                          const std::vector<double>& cutoffs = {0.5, 0.8, 0.9});

// Full-set metrics for one record group. ACE only for probability output.
MetricsReport full_metrics(const std::vector<PredictionRecord>& records, int ace_ranges);

} // namespace uqkit
