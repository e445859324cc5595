#include "uqkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uqkit/errors.hpp"
#include "uqkit/features.hpp"

namespace uqkit {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
    if (a != b) throw input_error("scores and labels differ in length");
}

void check_binary(const std::vector<int>& labels) {
    for (int y : labels) {
        if (y != 0 && y != 1) throw input_error("labels must be 0 or 1");
    }
}

// Extracts (output, true_label) from records, requiring truth everywhere.
void collect(const std::vector<PredictionRecord>& records,
             std::vector<double>& scores, std::vector<int>& labels) {
    scores.clear();
    labels.clear();
    scores.reserve(records.size());
    labels.reserve(records.size());
    for (const auto& r : records) {
        if (!r.true_label) throw input_error("record without true_label cannot be evaluated");
        scores.push_back(r.output());
        labels.push_back(*r.true_label);
    }
}

// Equal-count split: bin b covers [start_b, start_b + size_b), the first
// n % ranges bins taking one extra sample.
std::vector<std::size_t> bin_sizes(std::size_t n, int ranges) {
    const std::size_t r = static_cast<std::size_t>(ranges);
    std::vector<std::size_t> sizes(r, n / r);
    for (std::size_t b = 0; b < n % r; ++b) ++sizes[b];
    return sizes;
}

} // namespace

std::optional<double> auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
    check_lengths(scores.size(), labels.size());
    check_binary(labels);
    std::size_t n_pos = 0;
    for (int y : labels) n_pos += static_cast<std::size_t>(y);
    const std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) return std::nullopt;

    const auto ranks = average_ranks(scores);
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1) rank_sum += ranks[i];
    }
    const double np = static_cast<double>(n_pos);
    const double u = rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * static_cast<double>(n_neg));
}

std::optional<double> auprc(const std::vector<double>& scores, const std::vector<int>& labels) {
    check_lengths(scores.size(), labels.size());
    check_binary(labels);
    std::size_t n_pos = 0;
    for (int y : labels) n_pos += static_cast<std::size_t>(y);
    if (n_pos == 0) return std::nullopt;

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    double ap = 0.0;
    std::size_t tp = 0, seen = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::size_t group_pos = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            group_pos += static_cast<std::size_t>(labels[order[j]]);
            ++j;
        }
        // Whole tie group admitted before precision is read off.
        tp += group_pos;
        seen += j - i;
        ap += static_cast<double>(group_pos) * static_cast<double>(tp) / static_cast<double>(seen);
        i = j;
    }
    return ap / static_cast<double>(n_pos);
}

double ace(const std::vector<double>& probs, const std::vector<int>& labels, int ranges) {
    check_lengths(probs.size(), labels.size());
    check_binary(labels);
    if (ranges < 1) throw input_error("ace needs at least 1 range");
    const std::size_t n = probs.size();
    if (n < static_cast<std::size_t>(ranges)) {
        throw input_error("ace needs at least as many samples as ranges");
    }
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
            throw input_error("probabilities must be finite in [0,1]");
        }
    }

    double total = 0.0;
    for (int klass = 0; klass < 2; ++klass) {
        std::vector<double> class_prob(n);
        for (std::size_t i = 0; i < n; ++i) {
            class_prob[i] = klass == 1 ? probs[i] : 1.0 - probs[i];
        }
        // Sort key includes the label so reordered input gives identical
        // bins (equal prob+label samples are interchangeable).
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (class_prob[a] != class_prob[b]) return class_prob[a] < class_prob[b];
            return labels[a] < labels[b];
        });

        std::size_t start = 0;
        for (std::size_t size : bin_sizes(n, ranges)) {
            double conf = 0.0, acc = 0.0;
            for (std::size_t k = start; k < start + size; ++k) {
                conf += class_prob[order[k]];
                acc += labels[order[k]] == klass ? 1.0 : 0.0;
            }
            conf /= static_cast<double>(size);
            acc /= static_cast<double>(size);
            total += std::abs(acc - conf);
            start += size;
        }
    }
    return total / (2.0 * static_cast<double>(ranges));
}

std::vector<ReliabilityBin> reliability_bins(const std::vector<double>& probs,
                                             const std::vector<int>& labels,
                                             int ranges,
                                             BinMode mode) {
    check_lengths(probs.size(), labels.size());
    check_binary(labels);
    if (ranges < 1) throw input_error("reliability needs at least 1 range");
    const std::size_t n = probs.size();
    if (n == 0) throw input_error("reliability needs at least 1 sample");

    std::vector<ReliabilityBin> bins;
    if (mode == BinMode::equal_frequency) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (probs[a] != probs[b]) return probs[a] < probs[b];
            return labels[a] < labels[b];
        });
        std::size_t start = 0;
        for (std::size_t size : bin_sizes(n, ranges)) {
            if (size == 0) continue;
            ReliabilityBin bin;
            bin.count = size;
            bin.lo = probs[order[start]];
            bin.hi = probs[order[start + size - 1]];
            for (std::size_t k = start; k < start + size; ++k) {
                bin.mean_conf += probs[order[k]];
                bin.frac_positive += labels[order[k]];
            }
            bin.mean_conf /= static_cast<double>(size);
            bin.frac_positive /= static_cast<double>(size);
            bins.push_back(bin);
            start += size;
        }
    } else {
        const double width = 1.0 / static_cast<double>(ranges);
        for (int b = 0; b < ranges; ++b) {
            const double lo = width * b;
            const double hi = b + 1 == ranges ? 1.0 : width * (b + 1);
            ReliabilityBin bin;
            bin.lo = lo;
            bin.hi = hi;
            for (std::size_t i = 0; i < n; ++i) {
                const bool in = b + 1 == ranges ? (probs[i] >= lo && probs[i] <= hi)
                                                : (probs[i] >= lo && probs[i] < hi);
                if (!in) continue;
                ++bin.count;
                bin.mean_conf += probs[i];
                bin.frac_positive += labels[i];
            }
            if (bin.count == 0) continue;
            bin.mean_conf /= static_cast<double>(bin.count);
            bin.frac_positive /= static_cast<double>(bin.count);
            bins.push_back(bin);
        }
    }
    return bins;
}

// Most-certain-first ordering shared by the selective protocols.
static std::vector<std::size_t> certainty_order(const std::vector<PredictionRecord>& records) {
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (records[a].uncertainty != records[b].uncertainty) {
            return records[a].uncertainty < records[b].uncertainty;
        }
        return records[a].sample_id < records[b].sample_id;
    });
    return order;
}

std::vector<CoveragePoint> coverage_curve(const std::vector<PredictionRecord>& records,
                                          const std::vector<double>& levels) {
    if (records.empty()) throw input_error("coverage curve needs at least 1 record");
    const auto order = certainty_order(records);
    const std::size_t n = records.size();

    std::vector<CoveragePoint> out;
    out.reserve(levels.size());
    for (double level : levels) {
        if (!(level > 0.0) || level > 1.0) {
            throw input_error("coverage levels must lie in (0,1]");
        }
        const std::size_t take =
            std::min(n, static_cast<std::size_t>(std::ceil(level * static_cast<double>(n))));
        std::vector<PredictionRecord> subset;
        subset.reserve(take);
        for (std::size_t k = 0; k < take; ++k) subset.push_back(records[order[k]]);

        std::vector<double> scores;
        std::vector<int> labels;
        collect(subset, scores, labels);

        CoveragePoint pt;
        pt.level = level;
        pt.metrics.auroc = auroc(scores, labels);
        pt.metrics.auprc = auprc(scores, labels);
        pt.metrics.coverage = static_cast<double>(take) / static_cast<double>(n);
        pt.metrics.n_evaluated = take;
        out.push_back(pt);
    }
    return out;
}

std::vector<ThresholdRow> threshold_table(const std::vector<PredictionRecord>& records,
                                          const std::vector<double>& cutoffs) {
    std::vector<ThresholdRow> rows;
    rows.reserve(cutoffs.size());
    for (double cutoff : cutoffs) {
        ThresholdRow row;
        row.cutoff = cutoff;
        std::vector<PredictionRecord> kept;
        for (const auto& r : records) {
            if (1.0 - r.uncertainty >= cutoff) kept.push_back(r);
        }
        row.n_kept = kept.size();
        row.coverage = records.empty()
            ? 0.0
            : static_cast<double>(kept.size()) / static_cast<double>(records.size());
        if (!kept.empty()) {
            std::vector<double> scores;
            std::vector<int> labels;
            collect(kept, scores, labels);
            row.auroc = auroc(scores, labels);
            row.auprc = auprc(scores, labels);
        }
        rows.push_back(row);
    }
    return rows;
}

MetricsReport full_metrics(const std::vector<PredictionRecord>& records, int ace_ranges) {
    MetricsReport report;
    report.n_evaluated = records.size();
    report.coverage = 1.0;
    if (records.empty()) return report;

    std::vector<double> scores;
    std::vector<int> labels;
    collect(records, scores, labels);
    report.auroc = auroc(scores, labels);
    report.auprc = auprc(scores, labels);
    const bool probabilistic = uq_method_outputs_probability(records.front().uq_method);
    if (probabilistic && records.size() >= static_cast<std::size_t>(ace_ranges)) {
        report.ace = ace(scores, labels, ace_ranges);
    }
    return report;
}

} // namespace uqkit
