#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace uqkit {

// Column-scaling parameters captured at fit time so held-out rows can be
// mapped with the training min/max (clamped into [0,1]).
struct ScaleParams {
    std::vector<double> min;
    std::vector<double> max;
};

// N x D feature block, row-major. scale_params is set once the block has
// been through minmax_fit_transform.
struct FeatureMatrix {
    std::vector<std::string> names;
    std::vector<double> values;   // row-major, n*d
    std::size_t n_rows = 0;
    std::optional<ScaleParams> scale_params;

    std::size_t n_cols() const { return names.size(); }
    double at(std::size_t row, std::size_t col) const { return values[row * names.size() + col]; }
    std::vector<double> column(std::size_t col) const;
};

// Scales every column to [0,1] in place and records per-column (min,max).
// Constant columns map to 0 everywhere.
void minmax_fit_transform(FeatureMatrix& m);

// Applies previously fitted params to a raw value; output clamped to [0,1].
double minmax_apply(const ScaleParams& params, std::size_t col, double value);
void minmax_apply(const ScaleParams& params, FeatureMatrix& m);

// 1-based ranks; tied values receive the mean of their rank positions.
std::vector<double> average_ranks(const std::vector<double>& v);

// Spearman rank correlation with average ranks for ties. Returns nullopt
// when either input is constant (rank variance zero).
std::optional<double> spearman_rho(const std::vector<double>& u, const std::vector<double>& v);

struct PruneDrop {
    std::size_t column;       // index into the original matrix
    std::string name;
    double max_abs_rho;       // the correlation that triggered the drop
    std::string partner;      // other member of the triggering pair
};

struct PruneResult {
    std::vector<std::size_t> kept;   // ascending original column indices
    std::vector<PruneDrop> dropped;  // in drop order
};

// Greedy redundancy pruning: while some surviving pair has |rho| above the
// threshold, take the pair with the largest |rho| and drop the member with
// the larger mean |rho| against the other surviving columns (ties keep the
// lower index). Survivors end up pairwise |rho| <= threshold.
PruneResult correlation_prune(const FeatureMatrix& m, double threshold = 0.8);

} // namespace uqkit
