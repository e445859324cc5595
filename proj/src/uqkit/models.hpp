#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace uqkit {

// Row-major, non-owning view over a feature block.
struct MatrixView {
    const double* data = nullptr;
    std::size_t rows = 0;
    std::size_t cols = 0;

    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    const double* row(std::size_t r) const { return data + r * cols; }
};

enum class ModelKind { logreg, forest };

ModelKind model_kind_from_name(const std::string& name);
const char* model_kind_name(ModelKind kind);

// L2-penalized logistic regression; the intercept is unpenalized.
struct LogRegModel {
    std::vector<double> weights;
    double intercept = 0.0;
    double l2 = 0.0;
    bool converged = true;
    bool gradient_fallback = false;   // set when the Hessian solve failed
};

// Newton-Raphson with step halving, max 100 iterations, gradient norm
// tolerance 1e-8. A singular Hessian falls back to fixed-rate gradient
// steps. Deterministic; requires both classes.
LogRegModel logreg_fit(const MatrixView& X, const std::vector<int>& y, double l2);

double logreg_predict(const LogRegModel& model, const double* x, std::size_t d);

struct ForestParams {
    int n_trees = 100;
    int max_depth = -1;   // -1 unlimited, 0 forces a single root leaf
    int min_leaf = 1;
    int mtry = 0;         // 0 selects floor(sqrt(d)), at least 1
    bool bootstrap = true;
};

struct TreeNode {
    int feature = -1;          // -1 marks a leaf
    double threshold = 0.0;    // left: x < threshold, right: x >= threshold
    int left = -1;
    int right = -1;
    double leaf_fraction = 0.0;
    std::size_t count = 0;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;   // node 0 is the root
};

struct ForestModel {
    std::vector<DecisionTree> trees;
    ForestParams params;
    std::uint64_t seed = 0;
    std::size_t n_features = 0;
};

// Bagged Gini trees with per-node feature subsampling; midpoint thresholds
// between consecutive sorted unique values. Tree t draws from sub-seed
// seed + t, so forests are bit-identical across runs.
ForestModel rf_fit(const MatrixView& X, const std::vector<int>& y,
                   const ForestParams& params, std::uint64_t seed);

double rf_predict(const ForestModel& model, const double* x, std::size_t d);

// Degenerate predictor used when a fold's training part is single-class.
struct ConstantModel {
    double value = 0.5;
};

using FittedModel = std::variant<ConstantModel, LogRegModel, ForestModel>;

// Builds a model from a JSON parameter object (logreg: {"l2": ...};
// forest: {"n_trees", "max_depth" (null = unlimited), "min_leaf", "mtry",
// "bootstrap"}). Unknown keys are rejected.
FittedModel fit_model(ModelKind kind, const nlohmann::json& params,
                      const MatrixView& X, const std::vector<int>& y,
                      std::uint64_t seed);

double predict_model(const FittedModel& model, const double* x, std::size_t d);

enum class SelectionObjective { auroc, auprc };

// Deterministic stratified fold assignment: per class, indices are
// shuffled by the seed and dealt round-robin, so per-fold class counts
// differ from the global split by at most one sample.
std::vector<int> stratified_folds(const std::vector<int>& y, int k, std::uint64_t seed);

struct GridSearchResult {
    std::size_t best_index = 0;
    nlohmann::json best_params;
    // fold_scores[candidate][fold]; absent when the fold could not be
    // scored (single-class training part or held-out part).
    std::vector<std::vector<std::optional<double>>> fold_scores;
    std::vector<std::optional<double>> mean_scores;
    std::vector<double> oof_scores;    // one out-of-fold score per row
    std::vector<int> fold_assignment;  // row -> inner fold
};

// Inner k-fold model selection: the winner maximizes the mean objective
// over scoreable folds (ties keep the earliest grid position); out-of-fold
// scores are regenerated for the winner over the same folds and seeds.
GridSearchResult grid_search_cv(const MatrixView& X, const std::vector<int>& y,
                                ModelKind kind, const std::vector<nlohmann::json>& grid,
                                int k, std::uint64_t seed,
                                SelectionObjective objective = SelectionObjective::auroc);

} // namespace uqkit
