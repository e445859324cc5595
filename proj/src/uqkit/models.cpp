#include "uqkit/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uqkit/errors.hpp"
#include "uqkit/metrics.hpp"
#include "uqkit/rng.hpp"

namespace uqkit {

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "logreg" || name == "lr") return ModelKind::logreg;
    if (name == "forest" || name == "rf") return ModelKind::forest;
    throw input_error("unknown model kind '" + name + "' (expected logreg or forest)");
}

const char* model_kind_name(ModelKind kind) {
    return kind == ModelKind::logreg ? "logreg" : "forest";
}

namespace {

double sigmoid(double z) {
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// In-place Cholesky solve of a symmetric positive definite system.
// Returns false when the factorization breaks down.
bool solve_spd(std::vector<double> a, std::vector<double> rhs,
               std::size_t n, std::vector<double>& out) {
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
        if (!(diag > 1e-300)) return false;
        diag = std::sqrt(diag);
        a[j * n + j] = diag;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = v / diag;
        }
    }
    // Forward then backward substitution.
    for (std::size_t i = 0; i < n; ++i) {
        double v = rhs[i];
        for (std::size_t k = 0; k < i; ++k) v -= a[i * n + k] * rhs[k];
        rhs[i] = v / a[i * n + i];
    }
    for (std::size_t ii = n; ii > 0; --ii) {
        const std::size_t i = ii - 1;
        double v = rhs[i];
        for (std::size_t k = i + 1; k < n; ++k) v -= a[k * n + i] * rhs[k];
        rhs[i] = v / a[i * n + i];
    }
    out = std::move(rhs);
    return true;
}

double logreg_objective(const MatrixView& X, const std::vector<int>& y,
                        const std::vector<double>& w, double intercept, double l2) {
    double nll = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
        double z = intercept;
        for (std::size_t j = 0; j < X.cols; ++j) z += w[j] * X.at(i, j);
        // -log p(y|z) = softplus(z) - y*z
        const double sp = z > 35.0 ? z : (z < -35.0 ? std::exp(z) : std::log1p(std::exp(z)));
        nll += sp - static_cast<double>(y[i]) * z;
    }
    double penalty = 0.0;
    for (double v : w) penalty += v * v;
    return nll + 0.5 * l2 * penalty;
}

} // namespace

LogRegModel logreg_fit(const MatrixView& X, const std::vector<int>& y, double l2) {
    if (X.rows != y.size()) throw input_error("feature rows and labels differ in length");
    if (X.rows < 2) throw input_error("logistic regression needs at least 2 samples");
    if (l2 < 0.0 || !std::isfinite(l2)) throw input_error("l2 must be finite and >= 0");
    std::size_t n_pos = 0;
    for (int v : y) {
        if (v != 0 && v != 1) throw input_error("labels must be 0 or 1");
        n_pos += static_cast<std::size_t>(v);
    }
    if (n_pos == 0 || n_pos == y.size()) {
        throw input_error("logistic regression needs both classes present");
    }

    const std::size_t d = X.cols;
    const std::size_t m = d + 1;   // theta = (intercept, weights)
    LogRegModel model;
    model.weights.assign(d, 0.0);
    model.l2 = l2;

    // Fixed fallback rate sized for 0-1 features: inverse of a bound on
    // the gradient's Lipschitz constant.
    const double fixed_rate =
        1.0 / (0.25 * static_cast<double>(X.rows) * static_cast<double>(m) + l2 + 1.0);

    double obj = logreg_objective(X, y, model.weights, model.intercept, l2);
    std::vector<double> grad(m), hess(m * m), step(m), probs(X.rows);
    std::vector<double> probe_w(d), probe_grad(m), probe_probs(X.rows);
    auto eval_gradient = [&](const std::vector<double>& w, double b,
                             std::vector<double>& g, std::vector<double>& p) {
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t i = 0; i < X.rows; ++i) {
            double z = b;
            for (std::size_t j = 0; j < d; ++j) z += w[j] * X.at(i, j);
            p[i] = sigmoid(z);
            const double r = p[i] - static_cast<double>(y[i]);
            g[0] += r;
            for (std::size_t j = 0; j < d; ++j) g[1 + j] += r * X.at(i, j);
        }
        for (std::size_t j = 0; j < d; ++j) g[1 + j] += l2 * w[j];
        double s = 0.0;
        for (double v : g) s += v * v;
        return std::sqrt(s);
    };
    model.converged = false;
    for (int iter = 0; iter < 100; ++iter) {
        const double gnorm = eval_gradient(model.weights, model.intercept, grad, probs);
        if (gnorm <= 1e-8) {
            model.converged = true;
            break;
        }
        std::fill(hess.begin(), hess.end(), 0.0);

        for (std::size_t i = 0; i < X.rows; ++i) {
            const double wgt = std::max(probs[i] * (1.0 - probs[i]), 1e-12);
            hess[0] += wgt;
            for (std::size_t j = 0; j < d; ++j) {
                const double xj = X.at(i, j);
                hess[(1 + j) * m] += wgt * xj;
                for (std::size_t k = 0; k <= j; ++k) {
                    hess[(1 + j) * m + (1 + k)] += wgt * xj * X.at(i, k);
                }
            }
        }
        // Mirror the lower triangle and add the penalty diagonal.
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t k = 0; k < j; ++k) hess[k * m + j] = hess[j * m + k];
        }
        for (std::size_t j = 1; j < m; ++j) hess[j * m + j] += l2;

        bool newton_ok = solve_spd(hess, grad, m, step);
        if (!newton_ok) {
            model.gradient_fallback = true;
            for (std::size_t j = 0; j < m; ++j) step[j] = fixed_rate * grad[j];
        }

        // Full step first: near the optimum the objective's rounding noise
        // hides the true decrease, but gradient contraction stays readable.
        if (newton_ok) {
            const double probe_b = model.intercept - step[0];
            for (std::size_t j = 0; j < d; ++j) {
                probe_w[j] = model.weights[j] - step[1 + j];
            }
            if (eval_gradient(probe_w, probe_b, probe_grad, probe_probs) <= 0.5 * gnorm) {
                model.intercept = probe_b;
                model.weights = probe_w;
                obj = std::min(obj, logreg_objective(X, y, model.weights,
                                                     model.intercept, l2));
                continue;
            }
        }

        double scale = 1.0;
        double next_obj = obj;
        std::vector<double> next_w = model.weights;
        double next_b = model.intercept;
        for (int halving = 0; halving < 60; ++halving) {
            next_b = model.intercept - scale * step[0];
            for (std::size_t j = 0; j < d; ++j) {
                next_w[j] = model.weights[j] - scale * step[1 + j];
            }
            next_obj = logreg_objective(X, y, next_w, next_b, l2);
            if (next_obj <= obj) break;
            scale *= 0.5;
        }
        if (next_obj > obj) break;
        model.intercept = next_b;
        model.weights = std::move(next_w);
        obj = next_obj;
    }
    return model;
}

double logreg_predict(const LogRegModel& model, const double* x, std::size_t d) {
    if (d != model.weights.size()) throw input_error("feature dimension mismatch");
    double z = model.intercept;
    for (std::size_t j = 0; j < d; ++j) z += model.weights[j] * x[j];
    return sigmoid(z);
}

namespace {

double gini(std::size_t pos, std::size_t total) {
    if (total == 0) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
}

struct TreeBuilder {
    const MatrixView& X;
    const std::vector<int>& y;
    const ForestParams& params;
    std::size_t mtry;
    Rng& rng;
    DecisionTree tree;

    int build(std::vector<std::size_t>& rows, int depth) {
        std::size_t pos = 0;
        for (std::size_t r : rows) pos += static_cast<std::size_t>(y[r]);

        const bool pure = pos == 0 || pos == rows.size();
        const bool depth_stop = params.max_depth >= 0 && depth >= params.max_depth;
        const bool size_stop = rows.size() < 2 * static_cast<std::size_t>(params.min_leaf);
        int best_feature = -1;
        double best_threshold = 0.0;
        double best_impurity = 0.0;
        if (!pure && !depth_stop && !size_stop && X.cols > 0) {
            find_split(rows, pos, best_feature, best_threshold, best_impurity);
        }

        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        if (best_feature < 0) {
            TreeNode& leaf = tree.nodes[node_id];
            leaf.leaf_fraction = static_cast<double>(pos) / static_cast<double>(rows.size());
            leaf.count = rows.size();
            return node_id;
        }

        std::vector<std::size_t> left, right;
        left.reserve(rows.size());
        right.reserve(rows.size());
        for (std::size_t r : rows) {
            (X.at(r, best_feature) < best_threshold ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        tree.nodes[node_id].feature = best_feature;
        tree.nodes[node_id].threshold = best_threshold;
        const int left_id = build(left, depth + 1);
        tree.nodes[node_id].left = left_id;
        const int right_id = build(right, depth + 1);
        tree.nodes[node_id].right = right_id;
        return node_id;
    }

    // Greedy Gini split over mtry randomly drawn features; thresholds are
    // midpoints between consecutive distinct sorted values. Deterministic
    // for a fixed rng state: candidate features in draw order, thresholds
    // ascending, strict improvement only.
    void find_split(const std::vector<std::size_t>& rows, std::size_t pos,
                    int& best_feature, double& best_threshold, double& best_impurity) {
        std::vector<std::size_t> features(X.cols);
        std::iota(features.begin(), features.end(), 0);
        for (std::size_t i = 0; i < mtry; ++i) {
            const std::size_t j = i + rng.index(features.size() - i);
            std::swap(features[i], features[j]);
        }

        const double n = static_cast<double>(rows.size());
        best_impurity = gini(pos, rows.size());
        best_feature = -1;

        std::vector<std::pair<double, int>> column(rows.size());
        for (std::size_t fi = 0; fi < mtry; ++fi) {
            const std::size_t f = features[fi];
            for (std::size_t i = 0; i < rows.size(); ++i) {
                column[i] = {X.at(rows[i], f), y[rows[i]]};
            }
            std::sort(column.begin(), column.end());

            std::size_t left_n = 0, left_pos = 0;
            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                ++left_n;
                left_pos += static_cast<std::size_t>(column[i].second);
                if (column[i].first == column[i + 1].first) continue;
                const std::size_t right_n = column.size() - left_n;
                if (left_n < static_cast<std::size_t>(params.min_leaf) ||
                    right_n < static_cast<std::size_t>(params.min_leaf)) {
                    continue;
                }
                const std::size_t right_pos = pos - left_pos;
                const double impurity =
                    (static_cast<double>(left_n) * gini(left_pos, left_n) +
                     static_cast<double>(right_n) * gini(right_pos, right_n)) / n;
                if (impurity < best_impurity - 1e-15) {
                    best_impurity = impurity;
                    best_feature = static_cast<int>(f);
                    best_threshold = 0.5 * (column[i].first + column[i + 1].first);
                }
            }
        }
    }
};

} // namespace

ForestModel rf_fit(const MatrixView& X, const std::vector<int>& y,
                   const ForestParams& params, std::uint64_t seed) {
    if (X.rows != y.size()) throw input_error("feature rows and labels differ in length");
    if (X.rows < 2) throw input_error("random forest needs at least 2 samples");
    if (params.n_trees < 1) throw input_error("n_trees must be >= 1");
    if (params.min_leaf < 1) throw input_error("min_leaf must be >= 1");
    if (params.max_depth < -1) throw input_error("max_depth must be -1 (unlimited) or >= 0");
    if (params.mtry < 0 || params.mtry > static_cast<int>(X.cols)) {
        throw input_error("mtry must lie in [0, n_features]");
    }
    for (int v : y) {
        if (v != 0 && v != 1) throw input_error("labels must be 0 or 1");
    }

    std::size_t mtry = params.mtry > 0
        ? static_cast<std::size_t>(params.mtry)
        : static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(X.cols))));
    mtry = std::clamp<std::size_t>(mtry, X.cols > 0 ? 1 : 0, X.cols);

    ForestModel model;
    model.params = params;
    model.seed = seed;
    model.n_features = X.cols;
    model.trees.reserve(static_cast<std::size_t>(params.n_trees));
    for (int t = 0; t < params.n_trees; ++t) {
        Rng rng(seed + static_cast<std::uint64_t>(t));
        std::vector<std::size_t> rows(X.rows);
        if (params.bootstrap) {
            for (std::size_t i = 0; i < X.rows; ++i) rows[i] = rng.index(X.rows);
        } else {
            std::iota(rows.begin(), rows.end(), 0);
        }
        TreeBuilder builder{X, y, params, mtry, rng, {}};
        builder.build(rows, 0);
        model.trees.push_back(std::move(builder.tree));
    }
    return model;
}

double rf_predict(const ForestModel& model, const double* x, std::size_t d) {
    if (d != model.n_features) throw input_error("feature dimension mismatch");
    double sum = 0.0;
    for (const DecisionTree& tree : model.trees) {
        int node = 0;
        while (tree.nodes[node].feature >= 0) {
            const TreeNode& nd = tree.nodes[node];
            node = x[nd.feature] < nd.threshold ? nd.left : nd.right;
        }
        sum += tree.nodes[node].leaf_fraction;
    }
    return sum / static_cast<double>(model.trees.size());
}

namespace {

double require_number(const nlohmann::json& params, const char* key, double fallback) {
    if (!params.contains(key)) return fallback;
    const auto& v = params.at(key);
    if (!v.is_number()) throw input_error(std::string("parameter '") + key + "' must be numeric");
    return v.get<double>();
}

void reject_unknown_keys(const nlohmann::json& params,
                         std::initializer_list<const char*> known) {
    for (const auto& item : params.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (item.key() == k) {
                ok = true;
                break;
            }
        }
        if (!ok) throw input_error("unknown model parameter '" + item.key() + "'");
    }
}

} // namespace

FittedModel fit_model(ModelKind kind, const nlohmann::json& params,
                      const MatrixView& X, const std::vector<int>& y,
                      std::uint64_t seed) {
    if (!params.is_object()) throw input_error("model parameters must be a JSON object");
    if (kind == ModelKind::logreg) {
        reject_unknown_keys(params, {"l2"});
        return logreg_fit(X, y, require_number(params, "l2", 0.0));
    }
    reject_unknown_keys(params, {"n_trees", "max_depth", "min_leaf", "mtry", "bootstrap"});
    ForestParams fp;
    fp.n_trees = static_cast<int>(require_number(params, "n_trees", fp.n_trees));
    if (params.contains("max_depth")) {
        fp.max_depth = params.at("max_depth").is_null()
            ? -1
            : static_cast<int>(params.at("max_depth").get<double>());
    }
    fp.min_leaf = static_cast<int>(require_number(params, "min_leaf", fp.min_leaf));
    fp.mtry = static_cast<int>(require_number(params, "mtry", fp.mtry));
    if (params.contains("bootstrap")) {
        if (!params.at("bootstrap").is_boolean()) {
            throw input_error("parameter 'bootstrap' must be boolean");
        }
        fp.bootstrap = params.at("bootstrap").get<bool>();
    }
    return rf_fit(X, y, fp, seed);
}

double predict_model(const FittedModel& model, const double* x, std::size_t d) {
    if (std::holds_alternative<ConstantModel>(model)) {
        return std::get<ConstantModel>(model).value;
    }
    if (std::holds_alternative<LogRegModel>(model)) {
        return logreg_predict(std::get<LogRegModel>(model), x, d);
    }
    return rf_predict(std::get<ForestModel>(model), x, d);
}

std::vector<int> stratified_folds(const std::vector<int>& y, int k, std::uint64_t seed) {
    if (k < 2) throw input_error("fold count must be >= 2");
    if (y.size() < static_cast<std::size_t>(k)) {
        throw input_error("need at least k samples for k folds");
    }
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < y.size(); ++i) {
        (y[i] == 1 ? pos : neg).push_back(i);
    }
    Rng rng(seed);
    rng.shuffle(pos);
    rng.shuffle(neg);
    std::vector<int> folds(y.size(), 0);
    for (std::size_t j = 0; j < pos.size(); ++j) folds[pos[j]] = static_cast<int>(j % k);
    for (std::size_t j = 0; j < neg.size(); ++j) folds[neg[j]] = static_cast<int>(j % k);
    return folds;
}

GridSearchResult grid_search_cv(const MatrixView& X, const std::vector<int>& y,
                                ModelKind kind, const std::vector<nlohmann::json>& grid,
                                int k, std::uint64_t seed,
                                SelectionObjective objective) {
    if (grid.empty()) throw input_error("hyperparameter grid is empty");
    GridSearchResult result;
    result.fold_assignment = stratified_folds(y, k, seed);
    result.fold_scores.assign(grid.size(), {});
    result.mean_scores.assign(grid.size(), std::nullopt);

    auto cell_seed = [&](std::size_t candidate, int fold) {
        return mix_seed(seed, 1 + candidate * static_cast<std::size_t>(k) +
                                  static_cast<std::size_t>(fold));
    };

    // Materializes one fold's training block and held-out rows.
    auto run_fold = [&](std::size_t candidate, int fold,
                        std::vector<double>& held_scores,
                        std::vector<int>& held_labels,
                        std::vector<std::size_t>& held_rows) -> bool {
        std::vector<double> train_x;
        std::vector<int> train_y;
        held_scores.clear();
        held_labels.clear();
        held_rows.clear();
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (result.fold_assignment[i] == fold) {
                held_rows.push_back(i);
            } else {
                train_x.insert(train_x.end(), X.row(i), X.row(i) + X.cols);
                train_y.push_back(y[i]);
            }
        }
        if (held_rows.empty() || train_y.empty()) return false;
        const MatrixView train_view{train_x.data(), train_y.size(), X.cols};

        FittedModel model;
        try {
            model = fit_model(kind, grid[candidate], train_view, train_y,
                              cell_seed(candidate, fold));
        } catch (const input_error&) {
            // Single-class training part: score with the class rate so the
            // out-of-fold pass still covers every row.
            double rate = 0.0;
            for (int v : train_y) rate += v;
            model = ConstantModel{rate / static_cast<double>(train_y.size())};
        }
        for (std::size_t r : held_rows) {
            held_scores.push_back(predict_model(model, X.row(r), X.cols));
            held_labels.push_back(y[r]);
        }
        return true;
    };

    std::vector<double> held_scores;
    std::vector<int> held_labels;
    std::vector<std::size_t> held_rows;
    bool any_eligible = false;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        result.fold_scores[c].assign(static_cast<std::size_t>(k), std::nullopt);
        double sum = 0.0;
        std::size_t defined = 0;
        for (int f = 0; f < k; ++f) {
            if (!run_fold(c, f, held_scores, held_labels, held_rows)) continue;
            const auto score = objective == SelectionObjective::auroc
                ? auroc(held_scores, held_labels)
                : auprc(held_scores, held_labels);
            result.fold_scores[c][static_cast<std::size_t>(f)] = score;
            if (score) {
                sum += *score;
                ++defined;
            }
        }
        if (defined > 0) {
            result.mean_scores[c] = sum / static_cast<double>(defined);
            any_eligible = true;
        }
    }
    if (!any_eligible) {
        throw input_error("no grid candidate could be scored on any inner fold");
    }

    std::size_t best = 0;
    double best_mean = -1.0;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        if (result.mean_scores[c] && *result.mean_scores[c] > best_mean) {
            best_mean = *result.mean_scores[c];
            best = c;
        }
    }
    result.best_index = best;
    result.best_params = grid[best];

    // Regenerate out-of-fold scores for the winner with the same per-cell
    // seeds as the evaluation pass.
    result.oof_scores.assign(y.size(), 0.0);
    for (int f = 0; f < k; ++f) {
        if (!run_fold(best, f, held_scores, held_labels, held_rows)) continue;
        for (std::size_t idx = 0; idx < held_rows.size(); ++idx) {
            result.oof_scores[held_rows[idx]] = held_scores[idx];
        }
    }
    return result;
}

} // namespace uqkit
