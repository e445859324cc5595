#include "uqkit/calibrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uqkit/errors.hpp"

namespace uqkit {

namespace {

double softplus(double z) {
    if (z > 35.0) return z;
    if (z < -35.0) return std::exp(z);
    return std::log1p(std::exp(z));
}

// Penalized NLL of p(y=1|f) = 1/(1+exp(a+bf)) with targets t in [0,1].
// Per point: -t*log(q) - (1-t)*log(1-q) = softplus(z) - (1-t)*z, z = a+bf.
double platt_objective(const std::vector<ScoreLabelPair>& pairs,
                       const std::vector<double>& targets,
                       double a, double b, double l2) {
    double nll = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double z = a + b * pairs[i].score;
        nll += softplus(z) - (1.0 - targets[i]) * z;
    }
    return nll + l2 * (a * a + b * b);
}

// q = 1/(1+exp(a+bf)); gradient of the penalized NLL is
// (sum(t-q)+2*l2*a, sum(f*(t-q))+2*l2*b).
struct PlattDerivs {
    double ga, gb;
    double haa, hab, hbb;
    double gnorm() const { return std::sqrt(ga * ga + gb * gb); }
};

PlattDerivs platt_derivs(const std::vector<ScoreLabelPair>& pairs,
                         const std::vector<double>& targets,
                         double a, double b, double l2) {
    PlattDerivs d{2.0 * l2 * a, 2.0 * l2 * b, 2.0 * l2, 0.0, 2.0 * l2};
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double f = pairs[i].score;
        const double z = a + b * f;
        const double q = 1.0 / (1.0 + std::exp(std::clamp(z, -500.0, 500.0)));
        const double w = std::max(q * (1.0 - q), 1e-16);
        d.ga += targets[i] - q;
        d.gb += f * (targets[i] - q);
        d.haa += w;
        d.hab += f * w;
        d.hbb += f * f * w;
    }
    return d;
}

} // namespace

PlattFit platt_fit(const std::vector<ScoreLabelPair>& pairs, const PlattOptions& opts) {
    validate_pairs(pairs);
    if (pairs.size() < 2) throw input_error("platt fit needs at least 2 pairs");
    std::size_t n_pos = 0;
    for (const auto& p : pairs) n_pos += static_cast<std::size_t>(p.label);
    const std::size_t n_neg = pairs.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw input_error("platt fit needs both classes present");
    }

    std::vector<double> targets(pairs.size());
    const double t_pos = opts.smooth_targets
        ? (static_cast<double>(n_pos) + 1.0) / (static_cast<double>(n_pos) + 2.0)
        : 1.0;
    const double t_neg = opts.smooth_targets
        ? 1.0 / (static_cast<double>(n_neg) + 2.0)
        : 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        targets[i] = pairs[i].label == 1 ? t_pos : t_neg;
    }

    double a = 0.0, b = -1.0;
    double obj = platt_objective(pairs, targets, a, b, opts.l2);
    PlattFit fit;
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        fit.iterations = iter + 1;
        const PlattDerivs d = platt_derivs(pairs, targets, a, b, opts.l2);
        const double gnorm = d.gnorm();
        if (gnorm <= opts.gradient_tol) {
            fit.converged = true;
            fit.params = {a, b};
            return fit;
        }
        // Newton step on the 2x2 system.
        const double det = d.haa * d.hbb - d.hab * d.hab;
        double da, db;
        if (det > 1e-300) {
            da = (d.hbb * d.ga - d.hab * d.gb) / det;
            db = (d.haa * d.gb - d.hab * d.ga) / det;
        } else {
            da = d.ga;
            db = d.gb;
        }
        // Full step first: near the optimum the objective's rounding noise
        // swamps the true decrease, but gradient contraction stays readable.
        {
            const double fa = a - da, fb = b - db;
            if (platt_derivs(pairs, targets, fa, fb, opts.l2).gnorm() <= 0.5 * gnorm) {
                a = fa;
                b = fb;
                obj = std::min(obj, platt_objective(pairs, targets, a, b, opts.l2));
                continue;
            }
        }
        const double noise = 4.0 * std::numeric_limits<double>::epsilon()
                             * (1.0 + std::abs(obj));
        double step = 1.0;
        double na = a, nb = b, nobj = obj;
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving) {
            na = a - step * da;
            nb = b - step * db;
            nobj = platt_objective(pairs, targets, na, nb, opts.l2);
            if (nobj <= obj + noise) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;            // no readable descent left
        if (na == a && nb == b) break;   // step underflowed, gradient frozen
        a = na;
        b = nb;
        obj = std::min(nobj, obj);
    }
    fit.converged = false;
    fit.params = {a, b};
    return fit;
}

double platt_apply(const PlattParams& params, double f) {
    const double z = params.a + params.b * f;
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

IsotonicModel pava_fit(const std::vector<ScoreLabelPair>& pairs) {
    validate_pairs(pairs);
    if (pairs.empty()) throw input_error("isotonic fit needs at least 1 pair");

    std::vector<ScoreLabelPair> sorted = pairs;
    std::sort(sorted.begin(), sorted.end(),
              [](const ScoreLabelPair& x, const ScoreLabelPair& y) {
                  return x.score < y.score;
              });

    // Pre-pool equal scores so knots end up strictly increasing.
    std::vector<double> scores, values, weights;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        double label_sum = 0.0;
        while (j < sorted.size() && sorted[j].score == sorted[i].score) {
            label_sum += sorted[j].label;
            ++j;
        }
        scores.push_back(sorted[i].score);
        values.push_back(label_sum / static_cast<double>(j - i));
        weights.push_back(static_cast<double>(j - i));
        i = j;
    }

    // Pool adjacent violators over blocks of consecutive knots.
    struct Block {
        double value;
        double weight;
        std::size_t last;   // index of the last knot in this block
    };
    std::vector<Block> blocks;
    blocks.reserve(scores.size());
    for (std::size_t k = 0; k < scores.size(); ++k) {
        blocks.push_back(Block{values[k], weights[k], k});
        while (blocks.size() >= 2 &&
               blocks[blocks.size() - 2].value > blocks.back().value) {
            const Block top = blocks.back();
            blocks.pop_back();
            Block& prev = blocks.back();
            prev.value = (prev.value * prev.weight + top.value * top.weight) /
                         (prev.weight + top.weight);
            prev.weight += top.weight;
            prev.last = top.last;
        }
    }

    IsotonicModel model;
    model.knot_scores = std::move(scores);
    model.knot_weights = std::move(weights);
    model.knot_values.resize(model.knot_scores.size());
    std::size_t first = 0;
    for (const Block& blk : blocks) {
        for (std::size_t k = first; k <= blk.last; ++k) {
            model.knot_values[k] = blk.value;
        }
        first = blk.last + 1;
    }
    return model;
}

double isotonic_predict(const IsotonicModel& model, double f) {
    if (model.knot_scores.empty()) throw input_error("empty isotonic model");
    // Greatest knot with score <= f; below the first knot, clamp.
    auto it = std::upper_bound(model.knot_scores.begin(), model.knot_scores.end(), f);
    if (it == model.knot_scores.begin()) return model.knot_values.front();
    const std::size_t idx = static_cast<std::size_t>(it - model.knot_scores.begin()) - 1;
    return model.knot_values[idx];
}

VennAbersOutput venn_abers_predict(const VennAbersModel& model, double f_test) {
    if (model.calibration_pairs.empty()) {
        throw input_error("venn-abers needs a nonempty calibration set");
    }
    std::vector<ScoreLabelPair> augmented = model.calibration_pairs;
    augmented.push_back(ScoreLabelPair{f_test, 1});
    const double p1 = isotonic_predict(pava_fit(augmented), f_test);
    augmented.back().label = 0;
    const double p0 = isotonic_predict(pava_fit(augmented), f_test);

    VennAbersOutput out;
    out.p0 = p0;
    out.p1 = p1;
    out.p = p1 / (1.0 - p0 + p1);
    return out;
}

} // namespace uqkit
