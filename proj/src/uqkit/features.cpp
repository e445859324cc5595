#include "uqkit/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uqkit/errors.hpp"

namespace uqkit {

std::vector<double> FeatureMatrix::column(std::size_t col) const {
    std::vector<double> out(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) out[r] = at(r, col);
    return out;
}

void minmax_fit_transform(FeatureMatrix& m) {
    const std::size_t d = m.n_cols();
    if (m.n_rows == 0 || d == 0) throw input_error("cannot scale an empty matrix");
    if (m.values.size() != m.n_rows * d) throw input_error("feature matrix size mismatch");
    for (double v : m.values) {
        if (!std::isfinite(v)) throw input_error("feature matrix contains non-finite values");
    }

    ScaleParams params;
    params.min.resize(d);
    params.max.resize(d);
    for (std::size_t c = 0; c < d; ++c) {
        double lo = m.at(0, c), hi = m.at(0, c);
        for (std::size_t r = 1; r < m.n_rows; ++r) {
            lo = std::min(lo, m.at(r, c));
            hi = std::max(hi, m.at(r, c));
        }
        params.min[c] = lo;
        params.max[c] = hi;
    }
    m.scale_params = params;
    minmax_apply(params, m);
}

double minmax_apply(const ScaleParams& params, std::size_t col, double value) {
    const double lo = params.min[col];
    const double hi = params.max[col];
    if (hi == lo) return 0.0;   // degenerate column rule
    const double scaled = (value - lo) / (hi - lo);
    return std::clamp(scaled, 0.0, 1.0);
}

void minmax_apply(const ScaleParams& params, FeatureMatrix& m) {
    const std::size_t d = m.n_cols();
    if (params.min.size() != d) throw input_error("scale params do not match column count");
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            m.values[r * d + c] = minmax_apply(params, c, m.at(r, c));
        }
    }
}

std::vector<double> average_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

std::optional<double> spearman_rho(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) throw input_error("spearman inputs differ in length");
    if (u.size() < 2) throw input_error("spearman needs at least 2 observations");

    const auto ra = average_ranks(u);
    const auto rb = average_ranks(v);
    const double n = static_cast<double>(u.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double da = ra[i] - ma;
        const double db = rb[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return std::nullopt;   // constant input
    return sab / std::sqrt(saa * sbb);
}

PruneResult correlation_prune(const FeatureMatrix& m, double threshold) {
    const std::size_t d = m.n_cols();
    if (d == 0) throw input_error("cannot prune an empty matrix");
    if (!(threshold >= 0.0)) throw input_error("prune threshold must be >= 0");

    PruneResult result;
    if (d == 1) {
        result.kept = {0};
        return result;
    }

    // Pairwise |rho| is fixed under column removal, so compute it once.
    // Undefined correlations (constant columns) act as zero and never
    // trigger a drop.
    std::vector<std::vector<double>> columns(d);
    for (std::size_t c = 0; c < d; ++c) columns[c] = m.column(c);
    std::vector<double> abs_rho(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            const auto rho = spearman_rho(columns[i], columns[j]);
            const double a = rho ? std::abs(*rho) : 0.0;
            abs_rho[i * d + j] = a;
            abs_rho[j * d + i] = a;
        }
    }

    std::vector<bool> alive(d, true);
    std::size_t n_alive = d;
    while (n_alive > 1) {
        // Worst surviving pair; ties resolve to the lexicographically
        // smallest (i,j) so the procedure is deterministic.
        double worst = threshold;
        std::size_t wi = d, wj = d;
        for (std::size_t i = 0; i < d; ++i) {
            if (!alive[i]) continue;
            for (std::size_t j = i + 1; j < d; ++j) {
                if (!alive[j]) continue;
                if (abs_rho[i * d + j] > worst) {
                    worst = abs_rho[i * d + j];
                    wi = i;
                    wj = j;
                }
            }
        }
        if (wi == d) break;   // all pairs within threshold

        auto mean_abs_rho = [&](std::size_t c) {
            double sum = 0.0;
            std::size_t cnt = 0;
            for (std::size_t o = 0; o < d; ++o) {
                if (!alive[o] || o == c) continue;
                sum += abs_rho[c * d + o];
                ++cnt;
            }
            return cnt ? sum / static_cast<double>(cnt) : 0.0;
        };
        const double mi = mean_abs_rho(wi);
        const double mj = mean_abs_rho(wj);
        // Drop the member more correlated with the rest; on a tie keep the
        // lower index.
        const std::size_t drop = (mj > mi) ? wj : (mi > mj ? wi : wj);
        const std::size_t keep = (drop == wi) ? wj : wi;
        alive[drop] = false;
        --n_alive;
        result.dropped.push_back(PruneDrop{drop, m.names[drop], worst, m.names[keep]});
    }

    for (std::size_t c = 0; c < d; ++c) {
        if (alive[c]) result.kept.push_back(c);
    }
    return result;
}

} // namespace uqkit
