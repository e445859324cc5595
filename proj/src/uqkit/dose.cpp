#include "uqkit/dose.hpp"

#include <cmath>

#include "uqkit/errors.hpp"

namespace uqkit {

namespace {

std::vector<double> masked_values(const std::vector<double>& voxels,
                                  const std::vector<bool>& mask) {
    if (voxels.size() != mask.size()) {
        throw input_error("voxel and mask lengths differ");
    }
    std::vector<double> out;
    out.reserve(voxels.size());
    for (std::size_t i = 0; i < voxels.size(); ++i) {
        if (mask[i]) out.push_back(voxels[i]);
    }
    if (out.empty()) throw input_error("mask selects no voxels");
    return out;
}

} // namespace

void validate_grid(const DoseGrid& grid) {
    if (grid.voxels.size() != grid.mask.size()) {
        throw input_error("voxel and mask lengths differ");
    }
    if (grid.n_fractions < 1) throw input_error("n_fractions must be >= 1");
    if (!(grid.alpha_beta > 0.0) || !std::isfinite(grid.alpha_beta)) {
        throw input_error("alpha_beta must be > 0");
    }
    for (double v : grid.voxels) {
        if (!std::isfinite(v) || v < 0.0) {
            throw input_error("doses must be finite and >= 0");
        }
    }
}

std::vector<double> eqd2_transform(const DoseGrid& grid) {
    validate_grid(grid);
    const double ab = grid.alpha_beta;
    const double n = static_cast<double>(grid.n_fractions);
    const double denom = 1.0 + 2.0 / ab;
    std::vector<double> out(grid.voxels.size());
    for (std::size_t k = 0; k < grid.voxels.size(); ++k) {
        const double d = grid.voxels[k] / n;   // per-fraction dose
        out[k] = n * (d + d * d / ab) / denom;
    }
    return out;
}

double mean_dose(const std::vector<double>& voxels, const std::vector<bool>& mask) {
    const auto vals = masked_values(voxels, mask);
    double sum = 0.0;
    for (double v : vals) sum += v;
    return sum / static_cast<double>(vals.size());
}

double v_x(const std::vector<double>& voxels, const std::vector<bool>& mask, double x) {
    if (!(x >= 0.0)) throw input_error("dose threshold must be >= 0");
    const auto vals = masked_values(voxels, mask);
    std::size_t above = 0;
    for (double v : vals) {
        if (v >= x) ++above;
    }
    return 100.0 * static_cast<double>(above) / static_cast<double>(vals.size());
}

double geud(const std::vector<double>& voxels, const std::vector<bool>& mask, double a) {
    if (a == 0.0 || !std::isfinite(a)) throw input_error("gEUD parameter a must be nonzero");
    const auto vals = masked_values(voxels, mask);
    if (a < 0.0) {
        for (double v : vals) {
            if (v <= 0.0) throw input_error("gEUD with a < 0 requires strictly positive doses");
        }
    }
    double acc = 0.0;
    for (double v : vals) acc += std::pow(v, a);
    acc /= static_cast<double>(vals.size());
    return std::pow(acc, 1.0 / a);
}

} // namespace uqkit
