#pragma once

#include <cstddef>
#include <vector>

namespace uqkit {

// Voxelized total physical dose with a region-of-interest mask. Fractions
// are assumed uniform: each voxel received total/n_fractions per fraction.
struct DoseGrid {
    std::vector<double> voxels;   // total dose per voxel, Gy
    std::vector<bool> mask;       // ROI membership, same length
    int n_fractions = 1;
    double alpha_beta = 3.0;      // Gy
};

void validate_grid(const DoseGrid& grid);

// Per-voxel equivalent dose in 2 Gy fractions under the linear-quadratic
// model. For uniform fractionation with per-fraction dose d = total/N:
//   EQD2 = N * (d + d^2/(a/b)) / (1 + 2/(a/b))
// Zero dose maps to zero; 2 Gy in one fraction is the fixed point.
std::vector<double> eqd2_transform(const DoseGrid& grid);

// Arithmetic mean over masked voxels.
double mean_dose(const std::vector<double>& voxels, const std::vector<bool>& mask);

// Percent of masked voxels with dose >= x (boundary inclusive).
double v_x(const std::vector<double>& voxels, const std::vector<bool>& mask, double x);

// Generalized equivalent uniform dose: (mean of dose^a)^(1/a), a != 0.
// Negative a requires strictly positive doses.
double geud(const std::vector<double>& voxels, const std::vector<bool>& mask, double a);

} // namespace uqkit
