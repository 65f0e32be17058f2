#pragma once

#include <cstddef>
#include <vector>

#include "eigencollide/kernels.hpp"

namespace eigencollide {

// Theoretical Hausdorff dimension of the k-collision time set in the
// supercritical regime. `value` is the minimum of the per-ell terms and
// must coincide with the term at the crossing index ell0.
struct DimFormulaResult {
  double value = 0.0;
  int ell0 = 0;                     // 1-based, smallest ell with partial Q > codim
  std::vector<double> terms;        // one per ell = 1..N
};

DimFormulaResult theoretical_dim(const HurstVector& hurst, int k, int beta);

// Times flagged as epsilon-collision cells, with the cell extent they were
// certified at.
struct TimeSet {
  std::vector<Point> points;
  double cell_size = 0.0;
};

struct BoxCountResult {
  double slope = 0.0;       // box-dimension estimate
  double intercept = 0.0;
  double max_residual = 0.0;
  double r_squared = 0.0;
  std::vector<std::size_t> occupied;  // per scale
};

// Least-squares slope of log(occupied boxes) against log(1/scale).
BoxCountResult box_dimension(const TimeSet& ts, const std::vector<double>& scales);

// Same regression on externally produced occupancy counts (for example the
// resolution-matched collision-cell ladder aggregated over replicates).
BoxCountResult fit_box_counts(const std::vector<double>& scales,
                              const std::vector<double>& counts);

// Discrete Bessel-Riesz pair energy: mean of f_q over ordered distinct
// pairs, with f_q(r) = r^-q (q>0), ln(e/min(r,1)) (q=0), 1 (q<0).
struct RieszEnergy {
  double value = 0.0;
  bool diverged = false;  // coincident points with q >= 0
};

RieszEnergy riesz_energy(const std::vector<Point>& points, double q);
RieszEnergy riesz_energy(const std::vector<double>& points, double q);

}  // namespace eigencollide
