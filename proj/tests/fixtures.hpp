#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "eigencollide/rng.hpp"

namespace fixtures {

inline Eigen::MatrixXd random_symmetric(int d, eigencollide::RandomStream& rng,
                                        double scale = 1.0) {
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const double v = scale * rng.normal();
      m(i, j) = v;
      m(j, i) = v;
    }
  return m;
}

inline Eigen::MatrixXcd random_hermitian(int d, eigencollide::RandomStream& rng,
                                         double scale = 1.0) {
  Eigen::MatrixXcd m(d, d);
  for (int i = 0; i < d; ++i) {
    m(i, i) = scale * rng.normal();
    for (int j = i + 1; j < d; ++j) {
      const std::complex<double> v(scale * rng.normal(), scale * rng.normal());
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
  }
  return m;
}

// Midpoints of the 2^level intervals of the middle-thirds construction.
// Midpoints never sit on a box edge at any 3^-j scale, so occupancy counts
// are exactly 2^j for j <= level.
inline std::vector<double> cantor_midpoints(int level) {
  std::vector<std::pair<double, double>> intervals{{0.0, 1.0}};
  for (int l = 0; l < level; ++l) {
    std::vector<std::pair<double, double>> next;
    next.reserve(intervals.size() * 2);
    for (auto [lo, hi] : intervals) {
      const double third = (hi - lo) / 3.0;
      next.emplace_back(lo, lo + third);
      next.emplace_back(hi - third, hi);
    }
    intervals.swap(next);
  }
  std::vector<double> mids;
  mids.reserve(intervals.size());
  for (auto [lo, hi] : intervals) mids.push_back(0.5 * (lo + hi));
  return mids;
}

}  // namespace fixtures
