#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace eigencollide {

using Point = std::vector<double>;

// Per-axis regularity exponents H_1..H_N, each in (0,1). The derived
// exponent sum Q = sum_j 1/H_j drives every regime decision downstream.
struct HurstVector {
  std::vector<double> h;

  HurstVector() = default;
  explicit HurstVector(std::vector<double> values) : h(std::move(values)) {}
  static HurstVector isotropic(double value, std::size_t n) {
    return HurstVector(std::vector<double>(n, value));
  }

  std::size_t dims() const { return h.size(); }
  double exponent_sum() const;  // Q
  bool is_isotropic() const;
  void validate() const;
};

// Rectangular grid over I = [a, b], endpoints included, axis 0 slowest
// (row-major point enumeration). resolution[j] == 1 degenerates axis j to
// the single coordinate a_j.
struct GridSpec {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<std::size_t> resolution;
  // Dense covariance factorisation is O(n^3)/O(n^2); cap the grid size.
  std::size_t max_points = 4096;

  static GridSpec uniform(double lo, double hi, std::size_t points_per_axis,
                          std::size_t n_axes = 1);

  std::size_t dims() const { return a.size(); }
  std::size_t point_count() const;
  double spacing(std::size_t axis) const;
  Point point(std::size_t flat_index) const;
  std::vector<Point> points() const;
  void validate() const;
};

enum class KernelKind {
  isotropic_fbm,             // 1/2 (|s|^2H + |t|^2H - |s-t|^2H), Euclidean norms
  fractional_brownian_sheet  // product of per-axis 1D kernels with H_j
};

struct CovarianceKernel {
  KernelKind kind = KernelKind::isotropic_fbm;
  HurstVector hurst;

  static CovarianceKernel isotropic_fbm(double h, std::size_t n_axes = 1);
  static CovarianceKernel sheet(HurstVector h);

  void validate() const;
  // True if C(p,p) = 0 somewhere on the closure of the nonnegative orthant
  // boundary touching `grid`; used to reject intervals touching the zero set.
  void validate_interval(const GridSpec& grid) const;
};

double kernel_eval(const CovarianceKernel& kernel, std::span<const double> s,
                   std::span<const double> t);

// E[(xi(s)-xi(t))^2] = C(s,s)+C(t,t)-2C(s,t). The isotropic kernel gets the
// algebraically equal form |s-t|^{2H}, which avoids the cancellation that
// would otherwise drown small separations.
double increment_variance(const CovarianceKernel& kernel,
                          std::span<const double> s, std::span<const double> t);

// Empirical analogues of the variance floor, the two-sided increment bounds
// and the conditional-variance floor over stratified point pairs. All four
// must be strictly positive and finite for the kernel/interval combination
// to be usable.
struct StructureReport {
  double c1 = 0;  // min_t C(t,t)
  double c2 = 0;  // min increment-variance ratio
  double c3 = 0;  // max increment-variance ratio
  double c4 = 0;  // min conditional-variance ratio
  std::size_t pairs = 0;
  bool passed = false;
};

StructureReport structure_check(const CovarianceKernel& kernel,
                                const GridSpec& grid, std::size_t pair_budget);

}  // namespace eigencollide
