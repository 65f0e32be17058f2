#include "eigencollide/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eigencollide/errors.hpp"

namespace eigencollide {

double HurstVector::exponent_sum() const {
  double q = 0;
  for (double v : h) q += 1.0 / v;
  return q;
}

bool HurstVector::is_isotropic() const {
  for (double v : h)
    if (v != h.front()) return false;
  return !h.empty();
}

void HurstVector::validate() const {
  if (h.empty()) throw config_error("HurstVector: needs at least one component");
  for (double v : h) {
    if (!(v > 0.0 && v < 1.0))
      throw config_error("HurstVector: components must lie in (0,1)");
  }
  if (!std::isfinite(exponent_sum()))
    throw config_error("HurstVector: exponent sum not finite");
}

GridSpec GridSpec::uniform(double lo, double hi, std::size_t points_per_axis,
                           std::size_t n_axes) {
  GridSpec g;
  g.a.assign(n_axes, lo);
  g.b.assign(n_axes, hi);
  g.resolution.assign(n_axes, points_per_axis);
  return g;
}

std::size_t GridSpec::point_count() const {
  std::size_t n = 1;
  for (std::size_t r : resolution) n *= r;
  return n;
}

double GridSpec::spacing(std::size_t axis) const {
  if (resolution[axis] < 2) return 0.0;
  return (b[axis] - a[axis]) / static_cast<double>(resolution[axis] - 1);
}

Point GridSpec::point(std::size_t flat_index) const {
  const std::size_t n = dims();
  Point p(n);
  for (std::size_t j = n; j-- > 0;) {
    const std::size_t r = resolution[j];
    const std::size_t i = flat_index % r;
    flat_index /= r;
    p[j] = (r < 2) ? a[j] : a[j] + static_cast<double>(i) * spacing(j);
  }
  return p;
}

std::vector<Point> GridSpec::points() const {
  const std::size_t n = point_count();
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(point(i));
  return out;
}

void GridSpec::validate() const {
  const std::size_t n = dims();
  if (n == 0) throw config_error("GridSpec: empty");
  if (b.size() != n || resolution.size() != n)
    throw config_error("GridSpec: a, b, resolution must have equal length");
  for (std::size_t j = 0; j < n; ++j) {
    if (!(a[j] >= 0.0)) throw config_error("GridSpec: endpoints must be nonnegative");
    if (!(a[j] < b[j])) throw config_error("GridSpec: requires a_j < b_j");
    if (resolution[j] < 1) throw config_error("GridSpec: resolution must be >= 1");
  }
  if (point_count() > max_points)
    throw resource_error("GridSpec: grid exceeds the configured point budget");
}

CovarianceKernel CovarianceKernel::isotropic_fbm(double h, std::size_t n_axes) {
  CovarianceKernel k;
  k.kind = KernelKind::isotropic_fbm;
  k.hurst = HurstVector::isotropic(h, n_axes);
  return k;
}

CovarianceKernel CovarianceKernel::sheet(HurstVector h) {
  CovarianceKernel k;
  k.kind = KernelKind::fractional_brownian_sheet;
  k.hurst = std::move(h);
  return k;
}

void CovarianceKernel::validate() const {
  hurst.validate();
  if (kind == KernelKind::isotropic_fbm && !hurst.is_isotropic())
    throw config_error("isotropic-fbm kernel needs equal Hurst components");
}

void CovarianceKernel::validate_interval(const GridSpec& grid) const {
  // Both built-ins vanish only where the relevant coordinates vanish; the
  // variance floor fails on intervals touching that set.
  const Point corner = grid.point(0);
  if (!(kernel_eval(*this, corner, corner) > 0.0))
    throw config_error(
        "kernel variance vanishes on the interval; move it off the origin");
}

namespace {

double fbm_1d(double s, double t, double two_h) {
  return 0.5 * (std::pow(s, two_h) + std::pow(t, two_h) -
                std::pow(std::abs(s - t), two_h));
}

double norm2(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double dist2(std::span<const double> x, std::span<const double> y) {
  double s = 0;
  for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - y[j]) * (x[j] - y[j]);
  return std::sqrt(s);
}

// van der Corput radical inverse; quasi-uniform pair placement.
double radical_inverse(std::size_t i, std::size_t base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

constexpr std::size_t kHaltonBases[] = {2, 3, 5, 7, 11, 13, 17, 19};

}  // namespace

double kernel_eval(const CovarianceKernel& kernel, std::span<const double> s,
                   std::span<const double> t) {
  const std::size_t n = kernel.hurst.dims();
  if (s.size() != n || t.size() != n)
    throw config_error("kernel_eval: point dimension mismatch");
  for (std::size_t j = 0; j < n; ++j)
    if (s[j] < 0.0 || t[j] < 0.0)
      throw config_error("kernel_eval: coordinates must be nonnegative");

  switch (kernel.kind) {
    case KernelKind::isotropic_fbm: {
      const double two_h = 2.0 * kernel.hurst.h.front();
      return 0.5 * (std::pow(norm2(s), two_h) + std::pow(norm2(t), two_h) -
                    std::pow(dist2(s, t), two_h));
    }
    case KernelKind::fractional_brownian_sheet: {
      double prod = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        prod *= fbm_1d(s[j], t[j], 2.0 * kernel.hurst.h[j]);
      return prod;
    }
  }
  throw config_error("kernel_eval: unknown kernel kind");
}

double increment_variance(const CovarianceKernel& kernel,
                          std::span<const double> s, std::span<const double> t) {
  if (kernel.kind == KernelKind::isotropic_fbm) {
    const double two_h = 2.0 * kernel.hurst.h.front();
    return std::pow(dist2(s, t), two_h);
  }
  return kernel_eval(kernel, s, s) + kernel_eval(kernel, t, t) -
         2.0 * kernel_eval(kernel, s, t);
}

StructureReport structure_check(const CovarianceKernel& kernel,
                                const GridSpec& grid,
                                std::size_t pair_budget) {
  kernel.validate();
  grid.validate();
  kernel.validate_interval(grid);
  if (pair_budget < 2) throw config_error("structure_check: pair budget < 2");
  const std::size_t n = grid.dims();

  StructureReport rep;
  rep.c1 = std::numeric_limits<double>::infinity();
  rep.c2 = std::numeric_limits<double>::infinity();
  rep.c3 = 0.0;
  rep.c4 = std::numeric_limits<double>::infinity();

  // Stratify separations over dyadic scales so the extremal ratios are
  // probed at every resolution the interval supports, not just one.
  const std::size_t n_strata = 14;
  const std::size_t per_stratum = std::max<std::size_t>(1, pair_budget / n_strata);

  std::size_t draw = 0;
  for (std::size_t m = 1; m <= n_strata; ++m) {
    const double frac = std::ldexp(1.0, -static_cast<int>(m));  // 2^-m
    for (std::size_t i = 0; i < per_stratum; ++i, ++draw) {
      // Direction cycles the axes plus the main diagonal.
      const std::size_t dir = draw % (n + 1);
      Point s(n), t(n);
      for (std::size_t j = 0; j < n; ++j) {
        const double width = grid.b[j] - grid.a[j];
        const bool moves = (dir == n) || (dir == j);
        const double sep = moves ? frac * width : 0.0;
        const double u =
            radical_inverse(draw + 1, kHaltonBases[j % std::size(kHaltonBases)]);
        s[j] = grid.a[j] + u * (width - sep);
        t[j] = s[j] + sep;
      }

      const double css = kernel_eval(kernel, s, s);
      const double ctt = kernel_eval(kernel, t, t);
      const double cst = kernel_eval(kernel, s, t);
      if (!(css > 0.0))
        throw numeric_error(
            "structure_check: variance floor fails (C(s,s)=0 on the interval)");

      double denom = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        denom += std::pow(std::abs(s[j] - t[j]), 2.0 * kernel.hurst.h[j]);
      if (denom <= 0.0) continue;  // coincident pair carries no increment info

      const double inc_ratio = increment_variance(kernel, s, t) / denom;
      const double cond_ratio = (ctt - cst * cst / css) / denom;
      rep.c2 = std::min(rep.c2, inc_ratio);
      rep.c3 = std::max(rep.c3, inc_ratio);
      rep.c4 = std::min(rep.c4, cond_ratio);
      rep.c1 = std::min({rep.c1, css, ctt});
      ++rep.pairs;
    }
  }

  rep.passed = rep.pairs >= 2 && rep.c1 > 0 && rep.c2 > 0 && rep.c4 > 0 &&
               std::isfinite(rep.c1) && std::isfinite(rep.c2) &&
               std::isfinite(rep.c3) && std::isfinite(rep.c4);
  return rep;
}

}  // namespace eigencollide
