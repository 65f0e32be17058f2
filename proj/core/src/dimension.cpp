#include "eigencollide/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "eigencollide/errors.hpp"
#include "eigencollide/strata.hpp"

namespace eigencollide {

DimFormulaResult theoretical_dim(const HurstVector& hurst, int k, int beta) {
  hurst.validate();
  const double codim = static_cast<double>(stratum_codim(beta, k));
  const int n = static_cast<int>(hurst.dims());

  // Index convention: components ascend.
  std::vector<double> h = hurst.h;
  std::sort(h.begin(), h.end());

  if (!(hurst.exponent_sum() > codim))
    throw empty_regime_error(
        "theoretical_dim: exponent sum below the threshold; collision set empty");

  DimFormulaResult out;
  out.terms.reserve(static_cast<std::size_t>(n));
  double partial_q = 0.0;
  out.ell0 = 0;
  for (int ell = 1; ell <= n; ++ell) {
    const double h_ell = h[static_cast<std::size_t>(ell - 1)];
    double term = static_cast<double>(n - ell) - h_ell * codim;
    for (int j = 1; j <= ell; ++j) term += h_ell / h[static_cast<std::size_t>(j - 1)];
    out.terms.push_back(term);
    partial_q += 1.0 / h_ell;
    if (out.ell0 == 0 && partial_q > codim) out.ell0 = ell;
  }
  out.value = *std::min_element(out.terms.begin(), out.terms.end());
  return out;
}

BoxCountResult box_dimension(const TimeSet& ts, const std::vector<double>& scales) {
  if (ts.points.empty()) throw config_error("box_dimension: empty time set");
  if (scales.size() < 4) throw config_error("box_dimension: needs at least 4 scales");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0)) throw config_error("box_dimension: scales must be positive");
    if (i > 0 && !(scales[i] < scales[i - 1]))
      throw config_error("box_dimension: scales must strictly decrease");
  }
  if (!(scales.front() / scales.back() >= 100.0))
    throw config_error("box_dimension: scales must span at least two decades");

  const std::size_t dim = ts.points.front().size();
  Point origin = ts.points.front();
  for (const auto& p : ts.points)
    for (std::size_t j = 0; j < dim; ++j) origin[j] = std::min(origin[j], p[j]);

  BoxCountResult out;
  for (double s : scales) {
    std::set<std::vector<long long>> boxes;
    for (const auto& p : ts.points) {
      std::vector<long long> key(dim);
      for (std::size_t j = 0; j < dim; ++j)
        key[j] = static_cast<long long>(std::floor((p[j] - origin[j]) / s));
      boxes.insert(std::move(key));
    }
    out.occupied.push_back(boxes.size());
  }

  std::size_t informative = 0;
  for (std::size_t c : out.occupied)
    if (c >= 1) ++informative;
  if (informative < 2)
    throw undefined_dimension_error("box_dimension: fewer than two occupied scales");

  const BoxCountResult fit = fit_box_counts(
      scales, std::vector<double>(out.occupied.begin(), out.occupied.end()));
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.max_residual = fit.max_residual;
  out.r_squared = fit.r_squared;
  return out;
}

BoxCountResult fit_box_counts(const std::vector<double>& scales,
                              const std::vector<double>& counts) {
  if (scales.size() != counts.size() || scales.size() < 2)
    throw config_error("fit_box_counts: needs matching scales and counts");
  std::vector<double> xs, ys;
  BoxCountResult out;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    out.occupied.push_back(static_cast<std::size_t>(counts[i]));
    if (!(counts[i] > 0)) continue;  // empty scales carry no log information
    xs.push_back(std::log(1.0 / scales[i]));
    ys.push_back(std::log(counts[i]));
  }
  if (xs.size() < 2)
    throw undefined_dimension_error("fit_box_counts: fewer than two occupied scales");

  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  for (std::size_t i = 0; i < xs.size(); ++i)
    out.max_residual =
        std::max(out.max_residual, std::abs(ys[i] - (out.intercept + out.slope * xs[i])));
  out.r_squared = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  return out;
}

namespace {

double f_q(double r, double q) {
  if (q > 0) return std::pow(r, -q);
  if (q == 0) return std::log(std::numbers::e / std::min(r, 1.0));
  return 1.0;
}

}  // namespace

RieszEnergy riesz_energy(const std::vector<Point>& points, double q) {
  const std::size_t n = points.size();
  if (n < 2) throw config_error("riesz_energy: needs at least two points");
  RieszEnergy out;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double r2 = 0.0;
      for (std::size_t c = 0; c < points[i].size(); ++c) {
        const double dv = points[i][c] - points[j][c];
        r2 += dv * dv;
      }
      const double r = std::sqrt(r2);
      if (r == 0.0 && q >= 0.0) {
        out.diverged = true;
        out.value = std::numeric_limits<double>::infinity();
        return out;
      }
      sum += f_q(r, q);
    }
  // Ordered pairs double each unordered one; the mean is unchanged.
  out.value = sum / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
  return out;
}

RieszEnergy riesz_energy(const std::vector<double>& points, double q) {
  std::vector<Point> pts;
  pts.reserve(points.size());
  for (double p : points) pts.push_back(Point{p});
  return riesz_energy(pts, q);
}

}  // namespace eigencollide
