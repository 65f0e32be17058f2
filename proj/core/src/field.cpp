#include "eigencollide/field.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "eigencollide/errors.hpp"

namespace eigencollide {

namespace {

Eigen::MatrixXd gram_matrix(const CovarianceKernel& kernel,
                            const std::vector<Point>& pts) {
  const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = kernel_eval(kernel, pts[i], pts[j]);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

// Plain factorisation first; one relative-1e-10 jitter retry keeps grids
// whose Gram matrix is PSD only up to rounding.
Eigen::MatrixXd factor_with_jitter(Eigen::MatrixXd k, double* jitter_used) {
  const double max_diag = k.diagonal().maxCoeff();
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() == Eigen::Success) {
    if (jitter_used) *jitter_used = 0.0;
    return llt.matrixL();
  }
  const double jitter = 1e-10 * max_diag;
  k.diagonal().array() += jitter;
  llt.compute(k);
  if (llt.info() != Eigen::Success)
    throw kernel_not_psd_error(
        "covariance matrix not positive semidefinite within jitter tolerance");
  if (jitter_used) *jitter_used = jitter;
  return llt.matrixL();
}

}  // namespace

CovarianceFactor::CovarianceFactor(const CovarianceKernel& kernel,
                                   const GridSpec& grid)
    : kernel_(kernel), grid_(grid) {
  kernel_.validate();
  grid_.validate();
  kernel_.validate_interval(grid_);
  points_ = grid_.points();
  chol_ = factor_with_jitter(gram_matrix(kernel_, points_), &jitter_);
}

FieldSample sample_field(const CovarianceFactor& factor, std::uint64_t seed) {
  const std::size_t n = factor.points().size();
  RandomStream rng(seed);
  Eigen::VectorXd z(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) z(static_cast<Eigen::Index>(i)) = rng.normal();
  Eigen::VectorXd v = factor.chol() * z;

  FieldSample out;
  out.grid = factor.grid();
  out.seed = seed;
  out.values.assign(v.data(), v.data() + v.size());
  return out;
}

FieldSample sample_field(const CovarianceKernel& kernel, const GridSpec& grid,
                         std::uint64_t seed) {
  return sample_field(CovarianceFactor(kernel, grid), seed);
}

FieldBridge::FieldBridge(std::shared_ptr<const CovarianceFactor> base,
                         const std::vector<std::uint64_t>& field_seeds,
                         std::size_t reserve_extra)
    : base_(std::move(base)) {
  points_ = base_->points();
  n_ = points_.size();
  const std::size_t cap = n_ + reserve_extra;
  chol_.setZero(static_cast<Eigen::Index>(cap), static_cast<Eigen::Index>(cap));
  chol_.topLeftCorner(n_, n_) = base_->chol();
  jitter_floor_ = 1e-12 * base_->chol().diagonal().maxCoeff();

  fields_.reserve(field_seeds.size());
  for (std::uint64_t s : field_seeds) {
    FieldState f{{}, {}, RandomStream(s)};
    f.whitened.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) f.whitened[i] = f.rng.normal();
    Eigen::Map<const Eigen::VectorXd> w(f.whitened.data(),
                                        static_cast<Eigen::Index>(n_));
    Eigen::VectorXd v = base_->chol() * w;
    f.values.assign(v.data(), v.data() + v.size());
    fields_.push_back(std::move(f));
  }
}

void FieldBridge::ensure_capacity(std::size_t n) {
  if (static_cast<Eigen::Index>(n) <= chol_.rows()) return;
  const std::size_t cap = std::max(n, static_cast<std::size_t>(chol_.rows()) * 2);
  Eigen::MatrixXd grown = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cap),
                                                static_cast<Eigen::Index>(cap));
  grown.topLeftCorner(n_, n_) = chol_.topLeftCorner(n_, n_);
  chol_.swap(grown);
}

std::size_t FieldBridge::add_points(const std::vector<Point>& pts) {
  const std::size_t m = pts.size();
  const std::size_t first = n_;
  if (m == 0) return first;
  ensure_capacity(n_ + m);

  const auto& kernel = base_->kernel();
  const Eigen::Index n = static_cast<Eigen::Index>(n_);
  const Eigen::Index mm = static_cast<Eigen::Index>(m);

  // Cross-covariance against everything sampled so far.
  Eigen::MatrixXd bt(n, mm);  // B^T, column c = C(old, new_c)
  for (Eigen::Index c = 0; c < mm; ++c)
    for (Eigen::Index r = 0; r < n; ++r)
      bt(r, c) = kernel_eval(kernel, points_[static_cast<std::size_t>(r)], pts[c]);

  auto l_old = chol_.topLeftCorner(n, n);
  Eigen::MatrixXd mtx = l_old.triangularView<Eigen::Lower>().solve(bt);  // L^-1 B^T

  // Schur complement of the new block.
  Eigen::MatrixXd s(mm, mm);
  for (Eigen::Index i = 0; i < mm; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = kernel_eval(kernel, pts[i], pts[j]);
      s(i, j) = v;
      s(j, i) = v;
    }
  s.noalias() -= mtx.transpose() * mtx;
  s.diagonal().array() += jitter_floor_;
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    s.diagonal().array() += 1e-10 * std::max(1.0, s.diagonal().maxCoeff());
    llt.compute(s);
    if (llt.info() != Eigen::Success)
      throw kernel_not_psd_error("conditional covariance lost definiteness");
  }
  Eigen::MatrixXd g = llt.matrixL();

  // Append the factor rows [M^T G].
  chol_.block(n, 0, mm, n) = mtx.transpose();
  chol_.block(n, n, mm, mm) = g;

  // Conditional mean + fluctuation per field; the new whitened entries are
  // exactly the fresh normals.
  for (auto& f : fields_) {
    Eigen::Map<const Eigen::VectorXd> w(f.whitened.data(), n);
    Eigen::VectorXd mean = mtx.transpose() * w;
    Eigen::VectorXd z(mm);
    for (Eigen::Index i = 0; i < mm; ++i) z(i) = f.rng.normal();
    Eigen::VectorXd vnew = mean + g * z;
    for (Eigen::Index i = 0; i < mm; ++i) {
      f.values.push_back(vnew(i));
      f.whitened.push_back(z(i));
    }
  }

  points_.insert(points_.end(), pts.begin(), pts.end());
  n_ += m;
  return first;
}

}  // namespace eigencollide
