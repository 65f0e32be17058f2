#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "eigencollide/kernels.hpp"
#include "eigencollide/rng.hpp"

namespace eigencollide {

// One exact draw of a centred Gaussian field on a grid, tagged with the
// stream seed that produced it. Regenerating with the same seed reproduces
// the array bit for bit.
struct FieldSample {
  GridSpec grid;
  std::vector<double> values;
  std::uint64_t seed = 0;
};

// Lower Cholesky factor of the grid covariance. Immutable; safe to share
// across entries, replicates and threads.
class CovarianceFactor {
 public:
  CovarianceFactor(const CovarianceKernel& kernel, const GridSpec& grid);

  const Eigen::MatrixXd& chol() const { return chol_; }
  const std::vector<Point>& points() const { return points_; }
  const CovarianceKernel& kernel() const { return kernel_; }
  const GridSpec& grid() const { return grid_; }
  double jitter() const { return jitter_; }

 private:
  CovarianceKernel kernel_;
  GridSpec grid_;
  std::vector<Point> points_;
  Eigen::MatrixXd chol_;
  double jitter_ = 0.0;
};

FieldSample sample_field(const CovarianceFactor& factor, std::uint64_t seed);
FieldSample sample_field(const CovarianceKernel& kernel, const GridSpec& grid,
                         std::uint64_t seed);

// Exact conditional sampler ("bridge") for a family of independent fields
// sharing one covariance structure. Points added later are drawn from the
// law of the field conditional on everything sampled so far, per field.
//
// The shared Cholesky factor grows by Schur-complement rows; per field we
// keep the whitened history w = L^-1 v, so a new batch costs one triangular
// solve for the whole family plus a small matvec per field.
class FieldBridge {
 public:
  FieldBridge(std::shared_ptr<const CovarianceFactor> base,
              const std::vector<std::uint64_t>& field_seeds,
              std::size_t reserve_extra = 512);

  std::size_t field_count() const { return fields_.size(); }
  std::size_t size() const { return n_; }
  const Point& point(std::size_t i) const { return points_[i]; }
  double value(std::size_t field, std::size_t i) const {
    return fields_[field].values[i];
  }

  // Conditionally samples every field at the new points; returns the index
  // of the first one.
  std::size_t add_points(const std::vector<Point>& pts);

  // Covariance implied by the grown factor over all current points;
  // diagnostic hook (it must match the kernel Gram matrix).
  Eigen::MatrixXd covariance() const {
    auto l = chol_.topLeftCorner(static_cast<Eigen::Index>(n_),
                                 static_cast<Eigen::Index>(n_));
    return l * l.transpose();
  }

 private:
  struct FieldState {
    std::vector<double> values;
    std::vector<double> whitened;
    RandomStream rng;
  };

  void ensure_capacity(std::size_t n);

  std::shared_ptr<const CovarianceFactor> base_;
  std::vector<Point> points_;
  Eigen::MatrixXd chol_;  // top-left n_ x n_ block is live
  std::size_t n_ = 0;
  double jitter_floor_ = 0.0;
  std::vector<FieldState> fields_;
};

}  // namespace eigencollide
