#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "eigencollide/field.hpp"
#include "eigencollide/identify.hpp"
#include "eigencollide/kernels.hpp"

namespace eigencollide {

// Matrix-valued process Y(t) = shift + X(t). beta = 1 builds real symmetric
// GOE-type entries, beta = 2 complex Hermitian GUE-type entries: independent
// driver fields off-diagonal, sqrt(2)-scaled drivers on the diagonal.
struct ProcessConfig {
  int beta = 1;
  int d = 2;
  Eigen::MatrixXcd shift;  // empty means zero shift
  CovarianceKernel kernel;
  GridSpec grid;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t driver_count() const;  // d(d+1)/2 or d^2 independent fields
  std::vector<std::uint64_t> entry_seeds() const;
  Eigen::VectorXd shift_vec() const;  // canonical coordinates of the shift
};

// Entry (i,j), i <= j, component 0 carries the real driver, component 1 the
// imaginary one (beta = 2 off-diagonal only). Field order is row-wise over
// the upper triangle, imaginary block after the real block, mirroring the
// canonical packing.
std::uint64_t entry_seed(std::uint64_t master, int i, int j, int component);

// Materialised path: one canonical coordinate vector per grid point.
struct MatrixPath {
  ProcessConfig config;
  std::vector<Eigen::VectorXd> entries;
  std::size_t drivers = 0;

  Eigen::MatrixXd sym_at(std::size_t idx) const {
    return sym_identify(entries[idx], config.d);
  }
  Eigen::MatrixXcd herm_at(std::size_t idx) const {
    return herm_identify(entries[idx], config.d);
  }
};

// Assembles the canonical coordinates of shift + X at one point from the
// per-field values; `values(field_index)` must return the driver value.
template <class ValueFn>
Eigen::VectorXd pack_entries(int beta, int d, const Eigen::VectorXd& shift_vec,
                             ValueFn&& values) {
  static const double kSqrt2 = 1.4142135623730950488016887242097;
  const std::size_t dim = (beta == 1) ? sym_vec_size(d) : herm_vec_size(d);
  Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
  std::size_t f = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const double v = values(f++);
      x(static_cast<Eigen::Index>(sym_index(i, j, d))) = (i == j) ? kSqrt2 * v : v;
    }
  if (beta == 2) {
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        x(static_cast<Eigen::Index>(herm_im_index(i, j, d))) = values(f++);
  }
  return x + shift_vec;
}

MatrixPath assemble_path(const ProcessConfig& config);
MatrixPath assemble_path(const ProcessConfig& config,
                         std::shared_ptr<const CovarianceFactor> factor);

}  // namespace eigencollide
