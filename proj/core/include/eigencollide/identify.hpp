#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>

#include "eigencollide/errors.hpp"

// Canonical identifications between packed real coordinate vectors and
// symmetric / Hermitian matrices.
//
// Symmetric, x in R^{d(d+1)/2}: the upper triangle row-wise,
//   (x~_11, ..., x~_1d, x~_22, ..., x~_2d, ..., x~_dd).
// Hermitian, x in R^{d^2}: diagonal and off-diagonal real parts packed the
// same way in the first d(d+1)/2 slots, imaginary parts of the strict upper
// triangle row-wise in the trailing d(d-1)/2 slots.

namespace eigencollide {

inline std::size_t sym_vec_size(int d) {
  return static_cast<std::size_t>(d) * (d + 1) / 2;
}
inline std::size_t herm_vec_size(int d) {
  return static_cast<std::size_t>(d) * d;
}

// 0-based index of entry (i,j), i <= j, in the symmetric packing.
inline std::size_t sym_index(int i, int j, int d) {
  return static_cast<std::size_t>(i) * (2 * d - i - 1) / 2 + j;
}

// 0-based index of the real part of entry (i,j), i <= j (diagonal included).
inline std::size_t herm_re_index(int i, int j, int d) { return sym_index(i, j, d); }

// 0-based index of the imaginary part of entry (i,j), i < j.
inline std::size_t herm_im_index(int i, int j, int d) {
  return sym_vec_size(d) + static_cast<std::size_t>(i) * (2 * d - i - 3) / 2 + j - 1;
}

inline Eigen::MatrixXd sym_identify(const Eigen::VectorXd& x, int d) {
  if (d < 1 || static_cast<std::size_t>(x.size()) != sym_vec_size(d))
    throw config_error("sym_identify: vector length must be d(d+1)/2");
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const double v = x(static_cast<Eigen::Index>(sym_index(i, j, d)));
      m(i, j) = v;
      m(j, i) = v;
    }
  return m;
}

// Inverse identification; reads the upper triangle back.
inline Eigen::VectorXd sym_vectorize(const Eigen::MatrixXd& m) {
  const int d = static_cast<int>(m.rows());
  if (m.cols() != d) throw config_error("sym_vectorize: matrix must be square");
  Eigen::VectorXd x(static_cast<Eigen::Index>(sym_vec_size(d)));
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      x(static_cast<Eigen::Index>(sym_index(i, j, d))) = m(i, j);
  return x;
}

inline Eigen::MatrixXcd herm_identify(const Eigen::VectorXd& x, int d) {
  if (d < 1 || static_cast<std::size_t>(x.size()) != herm_vec_size(d))
    throw config_error("herm_identify: vector length must be d^2");
  Eigen::MatrixXcd m(d, d);
  for (int i = 0; i < d; ++i) {
    m(i, i) = x(static_cast<Eigen::Index>(herm_re_index(i, i, d)));
    for (int j = i + 1; j < d; ++j) {
      const std::complex<double> v(
          x(static_cast<Eigen::Index>(herm_re_index(i, j, d))),
          x(static_cast<Eigen::Index>(herm_im_index(i, j, d))));
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
  }
  return m;
}

inline Eigen::VectorXd herm_vectorize(const Eigen::MatrixXcd& m) {
  const int d = static_cast<int>(m.rows());
  if (m.cols() != d) throw config_error("herm_vectorize: matrix must be square");
  Eigen::VectorXd x(static_cast<Eigen::Index>(herm_vec_size(d)));
  for (int i = 0; i < d; ++i) {
    x(static_cast<Eigen::Index>(herm_re_index(i, i, d))) = m(i, i).real();
    for (int j = i + 1; j < d; ++j) {
      x(static_cast<Eigen::Index>(herm_re_index(i, j, d))) = m(i, j).real();
      x(static_cast<Eigen::Index>(herm_im_index(i, j, d))) = m(i, j).imag();
    }
  }
  return x;
}

}  // namespace eigencollide
