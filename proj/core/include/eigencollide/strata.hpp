#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "eigencollide/spectral.hpp"

namespace eigencollide {

// Codimension of the set of symmetric (beta=1) / Hermitian (beta=2)
// matrices with at least k equal eigenvalues, inside the ambient
// d(d+1)/2- or d^2-dimensional coordinate space. Independent of d.
int stratum_codim(int beta, int k);

// Dimension of the manifold of d x (d-l) orthonormal frames.
long stiefel_dim(int d, int l, bool complex_field);

// Haar-uniform orthonormal frame: Gaussian matrix, thin QR, columns rescaled
// so the triangular factor has positive diagonal.
template <class Scalar>
DenseMatrix<Scalar> random_stiefel(int d, int l, std::uint64_t seed);

// Extends `partial` (first d-k orthonormal columns) to a full frame by
// Gram-Schmidt against the trailing reference columns, last to first. Any
// normalisation denominator below 1/2 means the input left the chart.
template <class Scalar>
DenseMatrix<Scalar> gram_schmidt_complete(const DenseMatrix<Scalar>& partial,
                                          const DenseMatrix<Scalar>& reference);

// Canonical gauge for complex frames: rescales column j by the unimodular
// scalar making <A_j, B_j> real and nonnegative. Inner products are
// conjugate-linear in the first argument throughout.
Eigen::MatrixXcd phase_fix(const Eigen::MatrixXcd& frame,
                           const Eigen::MatrixXcd& reference);

// A matrix with a certified k-fold eigenvalue, kept in factored form:
// matrix = frame * diag(u_1,...,u_{d-k}, u_{d-k+1} x k) * frame^*.
struct StratumPoint {
  int beta = 1;
  int d = 0;
  int k = 0;
  Eigen::VectorXd u;      // d-k+1 distinct eigenvalues, repeated one last
  Eigen::MatrixXcd frame; // real part only for beta=1
  Eigen::VectorXd vec;    // canonical coordinates of the matrix

  Eigen::MatrixXd sym() const { return sym_identify(vec, d); }
  Eigen::MatrixXcd herm() const { return herm_identify(vec, d); }
};

// Rejection-samples d-k+1 eigenvalues in [box_lo, box_hi] with pairwise
// separation >= min_gap (one of them, chosen uniformly, carries the
// multiplicity) and conjugates by a Haar frame.
StratumPoint random_stratum_point(int d, int k, int beta, double box_lo,
                                  double box_hi, double min_gap,
                                  std::uint64_t seed);

// Numerical rank of the tangent family at p: commutators with the skew
// basis plus the diagonal directions, vectorised canonically; singular
// values above 1e-8 x the largest count.
int tangent_rank(const StratumPoint& p);

struct StratumCheck {
  int beta = 0;
  int d = 0;
  int k = 0;
  long expected_dim = 0;
  int measured_rank = 0;
  bool pass = false;
};

// Rank certification table over beta in {1,2}, 2 <= k <= d <= dmax.
std::vector<StratumCheck> verify_strata(int dmax, int samples,
                                        std::uint64_t seed);

}  // namespace eigencollide
