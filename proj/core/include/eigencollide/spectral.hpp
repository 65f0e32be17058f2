#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <numeric>
#include <vector>

#include "eigencollide/errors.hpp"
#include "eigencollide/process.hpp"

namespace eigencollide {

template <class Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
struct EigenDecomposition {
  Eigen::VectorXd values;        // ascending
  DenseMatrix<Scalar> vectors;   // empty unless requested
};

// Cyclic Jacobi for symmetric and Hermitian matrices. Quadratically
// convergent and backward stable; the accumulated rotations give
// || Q E Q* - m || at a small multiple of machine precision.
template <class Scalar>
EigenDecomposition<Scalar> jacobi_eigs(DenseMatrix<Scalar> a, bool want_vectors);

inline Eigen::VectorXd eigs_ascending(const Eigen::MatrixXd& m) {
  return jacobi_eigs<double>(m, false).values;
}
inline Eigen::VectorXd eigs_ascending(const Eigen::MatrixXcd& m) {
  return jacobi_eigs<std::complex<double>>(m, false).values;
}

// Minimal width of a window of k consecutive ordered eigenvalues; zero iff
// the matrix has k identical eigenvalues.
double k_gap(const Eigen::VectorXd& spectrum, int k);

// Largest |eigenvalue|; the Lipschitz constant carrier for gap perturbation.
double operator_norm(const Eigen::MatrixXd& m);
double operator_norm(const Eigen::MatrixXcd& m);

// Circle in the complex plane used for resolvent quadrature. The contour
// must stay clear of the spectrum by 1e-8 x (spectral diameter).
struct ContourSpec {
  double center = 0.0;
  double radius = 1.0;
  int nodes = 32;  // starting node count; doubled until idempotent
};

// Spectral projector onto the eigenspaces enclosed by the contour, computed
// by trapezoidal quadrature of the resolvent. Node count doubles until
// ||P^2 - P|| < 1e-10 (cap 512); residuals above 1e-8 raise accuracy_error.
template <class Scalar>
DenseMatrix<Scalar> contour_projection(const DenseMatrix<Scalar>& m,
                                       const ContourSpec& contour);

template <class Scalar>
struct ContinuationResult {
  DenseMatrix<Scalar> basis;  // orthonormal columns tracking the reference
  Eigen::VectorXd values;     // Rayleigh quotients, column-aligned
};

// Continues the reference eigenbasis (ref_basis, ref_values) of a matrix
// with d-k+1 distinct eigenvalues (repeated block last) to a nearby target:
// project reference columns through per-cluster contour projectors of the
// target, then re-orthonormalise the repeated block by Gram-Schmidt.
// Projected columns with norm < 1/2 mean the target left the neighbourhood.
template <class Scalar>
ContinuationResult<Scalar> continue_eigenbasis(const DenseMatrix<Scalar>& ref_basis,
                                               const Eigen::VectorXd& ref_values,
                                               const DenseMatrix<Scalar>& target,
                                               int k);

// Gauge fix for eigenbasis comparison: rescales each column by the
// unimodular scalar making its inner product with the reference column real
// and nonnegative (sign flip in the real case).
template <class Scalar>
DenseMatrix<Scalar> phase_align(const DenseMatrix<Scalar>& frame,
                                const DenseMatrix<Scalar>& reference);

// Ascending spectra along a path plus min-window statistics per requested k.
struct SpectrumPath {
  std::vector<Eigen::VectorXd> spectra;
  std::map<int, std::vector<double>> gaps;
};

SpectrumPath spectrum_path(const MatrixPath& path, const std::vector<int>& ks);

// ---------------------------------------------------------------------------
// implementation

namespace detail {

inline double entry_abs(double x) { return std::abs(x); }
inline double entry_abs(const std::complex<double>& x) { return std::abs(x); }
inline double conj_s(double x) { return x; }
inline std::complex<double> conj_s(const std::complex<double>& x) { return std::conj(x); }

template <class Scalar>
double offdiag_norm(const DenseMatrix<Scalar>& a) {
  double s = 0;
  for (Eigen::Index p = 0; p < a.rows(); ++p)
    for (Eigen::Index q = p + 1; q < a.cols(); ++q) {
      const double v = entry_abs(a(p, q));
      s += 2 * v * v;
    }
  return std::sqrt(s);
}

}  // namespace detail

template <class Scalar>
EigenDecomposition<Scalar> jacobi_eigs(DenseMatrix<Scalar> a, bool want_vectors) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw config_error("jacobi_eigs: matrix must be square");
  if (!a.allFinite()) throw numeric_error("jacobi_eigs: non-finite entries");

  DenseMatrix<Scalar> v = DenseMatrix<Scalar>::Identity(n, n);
  const double norm = a.norm();
  const double tol = 1e-14 * std::max(norm, 1e-300);

  for (int sweep = 0; sweep < 60; ++sweep) {
    if (detail::offdiag_norm(a) <= tol) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double zabs = detail::entry_abs(a(p, q));
        if (zabs <= 1e-18 * norm) continue;
        const Scalar phase = a(p, q) / zabs;  // +-1 in the real case
        const double app = std::real(a(p, p));
        const double aqq = std::real(a(q, q));
        const double tau = (aqq - app) / (2.0 * zabs);
        double t;
        if (tau >= 0)
          t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
        else
          t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Scalar sp = s * phase;  // s e^{i phi}

        // A <- J* A J with J = [[c, s e^{i phi}], [-s e^{-i phi}, c]]
        for (Eigen::Index r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const Scalar arp = a(r, p);
          const Scalar arq = a(r, q);
          a(r, p) = c * arp - detail::conj_s(sp) * arq;
          a(r, q) = sp * arp + c * arq;
          a(p, r) = detail::conj_s(a(r, p));
          a(q, r) = detail::conj_s(a(r, q));
        }
        a(p, p) = Scalar(app - t * zabs);
        a(q, q) = Scalar(aqq + t * zabs);
        a(p, q) = Scalar(0);
        a(q, p) = Scalar(0);

        if (want_vectors) {
          for (Eigen::Index r = 0; r < n; ++r) {
            const Scalar vrp = v(r, p);
            const Scalar vrq = v(r, q);
            v(r, p) = c * vrp - detail::conj_s(sp) * vrq;
            v(r, q) = sp * vrp + c * vrq;
          }
        }
      }
    }
  }

  EigenDecomposition<Scalar> out;
  out.values.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) out.values(i) = std::real(a(i, i));

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return out.values(i) < out.values(j);
  });
  Eigen::VectorXd sorted(n);
  for (Eigen::Index i = 0; i < n; ++i) sorted(i) = out.values(order[static_cast<std::size_t>(i)]);
  out.values.swap(sorted);
  if (want_vectors) {
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

template <class Scalar>
DenseMatrix<Scalar> contour_projection(const DenseMatrix<Scalar>& m,
                                       const ContourSpec& contour) {
  using Complex = std::complex<double>;
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw config_error("contour_projection: matrix must be square");
  if (!(contour.radius > 0)) throw config_error("contour_projection: radius must be positive");
  if (contour.nodes < 16) throw config_error("contour_projection: needs >= 16 nodes");

  const Eigen::VectorXd eigs = jacobi_eigs<Scalar>(m, false).values;
  const double diam = eigs(n - 1) - eigs(0);
  int enclosed = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dist = std::abs(std::abs(eigs(i) - contour.center) - contour.radius);
    if (dist <= 1e-8 * diam)
      throw contour_degenerate_error("eigenvalue on or too close to the contour");
    if (std::abs(eigs(i) - contour.center) < contour.radius) ++enclosed;
  }

  const Eigen::MatrixXcd mc = m.template cast<Complex>();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);

  DenseMatrix<Scalar> best;
  double best_residual = std::numeric_limits<double>::infinity();
  for (int nodes = std::max(contour.nodes, 32); nodes <= 512; nodes *= 2) {
    // Midpoint nodes come in conjugate pairs; summing T + T* per pair keeps
    // the result exactly Hermitian (exactly real symmetric for real input).
    DenseMatrix<Scalar> p = DenseMatrix<Scalar>::Zero(n, n);
    for (int j = 0; j < nodes / 2; ++j) {
      const double theta = std::numbers::pi * (2.0 * j + 1.0) / nodes;
      const Complex w = std::polar(1.0, theta);
      const Complex zeta = contour.center + contour.radius * w;
      const Eigen::MatrixXcd resolvent = (zeta * id - mc).partialPivLu().solve(id);
      const Eigen::MatrixXcd term = (contour.radius / nodes) * (w * resolvent);
      if constexpr (std::is_same_v<Scalar, double>)
        p += 2.0 * term.real();
      else
        p += term + term.adjoint();
    }
    const double residual = (p * p - p).norm();
    if (residual < best_residual) {
      best_residual = residual;
      best = std::move(p);
    }
    if (best_residual < 1e-10) break;
  }

  const double trace_err = std::abs(std::real(best.trace()) - enclosed);
  if (best_residual > 1e-8 || trace_err > 1e-8)
    throw accuracy_error("contour quadrature did not converge at the node cap");
  return best;
}

template <class Scalar>
ContinuationResult<Scalar> continue_eigenbasis(const DenseMatrix<Scalar>& ref_basis,
                                               const Eigen::VectorXd& ref_values,
                                               const DenseMatrix<Scalar>& target,
                                               int k) {
  const Eigen::Index n = ref_basis.rows();
  const int d = static_cast<int>(n);
  if (ref_basis.cols() != n || target.rows() != n || target.cols() != n)
    throw config_error("continue_eigenbasis: shape mismatch");
  if (k < 1 || k > d) throw config_error("continue_eigenbasis: k out of range");
  if (ref_values.size() != n)
    throw config_error("continue_eigenbasis: needs d reference eigenvalues");

  // Distinct values: the first d-k diagonal entries (strictly ascending by
  // convention) plus the k-fold value sitting in the trailing block. The
  // repeated value itself may fall anywhere relative to the others.
  const int n_distinct = d - k + 1;
  const double scale = std::max({std::abs(ref_values.minCoeff()),
                                 std::abs(ref_values.maxCoeff()), 1.0});
  for (int i = d - k; i < d - 1; ++i)
    if (std::abs(ref_values(i + 1) - ref_values(i)) > 1e-9 * scale)
      throw config_error("continue_eigenbasis: repeated block must sit last");
  std::vector<double> mu(static_cast<std::size_t>(n_distinct));
  for (int i = 0; i < d - k; ++i) {
    mu[static_cast<std::size_t>(i)] = ref_values(i);
    if (i > 0 && !(ref_values(i) > ref_values(i - 1)))
      throw config_error(
          "continue_eigenbasis: leading eigenvalues must ascend strictly");
  }
  mu[static_cast<std::size_t>(n_distinct - 1)] = ref_values(d - k);
  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_distinct; ++i)
    for (int j = i + 1; j < n_distinct; ++j)
      min_gap = std::min(min_gap, std::abs(mu[static_cast<std::size_t>(i)] -
                                           mu[static_cast<std::size_t>(j)]));
  if (n_distinct > 1 && !(min_gap > 0))
    throw config_error("continue_eigenbasis: reference eigenvalues must be distinct");
  const double r0 =
      (n_distinct > 1) ? 0.5 * min_gap : 1.0 + std::abs(ref_values(0));

  // One projector per distinct eigenvalue of the reference.
  std::vector<DenseMatrix<Scalar>> proj(static_cast<std::size_t>(n_distinct));
  for (int i = 0; i < n_distinct; ++i) {
    ContourSpec c{mu[static_cast<std::size_t>(i)], r0, 32};
    proj[static_cast<std::size_t>(i)] = contour_projection<Scalar>(target, c);
    const double tr = std::real(proj[static_cast<std::size_t>(i)].trace());
    const int expected = (i == n_distinct - 1) ? k : 1;
    if (std::abs(tr - expected) > 0.5)
      throw spectral_drift_error(
          "eigenvalue cluster migrated across its contour; target too far");
  }

  ContinuationResult<Scalar> out;
  out.basis.resize(n, n);
  out.values.resize(n);

  // Simple columns: one projector, one normalisation.
  for (int j = 0; j < d - k; ++j) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w =
        proj[static_cast<std::size_t>(j)] * ref_basis.col(j);
    const double norm = w.norm();
    if (norm < 0.5)
      throw out_of_neighborhood_error("projected reference column collapsed");
    out.basis.col(j) = w / norm;
  }
  // Repeated block: project, then Gram-Schmidt within the cluster.
  const auto& cluster = proj[static_cast<std::size_t>(n_distinct - 1)];
  for (int j = d - k; j < d; ++j) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w = cluster * ref_basis.col(j);
    const double norm = w.norm();
    if (norm < 0.5)
      throw out_of_neighborhood_error("projected reference column collapsed");
    w /= norm;
    for (int i = d - k; i < j; ++i)
      w -= out.basis.col(i) * (out.basis.col(i).dot(w));
    const double denom = w.norm();
    if (denom < 0.5)
      throw out_of_neighborhood_error("cluster Gram-Schmidt denominator < 1/2");
    out.basis.col(j) = w / denom;
  }

  const double ortho =
      (out.basis.adjoint() * out.basis - DenseMatrix<Scalar>::Identity(n, n)).norm();
  if (ortho > 1e-10)
    throw accuracy_error("continued basis lost orthonormality");

  for (int j = 0; j < d; ++j)
    out.values(j) = std::real(out.basis.col(j).dot(target * out.basis.col(j)));
  return out;
}

template <class Scalar>
DenseMatrix<Scalar> phase_align(const DenseMatrix<Scalar>& frame,
                                const DenseMatrix<Scalar>& reference) {
  if (frame.rows() != reference.rows() || frame.cols() != reference.cols())
    throw config_error("phase_align: shape mismatch");
  DenseMatrix<Scalar> out = frame;
  for (Eigen::Index j = 0; j < frame.cols(); ++j) {
    const Scalar z = frame.col(j).dot(reference.col(j));  // <frame_j, ref_j>
    const double zabs = std::abs(z);
    if (zabs == 0.0)
      throw phase_undefined_error("phase_align: vanishing inner product");
    out.col(j) *= z / zabs;
  }
  return out;
}

}  // namespace eigencollide
