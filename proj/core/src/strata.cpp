#include "eigencollide/strata.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "eigencollide/errors.hpp"
#include "eigencollide/rng.hpp"

namespace eigencollide {

int stratum_codim(int beta, int k) {
  if (beta != 1 && beta != 2) throw config_error("stratum_codim: beta must be 1 or 2");
  if (k < 2) throw config_error("stratum_codim: requires k >= 2");
  return (beta == 1) ? (k + 2) * (k - 1) / 2 : k * k - 1;
}

long stiefel_dim(int d, int l, bool complex_field) {
  if (d < 1 || l < 0 || l > d - 1) throw config_error("stiefel_dim: requires 0 <= l <= d-1");
  const long dl = d, ll = l;
  return complex_field ? dl * dl - ll * ll : (dl * (dl - 1) - ll * (ll - 1)) / 2;
}

namespace {

template <class Scalar>
Scalar gaussian_entry(RandomStream& rng);

template <>
double gaussian_entry<double>(RandomStream& rng) {
  return rng.normal();
}

template <>
std::complex<double> gaussian_entry<std::complex<double>>(RandomStream& rng) {
  const double re = rng.normal();
  const double im = rng.normal();
  return {re, im};
}

}  // namespace

template <class Scalar>
DenseMatrix<Scalar> random_stiefel(int d, int l, std::uint64_t seed) {
  if (d < 1 || l < 0 || l > d - 1)
    throw config_error("random_stiefel: requires 0 <= l <= d-1");
  const int cols = d - l;
  RandomStream rng(derive_seed(seed, {kSeedTagStiefel, static_cast<std::uint64_t>(d),
                                      static_cast<std::uint64_t>(l)}));
  for (int attempt = 0; attempt < 3; ++attempt) {
    DenseMatrix<Scalar> g(d, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < d; ++i) g(i, j) = gaussian_entry<Scalar>(rng);
    Eigen::HouseholderQR<DenseMatrix<Scalar>> qr(g);
    DenseMatrix<Scalar> q = qr.householderQ() * DenseMatrix<Scalar>::Identity(d, cols);
    DenseMatrix<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
    bool degenerate = false;
    for (int j = 0; j < cols; ++j) {
      const Scalar rjj = r(j, j);
      const double mag = std::abs(rjj);
      if (mag < 1e-12) {
        degenerate = true;
        break;
      }
      q.col(j) *= rjj / mag;  // make the R diagonal positive
    }
    if (!degenerate) return q;
  }
  throw numeric_error("random_stiefel: degenerate Gaussian draw three times");
}

template DenseMatrix<double> random_stiefel<double>(int, int, std::uint64_t);
template DenseMatrix<std::complex<double>> random_stiefel<std::complex<double>>(
    int, int, std::uint64_t);

template <class Scalar>
DenseMatrix<Scalar> gram_schmidt_complete(const DenseMatrix<Scalar>& partial,
                                          const DenseMatrix<Scalar>& reference) {
  const int d = static_cast<int>(reference.rows());
  if (reference.cols() != d) throw config_error("gram_schmidt_complete: reference must be square");
  if (partial.rows() != d || partial.cols() >= d || partial.cols() < 1)
    throw config_error("gram_schmidt_complete: partial must be d x (d-k), 1 <= k < d");
  const int k = d - static_cast<int>(partial.cols());

  DenseMatrix<Scalar> frame(d, d);
  frame.leftCols(d - k) = partial;

  // Columns fill back to front: the first new column orthogonalises the
  // reference column d-k+1 against the partial frame, later ones also
  // against the columns already produced.
  for (int l = k - 1; l >= 0; --l) {
    const int target_col = d - 1 - l;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = reference.col(target_col);
    for (int j = d - k; j < target_col; ++j)
      v -= frame.col(j) * frame.col(j).dot(reference.col(target_col));
    for (int j = 0; j < d - k; ++j)
      v -= partial.col(j) * partial.col(j).dot(reference.col(target_col));
    const double denom = v.norm();
    if (denom < 0.5)
      throw out_of_chart_error("gram_schmidt_complete: denominator < 1/2");
    frame.col(target_col) = v / denom;
  }
  return frame;
}

template DenseMatrix<double> gram_schmidt_complete<double>(const DenseMatrix<double>&,
                                                           const DenseMatrix<double>&);
template DenseMatrix<std::complex<double>> gram_schmidt_complete<std::complex<double>>(
    const DenseMatrix<std::complex<double>>&,
    const DenseMatrix<std::complex<double>>&);

Eigen::MatrixXcd phase_fix(const Eigen::MatrixXcd& frame,
                           const Eigen::MatrixXcd& reference) {
  return phase_align<std::complex<double>>(frame, reference);
}

StratumPoint random_stratum_point(int d, int k, int beta, double box_lo,
                                  double box_hi, double min_gap,
                                  std::uint64_t seed) {
  if (d < 2 || k < 2 || k > d) throw config_error("random_stratum_point: requires 2 <= k <= d");
  if (beta != 1 && beta != 2) throw config_error("random_stratum_point: beta must be 1 or 2");
  if (!(box_hi > box_lo)) throw config_error("random_stratum_point: empty eigenvalue box");
  if (!(min_gap > 0)) throw config_error("random_stratum_point: min_gap must be positive");
  const int m = d - k + 1;
  if ((box_hi - box_lo) < static_cast<double>(m - 1) * min_gap)
    throw infeasible_error("random_stratum_point: box too small for the separation");

  RandomStream rng(derive_seed(seed, {kSeedTagStratum, static_cast<std::uint64_t>(d),
                                      static_cast<std::uint64_t>(k),
                                      static_cast<std::uint64_t>(beta)}));

  std::vector<double> vals(static_cast<std::size_t>(m));
  bool ok = false;
  for (int attempt = 0; attempt < 100000 && !ok; ++attempt) {
    for (auto& v : vals) v = rng.uniform(box_lo, box_hi);
    std::sort(vals.begin(), vals.end());
    ok = true;
    for (int i = 0; i + 1 < m; ++i)
      if (vals[static_cast<std::size_t>(i + 1)] - vals[static_cast<std::size_t>(i)] < min_gap) {
        ok = false;
        break;
      }
  }
  if (!ok)
    throw infeasible_error("random_stratum_point: rejection sampling starved");

  // Any of the sorted values may carry the multiplicity; it goes last.
  const std::size_t rep = static_cast<std::size_t>(rng.index(static_cast<std::uint64_t>(m)));
  StratumPoint p;
  p.beta = beta;
  p.d = d;
  p.k = k;
  p.u.resize(m);
  int slot = 0;
  for (int i = 0; i < m; ++i)
    if (static_cast<std::size_t>(i) != rep) p.u(slot++) = vals[static_cast<std::size_t>(i)];
  p.u(m - 1) = vals[rep];

  Eigen::VectorXd diag(d);
  for (int i = 0; i < d - k; ++i) diag(i) = p.u(i);
  for (int i = d - k; i < d; ++i) diag(i) = p.u(m - 1);

  const std::uint64_t frame_seed = rng.bits();
  if (beta == 1) {
    const Eigen::MatrixXd q = random_stiefel<double>(d, 0, frame_seed);
    p.frame = q.cast<std::complex<double>>();
    p.vec = sym_vectorize(q * diag.asDiagonal() * q.transpose());
  } else {
    const Eigen::MatrixXcd q = random_stiefel<std::complex<double>>(d, 0, frame_seed);
    p.frame = q;
    p.vec = herm_vectorize(q * diag.asDiagonal() * q.adjoint());
  }
  return p;
}

namespace {

// Tangent directions at frame * Delta(u) * frame^*: derivative of the
// conjugation curve e^{t Omega} along each skew basis element, plus the
// diagonal directions Delta(e_m). Columns are canonical coordinates.
Eigen::MatrixXd tangent_generators(const StratumPoint& p) {
  const int d = p.d;
  const int k = p.k;
  const int m = d - k + 1;
  Eigen::VectorXd diag(d);
  for (int i = 0; i < d - k; ++i) diag(i) = p.u(i);
  for (int i = d - k; i < d; ++i) diag(i) = p.u(m - 1);

  const std::size_t ambient = (p.beta == 1) ? sym_vec_size(d) : herm_vec_size(d);
  const int n_skew = (p.beta == 1) ? d * (d - 1) / 2 : d * d;
  const int n_cols = n_skew + m;
  Eigen::MatrixXd gen(static_cast<Eigen::Index>(ambient), n_cols);
  int col = 0;

  if (p.beta == 1) {
    const Eigen::MatrixXd q = p.frame.real();
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b) {
        // [E_ab - E_ba, Delta] = (Delta_bb - Delta_aa)(E_ab + E_ba)
        Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
        const double w = diag(b) - diag(a);
        s(a, b) = w;
        s(b, a) = w;
        gen.col(col++) = sym_vectorize(q * s * q.transpose());
      }
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
      if (j < d - k)
        e(j) = 1.0;
      else
        for (int i = d - k; i < d; ++i) e(i) = 1.0;
      gen.col(col++) = sym_vectorize(q * e.asDiagonal() * q.transpose());
    }
  } else {
    const Eigen::MatrixXcd q = p.frame;
    const std::complex<double> iu(0.0, 1.0);
    // Basis i E_aa commutes with Delta; kept for completeness (zero columns).
    for (int a = 0; a < d; ++a) {
      gen.col(col++).setZero();
    }
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b) {
        const double w = diag(b) - diag(a);
        Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(d, d);
        s(a, b) = w;
        s(b, a) = w;
        gen.col(col++) = herm_vectorize(q * s * q.adjoint());
        Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(d, d);
        t(a, b) = iu * w;
        t(b, a) = -iu * w;
        gen.col(col++) = herm_vectorize(q * t * q.adjoint());
      }
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
      if (j < d - k)
        e(j) = 1.0;
      else
        for (int i = d - k; i < d; ++i) e(i) = 1.0;
      gen.col(col++) = herm_vectorize(q * e.asDiagonal() * q.adjoint());
    }
  }
  return gen;
}

}  // namespace

int tangent_rank(const StratumPoint& p) {
  const int m = p.d - p.k + 1;
  if (p.u.size() != m) throw config_error("tangent_rank: malformed stratum point");
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (p.u(i) == p.u(j))
        throw config_error("tangent_rank: needs d-k+1 distinct eigenvalues");

  const Eigen::MatrixXd gen = tangent_generators(p);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gen);
  const Eigen::VectorXd sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-8 * sv(0)) ++rank;
  return rank;
}

std::vector<StratumCheck> verify_strata(int dmax, int samples,
                                        std::uint64_t seed) {
  if (dmax < 2) throw config_error("verify_strata: dmax must be >= 2");
  if (samples < 1) throw config_error("verify_strata: samples must be >= 1");
  std::vector<StratumCheck> out;
  for (int beta = 1; beta <= 2; ++beta)
    for (int d = 2; d <= dmax; ++d)
      for (int k = 2; k <= d; ++k) {
        const long expected =
            (beta == 1) ? (static_cast<long>(d) * (d + 1) - static_cast<long>(k) * (k + 1)) / 2 + 1
                        : static_cast<long>(d) * d - static_cast<long>(k) * k + 1;
        StratumCheck chk{beta, d, k, expected, 0, true};
        for (int s = 0; s < samples; ++s) {
          const std::uint64_t ps =
              derive_seed(seed, {kSeedTagStratum, static_cast<std::uint64_t>(beta),
                                 static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(k),
                                 static_cast<std::uint64_t>(s)});
          const StratumPoint p =
              random_stratum_point(d, k, beta, -2.0, 2.0, 0.35, ps);
          chk.measured_rank = tangent_rank(p);
          if (chk.measured_rank != expected) {
            chk.pass = false;
            break;
          }
        }
        out.push_back(chk);
      }
  return out;
}

}  // namespace eigencollide
