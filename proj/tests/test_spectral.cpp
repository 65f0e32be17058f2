#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "eigencollide/errors.hpp"
#include "eigencollide/spectral.hpp"
#include "eigencollide/strata.hpp"
#include "fixtures.hpp"

using namespace eigencollide;

TEST_CASE("eigenvalues of small closed-form matrices") {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  Eigen::VectorXd e = eigs_ascending(m);
  CHECK(e(0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(e(1) == doctest::Approx(1.0).epsilon(1e-14));

  Eigen::MatrixXd diag = Eigen::Vector3d(3, 1, 2).asDiagonal();
  e = eigs_ascending(diag);
  CHECK(e(0) == 1.0);
  CHECK(e(1) == 2.0);
  CHECK(e(2) == 3.0);

  Eigen::MatrixXcd h(2, 2);
  h << 0.0, std::complex<double>(0, 1), std::complex<double>(0, -1), 0.0;
  e = eigs_ascending(h);
  CHECK(e(0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(e(1) == doctest::Approx(1.0).epsilon(1e-14));

  Eigen::MatrixXd bad(2, 2);
  bad << 0, std::nan(""), std::nan(""), 0;
  CHECK_THROWS_AS(eigs_ascending(bad), numeric_error);
}

TEST_CASE("reconstruction residual and agreement with an independent solver") {
  RandomStream rng(31);
  for (int d = 2; d <= 8; ++d) {
    for (int rep = 0; rep < 25; ++rep) {
      const Eigen::MatrixXd s = fixtures::random_symmetric(d, rng);
      const auto dec = jacobi_eigs<double>(s, true);
      const Eigen::MatrixXd recon =
          dec.vectors * dec.values.asDiagonal() * dec.vectors.transpose();
      CHECK((recon - s).norm() <= 1e-12 * s.norm());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(s, Eigen::EigenvaluesOnly);
      CHECK((dec.values - ref.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-12 * s.norm());

      const Eigen::MatrixXcd hm = fixtures::random_hermitian(d, rng);
      const auto dech = jacobi_eigs<std::complex<double>>(hm, true);
      const Eigen::MatrixXcd reconh =
          dech.vectors * dech.values.asDiagonal() * dech.vectors.adjoint();
      CHECK((reconh - hm).norm() <= 1e-12 * hm.norm());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> refh(hm, Eigen::EigenvaluesOnly);
      CHECK((dech.values - refh.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-12 * hm.norm());
    }
  }
}

TEST_CASE("k_gap windows") {
  Eigen::VectorXd s(4);
  s << 1, 2, 2, 5;
  CHECK(k_gap(s, 2) == 0.0);
  CHECK(k_gap(s, 3) == 1.0);        // min(2-1, 5-2)
  CHECK(k_gap(s, 4) == 4.0);        // E_d - E_1
  CHECK_THROWS_AS(k_gap(s, 1), config_error);
  CHECK_THROWS_AS(k_gap(s, 5), config_error);
}

TEST_CASE("k_gap is 2-Lipschitz in the operator norm") {
  RandomStream rng(32);
  for (int rep = 0; rep < 1000; ++rep) {
    const int d = 2 + static_cast<int>(rng.index(5));
    const int k = 2 + static_cast<int>(rng.index(static_cast<std::uint64_t>(d - 1)));
    const Eigen::MatrixXd a = fixtures::random_symmetric(d, rng);
    const Eigen::MatrixXd b = a + fixtures::random_symmetric(d, rng, 0.3);
    const double ga = k_gap(eigs_ascending(a), k);
    const double gb = k_gap(eigs_ascending(b), k);
    CHECK(std::abs(ga - gb) <= 2.0 * operator_norm(Eigen::MatrixXd(a - b)) + 1e-12);
  }
}

TEST_CASE("k_gap is invariant under conjugation") {
  RandomStream rng(33);
  for (int rep = 0; rep < 50; ++rep) {
    const int d = 3 + static_cast<int>(rng.index(4));
    const Eigen::MatrixXd a = fixtures::random_symmetric(d, rng);
    const Eigen::MatrixXd u =
        random_stiefel<double>(d, 0, derive_seed(33, {static_cast<std::uint64_t>(rep)}));
    const double g1 = k_gap(eigs_ascending(a), 2);
    const double g2 = k_gap(eigs_ascending(Eigen::MatrixXd(u * a * u.transpose())), 2);
    CHECK(g1 == doctest::Approx(g2).epsilon(1e-10));
  }
}

TEST_CASE("contour projection on diagonal fixtures") {
  Eigen::MatrixXd m = Eigen::Vector3d(1, 1, 5).asDiagonal();
  const Eigen::MatrixXd p = contour_projection<double>(m, {1.0, 1.0, 32});
  Eigen::MatrixXd expected = Eigen::Vector3d(1, 1, 0).asDiagonal();
  CHECK((p - expected).norm() <= 1e-8);

  // Contour enclosing the whole spectrum gives the identity.
  const Eigen::MatrixXd full = contour_projection<double>(m, {3.0, 4.0, 32});
  CHECK((full - Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-8);

  // Eigenvalue sitting on the contour.
  CHECK_THROWS_AS(contour_projection<double>(m, {3.0, 2.0, 32}),
                  contour_degenerate_error);
  CHECK_THROWS_AS(contour_projection<double>(m, {1.0, -2.0, 32}), config_error);
  CHECK_THROWS_AS(contour_projection<double>(m, {1.0, 1.0, 8}), config_error);
}

TEST_CASE("planted cluster keeps trace and projector algebra") {
  RandomStream rng(34);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd vals(6);
    vals << 2, 2, 2, rng.uniform(4.0, 5.0), rng.uniform(6.0, 7.0), rng.uniform(-3.0, -2.0);
    const Eigen::MatrixXcd u =
        random_stiefel<std::complex<double>>(6, 0, derive_seed(34, {static_cast<std::uint64_t>(rep)}));
    const Eigen::MatrixXcd m = u * vals.asDiagonal() * u.adjoint();

    // r0 = half the smallest distinct-eigenvalue distance.
    double r0 = std::numeric_limits<double>::infinity();
    const double distinct[4] = {2.0, vals(3), vals(4), vals(5)};
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        r0 = std::min(r0, 0.5 * std::abs(distinct[i] - distinct[j]));

    std::vector<Eigen::MatrixXcd> projs;
    for (int i = 0; i < 4; ++i)
      projs.push_back(contour_projection<std::complex<double>>(m, {distinct[i], r0, 32}));

    CHECK(std::abs(projs[0].trace().real() - 3.0) <= 1e-8);
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(6, 6);
    for (const auto& p : projs) {
      CHECK((p * p - p).norm() <= 1e-8);
      CHECK((p - p.adjoint()).norm() <= 1e-8);
      sum += p;
    }
    CHECK((sum - Eigen::MatrixXcd::Identity(6, 6)).norm() <= 1e-8);
    CHECK((projs[0] * projs[1]).norm() <= 1e-8);
    CHECK((projs[2] * projs[3]).norm() <= 1e-8);
  }
}

namespace {

// Reference with a k-fold value in the trailing block: columns of a Haar
// frame against diag(mu_1, .., mu_{d-k}, rep x k).
struct Planted {
  Eigen::MatrixXd basis;
  Eigen::VectorXd values;
  Eigen::MatrixXd matrix;
};

Planted plant_real(int d, int k, double rep_value, RandomStream& rng, std::uint64_t seed) {
  Planted p;
  p.values.resize(d);
  double v = rng.uniform(-2.0, -1.0);
  for (int i = 0; i < d - k; ++i) {
    p.values(i) = v;
    v += rng.uniform(1.0, 2.0);
  }
  for (int i = d - k; i < d; ++i) p.values(i) = rep_value;
  p.basis = random_stiefel<double>(d, 0, seed);
  p.matrix = p.basis * p.values.asDiagonal() * p.basis.transpose();
  return p;
}

}  // namespace

TEST_CASE("eigenbasis continuation: fixed point, perturbation, convergence") {
  RandomStream rng(35);
  const Planted p = plant_real(5, 2, 9.0, rng, 351);

  // Target equal to the reference: basis reproduced to quadrature accuracy.
  const auto same = continue_eigenbasis<double>(p.basis, p.values, p.matrix, 2);
  CHECK((same.basis - p.basis).cwiseAbs().maxCoeff() <= 1e-12);

  // Small symmetric perturbation: stay within 1e-4 of the reference frame
  // and match a brute-force eigendecomposition on the simple columns.
  const Eigen::MatrixXd s = fixtures::random_symmetric(5, rng);
  const Eigen::MatrixXd target = p.matrix + 1e-6 * s;
  const auto cont = continue_eigenbasis<double>(p.basis, p.values, target, 2);
  CHECK((cont.basis - p.basis).cwiseAbs().maxCoeff() <= 1e-4);
  CHECK((cont.basis.transpose() * cont.basis - Eigen::MatrixXd::Identity(5, 5)).norm() <= 1e-10);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> brute(target);
  const Eigen::MatrixXd aligned =
      phase_align<double>(brute.eigenvectors().leftCols(3), cont.basis.leftCols(3));
  CHECK((aligned - cont.basis.leftCols(3)).cwiseAbs().maxCoeff() <= 1e-4);
  // Cluster block: compare invariant subspaces.
  const Eigen::MatrixXd pc = cont.basis.rightCols(2) * cont.basis.rightCols(2).transpose();
  const Eigen::MatrixXd pb =
      brute.eigenvectors().rightCols(2) * brute.eigenvectors().rightCols(2).transpose();
  CHECK((pc - pb).norm() <= 1e-4);

  // Shrinking perturbations: deviation decreasing and -> 0, slope ~ -1 per
  // halving on the log2 scale.
  std::vector<double> devs;
  for (int n = 4; n <= 20; ++n) {
    const Eigen::MatrixXd b = p.matrix + std::ldexp(1.0, -n) * s;
    const auto c = continue_eigenbasis<double>(p.basis, p.values, b, 2);
    devs.push_back((c.basis - p.basis).cwiseAbs().maxCoeff());
  }
  for (std::size_t i = 1; i < devs.size(); ++i) CHECK(devs[i] <= devs[i - 1] * 1.10);
  CHECK(devs.back() <= 1e-5);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < devs.size(); ++i) {
    const double x = static_cast<double>(i);
    const double y = std::log2(devs[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double nn = static_cast<double>(devs.size());
  const double slope = (sxy - sx * sy / nn) / (sxx - sx * sx / nn);
  CHECK(slope < -0.8);
}

TEST_CASE("continuation with the repeated block below the simple eigenvalue") {
  // diag(0, 0, 3) with the 2-fold block reordered last: D = (3, 0, 0).
  Eigen::MatrixXd basis(3, 3);
  basis << 0, 1, 0, 0, 0, 1, 1, 0, 0;  // columns e3, e1, e2
  Eigen::VectorXd values(3);
  values << 3, 0, 0;
  Eigen::MatrixXd a = Eigen::Vector3d(0, 0, 3).asDiagonal();
  RandomStream rng(36);
  const Eigen::MatrixXd target = a + 1e-6 * fixtures::random_symmetric(3, rng);
  const auto cont = continue_eigenbasis<double>(basis, values, target, 2);
  CHECK((cont.basis - basis).cwiseAbs().maxCoeff() <= 1e-4);
  CHECK(cont.values(0) == doctest::Approx(3.0).epsilon(1e-5));
}

TEST_CASE("continuation failure modes") {
  RandomStream rng(37);
  const Planted p = plant_real(4, 2, 6.0, rng, 371);
  // A target far away drags eigenvalues across the contours.
  const Eigen::MatrixXd far = p.matrix + 10.0 * fixtures::random_symmetric(4, rng);
  CHECK_THROWS_AS(continue_eigenbasis<double>(p.basis, p.values, far, 2),
                  numeric_error);

  Eigen::VectorXd unsorted(4);
  unsorted << 2, 1, 5, 5;
  CHECK_THROWS_AS(continue_eigenbasis<double>(p.basis, unsorted, p.matrix, 2),
                  config_error);
}

TEST_CASE("phase_align fixes the comparison gauge") {
  RandomStream rng(38);
  const Eigen::MatrixXcd u = random_stiefel<std::complex<double>>(4, 0, 381);
  Eigen::MatrixXcd rotated = u;
  for (int j = 0; j < 4; ++j)
    rotated.col(j) *= std::polar(1.0, rng.uniform(-3.0, 3.0));
  const Eigen::MatrixXcd fixed = phase_align<std::complex<double>>(rotated, u);
  CHECK((fixed - u).norm() <= 1e-12);
  CHECK_THROWS_AS(
      phase_align<std::complex<double>>(Eigen::MatrixXcd::Zero(4, 4), u),
      phase_undefined_error);
}

TEST_CASE("spectrum path carries gaps over the grid") {
  ProcessConfig cfg;
  cfg.beta = 1;
  cfg.d = 3;
  cfg.kernel = CovarianceKernel::isotropic_fbm(0.5, 1);
  cfg.grid = GridSpec::uniform(1.0, 2.0, 16);
  cfg.seed = 99;
  const MatrixPath path = assemble_path(cfg);
  const SpectrumPath sp = spectrum_path(path, {2, 3});
  REQUIRE(sp.spectra.size() == 16);
  REQUIRE(sp.gaps.at(2).size() == 16);
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(sp.spectra[i](0) <= sp.spectra[i](1));
    CHECK(sp.spectra[i](1) <= sp.spectra[i](2));
    CHECK(sp.gaps.at(2)[i] <= sp.gaps.at(3)[i]);
    CHECK(sp.gaps.at(2)[i] >= 0.0);
  }
}
