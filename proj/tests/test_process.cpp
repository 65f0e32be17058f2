#include <doctest.h>

#include <cmath>
#include <memory>

#include "eigencollide/errors.hpp"
#include "eigencollide/process.hpp"

using namespace eigencollide;

namespace {

ProcessConfig point_config(int beta, int d, double h, std::uint64_t seed) {
  ProcessConfig cfg;
  cfg.beta = beta;
  cfg.d = d;
  cfg.kernel = CovarianceKernel::isotropic_fbm(h, 1);
  cfg.grid = GridSpec::uniform(1.0, 2.0, 1);  // single time point t0 = 1, C = 1
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("zero drivers reproduce the shift exactly") {
  Eigen::MatrixXcd shift(2, 2);
  shift << 1.5, std::complex<double>(0.25, -0.75), std::complex<double>(0.25, 0.75), -2.0;
  const Eigen::VectorXd sv = [&] {
    ProcessConfig cfg = point_config(2, 2, 0.5, 0);
    cfg.shift = shift;
    cfg.validate();
    return cfg.shift_vec();
  }();
  const Eigen::VectorXd x = pack_entries(2, 2, sv, [](std::size_t) { return 0.0; });
  CHECK(herm_identify(x, 2) == shift);
}

TEST_CASE("GOE normalisation at a fixed time (beta=1)") {
  auto factor = std::make_shared<const CovarianceFactor>(
      CovarianceKernel::isotropic_fbm(0.5, 1), GridSpec::uniform(1.0, 2.0, 1));
  const int reps = 5000;
  double v11 = 0, v12 = 0, cross01_02 = 0, m11 = 0, m12 = 0;
  for (int r = 0; r < reps; ++r) {
    ProcessConfig cfg = point_config(1, 2, 0.5, derive_seed(42, {static_cast<std::uint64_t>(r)}));
    const MatrixPath path = assemble_path(cfg, factor);
    const Eigen::MatrixXd m = path.sym_at(0);
    v11 += m(0, 0) * m(0, 0);
    m11 += m(0, 0);
    v12 += m(0, 1) * m(0, 1);
    m12 += m(0, 1);
    cross01_02 += m(0, 0) * m(0, 1);
  }
  v11 = v11 / reps - (m11 / reps) * (m11 / reps);
  v12 = v12 / reps - (m12 / reps) * (m12 / reps);
  CHECK(v11 == doctest::Approx(2.0).epsilon(0.075));  // Var(X_11) = 2 C(t,t)
  CHECK(v12 == doctest::Approx(1.0).epsilon(0.08));   // Var(X_12) = C(t,t)
  CHECK(std::abs(cross01_02 / reps) < 0.05);          // independent entries
}

TEST_CASE("GUE normalisation at a fixed time (beta=2)") {
  auto factor = std::make_shared<const CovarianceFactor>(
      CovarianceKernel::isotropic_fbm(0.5, 1), GridSpec::uniform(1.0, 2.0, 1));
  const int reps = 5000;
  double vre = 0, vim = 0, mod2 = 0;
  for (int r = 0; r < reps; ++r) {
    ProcessConfig cfg = point_config(2, 2, 0.5, derive_seed(43, {static_cast<std::uint64_t>(r)}));
    const MatrixPath path = assemble_path(cfg, factor);
    const Eigen::MatrixXcd m = path.herm_at(0);
    vre += m(0, 1).real() * m(0, 1).real();
    vim += m(0, 1).imag() * m(0, 1).imag();
    mod2 += std::norm(m(0, 1));
  }
  CHECK(vre / reps == doctest::Approx(1.0).epsilon(0.08));
  CHECK(vim / reps == doctest::Approx(1.0).epsilon(0.08));
  CHECK(mod2 / reps == doctest::Approx(2.0).epsilon(0.06));  // E|X_12|^2 = 2 C(t,t)
}

TEST_CASE("off-diagonal entries are uncorrelated (beta=1, d=3)") {
  auto factor = std::make_shared<const CovarianceFactor>(
      CovarianceKernel::isotropic_fbm(0.5, 1), GridSpec::uniform(1.0, 2.0, 1));
  const int reps = 5000;
  double s01_02 = 0, s01_12 = 0, s02_12 = 0, q01 = 0, q02 = 0, q12 = 0;
  for (int r = 0; r < reps; ++r) {
    ProcessConfig cfg = point_config(1, 3, 0.5, derive_seed(44, {static_cast<std::uint64_t>(r)}));
    const Eigen::MatrixXd m = assemble_path(cfg, factor).sym_at(0);
    s01_02 += m(0, 1) * m(0, 2);
    s01_12 += m(0, 1) * m(1, 2);
    s02_12 += m(0, 2) * m(1, 2);
    q01 += m(0, 1) * m(0, 1);
    q02 += m(0, 2) * m(0, 2);
    q12 += m(1, 2) * m(1, 2);
  }
  CHECK(std::abs(s01_02 / std::sqrt(q01 * q02)) < 0.05);
  CHECK(std::abs(s01_12 / std::sqrt(q01 * q12)) < 0.05);
  CHECK(std::abs(s02_12 / std::sqrt(q02 * q12)) < 0.05);
}

TEST_CASE("driver bookkeeping and determinism") {
  ProcessConfig cfg = point_config(1, 3, 0.5, 7);
  cfg.grid = GridSpec::uniform(1.0, 2.0, 8);
  const MatrixPath a = assemble_path(cfg);
  CHECK(a.drivers == 6);  // d(d+1)/2
  const MatrixPath b = assemble_path(cfg);
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) CHECK(a.entries[i] == b.entries[i]);

  cfg.beta = 2;
  CHECK(assemble_path(cfg).drivers == 9);  // d^2

  // Entry lineages are pairwise distinct.
  const auto seeds = cfg.entry_seeds();
  for (std::size_t i = 0; i < seeds.size(); ++i)
    for (std::size_t j = i + 1; j < seeds.size(); ++j) CHECK(seeds[i] != seeds[j]);
}

TEST_CASE("config validation") {
  ProcessConfig cfg = point_config(3, 2, 0.5, 0);
  CHECK_THROWS_AS(cfg.validate(), config_error);
  cfg = point_config(1, 1, 0.5, 0);
  CHECK_THROWS_AS(cfg.validate(), config_error);

  cfg = point_config(1, 2, 0.5, 0);
  Eigen::MatrixXcd bad(2, 2);
  bad << 1.0, 2.0, 3.0, 4.0;  // not symmetric
  cfg.shift = bad;
  CHECK_THROWS_AS(cfg.validate(), config_error);

  cfg = point_config(1, 2, 0.5, 0);
  Eigen::MatrixXcd cplx(2, 2);
  cplx << 1.0, std::complex<double>(0, 1), std::complex<double>(0, -1), 1.0;
  cfg.shift = cplx;  // complex shift with beta=1
  CHECK_THROWS_AS(cfg.validate(), config_error);
}
