#include <doctest.h>

#include <cmath>
#include <memory>

#include "eigencollide/collision.hpp"
#include "eigencollide/errors.hpp"
#include "eigencollide/identify.hpp"
#include "eigencollide/spectral.hpp"

using namespace eigencollide;

namespace {

// Eigenvalues +-(t - 1.5): they cross at t = 1.5.
Eigen::VectorXd crossing_vec(const Point& t, double offset = 0.0) {
  Eigen::VectorXd x(3);
  x << (t[0] - 1.5) + offset, 0.0, (1.5 - t[0]);
  return x;
}

CollisionConfig small_config(double h, int beta = 1) {
  CollisionConfig cfg;
  cfg.process.beta = beta;
  cfg.process.d = 2;
  cfg.process.kernel = CovarianceKernel::isotropic_fbm(h, 1);
  cfg.process.grid = GridSpec::uniform(1.0, 2.0, 256);
  cfg.k = 2;
  cfg.eps_schedule = {1e-1, 1e-2, 1e-3};
  cfg.refine_depth = 3;
  cfg.replicates = 24;
  cfg.master_seed = 4242;
  cfg.threads = 2;
  return cfg;
}

}  // namespace

TEST_CASE("threshold values") {
  CHECK(collision_threshold(1, 2) == 2.0);
  CHECK(collision_threshold(2, 3) == 8.0);
  CHECK(collision_threshold(1, 4) == 9.0);
  CHECK_THROWS_AS(collision_threshold(1, 1), config_error);
}

TEST_CASE("deterministic crossing path is flagged at every eps") {
  // 129 grid points on [1,2] include t = 1.5 where the gap is exactly zero.
  FunctionPathSource src(1, 2, GridSpec::uniform(1.0, 2.0, 129),
                         [](const Point& t) { return crossing_vec(t); });
  const auto rec = detect_collision(src, 2, {1e-2, 1e-4, 1e-8}, 4);
  CHECK(rec.min_gap == 0.0);
  for (std::size_t e = 0; e < 3; ++e) {
    CHECK(rec.flagged(e));
    CHECK(rec.hit(e));
  }
  CHECK(rec.argmin[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(!rec.collision_cells.empty());
}

TEST_CASE("constant path with distinct diagonal is excluded below its gap") {
  Eigen::VectorXd constant(3);
  constant << 0.0, 0.0, 1.0;  // gap exactly 1
  FunctionPathSource src(1, 2, GridSpec::uniform(1.0, 2.0, 64),
                         [&](const Point&) { return constant; });
  const auto rec = detect_collision(src, 2, {2.0, 0.5, 1e-3}, 3);
  CHECK(rec.hit(0));        // eps above the spectral diameter flags trivially
  CHECK(!rec.flagged(1));   // certified: w = 0 so the floor equals the gap
  CHECK(!rec.flagged(2));
  CHECK(rec.gap_floor == doctest::Approx(1.0));
}

TEST_CASE("gap agrees with the 2x2 closed form") {
  ProcessConfig cfg;
  cfg.beta = 1;
  cfg.d = 2;
  cfg.kernel = CovarianceKernel::isotropic_fbm(0.4, 1);
  cfg.grid = GridSpec::uniform(1.0, 2.0, 64);
  cfg.seed = 7;
  const MatrixPath path = assemble_path(cfg);
  const SpectrumPath sp = spectrum_path(path, {2});
  for (std::size_t i = 0; i < path.entries.size(); ++i) {
    const Eigen::MatrixXd m = path.sym_at(i);
    const double closed =
        std::sqrt((m(0, 0) - m(1, 1)) * (m(0, 0) - m(1, 1)) + 4 * m(0, 1) * m(0, 1));
    CHECK(sp.gaps.at(2)[i] == doctest::Approx(closed).epsilon(1e-12));
  }

  cfg.beta = 2;
  const MatrixPath hp = assemble_path(cfg);
  const SpectrumPath hsp = spectrum_path(hp, {2});
  for (std::size_t i = 0; i < hp.entries.size(); ++i) {
    const Eigen::MatrixXcd m = hp.herm_at(i);
    const double closed = std::sqrt(std::norm(m(0, 0) - m(1, 1)) + 4 * std::norm(m(0, 1)));
    CHECK(hsp.gaps.at(2)[i] == doctest::Approx(closed).epsilon(1e-12));
  }
}

TEST_CASE("certified floor brackets the true minimum of a closed-form path") {
  // Offset crossing: min gap is exactly 0.3 at t = 1.5, never hit by the
  // 2^7-point grid.
  const double true_min = 0.3;
  FunctionPathSource src(1, 2, GridSpec::uniform(1.0, 2.0, 128), [&](const Point& t) {
    Eigen::VectorXd x(3);
    const double a = t[0] - 1.5;
    x << a, 0.15, -a;  // gap = 2 sqrt(a^2 + 0.0225) >= 0.3
    return x;
  });
  const auto rec = detect_collision(src, 2, {1e-1, 1e-2}, 5);
  CHECK(rec.gap_floor <= true_min + 1e-12);
  CHECK(rec.min_gap >= true_min);
  // Weyl soundness surrogate: the observed minimum sits within twice the
  // recorded local increment of the true minimum.
  CHECK(rec.min_gap - true_min <= 2.0 * rec.max_increment);
}

TEST_CASE("flags are monotone in eps and records deterministic") {
  CollisionConfig cfg = small_config(0.35);
  std::vector<CollisionRecord> recs1, recs2;
  const PhaseCell cell1 = estimate_probability(cfg, &recs1);
  const PhaseCell cell2 = estimate_probability(cfg, &recs2);

  for (std::size_t r = 0; r < recs1.size(); ++r) {
    for (std::size_t e = 1; e < cfg.eps_schedule.size(); ++e)
      if (recs1[r].flagged(e)) CHECK(recs1[r].flagged(e - 1));
    // Bit-exact reproduction under identical config.
    CHECK(recs1[r].min_gap == recs2[r].min_gap);
    CHECK(recs1[r].gap_floor == recs2[r].gap_floor);
    CHECK(recs1[r].argmin == recs2[r].argmin);
    CHECK(recs1[r].calls == recs2[r].calls);
  }
  CHECK(cell1.estimate == cell2.estimate);

  // Scheduling independence: serial run gives the same records.
  CollisionConfig serial = cfg;
  serial.threads = 1;
  std::vector<CollisionRecord> recs3;
  estimate_probability(serial, &recs3);
  for (std::size_t r = 0; r < recs1.size(); ++r)
    CHECK(recs1[r].min_gap == recs3[r].min_gap);

  // Estimates inherit the per-replicate monotonicity.
  for (std::size_t e = 1; e < cell1.estimates.size(); ++e)
    CHECK(cell1.estimates[e] <= cell1.estimates[e - 1]);
}

TEST_CASE("regime tags follow the threshold comparison") {
  CollisionConfig cfg = small_config(0.3);
  cfg.replicates = 4;
  cfg.process.grid = GridSpec::uniform(1.0, 2.0, 64);
  const PhaseCell super = estimate_probability(cfg);  // Q = 10/3 > 2
  CHECK(super.regime == "supercritical");
  CHECK(super.q == doctest::Approx(1.0 / 0.3));

  cfg.process.kernel = CovarianceKernel::isotropic_fbm(0.8, 1);
  const PhaseCell sub = estimate_probability(cfg);  // Q = 1.25 < 2
  CHECK(sub.regime == "subcritical");

  cfg.process.kernel = CovarianceKernel::isotropic_fbm(0.5, 1);
  const PhaseCell crit = estimate_probability(cfg);  // Q = 2 = threshold
  CHECK(crit.regime == "critical");
}

TEST_CASE("phase scan covers the hurst x k grid with stable tags") {
  CollisionConfig base = small_config(0.3);
  base.replicates = 4;
  base.process.grid = GridSpec::uniform(1.0, 2.0, 64);
  base.eps_schedule = {1e-1, 1e-2};
  base.refine_depth = 2;

  const std::vector<HurstVector> hs{HurstVector({0.2}), HurstVector({0.3}), HurstVector({0.4})};
  const auto cells = phase_scan(base, hs, {2});
  REQUIRE(cells.size() == 3);
  for (const auto& c : cells) CHECK(c.regime == "supercritical");  // Q = 1/H > 2.5 > 2

  CollisionConfig wide = base;
  wide.process.d = 3;  // room for the k = 3 window
  const auto mixed = phase_scan(wide, {HurstVector({0.3})}, {2, 3});
  CHECK(mixed[0].regime == "supercritical");  // Q = 3.33 > 2
  CHECK(mixed[1].regime == "subcritical");    // Q = 3.33 < 5

  CollisionConfig c2 = base;
  c2.process.beta = 2;
  const auto complex_cells = phase_scan(c2, {HurstVector({0.4})}, {2});
  CHECK(complex_cells[0].regime == "subcritical");  // Q = 2.5 < 3

  CHECK_THROWS_AS(phase_scan(base, {}, {2}), config_error);
}

TEST_CASE("wilson interval endpoints") {
  auto [lo0, hi0] = wilson_interval(0, 200);
  CHECK(lo0 == 0.0);
  CHECK(hi0 > 0.0);
  auto [lon, hin] = wilson_interval(200, 200);
  CHECK(hin == 1.0);
  CHECK(lon < 1.0);
  auto [lo1, hi1] = wilson_interval(1, 200);
  CHECK(lo1 > 0.0);  // one success already excludes zero
  CHECK(hi1 < 0.05);
  CHECK_THROWS_AS(wilson_interval(1, 0), config_error);
}

TEST_CASE("collision config validation") {
  CollisionConfig cfg = small_config(0.3);
  cfg.eps_schedule = {1e-2, 1e-1};
  CHECK_THROWS_AS(cfg.validate(), config_error);
  cfg = small_config(0.3);
  cfg.k = 5;
  CHECK_THROWS_AS(cfg.validate(), config_error);
  cfg = small_config(0.3);
  cfg.replicates = 0;
  CHECK_THROWS_AS(cfg.validate(), config_error);
  cfg = small_config(0.3);
  cfg.eps_schedule = {1e-2, -1e-3};
  CHECK_THROWS_AS(cfg.validate(), config_error);
}

TEST_CASE("refinement tightens the certified floor on smooth paths") {
  // Smooth near-miss: without refinement the coarse modulus keeps the floor
  // low; zooming in certifies the gap away.
  auto make_src = [] {
    return FunctionPathSource(1, 2, GridSpec::uniform(1.0, 2.0, 33), [](const Point& t) {
      Eigen::VectorXd x(3);
      const double a = 2.0 * (t[0] - 1.47);
      x << a, 0.04, -a;
      return x;
    });
  };
  auto coarse_src = make_src();
  const auto coarse = detect_collision(coarse_src, 2, {5e-2, 1e-3}, 0);
  auto fine_src = make_src();
  const auto fine = detect_collision(fine_src, 2, {5e-2, 1e-3}, 8);
  CHECK(fine.gap_floor > coarse.gap_floor);
  CHECK(fine.refined_points > 0);
  // True minimum gap is 0.08 > 5e-2: deep refinement certifies both eps out.
  CHECK(!fine.flagged(1));
}
