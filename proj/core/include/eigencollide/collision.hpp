#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "eigencollide/field.hpp"
#include "eigencollide/process.hpp"

namespace eigencollide {

// Exponent-sum threshold separating the zero-probability regime from the
// positive-probability regime of a k-fold collision.
double collision_threshold(int beta, int k);

struct CollisionConfig {
  ProcessConfig process;
  int k = 2;
  std::vector<double> eps_schedule;  // strictly decreasing, positive
  int refine_depth = 4;
  int replicates = 100;
  std::uint64_t master_seed = 0;
  int max_windows = 32;  // refined local minima per path
  int threads = 0;       // 0 = hardware concurrency

  void validate() const;
};

// Resolution-aware call per (replicate, epsilon):
//   hit      - an evaluated point has gap < eps (a point evaluation is an
//              exact sample, so this certifies a near-collision);
//   excluded - every cell's certified gap floor is >= eps, ruling an
//              eps-collision out up to the modulus surrogate;
//   open     - neither: the achieved resolution cannot decide eps.
// The headline flag is "not excluded"; open calls are counted separately.
enum class CellCall { hit, open, excluded };

struct CollisionRecord {
  std::size_t replicate = 0;
  std::vector<CellCall> calls;  // aligned with the eps schedule
  double min_gap = 0.0;         // refined minimum over all evaluated points
  double gap_floor = 0.0;       // certified lower bound for the path minimum
  Point argmin;                 // location of the refined minimum
  std::vector<Point> collision_cells;  // unresolved boxes at the finest eps
  double cell_size = 0.0;              // coarse cell extent (axis 0)
  double max_increment = 0.0;          // largest recorded per-cell matrix increment
  std::size_t refined_points = 0;
  // Resolution-matched occupancy ladder: at scale cell * 2^m a box counts as
  // an eps-collision cell when its gap dips below twice the increment
  // observed across that box. This is the occupancy notion whose slope
  // estimates the collision-set dimension.
  std::vector<double> sojourn_scales;
  std::vector<double> sojourn_counts;

  bool flagged(std::size_t e) const { return calls[e] != CellCall::excluded; }
  bool hit(std::size_t e) const { return calls[e] == CellCall::hit; }
  bool open(std::size_t e) const { return calls[e] == CellCall::open; }
};

// Access to a matrix path in canonical coordinates, with optional exact
// refinement at new time points.
class PathSource {
 public:
  virtual ~PathSource() = default;
  virtual int beta() const = 0;
  virtual int d() const = 0;
  virtual const GridSpec& grid() const = 0;
  virtual std::size_t size() const = 0;
  virtual const Point& time(std::size_t i) const = 0;
  virtual const Eigen::VectorXd& vec(std::size_t i) const = 0;
  virtual bool refinable() const { return true; }
  // Samples the path at new points; returns the index of the first.
  virtual std::size_t add_points(const std::vector<Point>& pts) = 0;
};

// Gaussian driver-backed path; refinement draws from the exact conditional
// law of every entry field given all points sampled so far.
class GaussianPathSource final : public PathSource {
 public:
  GaussianPathSource(const ProcessConfig& config,
                     std::shared_ptr<const CovarianceFactor> factor);

  int beta() const override { return config_.beta; }
  int d() const override { return config_.d; }
  const GridSpec& grid() const override { return config_.grid; }
  std::size_t size() const override { return vecs_.size(); }
  const Point& time(std::size_t i) const override { return bridge_.point(i); }
  const Eigen::VectorXd& vec(std::size_t i) const override { return vecs_[i]; }
  std::size_t add_points(const std::vector<Point>& pts) override;

  // Materialises the coarse-grid portion as an exportable path.
  MatrixPath grid_path() const;

 private:
  void append_vecs(std::size_t first);

  ProcessConfig config_;
  Eigen::VectorXd shift_vec_;
  FieldBridge bridge_;
  std::vector<Eigen::VectorXd> vecs_;
};

// Closed-form path for fixtures and deterministic tests.
class FunctionPathSource final : public PathSource {
 public:
  using MatrixFn = std::function<Eigen::VectorXd(const Point&)>;

  FunctionPathSource(int beta, int d, GridSpec grid, MatrixFn fn);

  int beta() const override { return beta_; }
  int d() const override { return d_; }
  const GridSpec& grid() const override { return grid_; }
  std::size_t size() const override { return times_.size(); }
  const Point& time(std::size_t i) const override { return times_[i]; }
  const Eigen::VectorXd& vec(std::size_t i) const override { return vecs_[i]; }
  std::size_t add_points(const std::vector<Point>& pts) override;

 private:
  int beta_;
  int d_;
  GridSpec grid_;
  MatrixFn fn_;
  std::vector<Point> times_;
  std::vector<Eigen::VectorXd> vecs_;
};

// Grid sweep of the k-gap with adaptive local refinement around the deepest
// certified floors, then per-epsilon calls from point evidence and floors.
CollisionRecord detect_collision(PathSource& source, int k,
                                 const std::vector<double>& eps_schedule,
                                 int refine_depth, int max_windows = 32);

struct PhaseCell {
  int beta = 1;
  int d = 2;
  int k = 2;
  HurstVector hurst;
  double q = 0.0;
  double threshold = 0.0;
  double estimate = 0.0;  // flagged fraction at the finest epsilon
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::string regime;  // "subcritical", "supercritical", "critical"
  std::vector<double> eps_schedule;
  std::vector<double> estimates;      // flagged fraction per epsilon
  std::vector<double> hit_fractions;  // point-certified fraction per epsilon
  double open_fraction = 0.0;         // open calls at the finest epsilon
  std::size_t replicates = 0;
};

// Open calls above this fraction at the finest epsilon mean the resolution
// cannot support a subcritical (probability ~ 0) claim.
inline constexpr double kOpenFractionLimit = 0.05;

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n,
                                          double z = 1.959963984540054);

PhaseCell estimate_probability(const CollisionConfig& config);
PhaseCell estimate_probability(const CollisionConfig& config,
                               std::vector<CollisionRecord>* records);

std::vector<PhaseCell> phase_scan(const CollisionConfig& base,
                                  const std::vector<HurstVector>& hurst_list,
                                  const std::vector<int>& k_list);

// As above, also handing every cell's replicate records to `sink`.
using CellSink =
    std::function<void(const PhaseCell&, const std::vector<CollisionRecord>&)>;
std::vector<PhaseCell> phase_scan(const CollisionConfig& base,
                                  const std::vector<HurstVector>& hurst_list,
                                  const std::vector<int>& k_list,
                                  const CellSink& sink);

// Diagnostic: estimates should not increase with H at fixed (beta, d, k)
// beyond confidence-interval overlap. Returns one message per violation.
std::vector<std::string> scan_monotonicity_violations(
    const std::vector<PhaseCell>& cells);

}  // namespace eigencollide
