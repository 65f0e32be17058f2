#include "eigencollide/collision.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "eigencollide/errors.hpp"
#include "eigencollide/spectral.hpp"
#include "eigencollide/strata.hpp"

namespace eigencollide {

double collision_threshold(int beta, int k) {
  return static_cast<double>(stratum_codim(beta, k));
}

void CollisionConfig::validate() const {
  process.validate();
  if (k < 2 || k > process.d) throw config_error("CollisionConfig: requires 2 <= k <= d");
  if (eps_schedule.empty()) throw config_error("CollisionConfig: empty eps schedule");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] > 0)) throw config_error("CollisionConfig: eps must be positive");
    if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1]))
      throw config_error("CollisionConfig: eps schedule must strictly decrease");
  }
  if (refine_depth < 0) throw config_error("CollisionConfig: negative refine depth");
  if (replicates < 1) throw config_error("CollisionConfig: replicates must be >= 1");
  if (max_windows < 1) throw config_error("CollisionConfig: max_windows must be >= 1");
}

GaussianPathSource::GaussianPathSource(const ProcessConfig& config,
                                       std::shared_ptr<const CovarianceFactor> factor)
    : config_(config),
      shift_vec_(config.shift_vec()),
      bridge_(std::move(factor), config.entry_seeds()) {
  config_.validate();
  append_vecs(0);
}

void GaussianPathSource::append_vecs(std::size_t first) {
  for (std::size_t p = first; p < bridge_.size(); ++p)
    vecs_.push_back(pack_entries(config_.beta, config_.d, shift_vec_,
                                 [&](std::size_t f) { return bridge_.value(f, p); }));
}

std::size_t GaussianPathSource::add_points(const std::vector<Point>& pts) {
  const std::size_t first = bridge_.add_points(pts);
  append_vecs(first);
  return first;
}

MatrixPath GaussianPathSource::grid_path() const {
  MatrixPath path;
  path.config = config_;
  path.drivers = bridge_.field_count();
  const std::size_t n = config_.grid.point_count();
  path.entries.assign(vecs_.begin(), vecs_.begin() + static_cast<std::ptrdiff_t>(n));
  return path;
}

FunctionPathSource::FunctionPathSource(int beta, int d, GridSpec grid, MatrixFn fn)
    : beta_(beta), d_(d), grid_(std::move(grid)), fn_(std::move(fn)) {
  grid_.validate();
  times_ = grid_.points();
  vecs_.reserve(times_.size());
  for (const auto& t : times_) vecs_.push_back(fn_(t));
}

std::size_t FunctionPathSource::add_points(const std::vector<Point>& pts) {
  const std::size_t first = times_.size();
  for (const auto& p : pts) {
    times_.push_back(p);
    vecs_.push_back(fn_(p));
  }
  return first;
}

namespace {

double gap_of_vec(const Eigen::VectorXd& v, int beta, int d, int k) {
  const Eigen::VectorXd spec =
      (beta == 1) ? eigs_ascending(sym_identify(v, d)) : eigs_ascending(herm_identify(v, d));
  return k_gap(spec, k);
}

double increment_norm(const Eigen::VectorXd& va, const Eigen::VectorXd& vb,
                      int beta, int d) {
  const Eigen::VectorXd diff = va - vb;
  return (beta == 1) ? operator_norm(sym_identify(diff, d))
                     : operator_norm(herm_identify(diff, d));
}

// Leaf box of the refinement tree over the active (resolution >= 2) axes.
struct Leaf {
  Point lo, hi;                    // full-dimensional corners
  std::vector<std::size_t> verts;  // 2^A point indices, axis-mask order
  int depth = 0;
  double corner_min = 0.0;
  double w = 0.0;  // max edge increment norm (modulus surrogate)
  double floor_gap = 0.0;
  std::size_t coarse_cell = 0;
  std::size_t order = 0;
};

struct Detector {
  PathSource& src;
  int k;
  std::vector<double> gaps;  // per point index

  double gmin = std::numeric_limits<double>::infinity();
  std::size_t argmin_idx = 0;

  explicit Detector(PathSource& s, int kk) : src(s), k(kk) {}

  void eval_to(std::size_t end) {
    for (std::size_t i = gaps.size(); i < end; ++i) {
      gaps.push_back(gap_of_vec(src.vec(i), src.beta(), src.d(), k));
      if (gaps.back() < gmin) {
        gmin = gaps.back();
        argmin_idx = i;
      }
    }
  }

  double edge_w(const std::vector<std::size_t>& verts,
                const std::vector<std::size_t>& axes) const {
    double w = 0.0;
    const std::size_t a = axes.size();
    for (std::size_t m = 0; m < verts.size(); ++m)
      for (std::size_t bit = 0; bit < a; ++bit) {
        if (m & (std::size_t(1) << bit)) continue;
        const std::size_t m2 = m | (std::size_t(1) << bit);
        w = std::max(w, increment_norm(src.vec(verts[m]), src.vec(verts[m2]),
                                       src.beta(), src.d()));
      }
    return w;
  }

  void finish_leaf(Leaf& leaf, const std::vector<std::size_t>& axes) {
    leaf.corner_min = std::numeric_limits<double>::infinity();
    for (std::size_t v : leaf.verts) leaf.corner_min = std::min(leaf.corner_min, gaps[v]);
    leaf.w = edge_w(leaf.verts, axes);
    leaf.floor_gap = leaf.corner_min - 2.0 * leaf.w;
  }
};

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const unsigned hw = std::thread::hardware_concurrency();
  std::size_t t = threads > 0 ? static_cast<std::size_t>(threads) : (hw ? hw : 1);
  t = std::min(t, n);
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (std::size_t w = 0; w < t; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

CollisionRecord detect_collision(PathSource& source, int k,
                                 const std::vector<double>& eps_schedule,
                                 int refine_depth, int max_windows) {
  if (k < 2 || k > source.d()) throw config_error("detect_collision: requires 2 <= k <= d");
  if (eps_schedule.empty()) throw config_error("detect_collision: empty eps schedule");
  for (std::size_t i = 1; i < eps_schedule.size(); ++i)
    if (!(eps_schedule[i] < eps_schedule[i - 1]) || !(eps_schedule[i] > 0))
      throw config_error("detect_collision: eps schedule must strictly decrease and stay positive");

  const GridSpec& grid = source.grid();
  const std::size_t n0 = grid.point_count();
  std::vector<std::size_t> axes;  // active axes
  for (std::size_t j = 0; j < grid.dims(); ++j)
    if (grid.resolution[j] >= 2) axes.push_back(j);
  const std::size_t n_axes = axes.size();

  Detector det(source, k);
  det.eval_to(n0);

  // Row-major strides of the coarse grid.
  std::vector<std::size_t> stride(grid.dims(), 1);
  for (std::size_t j = grid.dims() - 1; j-- > 0;)
    stride[j] = stride[j + 1] * grid.resolution[j + 1];

  // Coarse cells: one box per unit hypercube of the active axes.
  std::size_t n_cells = n_axes == 0 ? 0 : 1;
  for (std::size_t a : axes) n_cells *= grid.resolution[a] - 1;

  std::vector<Leaf> coarse(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) {
    Leaf& leaf = coarse[c];
    leaf.coarse_cell = c;
    leaf.order = c;
    // Decode the cell multi-index over active axes.
    std::vector<std::size_t> cell_idx(n_axes);
    std::size_t rem = c;
    for (std::size_t a = n_axes; a-- > 0;) {
      const std::size_t w = grid.resolution[axes[a]] - 1;
      cell_idx[a] = rem % w;
      rem /= w;
    }
    leaf.lo = grid.point(0);
    leaf.hi = grid.point(0);
    std::size_t base = 0;
    for (std::size_t a = 0; a < n_axes; ++a) {
      const std::size_t ax = axes[a];
      base += cell_idx[a] * stride[ax];
      leaf.lo[ax] = grid.a[ax] + static_cast<double>(cell_idx[a]) * grid.spacing(ax);
      leaf.hi[ax] = leaf.lo[ax] + grid.spacing(ax);
    }
    leaf.verts.resize(std::size_t(1) << n_axes);
    for (std::size_t m = 0; m < leaf.verts.size(); ++m) {
      std::size_t idx = base;
      for (std::size_t a = 0; a < n_axes; ++a)
        if (m & (std::size_t(1) << a)) idx += stride[axes[a]];
      leaf.verts[m] = idx;
    }
    det.finish_leaf(leaf, axes);
  }

  // Candidate boxes: deepest certified floors below the coarsest threshold.
  const double eps0 = eps_schedule.front();
  std::vector<std::size_t> by_floor(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) by_floor[i] = i;
  std::sort(by_floor.begin(), by_floor.end(), [&](std::size_t a, std::size_t b) {
    return coarse[a].floor_gap < coarse[b].floor_gap;
  });

  std::vector<Leaf> leaves;
  std::vector<bool> is_candidate(n_cells, false);
  if (source.refinable() && refine_depth > 0) {
    for (std::size_t i = 0; i < n_cells && leaves.size() < static_cast<std::size_t>(max_windows); ++i) {
      const Leaf& cell = coarse[by_floor[i]];
      if (!(cell.floor_gap < eps0)) break;
      leaves.push_back(cell);
      is_candidate[cell.coarse_cell] = true;
    }
  }

  double max_increment = 0.0;
  for (const Leaf& cell : coarse) max_increment = std::max(max_increment, cell.w);

  // Zoom: split the worst certified floor until depth or budget runs out.
  std::size_t order_counter = n_cells;
  std::size_t refined_points = 0;
  const std::size_t split_budget =
      static_cast<std::size_t>(max_windows) * 2 * static_cast<std::size_t>(std::max(refine_depth, 1));
  for (std::size_t splits = 0; splits < split_budget; ++splits) {
    std::size_t pick = leaves.size();
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (leaves[i].depth >= refine_depth) continue;
      if (!(leaves[i].floor_gap < eps0)) continue;
      if (pick == leaves.size() || leaves[i].floor_gap < leaves[pick].floor_gap ||
          (leaves[i].floor_gap == leaves[pick].floor_gap && leaves[i].order < leaves[pick].order))
        pick = i;
    }
    if (pick == leaves.size()) break;

    Leaf parent = leaves[pick];
    leaves.erase(leaves.begin() + static_cast<std::ptrdiff_t>(pick));

    // 3^A lattice over the parent box; vertices already exist, the rest are
    // sampled in one conditional batch (lexicographic order, deterministic).
    const std::size_t n_lattice = [&] {
      std::size_t v = 1;
      for (std::size_t a = 0; a < n_axes; ++a) v *= 3;
      return v;
    }();
    std::vector<std::size_t> lattice_index(n_lattice, 0);
    std::vector<Point> fresh;
    std::vector<std::size_t> fresh_pos;
    for (std::size_t pcode = 0; pcode < n_lattice; ++pcode) {
      std::size_t rem = pcode;
      bool has_mid = false;
      std::size_t vert_mask = 0;
      Point pt = parent.lo;
      for (std::size_t a = 0; a < n_axes; ++a) {
        const std::size_t pos = rem % 3;
        rem /= 3;
        const std::size_t ax = axes[a];
        if (pos == 1) {
          has_mid = true;
          pt[ax] = 0.5 * (parent.lo[ax] + parent.hi[ax]);
        } else if (pos == 2) {
          vert_mask |= std::size_t(1) << a;
          pt[ax] = parent.hi[ax];
        }
      }
      if (has_mid) {
        fresh_pos.push_back(pcode);
        fresh.push_back(std::move(pt));
      } else {
        lattice_index[pcode] = parent.verts[vert_mask];
      }
    }
    const std::size_t first = source.add_points(fresh);
    refined_points += fresh.size();
    det.eval_to(source.size());
    for (std::size_t i = 0; i < fresh_pos.size(); ++i)
      lattice_index[fresh_pos[i]] = first + i;

    // 2^A children.
    for (std::size_t ccode = 0; ccode < parent.verts.size(); ++ccode) {
      Leaf child;
      child.depth = parent.depth + 1;
      child.coarse_cell = parent.coarse_cell;
      child.order = order_counter++;
      child.lo = parent.lo;
      child.hi = parent.hi;
      child.verts.resize(parent.verts.size());
      for (std::size_t m = 0; m < child.verts.size(); ++m) {
        std::size_t pcode = 0;
        std::size_t mult = 1;
        for (std::size_t a = 0; a < n_axes; ++a) {
          const std::size_t cbit = (ccode >> a) & 1;
          const std::size_t mbit = (m >> a) & 1;
          pcode += (cbit + mbit) * mult;
          mult *= 3;
        }
        child.verts[m] = lattice_index[pcode];
      }
      for (std::size_t a = 0; a < n_axes; ++a) {
        const std::size_t ax = axes[a];
        const double mid = 0.5 * (parent.lo[ax] + parent.hi[ax]);
        if ((ccode >> a) & 1)
          child.lo[ax] = mid;
        else
          child.hi[ax] = mid;
      }
      det.finish_leaf(child, axes);
      leaves.push_back(std::move(child));
    }
  }

  // Certified floor over settled cells and refined leaves; per-coarse-cell
  // floors drive the collision-cell export.
  double floor_global = det.gmin;  // exact for degenerate (single point) grids
  std::vector<double> cell_floor(n_cells, std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < n_cells; ++c)
    if (!is_candidate[c]) cell_floor[c] = coarse[c].floor_gap;
  for (const Leaf& leaf : leaves)
    cell_floor[leaf.coarse_cell] = std::min(cell_floor[leaf.coarse_cell], leaf.floor_gap);
  if (n_cells > 0) {
    floor_global = std::numeric_limits<double>::infinity();
    for (double f : cell_floor) floor_global = std::min(floor_global, f);
  }

  CollisionRecord rec;
  rec.min_gap = det.gmin;
  rec.gap_floor = floor_global;
  rec.argmin = source.time(det.argmin_idx);
  rec.max_increment = max_increment;
  rec.refined_points = refined_points;
  rec.cell_size = n_axes == 0 ? 0.0 : grid.spacing(axes[0]);
  rec.calls.reserve(eps_schedule.size());
  for (double eps : eps_schedule) {
    CellCall call;
    if (det.gmin < eps)
      call = CellCall::hit;
    else if (floor_global >= eps)
      call = CellCall::excluded;
    else
      call = CellCall::open;
    rec.calls.push_back(call);
  }
  // Resolution-matched occupancy ladder from the coarse grid.
  const double eps_fin = eps_schedule.back();
  if (n_axes > 0) {
    for (int m = 0; m <= 8; ++m) {
      const std::size_t w = std::size_t(1) << m;
      bool enough = true;
      for (std::size_t a : axes)
        if ((grid.resolution[a] - 1) / w < 2) enough = false;
      if (!enough) break;

      std::size_t occupied = 0;
      // Box multi-index over active axes.
      std::vector<std::size_t> n_boxes(n_axes);
      std::size_t total = 1;
      for (std::size_t a = 0; a < n_axes; ++a) {
        n_boxes[a] = (grid.resolution[axes[a]] - 1) / w;
        total *= n_boxes[a];
      }
      for (std::size_t b = 0; b < total; ++b) {
        std::size_t rem = b;
        std::size_t base = 0;
        std::vector<std::size_t> lo(n_axes);
        for (std::size_t a = n_axes; a-- > 0;) {
          lo[a] = (rem % n_boxes[a]) * w;
          rem /= n_boxes[a];
          base += lo[a] * stride[axes[a]];
        }
        // Minimum gap over every grid point of the box.
        double gmin = std::numeric_limits<double>::infinity();
        std::vector<std::size_t> offs(n_axes, 0);
        for (;;) {
          std::size_t idx = base;
          for (std::size_t a = 0; a < n_axes; ++a) idx += offs[a] * stride[axes[a]];
          gmin = std::min(gmin, det.gaps[idx]);
          std::size_t a = 0;
          for (; a < n_axes; ++a) {
            if (++offs[a] <= w) break;
            offs[a] = 0;
          }
          if (a == n_axes) break;
        }
        // Box modulus: the axis-spanning increments from the low corner.
        double wbox = 0.0;
        for (std::size_t a = 0; a < n_axes; ++a)
          wbox = std::max(wbox, increment_norm(source.vec(base),
                                               source.vec(base + w * stride[axes[a]]),
                                               source.beta(), source.d()));
        if (gmin < 2.0 * wbox + eps_fin) ++occupied;
      }
      rec.sojourn_scales.push_back(grid.spacing(axes[0]) * static_cast<double>(w));
      rec.sojourn_counts.push_back(static_cast<double>(occupied));
    }
  }

  // Unresolved boxes at the finest epsilon, at their final granularity:
  // untouched coarse cells plus refined leaves.
  const double eps_finest = eps_schedule.back();
  const auto push_center = [&](const Leaf& leaf) {
    Point center = leaf.lo;
    for (std::size_t a : axes) center[a] = 0.5 * (leaf.lo[a] + leaf.hi[a]);
    rec.collision_cells.push_back(std::move(center));
  };
  for (std::size_t c = 0; c < n_cells; ++c)
    if (!is_candidate[c] && coarse[c].floor_gap < eps_finest) push_center(coarse[c]);
  for (const Leaf& leaf : leaves)
    if (leaf.floor_gap < eps_finest) push_center(leaf);
  return rec;
}

namespace {

PhaseCell aggregate_cell(const CollisionConfig& config,
                         const std::vector<CollisionRecord>& records) {
  const std::size_t n = records.size();
  const std::size_t n_eps = config.eps_schedule.size();
  PhaseCell cell;
  cell.beta = config.process.beta;
  cell.d = config.process.d;
  cell.k = config.k;
  cell.hurst = config.process.kernel.hurst;
  cell.q = cell.hurst.exponent_sum();
  cell.threshold = collision_threshold(config.process.beta, config.k);
  cell.eps_schedule = config.eps_schedule;
  cell.replicates = n;

  std::size_t open_finest = 0;
  std::size_t flagged_finest = 0;
  for (std::size_t e = 0; e < n_eps; ++e) {
    std::size_t flags = 0, hits = 0;
    for (const auto& r : records) {
      if (r.flagged(e)) ++flags;
      if (r.hit(e)) ++hits;
    }
    cell.estimates.push_back(static_cast<double>(flags) / static_cast<double>(n));
    cell.hit_fractions.push_back(static_cast<double>(hits) / static_cast<double>(n));
    if (e + 1 == n_eps) {
      flagged_finest = flags;
      for (const auto& r : records)
        if (r.open(e)) ++open_finest;
    }
  }
  cell.estimate = cell.estimates.back();
  std::tie(cell.ci_low, cell.ci_high) = wilson_interval(flagged_finest, n);
  cell.open_fraction = static_cast<double>(open_finest) / static_cast<double>(n);

  const double tol = 1e-12 * std::max(1.0, cell.threshold);
  if (std::abs(cell.q - cell.threshold) <= tol)
    cell.regime = "critical";
  else
    cell.regime = cell.q > cell.threshold ? "supercritical" : "subcritical";
  return cell;
}

}  // namespace

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n,
                                          double z) {
  if (n == 0) throw config_error("wilson_interval: empty sample");
  if (successes > n) throw config_error("wilson_interval: successes > n");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  // Exact endpoints at the boundary counts.
  const double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = successes == n ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

PhaseCell estimate_probability(const CollisionConfig& config,
                               std::vector<CollisionRecord>* records_out) {
  config.validate();
  auto factor =
      std::make_shared<const CovarianceFactor>(config.process.kernel, config.process.grid);

  std::vector<CollisionRecord> records(static_cast<std::size_t>(config.replicates));
  parallel_for(records.size(), config.threads, [&](std::size_t r) {
    ProcessConfig pc = config.process;
    pc.seed = derive_seed(config.master_seed, {kSeedTagReplicate, r});
    GaussianPathSource src(pc, factor);
    records[r] = detect_collision(src, config.k, config.eps_schedule,
                                  config.refine_depth, config.max_windows);
    records[r].replicate = r;
  });

  PhaseCell cell = aggregate_cell(config, records);
  if (records_out) *records_out = std::move(records);
  return cell;
}

PhaseCell estimate_probability(const CollisionConfig& config) {
  return estimate_probability(config, nullptr);
}

std::vector<PhaseCell> phase_scan(const CollisionConfig& base,
                                  const std::vector<HurstVector>& hurst_list,
                                  const std::vector<int>& k_list,
                                  const CellSink& sink) {
  if (hurst_list.empty() || k_list.empty())
    throw config_error("phase_scan: empty hurst or k list");
  std::vector<PhaseCell> cells;
  std::uint64_t idx = 0;
  for (const auto& h : hurst_list)
    for (int k : k_list) {
      CollisionConfig cfg = base;
      cfg.process.kernel.hurst = h;
      cfg.k = k;
      cfg.master_seed = derive_seed(base.master_seed, {kSeedTagCell, idx++});
      std::vector<CollisionRecord> records;
      cells.push_back(estimate_probability(cfg, sink ? &records : nullptr));
      if (sink) sink(cells.back(), records);
    }
  return cells;
}

std::vector<PhaseCell> phase_scan(const CollisionConfig& base,
                                  const std::vector<HurstVector>& hurst_list,
                                  const std::vector<int>& k_list) {
  return phase_scan(base, hurst_list, k_list, CellSink());
}

std::vector<std::string> scan_monotonicity_violations(
    const std::vector<PhaseCell>& cells) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (i == j) continue;
      const auto& a = cells[i];
      const auto& b = cells[j];
      if (a.beta != b.beta || a.d != b.d || a.k != b.k) continue;
      if (!(a.q > b.q)) continue;  // a is the rougher cell
      if (a.estimate < b.estimate && a.ci_high < b.ci_low) {
        out.push_back("estimate increases with H at beta=" + std::to_string(a.beta) +
                      " d=" + std::to_string(a.d) + " k=" + std::to_string(a.k));
      }
    }
  return out;
}

}  // namespace eigencollide
