// eigencollide command-line tool: field synthesis, kernel checks, matrix-path
// simulation, collision phase scans, dimension estimation and stratum
// verification, with reproducible manifests.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "eigencollide/collision.hpp"
#include "eigencollide/dimension.hpp"
#include "eigencollide/errors.hpp"
#include "eigencollide/io.hpp"
#include "eigencollide/spectral.hpp"
#include "eigencollide/strata.hpp"
#include "eigencollide/version.hpp"

namespace ec = eigencollide;
using nlohmann::json;

namespace {

struct ToolOptions {
  int beta = 1;
  int d = 2;
  std::vector<int> k = {2};
  int n = 1;
  std::vector<std::vector<double>> hurst;
  std::string kernel = "isotropic-fbm";
  std::vector<double> interval = {1.0, 2.0};
  std::vector<std::size_t> grid = {1024};
  int paths = 100;
  std::vector<double> eps = {1e-2, 1e-3, 1e-4};
  int refine = 4;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
  int threads = 0;
  int pairs = 2000;
  int dmax = 5;
  int samples = 20;
};

void to_json(json& j, const ToolOptions& o) {
  j = json{{"beta", o.beta},     {"d", o.d},           {"k", o.k},
           {"n", o.n},           {"hurst", o.hurst},   {"kernel", o.kernel},
           {"interval", o.interval}, {"grid", o.grid}, {"paths", o.paths},
           {"eps", o.eps},       {"refine", o.refine}, {"seed", o.seed},
           {"out", o.out},       {"format", o.format}, {"threads", o.threads},
           {"pairs", o.pairs},   {"dmax", o.dmax},     {"samples", o.samples}};
}

void from_json(const json& j, ToolOptions& o) {
  j.at("beta").get_to(o.beta);
  j.at("d").get_to(o.d);
  j.at("k").get_to(o.k);
  j.at("n").get_to(o.n);
  j.at("hurst").get_to(o.hurst);
  j.at("kernel").get_to(o.kernel);
  j.at("interval").get_to(o.interval);
  j.at("grid").get_to(o.grid);
  j.at("paths").get_to(o.paths);
  j.at("eps").get_to(o.eps);
  j.at("refine").get_to(o.refine);
  j.at("seed").get_to(o.seed);
  j.at("out").get_to(o.out);
  j.at("format").get_to(o.format);
  j.at("threads").get_to(o.threads);
  j.at("pairs").get_to(o.pairs);
  j.at("dmax").get_to(o.dmax);
  j.at("samples").get_to(o.samples);
}

std::string timestamp_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ec::HurstVector hurst_vector(const ToolOptions& o, std::size_t idx = 0) {
  if (o.hurst.empty()) throw ec::config_error("missing --hurst");
  std::vector<double> h = o.hurst.at(idx);
  if (h.size() == 1 && o.n > 1) h.assign(static_cast<std::size_t>(o.n), h[0]);
  if (h.size() != static_cast<std::size_t>(o.n))
    throw ec::config_error("--hurst must carry 1 or --n components");
  return ec::HurstVector(h);
}

ec::CovarianceKernel make_kernel(const ToolOptions& o, std::size_t hurst_idx = 0) {
  ec::CovarianceKernel k;
  if (o.kernel == "isotropic-fbm")
    k.kind = ec::KernelKind::isotropic_fbm;
  else if (o.kernel == "fbm-sheet")
    k.kind = ec::KernelKind::fractional_brownian_sheet;
  else
    throw ec::config_error("--kernel must be isotropic-fbm or fbm-sheet");
  k.hurst = hurst_vector(o, hurst_idx);
  k.validate();
  return k;
}

ec::GridSpec make_grid(const ToolOptions& o) {
  if (o.interval.size() != 2 || !(o.interval[0] < o.interval[1]))
    throw ec::config_error("--interval expects A,B with A < B");
  std::vector<std::size_t> res = o.grid;
  if (res.size() == 1 && o.n > 1) res.assign(static_cast<std::size_t>(o.n), res[0]);
  if (res.size() != static_cast<std::size_t>(o.n))
    throw ec::config_error("--grid must carry 1 or --n axis resolutions");
  ec::GridSpec g;
  g.a.assign(static_cast<std::size_t>(o.n), o.interval[0]);
  g.b.assign(static_cast<std::size_t>(o.n), o.interval[1]);
  g.resolution = res;
  g.validate();
  return g;
}

ec::ProcessConfig make_process(const ToolOptions& o) {
  ec::ProcessConfig cfg;
  cfg.beta = o.beta;
  cfg.d = o.d;
  cfg.kernel = make_kernel(o);
  cfg.grid = make_grid(o);
  cfg.seed = o.seed;
  cfg.validate();
  return cfg;
}

int single_k(const ToolOptions& o) {
  if (o.k.size() != 1) throw ec::config_error("this command takes exactly one --k");
  return o.k.front();
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ec::resource_error("cannot open output file: " + path);
  os << body;
}

void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

json record_json(const ec::CollisionRecord& r, const std::vector<double>& eps) {
  json calls = json::array();
  for (std::size_t e = 0; e < eps.size(); ++e) {
    const char* call = r.hit(e) ? "hit" : (r.open(e) ? "open" : "excluded");
    calls.push_back({{"eps", eps[e]}, {"call", call}, {"flagged", r.flagged(e)}});
  }
  return json{{"replicate", r.replicate},
              {"min_gap", r.min_gap},
              {"gap_floor", r.gap_floor},
              {"argmin", r.argmin},
              {"max_increment", r.max_increment},
              {"refined_points", r.refined_points},
              {"calls", calls}};
}

std::string records_digest(const std::vector<ec::CollisionRecord>& records) {
  std::string buf;
  for (const auto& r : records) {
    buf += ec::fmt17(r.min_gap);
    buf += ec::fmt17(r.gap_floor);
    for (const auto& c : r.calls) buf += static_cast<char>('0' + static_cast<int>(c));
  }
  char hex[20];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a(buf)));
  return hex;
}

json cell_json(const ec::PhaseCell& c) {
  return json{{"beta", c.beta},
              {"d", c.d},
              {"k", c.k},
              {"hurst", c.hurst.h},
              {"Q", c.q},
              {"threshold", c.threshold},
              {"regime", c.regime},
              {"estimate", c.estimate},
              {"ci_low", c.ci_low},
              {"ci_high", c.ci_high},
              {"eps", c.eps_schedule},
              {"estimates", c.estimates},
              {"hit_fractions", c.hit_fractions},
              {"open_fraction", c.open_fraction},
              {"replicates", c.replicates}};
}

// ---------------------------------------------------------------------------
// subcommand handlers; each returns the payload files it wrote

std::vector<std::string> run_sample_field(const ToolOptions& o) {
  const auto kernel = make_kernel(o);
  const auto grid = make_grid(o);
  const ec::FieldSample sample = ec::sample_field(kernel, grid, o.seed);
  const std::string out = o.out.empty() ? "field.csv" : o.out;
  std::ostringstream body;
  ec::write_field_csv(body, sample);
  write_text_file(out, body.str());
  return {out};
}

std::vector<std::string> run_check_kernel(const ToolOptions& o) {
  const auto kernel = make_kernel(o);
  const auto grid = make_grid(o);
  const auto rep = ec::structure_check(kernel, grid, static_cast<std::size_t>(o.pairs));
  std::cout << "variance floor      c1 = " << ec::fmt17(rep.c1) << "\n"
            << "increment ratio min c2 = " << ec::fmt17(rep.c2) << "\n"
            << "increment ratio max c3 = " << ec::fmt17(rep.c3) << "\n"
            << "conditional floor   c4 = " << ec::fmt17(rep.c4) << "\n"
            << "pairs sampled          = " << rep.pairs << "\n"
            << "result                 = " << (rep.passed ? "pass" : "FAIL") << "\n";
  std::vector<std::string> outputs;
  if (o.format == "json") {
    const std::string out = o.out.empty() ? "kernel-report.json" : o.out;
    write_json_file(out, json{{"c1", rep.c1},
                              {"c2", rep.c2},
                              {"c3", rep.c3},
                              {"c4", rep.c4},
                              {"pairs", rep.pairs},
                              {"passed", rep.passed}});
    outputs.push_back(out);
  }
  if (!rep.passed) throw ec::numeric_error("kernel structure check failed");
  return outputs;
}

std::vector<std::string> run_simulate(const ToolOptions& o) {
  ec::ProcessConfig process = make_process(o);
  const int k = single_k(o);
  if (o.paths < 1) throw ec::config_error("--paths must be >= 1");
  auto factor = std::make_shared<const ec::CovarianceFactor>(process.kernel, process.grid);

  const std::string prefix = o.out.empty() ? "simulate" : o.out;
  std::vector<std::string> outputs;

  json records = json::array();
  for (int p = 0; p < o.paths; ++p) {
    ec::ProcessConfig pc = process;
    pc.seed = ec::derive_seed(o.seed, {ec::kSeedTagReplicate, static_cast<std::uint64_t>(p)});
    ec::GaussianPathSource src(pc, factor);
    const auto rec = ec::detect_collision(src, k, o.eps, o.refine);
    json rj = record_json(rec, o.eps);
    rj["replicate"] = p;
    records.push_back(rj);

    if (p == 0) {
      const ec::MatrixPath path = src.grid_path();
      std::ostringstream mcsv;
      ec::write_matrix_path_csv(mcsv, path);
      write_text_file(prefix + "_matrix.csv", mcsv.str());
      outputs.push_back(prefix + "_matrix.csv");

      std::ostringstream scsv;
      ec::write_spectrum_csv(scsv, process.grid, ec::spectrum_path(path, {k}));
      write_text_file(prefix + "_spectrum.csv", scsv.str());
      outputs.push_back(prefix + "_spectrum.csv");

      write_json_file(prefix + "_manifest.json",
                      json{{"beta", process.beta},
                           {"d", process.d},
                           {"kernel", o.kernel},
                           {"hurst", process.kernel.hurst.h},
                           {"seed", o.seed},
                           {"path_seed", pc.seed},
                           {"drivers", path.drivers},
                           {"grid_points", process.grid.point_count()}});
      outputs.push_back(prefix + "_manifest.json");
    }
  }
  write_json_file(prefix + "_records.json", records);
  outputs.push_back(prefix + "_records.json");
  return outputs;
}

std::vector<std::string> run_scan(const ToolOptions& o) {
  ToolOptions base_opts = o;
  ec::CollisionConfig base;
  base.process = make_process(base_opts);
  base.k = o.k.front();
  base.eps_schedule = o.eps;
  base.refine_depth = o.refine;
  base.replicates = o.paths;
  base.master_seed = o.seed;
  base.threads = o.threads;
  base.validate();

  std::vector<ec::HurstVector> hs;
  for (std::size_t i = 0; i < o.hurst.size(); ++i) hs.push_back(hurst_vector(o, i));

  std::string digest_buffer;
  const auto cells = ec::phase_scan(
      base, hs, o.k, [&](const ec::PhaseCell&, const std::vector<ec::CollisionRecord>& recs) {
        digest_buffer += records_digest(recs);
      });

  const std::string prefix = o.out.empty() ? "scan" : o.out;
  std::ostringstream csv;
  ec::write_scan_csv(csv, cells);
  write_text_file(prefix + ".csv", csv.str());

  json jcells = json::array();
  for (const auto& c : cells) jcells.push_back(cell_json(c));
  char digest_hex[20];
  std::snprintf(digest_hex, sizeof digest_hex, "%016llx",
                static_cast<unsigned long long>(fnv1a(digest_buffer)));
  write_json_file(prefix + ".json", json{{"config_echo", json(o)},
                                         {"cells", jcells},
                                         {"records_digest", digest_hex}});

  for (const auto& msg : ec::scan_monotonicity_violations(cells))
    std::cerr << "warning: " << msg << "\n";

  // A subcritical call needs the resolution to actually exclude collisions.
  for (const auto& c : cells)
    if (c.regime == "subcritical" && c.open_fraction > ec::kOpenFractionLimit)
      throw ec::inconclusive_resolution_error(
          "subcritical cell undecided on >5% of replicates at the finest eps; "
          "increase --refine or the grid");
  return {prefix + ".csv", prefix + ".json"};
}

std::vector<std::string> run_dim(const ToolOptions& o) {
  const int k = single_k(o);
  const auto hv = hurst_vector(o);
  const auto theory = ec::theoretical_dim(hv, k, o.beta);

  json out_json{{"theory", theory.value}, {"ell0", theory.ell0}, {"terms", theory.terms}};
  const std::string prefix = o.out.empty() ? "dim" : o.out;
  std::vector<std::string> outputs;

  if (o.paths > 0) {
    ec::CollisionConfig cfg;
    cfg.process = make_process(o);
    cfg.k = k;
    cfg.eps_schedule = o.eps;
    cfg.refine_depth = o.refine;
    cfg.replicates = o.paths;
    cfg.master_seed = o.seed;
    cfg.threads = o.threads;
    std::vector<ec::CollisionRecord> records;
    const auto cell = ec::estimate_probability(cfg, &records);

    // Aggregate the resolution-matched occupancy ladders of the paths
    // flagged at the finest epsilon; their summed counts carry the slope.
    std::vector<double> scales, counts;
    ec::TimeSet ts;
    std::set<std::vector<double>> dedup;
    std::size_t conditioned = 0;
    for (const auto& r : records) {
      if (!r.flagged(cfg.eps_schedule.size() - 1)) continue;
      ++conditioned;
      ts.cell_size = r.cell_size;
      if (scales.empty()) {
        scales = r.sojourn_scales;
        counts.assign(scales.size(), 0.0);
      }
      for (std::size_t m = 0; m < counts.size(); ++m) counts[m] += r.sojourn_counts[m];
      for (const auto& c : r.collision_cells)
        if (dedup.insert(c).second) ts.points.push_back(c);
    }
    out_json["conditioned_paths"] = conditioned;
    out_json["estimate"] = cell.estimate;
    if (!scales.empty() && !ts.points.empty()) {
      const auto boxes = ec::fit_box_counts(scales, counts);
      out_json["box_estimate"] = boxes.slope;
      out_json["residual"] = boxes.max_residual;
      out_json["r_squared"] = boxes.r_squared;
      out_json["cells"] = ts.points.size();
      std::ostringstream csv;
      ec::write_boxcount_csv(csv, scales, boxes);
      write_text_file(prefix + "_boxes.csv", csv.str());
      outputs.push_back(prefix + "_boxes.csv");

      json profile = json::array();
      for (double q : {0.2, 0.4, 0.6, 0.8}) {
        const auto e = ec::riesz_energy(ts.points, q);
        profile.push_back({{"q", q}, {"value", e.value}, {"diverged", e.diverged}});
      }
      out_json["energy_profile"] = profile;
    }
  }
  write_json_file(prefix + ".json", out_json);
  outputs.push_back(prefix + ".json");
  return outputs;
}

std::vector<std::string> run_verify_strata(const ToolOptions& o) {
  const auto checks = ec::verify_strata(o.dmax, o.samples, o.seed);
  bool all = true;
  std::printf("beta  d  k  expected  measured  pass\n");
  for (const auto& c : checks) {
    std::printf("%4d %2d %2d %9ld %9d  %s\n", c.beta, c.d, c.k, c.expected_dim,
                c.measured_rank, c.pass ? "yes" : "NO");
    all = all && c.pass;
  }
  const std::string out = o.out.empty() ? "strata.json" : o.out;
  json arr = json::array();
  for (const auto& c : checks)
    arr.push_back(json{{"beta", c.beta},
                       {"d", c.d},
                       {"k", c.k},
                       {"expected_dim", c.expected_dim},
                       {"measured_rank", c.measured_rank},
                       {"pass", c.pass}});
  write_json_file(out, arr);
  if (!all) throw ec::numeric_error("stratum dimension certification failed");
  return {out};
}

std::vector<std::string> dispatch(const std::string& command, const ToolOptions& o) {
  if (command == "sample-field") return run_sample_field(o);
  if (command == "check-kernel") return run_check_kernel(o);
  if (command == "simulate") return run_simulate(o);
  if (command == "scan") return run_scan(o);
  if (command == "dim") return run_dim(o);
  if (command == "verify-strata") return run_verify_strata(o);
  throw ec::config_error("unknown command in manifest: " + command);
}

void write_manifest(const std::string& command, const ToolOptions& o,
                    const std::string& started,
                    const std::vector<std::string>& outputs) {
  std::string base = o.out;
  if (base.empty()) base = command;
  write_json_file(base + ".manifest.json", json{{"command", command},
                                                {"options", json(o)},
                                                {"master_seed", o.seed},
                                                {"version", ec::kVersion},
                                                {"started_at", started},
                                                {"finished_at", timestamp_utc()},
                                                {"outputs", outputs}});
}

}  // namespace

int main(int argc, char** argv) {
  ToolOptions opts;
  std::string replay_path;

  CLI::App app{"eigenvalue collision toolkit for matrix-valued Gaussian processes"};
  app.set_config("--config", "", "key-value config file with [subcommand] sections");
  app.require_subcommand(1);

  const auto add_common = [&](CLI::App* sub, bool wants_process, bool wants_k = false) {
    sub->add_option("--n", opts.n, "number of time axes N");
    sub->add_option("--hurst", opts.hurst,
                    "Hurst components F[,F...]; repeat the flag for scan lists")
        ->delimiter(',');
    sub->add_option("--seed", opts.seed, "master seed (fallback: EIGENCOLLIDE_SEED)");
    sub->add_option("--out", opts.out, "output path or prefix");
    sub->add_option("--format", opts.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", opts.threads, "worker cap; 0 = all cores");
    if (wants_process) {
      sub->add_option("--beta", opts.beta, "1 = symmetric, 2 = Hermitian")
          ->check(CLI::IsMember({1, 2}));
      sub->add_option("--d", opts.d, "matrix dimension");
      if (wants_k)
        sub->add_option("--k", opts.k, "collision order (repeatable in scan)")->required();
      sub->add_option("--kernel", opts.kernel, "isotropic-fbm|fbm-sheet")
          ->check(CLI::IsMember({"isotropic-fbm", "fbm-sheet"}));
      sub->add_option("--interval", opts.interval, "time interval A,B")->delimiter(',');
      sub->add_option("--grid", opts.grid, "points per axis INT[,INT...]")->delimiter(',');
      sub->add_option("--paths", opts.paths, "replicate count");
      sub->add_option("--eps", opts.eps, "gap thresholds F[,F...], decreasing")
          ->delimiter(',');
      sub->add_option("--refine", opts.refine, "local refinement depth");
    }
  };

  auto* sample = app.add_subcommand("sample-field", "draw one exact Gaussian field sample");
  add_common(sample, true);
  auto* check = app.add_subcommand("check-kernel", "verify the kernel structure constants");
  add_common(check, true);
  check->add_option("--pairs", opts.pairs, "pair budget for the check");
  auto* simulate = app.add_subcommand("simulate", "matrix paths, spectra and collision records");
  add_common(simulate, true, true);
  auto* scan = app.add_subcommand("scan", "phase scan over Hurst values and collision orders");
  add_common(scan, true, true);
  auto* dim = app.add_subcommand("dim", "collision-set dimension: formula and box-count estimate");
  add_common(dim, true, true);
  auto* verify = app.add_subcommand("verify-strata", "certify stratum dimensions by tangent rank");
  add_common(verify, false);
  verify->add_option("--dmax", opts.dmax, "largest matrix dimension");
  verify->add_option("--samples", opts.samples, "random points per (beta,d,k)");
  auto* replay = app.add_subcommand("replay", "re-run a recorded manifest");
  replay->add_option("manifest", replay_path, "manifest JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 1;
  }

  CLI::App* sub = app.get_subcommands().front();

  try {
    std::string command = sub->get_name();
    if (command == "replay") {
      std::ifstream is(replay_path);
      if (!is) throw ec::config_error("cannot read manifest: " + replay_path);
      json manifest = json::parse(is);
      command = manifest.at("command").get<std::string>();
      opts = manifest.at("options").get<ToolOptions>();
      const std::string started = timestamp_utc();
      const auto outputs = dispatch(command, opts);
      write_manifest(command, opts, started, outputs);
      return 0;
    }

    // Fallback seed: flag and config both beat the environment.
    const CLI::Option* seed_opt = sub->get_option_no_throw("--seed");
    if (seed_opt && seed_opt->count() == 0) {
      if (const char* env = std::getenv("EIGENCOLLIDE_SEED"))
        opts.seed = std::strtoull(env, nullptr, 10);
    }

    const std::string started = timestamp_utc();
    const auto outputs = dispatch(command, opts);
    write_manifest(command, opts, started, outputs);
    return 0;
  } catch (const ec::inconclusive_resolution_error& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return 3;
  } catch (const ec::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
