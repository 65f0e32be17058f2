#include "eigencollide/io.hpp"

#include <cstdio>

#include "eigencollide/errors.hpp"

namespace eigencollide {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write_time_header(std::ostream& os, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) os << "t_" << (j + 1) << ',';
}

void write_time(std::ostream& os, const Point& t) {
  for (double v : t) os << fmt17(v) << ',';
}

}  // namespace

void write_field_csv(std::ostream& os, const FieldSample& sample) {
  const std::size_t n = sample.grid.dims();
  write_time_header(os, n);
  os << "value\n";
  const auto pts = sample.grid.points();
  if (pts.size() != sample.values.size())
    throw config_error("write_field_csv: value count does not match the grid");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    write_time(os, pts[i]);
    os << fmt17(sample.values[i]) << '\n';
  }
}

void write_matrix_path_csv(std::ostream& os, const MatrixPath& path) {
  const std::size_t n = path.config.grid.dims();
  const int d = path.config.d;
  write_time_header(os, n);
  if (path.config.beta == 1)
    os << "vec_index,value\n";
  else
    os << "vec_index,value_re,value_im\n";
  const auto pts = path.config.grid.points();
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const Eigen::VectorXd& x = path.entries[p];
    std::size_t vi = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j, ++vi) {
        write_time(os, pts[p]);
        if (path.config.beta == 1) {
          os << vi << ',' << fmt17(x(static_cast<Eigen::Index>(sym_index(i, j, d)))) << '\n';
        } else {
          const double re = x(static_cast<Eigen::Index>(herm_re_index(i, j, d)));
          const double im =
              (i == j) ? 0.0 : x(static_cast<Eigen::Index>(herm_im_index(i, j, d)));
          os << vi << ',' << fmt17(re) << ',' << fmt17(im) << '\n';
        }
      }
  }
}

void write_spectrum_csv(std::ostream& os, const GridSpec& grid,
                        const SpectrumPath& spectra) {
  const std::size_t n = grid.dims();
  write_time_header(os, n);
  const std::size_t d =
      spectra.spectra.empty() ? 0 : static_cast<std::size_t>(spectra.spectra.front().size());
  for (std::size_t i = 0; i < d; ++i) os << "lambda_" << (i + 1) << ',';
  bool first = true;
  for (const auto& [k, gaps] : spectra.gaps) {
    if (!first) os << ',';
    os << "kgap_" << k;
    first = false;
  }
  os << '\n';
  const auto pts = grid.points();
  for (std::size_t p = 0; p < pts.size(); ++p) {
    write_time(os, pts[p]);
    for (std::size_t i = 0; i < d; ++i)
      os << fmt17(spectra.spectra[p](static_cast<Eigen::Index>(i))) << ',';
    first = true;
    for (const auto& [k, gaps] : spectra.gaps) {
      if (!first) os << ',';
      os << fmt17(gaps[p]);
      first = false;
    }
    os << '\n';
  }
}

void write_scan_csv(std::ostream& os, const std::vector<PhaseCell>& cells) {
  if (cells.empty()) throw config_error("write_scan_csv: no cells");
  const std::size_t n = cells.front().hurst.dims();
  os << "beta,d,k,N,";
  for (std::size_t j = 0; j < n; ++j) os << "H_" << (j + 1) << ',';
  os << "Q,threshold,regime,eps,estimate,ci_low,ci_high\n";
  for (const auto& c : cells) {
    for (std::size_t e = 0; e < c.eps_schedule.size(); ++e) {
      os << c.beta << ',' << c.d << ',' << c.k << ',' << c.hurst.dims() << ',';
      for (double h : c.hurst.h) os << fmt17(h) << ',';
      os << fmt17(c.q) << ',' << fmt17(c.threshold) << ',' << c.regime << ','
         << fmt17(c.eps_schedule[e]) << ',' << fmt17(c.estimates[e]) << ',';
      // The confidence interval is reported for the finest epsilon.
      if (e + 1 == c.eps_schedule.size())
        os << fmt17(c.ci_low) << ',' << fmt17(c.ci_high) << '\n';
      else
        os << ",\n";
    }
  }
}

void write_boxcount_csv(std::ostream& os, const std::vector<double>& scales,
                        const BoxCountResult& boxes) {
  os << "scale,occupied\n";
  for (std::size_t i = 0; i < scales.size(); ++i)
    os << fmt17(scales[i]) << ',' << boxes.occupied[i] << '\n';
}

}  // namespace eigencollide
