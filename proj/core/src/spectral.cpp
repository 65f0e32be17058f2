#include "eigencollide/spectral.hpp"

namespace eigencollide {

double k_gap(const Eigen::VectorXd& spectrum, int k) {
  const int d = static_cast<int>(spectrum.size());
  if (k < 2 || k > d) throw config_error("k_gap: requires 2 <= k <= d");
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i + k <= d; ++i)
    best = std::min(best, spectrum(i + k - 1) - spectrum(i));
  return best;
}

double operator_norm(const Eigen::MatrixXd& m) {
  const Eigen::VectorXd e = eigs_ascending(m);
  return std::max(std::abs(e(0)), std::abs(e(e.size() - 1)));
}

double operator_norm(const Eigen::MatrixXcd& m) {
  const Eigen::VectorXd e = eigs_ascending(m);
  return std::max(std::abs(e(0)), std::abs(e(e.size() - 1)));
}

SpectrumPath spectrum_path(const MatrixPath& path, const std::vector<int>& ks) {
  SpectrumPath out;
  out.spectra.reserve(path.entries.size());
  for (std::size_t p = 0; p < path.entries.size(); ++p) {
    Eigen::VectorXd spec = (path.config.beta == 1)
                               ? eigs_ascending(path.sym_at(p))
                               : eigs_ascending(path.herm_at(p));
    for (int k : ks) out.gaps[k].push_back(k_gap(spec, k));
    out.spectra.push_back(std::move(spec));
  }
  return out;
}

}  // namespace eigencollide
