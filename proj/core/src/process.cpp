#include "eigencollide/process.hpp"

#include "eigencollide/errors.hpp"

namespace eigencollide {

void ProcessConfig::validate() const {
  if (beta != 1 && beta != 2) throw config_error("ProcessConfig: beta must be 1 or 2");
  if (d < 2) throw config_error("ProcessConfig: d must be >= 2");
  kernel.validate();
  grid.validate();
  if (shift.size() != 0) {
    if (shift.rows() != d || shift.cols() != d)
      throw config_error("ProcessConfig: shift must be d x d");
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        if (beta == 1 && shift(i, j).imag() != 0.0)
          throw config_error("ProcessConfig: beta=1 shift must be real");
        if (shift(i, j) != std::conj(shift(j, i)))
          throw config_error("ProcessConfig: shift must be exactly symmetric/Hermitian");
      }
  }
}

std::size_t ProcessConfig::driver_count() const {
  return (beta == 1) ? sym_vec_size(d) : herm_vec_size(d);
}

std::uint64_t entry_seed(std::uint64_t master, int i, int j, int component) {
  return derive_seed(master, {kSeedTagEntry, static_cast<std::uint64_t>(i),
                              static_cast<std::uint64_t>(j),
                              static_cast<std::uint64_t>(component)});
}

std::vector<std::uint64_t> ProcessConfig::entry_seeds() const {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(driver_count());
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) seeds.push_back(entry_seed(seed, i, j, 0));
  if (beta == 2) {
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) seeds.push_back(entry_seed(seed, i, j, 1));
  }
  return seeds;
}

Eigen::VectorXd ProcessConfig::shift_vec() const {
  if (shift.size() == 0) {
    const std::size_t dim = (beta == 1) ? sym_vec_size(d) : herm_vec_size(d);
    return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  }
  return (beta == 1) ? sym_vectorize(shift.real()) : herm_vectorize(shift);
}

MatrixPath assemble_path(const ProcessConfig& config,
                         std::shared_ptr<const CovarianceFactor> factor) {
  config.validate();

  const auto seeds = config.entry_seeds();
  std::vector<FieldSample> fields;
  fields.reserve(seeds.size());
  for (std::uint64_t s : seeds) fields.push_back(sample_field(*factor, s));

  const std::size_t n = factor->points().size();
  const Eigen::VectorXd shift = config.shift_vec();

  MatrixPath path;
  path.config = config;
  path.drivers = seeds.size();
  path.entries.reserve(n);
  for (std::size_t p = 0; p < n; ++p)
    path.entries.push_back(pack_entries(
        config.beta, config.d, shift,
        [&](std::size_t f) { return fields[f].values[p]; }));
  return path;
}

MatrixPath assemble_path(const ProcessConfig& config) {
  config.validate();
  auto factor = std::make_shared<const CovarianceFactor>(config.kernel, config.grid);
  return assemble_path(config, factor);
}

}  // namespace eigencollide
