#pragma once

#include <stdexcept>
#include <string>

namespace eigencollide {

// Invalid arguments, malformed configuration, violated preconditions.
// The CLI maps this family to exit code 1.
class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical or resource failures (exit code 2).
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class kernel_not_psd_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

class resource_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

// An eigenvalue lies on or too close to the requested contour.
class contour_degenerate_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

// A quadrature or orthogonality tolerance could not be met.
class accuracy_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

// Target matrix is outside the neighbourhood where projected reference
// columns keep norm >= 1/2.
class out_of_neighborhood_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

// Eigenvalue count inside a contour does not match the reference cluster.
class spectral_drift_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

// Gram-Schmidt completion left the chart (normalisation denominator < 1/2).
class out_of_chart_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

// Phase fixing is undefined when a reference inner product vanishes.
class phase_undefined_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

// Requested separation cannot fit inside the eigenvalue box.
class infeasible_error : public config_error {
 public:
  using config_error::config_error;
};

// Dimension formula queried outside the nonempty regime.
class empty_regime_error : public config_error {
 public:
  using config_error::config_error;
};

class undefined_dimension_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

// Monte Carlo resolution too coarse to support the regime call (exit code 3).
class inconclusive_resolution_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eigencollide
