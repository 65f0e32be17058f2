#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "eigencollide/collision.hpp"
#include "eigencollide/dimension.hpp"
#include "eigencollide/field.hpp"
#include "eigencollide/process.hpp"
#include "eigencollide/spectral.hpp"

namespace eigencollide {

// Decimal, 17 significant digits: round-trips doubles exactly.
std::string fmt17(double v);

// Header t_1,...,t_N,value; rows in row-major grid order.
void write_field_csv(std::ostream& os, const FieldSample& sample);

// Header t_1..t_N,vec_index,value for beta=1; value_re,value_im columns over
// the upper-triangle entries for beta=2.
void write_matrix_path_csv(std::ostream& os, const MatrixPath& path);

// Header t_1..t_N,lambda_1..lambda_d, one kgap_k column per requested k.
void write_spectrum_csv(std::ostream& os, const GridSpec& grid,
                        const SpectrumPath& spectra);

// Phase table: beta,d,k,N,H_1..H_N,Q,threshold,regime,eps,estimate,ci_low,
// ci_high — one row per (cell, eps).
void write_scan_csv(std::ostream& os, const std::vector<PhaseCell>& cells);

void write_boxcount_csv(std::ostream& os, const std::vector<double>& scales,
                        const BoxCountResult& boxes);

}  // namespace eigencollide
