#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sphrec/harmonics.hpp"
#include "sphrec/mask.hpp"

namespace sphrec {

/// Grid points split into R0 (analytic mask exactly zero) and R1 (v > 0).
struct RegionPartition {
  std::vector<unsigned char> in_r1;  // one label per grid point
  std::size_t n0 = 0;
  std::size_t n1 = 0;
  double area0 = 0.;  // sum of quadrature weights over R0
  double area1 = 0.;
};

RegionPartition make_partition(const SphereGrid& grid,
                               const AxialMaskSpec& spec);

/// sqrt(sum_i w_i |x_i|^2); quadrature weights stand in for 4 pi / N_pix.
double field_norm(const FieldSamples& samples);

/// sqrt(sum_i w_i |recon_i - truth_i|^2).
double rms_error(const FieldSamples& recon, const FieldSamples& truth);

struct RegionErrors {
  double rms0 = 0., rel0 = 0.;
  double rms1 = 0., rel1 = 0.;
  double norm0 = 0., norm1 = 0.;  // ||truth||_{l2(R_j)}
};

/// Per-region errors, each normalised as (4 pi / area_j) sum_{R_j} w e^2.
RegionErrors region_errors(const FieldSamples& recon,
                           const FieldSamples& truth,
                           const RegionPartition& partition);

/// ||a(0) - a_hat(0)||^2 + 2 sum_{m>0} ||a(m) - a_hat(m)||^2.
double coeff_l2_error(const HarmonicCoeffs& a_hat, const HarmonicCoeffs& a);

/// One report row: global and regional errors for a noise level.
struct ErrorReport {
  double tau = 0.;
  double rms = 0.;
  double rel = 0.;
  double truth_norm = 0.;
  RegionErrors regions;
  double coeff_l2 = 0.;
};

/// Aligned table with one row per noise level.
void write_report_table(std::ostream& os, const std::vector<ErrorReport>& rows);
/// "metric,value" lines; metric names carry the noise level.
void write_report_csv(std::ostream& os, const std::vector<ErrorReport>& rows);

}  // namespace sphrec
