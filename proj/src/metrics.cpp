#include "sphrec/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

#include "sphrec/error.hpp"

namespace sphrec {
namespace {

constexpr double kFourPi = 4. * std::numbers::pi;

void check_same_grid(const FieldSamples& a, const FieldSamples& b) {
  if (a.grid.n_theta != b.grid.n_theta || a.grid.n_phi != b.grid.n_phi ||
      a.values.size() != b.values.size())
    throw ContractError("metrics: sample grids differ");
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

RegionPartition make_partition(const SphereGrid& grid,
                               const AxialMaskSpec& spec) {
  RegionPartition p;
  p.in_r1.resize(grid.size());
  for (int i = 0; i < grid.n_theta; ++i) {
    const bool visible = mask_value(grid.nodes_z[i], spec) > 0.;
    const double w = grid.weight(i);
    for (int k = 0; k < grid.n_phi; ++k)
      p.in_r1[static_cast<std::size_t>(i) * grid.n_phi + k] = visible;
    if (visible) {
      p.n1 += grid.n_phi;
      p.area1 += w * grid.n_phi;
    } else {
      p.n0 += grid.n_phi;
      p.area0 += w * grid.n_phi;
    }
  }
  return p;
}

double field_norm(const FieldSamples& s) {
  double acc = 0.;
  for (int i = 0; i < s.grid.n_theta; ++i) {
    double row = 0.;
    for (int k = 0; k < s.grid.n_phi; ++k) row += s(i, k) * s(i, k);
    acc += row * s.grid.weight(i);
  }
  return std::sqrt(acc);
}

double rms_error(const FieldSamples& recon, const FieldSamples& truth) {
  check_same_grid(recon, truth);
  double acc = 0.;
  for (int i = 0; i < truth.grid.n_theta; ++i) {
    double row = 0.;
    for (int k = 0; k < truth.grid.n_phi; ++k) {
      const double d = recon(i, k) - truth(i, k);
      row += d * d;
    }
    acc += row * truth.grid.weight(i);
  }
  return std::sqrt(acc);
}

RegionErrors region_errors(const FieldSamples& recon,
                           const FieldSamples& truth,
                           const RegionPartition& partition) {
  check_same_grid(recon, truth);
  if (partition.in_r1.size() != truth.values.size())
    throw ContractError("region_errors: partition does not match grid");
  if (partition.n0 == 0 || partition.n1 == 0)
    throw DomainError("region_errors: empty region");
  double err[2] = {0., 0.}, nrm[2] = {0., 0.};
  const SphereGrid& g = truth.grid;
  for (int i = 0; i < g.n_theta; ++i) {
    double e_row[2] = {0., 0.}, n_row[2] = {0., 0.};
    for (int k = 0; k < g.n_phi; ++k) {
      const std::size_t idx = static_cast<std::size_t>(i) * g.n_phi + k;
      const int r = partition.in_r1[idx] ? 1 : 0;
      const double d = recon(i, k) - truth(i, k);
      e_row[r] += d * d;
      n_row[r] += truth(i, k) * truth(i, k);
    }
    for (int r = 0; r < 2; ++r) {
      err[r] += e_row[r] * g.weight(i);
      nrm[r] += n_row[r] * g.weight(i);
    }
  }
  RegionErrors out;
  out.rms0 = std::sqrt(kFourPi / partition.area0 * err[0]);
  out.rms1 = std::sqrt(kFourPi / partition.area1 * err[1]);
  out.norm0 = std::sqrt(kFourPi / partition.area0 * nrm[0]);
  out.norm1 = std::sqrt(kFourPi / partition.area1 * nrm[1]);
  out.rel0 = out.norm0 > 0. ? out.rms0 / out.norm0 : 0.;
  out.rel1 = out.norm1 > 0. ? out.rms1 / out.norm1 : 0.;
  return out;
}

double coeff_l2_error(const HarmonicCoeffs& a_hat, const HarmonicCoeffs& a) {
  if (a_hat.degree_bound() != a.degree_bound())
    throw ContractError("coeff_l2_error: degree bounds differ");
  double acc = 0.;
  for (int l = 0; l <= a.degree_bound(); ++l)
    for (int m = 0; m <= l; ++m)
      acc += (m == 0 ? 1. : 2.) * std::norm(a_hat(l, m) - a(l, m));
  return acc;
}

void write_report_table(std::ostream& os,
                        const std::vector<ErrorReport>& rows) {
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %12s %10s %12s %10s %12s %10s\n",
                "N_l", "RMSerr", "rel", "RMSerr_0", "rel_0", "RMSerr_1",
                "rel_1");
  os << line;
  for (const ErrorReport& r : rows) {
    const std::string label =
        r.tau == 0. ? std::string("0") : fmt("%.0e*C_l", r.tau);
    std::snprintf(line, sizeof line,
                  "%-10s %12.4e %10.3e %12.4e %10.3e %12.4e %10.3e\n",
                  label.c_str(), r.rms, r.rel, r.regions.rms0, r.regions.rel0,
                  r.regions.rms1, r.regions.rel1);
    os << line;
  }
  if (!rows.empty()) os << "||a||_l2 = " << fmt("%.6g", rows.front().truth_norm) << '\n';
}

void write_report_csv(std::ostream& os, const std::vector<ErrorReport>& rows) {
  for (const ErrorReport& r : rows) {
    const std::string t = "[tau=" + fmt("%.3g", r.tau) + "]";
    os << "rms_err" << t << ',' << fmt("%.17g", r.rms) << '\n';
    os << "relative_err" << t << ',' << fmt("%.17g", r.rel) << '\n';
    os << "rms_err0" << t << ',' << fmt("%.17g", r.regions.rms0) << '\n';
    os << "relative_err0" << t << ',' << fmt("%.17g", r.regions.rel0) << '\n';
    os << "rms_err1" << t << ',' << fmt("%.17g", r.regions.rms1) << '\n';
    os << "relative_err1" << t << ',' << fmt("%.17g", r.regions.rel1) << '\n';
    os << "coeff_l2_err" << t << ',' << fmt("%.17g", r.coeff_l2) << '\n';
    os << "truth_norm" << t << ',' << fmt("%.17g", r.truth_norm) << '\n';
  }
}

}  // namespace sphrec
