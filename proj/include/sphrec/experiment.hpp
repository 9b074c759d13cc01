#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sphrec/estimator.hpp"
#include "sphrec/mask.hpp"
#include "sphrec/mask_operator.hpp"
#include "sphrec/metrics.hpp"

namespace sphrec {

/// Everything that determines a run. Keys of the key=value config file
/// and command-line flags share the names listed in apply_setting.
struct ExperimentConfig {
  int L = 100;
  int K = 900;
  int J = -1;  // -1: L + K
  double mask_a_deg = 10.;
  double mask_b_deg = 20.;
  std::vector<double> taus{0.};
  std::uint64_t seed = 1;
  SolveMethod method = SolveMethod::qr;
  std::vector<double> nu_grid = default_nu_grid();
  std::string spectrum = "paper";  // "paper" or a spectrum file path
  bool include_monopole_dipole = false;
  std::string out = "out";
  int grid_exactness = -1;  // -1: L + K + J
  double rank_tolerance = 1e-12;
  int threads = 0;  // 0: all cores

  int resolved_J() const { return J < 0 ? L + K : J; }
  int resolved_exactness() const {
    return grid_exactness < 0 ? L + K + resolved_J() : grid_exactness;
  }
  AxialMaskSpec mask_spec() const;
  /// Throws ConfigError naming the violated constraint.
  void validate() const;
};

/// Sets one key (e.g. "L", "mask-a-deg", "tau"). Lists are comma separated.
/// Throws ConfigError on unknown keys or unparsable values.
void apply_setting(ExperimentConfig& config, const std::string& key,
                   const std::string& value);

/// Reads "key = value" lines; '#' starts a comment.
void load_config_file(ExperimentConfig& config, const std::string& path);

PowerSpectrum config_spectrum(const ExperimentConfig& config);

struct OperatorCache {
  std::vector<MaskOperatorBlock> blocks;
  MaskCoeffs mask;
  int built = 0;
  int reused = 0;
};

/// Writes <out>/operator/block_<m>.bin plus manifest.txt. Blocks already on
/// disk under a matching manifest are loaded instead of rebuilt.
OperatorCache cmd_build_operator(const ExperimentConfig& config);

/// Full pipeline per noise level: field -> noise -> pixel-route masking ->
/// reconstruction -> metrics. Writes coefficient files, plot CSVs and
/// report.txt / report.csv under <out>.
std::vector<ErrorReport> cmd_experiment(const ExperimentConfig& config);

struct SpectralRow {
  int m = 0;
  double sigma_max = 0.;
  double sigma_min = 0.;
  double condition = 0.;
};

struct DiagnoseReport {
  std::vector<SpectralRow> rows;
  double v_min = 0.;
  double v_max = 0.;
  bool bound_ok = true;
};

/// Per-order singular value summary into <out>/diagnose.csv and the
/// sigma_max <= max|v| + 1e-8 check into <out>/diagnose.txt.
DiagnoseReport cmd_diagnose(const ExperimentConfig& config);

/// Writes <out>/mask_coeffs.txt (coefficient format, m = 0 only).
MaskCoeffs cmd_mask_coeffs(const ExperimentConfig& config);

/// Writes <out>/field.coeffs and <out>/field_samples.txt for one draw.
HarmonicCoeffs cmd_synth(const ExperimentConfig& config);

}  // namespace sphrec
