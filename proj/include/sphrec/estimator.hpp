#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sphrec/field.hpp"
#include "sphrec/harmonics.hpp"
#include "sphrec/mask_operator.hpp"

namespace sphrec {

enum class SolveMethod { qr, regularized };

struct EstimatorConfig {
  SolveMethod method = SolveMethod::qr;
  /// Diagonal row weights Gamma; empty means identity.
  Eigen::VectorXd gamma;
  /// Sigma = nu * I for the regularised path.
  double nu = 0.;
  /// Relative threshold on |diag R| for the QR path.
  double rank_tolerance = 1e-12;

  void validate() const;
};

struct BlockDiagnostics {
  int m = 0;
  int active_columns = 0;
  /// max|R_ii| / min|R_ii| on the QR path, cond of the normal matrix's
  /// Cholesky diagonal ratio squared on the regularised path.
  double condition_estimate = 0.;
  /// ||Gamma^{1/2} (E alpha - rhs)||.
  double residual_norm = 0.;
  bool rank_ok = true;
};

struct ReconstructionResult {
  HarmonicCoeffs a_hat;
  HarmonicCoeffs alpha;
  std::vector<BlockDiagnostics> diagnostics;
  /// max |Im a_hat_{l,0}| relative to max |a_hat|. Checked, never repaired.
  double reality_defect = 0.;
};

/// Weighted least squares min ||Gamma^{1/2}(E alpha - rhs)|| by Householder
/// QR of Gamma^{1/2} E; real and imaginary parts share the factorisation.
/// Throws RankError when some |R_ii| < rank_tolerance * max |R_ii|.
Eigen::VectorXcd solve_block_qr(const MaskOperatorBlock& block,
                                const Eigen::VectorXcd& rhs,
                                const Eigen::VectorXd& gamma = {},
                                double rank_tolerance = 1e-12);

/// (E^T Gamma E + nu I) alpha = E^T Gamma rhs by Cholesky. Throws
/// SolverError when the normal matrix is not numerically positive definite.
Eigen::VectorXcd solve_block_regularized(const MaskOperatorBlock& block,
                                         const Eigen::VectorXcd& rhs,
                                         const Eigen::VectorXd& gamma,
                                         double nu);

/// a_hat_{l,m} = C_l / (C_l + N_l) alpha_{l,m}; the factor is 0 when C_l = 0.
/// alpha[m] holds degrees m..L.
HarmonicCoeffs postprocess(const std::vector<Eigen::VectorXcd>& alpha,
                           const PowerSpectrum& C, const PowerSpectrum& N);
HarmonicCoeffs postprocess(const std::vector<Eigen::VectorXcd>& alpha,
                           const PowerSpectrum& C, const NoiseModel& N);

/// Solves each order independently and applies postprocess. Degrees with
/// C_l = 0 are dropped from the solve (their estimate is zero anyway), so
/// they take no part in rank decisions. Block errors carry the offending m.
ReconstructionResult reconstruct(const std::vector<MaskOperatorBlock>& blocks,
                                 const std::vector<Eigen::VectorXcd>& data,
                                 const PowerSpectrum& C,
                                 const PowerSpectrum& N,
                                 const EstimatorConfig& config);
ReconstructionResult reconstruct(const std::vector<MaskOperatorBlock>& blocks,
                                 const std::vector<Eigen::VectorXcd>& data,
                                 const PowerSpectrum& C, const NoiseModel& N,
                                 const EstimatorConfig& config);

struct NuSearchResult {
  double best_nu = 0.;
  double l2_error = 0.;
  /// Every (nu, error) tried, coarse grid first; failed solves are absent.
  std::vector<std::pair<double, double>> evaluated;
};

/// The nu grid used for the regularised comparison runs.
std::vector<double> default_nu_grid();

/// Grid search of the regularised estimator against a known truth using
/// coeff_l2_error. With refine set and more than one grid value, a second
/// pass tries best * (1 + k/10), k = 5, 10, ..., 25.
NuSearchResult grid_search_nu(const std::vector<MaskOperatorBlock>& blocks,
                              const std::vector<Eigen::VectorXcd>& data,
                              const PowerSpectrum& C, const PowerSpectrum& N,
                              const HarmonicCoeffs& truth,
                              const std::vector<double>& grid,
                              bool refine = true);

/// tr[Lambda (C - C (C+N)^{-1} C)] over all (l, m) with both signs of m;
/// lambda empty means identity.
double theoretical_mse(const PowerSpectrum& C, const PowerSpectrum& N,
                       const std::vector<double>& lambda = {});

}  // namespace sphrec
