#include "sphrec/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sphrec/error.hpp"
#include "sphrec/metrics.hpp"

namespace sphrec {
namespace {

struct BlockSolution {
  Eigen::VectorXcd alpha;
  BlockDiagnostics diag;
};

Eigen::MatrixXd split(const Eigen::VectorXcd& v) {
  Eigen::MatrixXd out(v.size(), 2);
  out.col(0) = v.real();
  out.col(1) = v.imag();
  return out;
}

Eigen::VectorXcd join(const Eigen::MatrixXd& m) {
  Eigen::VectorXcd out(m.rows());
  out.real() = m.col(0);
  out.imag() = m.col(1);
  return out;
}

Eigen::VectorXd row_weights(const Eigen::VectorXd& gamma, Eigen::Index rows) {
  if (gamma.size() == 0) return Eigen::VectorXd::Ones(rows);
  if (gamma.size() != rows)
    throw ContractError("estimator: gamma has " + std::to_string(gamma.size()) +
                        " entries, block has " + std::to_string(rows) +
                        " rows");
  if ((gamma.array() <= 0.).any())
    throw DomainError("estimator: gamma entries must be positive");
  return gamma;
}

BlockSolution qr_solve(const Eigen::MatrixXd& E, const Eigen::VectorXcd& rhs,
                       const Eigen::VectorXd& gamma, double tol, int m) {
  BlockSolution out;
  out.diag.m = m;
  out.diag.active_columns = static_cast<int>(E.cols());
  if (rhs.size() != E.rows())
    throw ContractError("solve_block_qr: rhs length does not match rows");
  const Eigen::VectorXd theta = row_weights(gamma, E.rows()).cwiseSqrt();
  const Eigen::Index n = E.cols();
  if (n == 0) {
    out.alpha = Eigen::VectorXcd::Zero(0);
    return out;
  }
  if (E.rows() < n)
    throw RankError("order " + std::to_string(m) + ": fewer rows than columns",
                    m);
  const Eigen::MatrixXd A = theta.asDiagonal() * E;
  const Eigen::MatrixXd b = theta.asDiagonal() * split(rhs);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  const Eigen::VectorXd rdiag =
      qr.matrixQR().diagonal().head(n).cwiseAbs();
  const double rmax = rdiag.maxCoeff(), rmin = rdiag.minCoeff();
  out.diag.condition_estimate =
      rmin > 0. ? rmax / rmin : std::numeric_limits<double>::infinity();
  if (!(rmin >= tol * rmax)) {
    out.diag.rank_ok = false;
    throw RankError("order " + std::to_string(m) +
                        ": triangular factor is rank deficient (min|R_ii|/"
                        "max|R_ii| = " +
                        std::to_string(rmin / rmax) + ")",
                    m);
  }
  const Eigen::MatrixXd qtb = qr.householderQ().transpose() * b;
  const Eigen::MatrixXd x = qr.matrixQR()
                                .topLeftCorner(n, n)
                                .triangularView<Eigen::Upper>()
                                .solve(qtb.topRows(n));
  out.alpha = join(x);
  out.diag.residual_norm = (A * x - b).norm();
  return out;
}

BlockSolution regularized_solve(const Eigen::MatrixXd& E,
                                const Eigen::VectorXcd& rhs,
                                const Eigen::VectorXd& gamma, double nu,
                                int m) {
  BlockSolution out;
  out.diag.m = m;
  out.diag.active_columns = static_cast<int>(E.cols());
  if (rhs.size() != E.rows())
    throw ContractError("solve_block_regularized: rhs length mismatch");
  if (!(nu >= 0.)) throw DomainError("solve_block_regularized: nu < 0");
  if (E.cols() == 0) {
    out.alpha = Eigen::VectorXcd::Zero(0);
    return out;
  }
  const Eigen::VectorXd g = row_weights(gamma, E.rows());
  const Eigen::MatrixXd EtG = E.transpose() * g.asDiagonal();
  Eigen::MatrixXd normal = EtG * E;
  normal.diagonal().array() += nu;
  const Eigen::MatrixXd b = EtG * split(rhs);
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success)
    throw SolverError("order " + std::to_string(m) +
                          ": regularised normal matrix is not positive "
                          "definite (nu=" +
                          std::to_string(nu) + ")",
                      m);
  const Eigen::MatrixXd x = llt.solve(b);
  const Eigen::VectorXd ld = llt.matrixL().toDenseMatrix().diagonal().cwiseAbs();
  const double ratio = ld.maxCoeff() / ld.minCoeff();
  out.diag.condition_estimate = ratio * ratio;
  out.alpha = join(x);
  out.diag.residual_norm =
      (g.cwiseSqrt().asDiagonal() * (E * x - split(rhs))).norm();
  return out;
}

std::vector<int> active_degrees(int m, int L, const PowerSpectrum& C) {
  std::vector<int> cols;
  for (int l = m; l <= L; ++l)
    if (C[l] > 0.) cols.push_back(l);
  return cols;
}

}  // namespace

void EstimatorConfig::validate() const {
  if (!(nu >= 0.)) throw DomainError("EstimatorConfig: nu must be >= 0");
  if ((gamma.array() <= 0.).any())
    throw DomainError("EstimatorConfig: gamma entries must be positive");
  if (!(rank_tolerance >= 0.))
    throw DomainError("EstimatorConfig: rank_tolerance must be >= 0");
}

Eigen::VectorXcd solve_block_qr(const MaskOperatorBlock& block,
                                const Eigen::VectorXcd& rhs,
                                const Eigen::VectorXd& gamma,
                                double rank_tolerance) {
  return qr_solve(block.matrix, rhs, gamma, rank_tolerance, block.m).alpha;
}

Eigen::VectorXcd solve_block_regularized(const MaskOperatorBlock& block,
                                         const Eigen::VectorXcd& rhs,
                                         const Eigen::VectorXd& gamma,
                                         double nu) {
  return regularized_solve(block.matrix, rhs, gamma, nu, block.m).alpha;
}

HarmonicCoeffs postprocess(const std::vector<Eigen::VectorXcd>& alpha,
                           const PowerSpectrum& C, const PowerSpectrum& N) {
  const int L = static_cast<int>(alpha.size()) - 1;
  if (C.degree_bound() < L || N.degree_bound() < L)
    throw ContractError("postprocess: spectra shorter than degree bound");
  HarmonicCoeffs out(L);
  for (int m = 0; m <= L; ++m) {
    if (alpha[m].size() != L - m + 1)
      throw ContractError("postprocess: alpha slice length mismatch");
    for (int l = m; l <= L; ++l) {
      const double factor = C[l] > 0. ? C[l] / (C[l] + N[l]) : 0.;
      out(l, m) = factor * alpha[m][l - m];
    }
  }
  return out;
}

HarmonicCoeffs postprocess(const std::vector<Eigen::VectorXcd>& alpha,
                           const PowerSpectrum& C, const NoiseModel& N) {
  return postprocess(alpha, C, N.spectrum());
}

ReconstructionResult reconstruct(const std::vector<MaskOperatorBlock>& blocks,
                                 const std::vector<Eigen::VectorXcd>& data,
                                 const PowerSpectrum& C,
                                 const PowerSpectrum& N,
                                 const EstimatorConfig& config) {
  config.validate();
  if (blocks.empty() || blocks.size() != data.size())
    throw ContractError("reconstruct: need one data vector per block");
  const int L = blocks.front().L;
  if (blocks.size() != static_cast<std::size_t>(L + 1))
    throw ContractError("reconstruct: expected L+1 blocks");
  if (C.degree_bound() < L || N.degree_bound() < L)
    throw ContractError("reconstruct: spectra shorter than L");

  std::vector<Eigen::VectorXcd> alpha(L + 1);
  std::vector<BlockDiagnostics> diags(L + 1);
  std::vector<std::exception_ptr> errors(L + 1);
#pragma omp parallel for schedule(dynamic)
  for (int m = 0; m <= L; ++m) {
    try {
      const MaskOperatorBlock& b = blocks[m];
      if (b.m != m || b.L != L || data[m].size() != b.rows())
        throw ContractError("reconstruct: block/data " + std::to_string(m) +
                            " inconsistent");
      const std::vector<int> cols = active_degrees(m, L, C);
      Eigen::MatrixXd E(b.rows(), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t c = 0; c < cols.size(); ++c)
        E.col(static_cast<Eigen::Index>(c)) = b.matrix.col(cols[c] - m);
      BlockSolution s =
          config.method == SolveMethod::qr
              ? qr_solve(E, data[m], config.gamma, config.rank_tolerance, m)
              : regularized_solve(E, data[m], config.gamma, config.nu, m);
      alpha[m] = Eigen::VectorXcd::Zero(L - m + 1);
      for (std::size_t c = 0; c < cols.size(); ++c)
        alpha[m][cols[c] - m] = s.alpha[static_cast<Eigen::Index>(c)];
      diags[m] = s.diag;
    } catch (...) {
      errors[m] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  ReconstructionResult out;
  out.alpha = HarmonicCoeffs(L);
  for (int m = 0; m <= L; ++m)
    for (int l = m; l <= L; ++l) out.alpha(l, m) = alpha[m][l - m];
  out.a_hat = postprocess(alpha, C, N);
  out.diagnostics = std::move(diags);

  double scale = 0., imag0 = 0.;
  for (const Complex& c : out.a_hat.data()) scale = std::max(scale, std::abs(c));
  for (int l = 0; l <= L; ++l)
    imag0 = std::max(imag0, std::abs(out.a_hat(l, 0).imag()));
  out.reality_defect = scale > 0. ? imag0 / scale : 0.;
  if (out.reality_defect > 1e-10)
    warn("reconstruct: a_hat_{l,0} imaginary part " +
         std::to_string(out.reality_defect) + " of max |a_hat|");
  return out;
}

ReconstructionResult reconstruct(const std::vector<MaskOperatorBlock>& blocks,
                                 const std::vector<Eigen::VectorXcd>& data,
                                 const PowerSpectrum& C, const NoiseModel& N,
                                 const EstimatorConfig& config) {
  return reconstruct(blocks, data, C, N.spectrum(), config);
}

std::vector<double> default_nu_grid() {
  return {1e-15, 1., 10., 1e2, 1e3, 1e4, 1e5};
}

NuSearchResult grid_search_nu(const std::vector<MaskOperatorBlock>& blocks,
                              const std::vector<Eigen::VectorXcd>& data,
                              const PowerSpectrum& C, const PowerSpectrum& N,
                              const HarmonicCoeffs& truth,
                              const std::vector<double>& grid, bool refine) {
  if (grid.empty()) throw DomainError("grid_search_nu: empty grid");
  NuSearchResult out;
  out.l2_error = std::numeric_limits<double>::infinity();
  auto evaluate = [&](double nu) {
    EstimatorConfig cfg;
    cfg.method = SolveMethod::regularized;
    cfg.nu = nu;
    try {
      const double err =
          coeff_l2_error(reconstruct(blocks, data, C, N, cfg).a_hat, truth);
      out.evaluated.emplace_back(nu, err);
      if (err < out.l2_error) {
        out.l2_error = err;
        out.best_nu = nu;
      }
    } catch (const SolverError&) {
    }
  };
  for (double nu : grid) evaluate(nu);
  if (refine && grid.size() > 1 && std::isfinite(out.l2_error)) {
    const double base = out.best_nu;
    for (int k = 5; k <= 25; k += 5) evaluate(base * (1. + k / 10.));
  }
  if (!std::isfinite(out.l2_error))
    throw SolverError("grid_search_nu: every nu in the grid failed");
  return out;
}

double theoretical_mse(const PowerSpectrum& C, const PowerSpectrum& N,
                       const std::vector<double>& lambda) {
  const int L = C.degree_bound();
  if (N.degree_bound() < L)
    throw ContractError("theoretical_mse: noise spectrum too short");
  if (!lambda.empty() && static_cast<int>(lambda.size()) <= L)
    throw ContractError("theoretical_mse: lambda too short");
  double total = 0.;
  for (int l = 0; l <= L; ++l) {
    const double s = C[l] + N[l];
    const double per = s > 0. ? C[l] * N[l] / s : 0.;
    total += (lambda.empty() ? 1. : lambda[l]) * (2. * l + 1.) * per;
  }
  return total;
}

}  // namespace sphrec
