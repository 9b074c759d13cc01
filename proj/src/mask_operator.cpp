#include "sphrec/mask_operator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>

#include "sphrec/error.hpp"
#include "sphrec/wigner.hpp"

namespace sphrec {
namespace {

void check_degrees(const MaskCoeffs& w, int L, int J) {
  if (L < 0 || J < L || J > L + w.degree)
    throw ContractError("operator: need 0 <= L <= J <= L + K (L=" +
                        std::to_string(L) + ", J=" + std::to_string(J) +
                        ", K=" + std::to_string(w.degree) + ")");
}

// Fills rows j and columns l of one block from precomputed 3j families.
void fill_entry(MaskOperatorBlock& b, const MaskCoeffs& w, int l, int j,
                const ThreeJFamily& zero) {
  const int m = b.m;
  const int K = w.degree;
  const int k_lo = std::abs(j - l);
  const int k_hi = std::min(j + l, K);
  if (k_hi < k_lo) return;
  const ThreeJFamily order = wigner3j_family(l, j, m, -m);
  const double sign = (m % 2 == 0) ? 1. : -1.;
  double acc = 0.;
  for (int k = k_lo; k <= k_hi; k += 2) {
    if (w.w[k] == 0.) continue;
    const double pre = std::sqrt((2. * l + 1.) * (2. * k + 1.) * (2. * j + 1.) /
                                 (4. * std::numbers::pi));
    acc += pre * zero.at(k) * order.at(k) * w.w[k];
  }
  b.matrix(j - m, l - m) = sign * acc;
}

MaskOperatorBlock empty_block(int m, int L, int J) {
  MaskOperatorBlock b;
  b.m = m;
  b.L = L;
  b.J = J;
  b.matrix = Eigen::MatrixXd::Zero(J - m + 1, L - m + 1);
  return b;
}

}  // namespace

MaskOperatorBlock build_axial_block(int m, const MaskCoeffs& w, int L, int J) {
  if (m < 0 || m > L) throw DomainError("build_axial_block: need 0 <= m <= L");
  check_degrees(w, L, J);
  MaskOperatorBlock b = empty_block(m, L, J);
#pragma omp parallel for schedule(dynamic)
  for (int j = m; j <= J; ++j)
    for (int l = m; l <= L; ++l) {
      if (std::abs(j - l) > w.degree) continue;
      fill_entry(b, w, l, j, wigner3j_family(l, j, 0, 0));
    }
  return b;
}

std::vector<MaskOperatorBlock> build_axial_blocks(const MaskCoeffs& w, int L,
                                                  int J) {
  check_degrees(w, L, J);
  std::vector<MaskOperatorBlock> blocks;
  blocks.reserve(L + 1);
  for (int m = 0; m <= L; ++m) blocks.push_back(empty_block(m, L, J));
  // Every (l, j) pair touches a distinct entry of each block.
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j <= J; ++j)
    for (int l = 0; l <= L; ++l) {
      if (std::abs(j - l) > w.degree) continue;
      const ThreeJFamily zero = wigner3j_family(l, j, 0, 0);
      for (int m = 0; m <= std::min(l, j); ++m)
        fill_entry(blocks[m], w, l, j, zero);
    }
  return blocks;
}

GeneralOperator build_general(const HarmonicCoeffs& v_coeffs, int L, int J,
                              std::size_t budget_bytes) {
  const int K = v_coeffs.degree_bound();
  if (L < 0 || J < L || J > L + K)
    throw ContractError("build_general: need 0 <= L <= J <= L + K");
  const double bytes = double(J + 1) * (J + 1) * (L + 1) * (L + 1) *
                       sizeof(std::complex<double>);
  if (bytes > double(budget_bytes))
    throw ContractError("build_general: operator needs " +
                        std::to_string(bytes) + " bytes, budget is " +
                        std::to_string(budget_bytes));
  GeneralOperator op;
  op.L = L;
  op.J = J;
  op.matrix = Eigen::MatrixXcd::Zero((J + 1) * (J + 1), (L + 1) * (L + 1));
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j <= J; ++j)
    for (int mu = -j; mu <= j; ++mu)
      for (int l = 0; l <= L; ++l)
        for (int m = -l; m <= l; ++m) {
          // Only nu = mu - m couples; v_{k,nu} from the reality symmetry.
          const int nu = mu - m;
          Complex acc(0., 0.);
          for (const auto& [k, d] : gaunt_range(l, m, j, mu, K)) {
            if (std::abs(nu) > k) continue;
            acc += d * v_coeffs.value(k, nu);
          }
          op.matrix(GeneralOperator::index(j, mu),
                    GeneralOperator::index(l, m)) = acc;
        }
  return op;
}

Complex operator_integral_oracle(const FieldSamples& v_samples, int l, int m,
                                 int j, int mu, int mask_degree) {
  const SphereGrid& g = v_samples.grid;
  if (mask_degree >= 0 && g.exactness_degree < l + j + mask_degree)
    warn("operator_integral_oracle: grid exactness " +
         std::to_string(g.exactness_degree) + " below l + j + K = " +
         std::to_string(l + j + mask_degree));
  Complex acc(0., 0.);
  for (int i = 0; i < g.n_theta; ++i) {
    const double z = g.nodes_z[i];
    Complex row(0., 0.);
    for (int k = 0; k < g.n_phi; ++k) {
      const double phi = g.phi(k);
      row += std::conj(spherical_harmonic(j, mu, z, phi)) *
             spherical_harmonic(l, m, z, phi) * v_samples(i, k);
    }
    acc += row * g.weight(i);
  }
  return acc;
}

std::vector<double> singular_values(const MaskOperatorBlock& block) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(block.matrix);
  const Eigen::VectorXd s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

std::vector<double> eigenvalues_square(const MaskOperatorBlock& block) {
  if (block.J != block.L)
    throw ContractError("eigenvalues_square: block is not square (J != L)");
  const Eigen::MatrixXd& a = block.matrix;
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12)
    throw ContractError("eigenvalues_square: asymmetry " +
                        std::to_string(asym) + " exceeds 1e-12");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd e = es.eigenvalues();
  return {e.data(), e.data() + e.size()};
}

std::vector<double> eigenvalues_square(const GeneralOperator& op) {
  if (op.J != op.L)
    throw ContractError("eigenvalues_square: operator is not square (J != L)");
  const Eigen::MatrixXcd& a = op.matrix;
  const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-12)
    throw ContractError("eigenvalues_square: non-Hermitian part " +
                        std::to_string(asym) + " exceeds 1e-12");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (a + a.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  const Eigen::VectorXd e = es.eigenvalues();
  return {e.data(), e.data() + e.size()};
}

void write_block(std::ostream& os, const MaskOperatorBlock& b) {
  const std::int64_t header[3] = {b.m, b.L, b.J};
  os.write(reinterpret_cast<const char*>(header), sizeof header);
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      rm = b.matrix;
  os.write(reinterpret_cast<const char*>(rm.data()),
           static_cast<std::streamsize>(rm.size() * sizeof(double)));
  if (!os) throw IoError("write_block: stream failure");
}

MaskOperatorBlock read_block(std::istream& is) {
  std::int64_t header[3];
  if (!is.read(reinterpret_cast<char*>(header), sizeof header))
    throw IoError("read_block: truncated header");
  const auto [m, L, J] = header;
  if (m < 0 || m > L || J < L || J > (std::int64_t{1} << 20))
    throw IoError("read_block: implausible header");
  MaskOperatorBlock b = empty_block(int(m), int(L), int(J));
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(
      b.matrix.rows(), b.matrix.cols());
  if (!is.read(reinterpret_cast<char*>(rm.data()),
               static_cast<std::streamsize>(rm.size() * sizeof(double))))
    throw IoError("read_block: truncated matrix");
  b.matrix = rm;
  return b;
}

void save_block(const std::string& path, const MaskOperatorBlock& block) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_block(os, block);
}

MaskOperatorBlock load_block(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  return read_block(is);
}

}  // namespace sphrec
