#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sphrec/harmonics.hpp"
#include "sphrec/mask.hpp"

namespace sphrec {

/// Order-m block E^{(m)}_{j,l} = sum_k D_{l,m;k,0;j,m} w_k of the masking
/// operator for an axially symmetric mask. Row r holds j = m + r, column c
/// holds l = m + c.
struct MaskOperatorBlock {
  int m = 0;
  int L = 0;
  int J = 0;
  Eigen::MatrixXd matrix;

  Eigen::Index rows() const { return matrix.rows(); }
  Eigen::Index cols() const { return matrix.cols(); }
};

/// Full operator E_{j,mu;l,m} for a general real mask. Row and column
/// index of (l, m) is l*l + l + m.
struct GeneralOperator {
  int L = 0;
  int J = 0;
  Eigen::MatrixXcd matrix;

  static constexpr Eigen::Index index(int l, int m) { return l * l + l + m; }
};

MaskOperatorBlock build_axial_block(int m, const MaskCoeffs& w, int L, int J);

/// Blocks for m = 0..L. The (l, j) coupling of the zero-order 3j family is
/// shared across orders.
std::vector<MaskOperatorBlock> build_axial_blocks(const MaskCoeffs& w, int L,
                                                  int J);

inline constexpr std::size_t kDefaultOperatorBudgetBytes =
    std::size_t{512} << 20;

/// Dense complex operator from the mask's harmonic coefficients. Refuses
/// (ContractError) when the matrix would exceed budget_bytes.
GeneralOperator build_general(const HarmonicCoeffs& v_coeffs, int L, int J,
                              std::size_t budget_bytes =
                                  kDefaultOperatorBudgetBytes);

/// int conj(Y_{j,mu}) Y_{l,m} v dr by quadrature over the samples' grid.
Complex operator_integral_oracle(const FieldSamples& v_samples, int l, int m,
                                 int j, int mu, int mask_degree = -1);

/// Singular values, descending.
std::vector<double> singular_values(const MaskOperatorBlock& block);

/// Eigenvalues (ascending) of a square block or operator (J == L). Input
/// is symmetrised; asymmetry above 1e-12 throws ContractError.
std::vector<double> eigenvalues_square(const MaskOperatorBlock& block);
std::vector<double> eigenvalues_square(const GeneralOperator& op);

/// Binary block dump: int64 m, L, J then row-major float64 entries.
void write_block(std::ostream& os, const MaskOperatorBlock& block);
MaskOperatorBlock read_block(std::istream& is);
void save_block(const std::string& path, const MaskOperatorBlock& block);
MaskOperatorBlock load_block(const std::string& path);

}  // namespace sphrec
