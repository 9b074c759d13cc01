#pragma once

namespace sphrec {

/// Largest degree accepted by wigner3j_oracle.
inline constexpr int kOracleMaxDegree = 40;

/// Reference 3j symbol from the Racah single-sum formula, evaluated with
/// exact big-integer rational arithmetic and a 50-digit final square root.
/// Independent of the recurrence in wigner.hpp; meant for validation.
/// Throws UnsupportedRange above kOracleMaxDegree and DomainError for
/// invalid indices.
double wigner3j_oracle(int l1, int l2, int l3, int m1, int m2, int m3);

}  // namespace sphrec
