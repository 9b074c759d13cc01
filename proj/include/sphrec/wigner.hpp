#pragma once

#include <utility>
#include <vector>

namespace sphrec {

/// One member of a family of 3j symbols that share (l2, l3, m2, m3).
struct ThreeJFamily {
  int l1_min = 0;
  int l1_max = -1;
  std::vector<double> values;  // values[i] belongs to l1 = l1_min + i

  bool empty() const { return values.empty(); }
  double at(int l1) const {
    return (l1 < l1_min || l1 > l1_max) ? 0.0 : values[l1 - l1_min];
  }
};

/// All symbols (l1 l2 l3; -m2-m3 m2 m3) for admissible l1, by the
/// Schulten-Gordon three-term recurrence in l1. Forward and backward
/// sweeps are matched inside the classically allowed region, so the
/// result stays finite for degrees in the thousands.
ThreeJFamily wigner3j_family(int l2, int l3, int m2, int m3);

/// Wigner 3j symbol (l1 l2 l3; m1 m2 m3). Exact zero when a selection
/// rule fails. Throws DomainError for negative l or |m| > l.
double wigner3j(int l1, int l2, int l3, int m1, int m2, int m3);

/// Gaunt coefficient
///   D_{l,m;k,nu;j,mu} = int Y_{l,m} Y_{k,nu} conj(Y_{j,mu}) dr
///     = (-1)^mu sqrt((2l+1)(2k+1)(2j+1)/4pi) (l k j;0 0 0)(l k j;m nu -mu).
/// The four zero rules (odd l+k+j, k outside the triangle, m+nu != mu) are
/// checked before any floating-point work.
double gaunt(int l, int m, int k, int nu, int j, int mu);

/// Nonzero D_{l,m;k,mu-m;j,mu} for |j-l| <= k <= min(j+l, k_max), l+k+j
/// even. Both 3j factors come from one recurrence each over k.
std::vector<std::pair<int, double>> gaunt_range(int l, int m, int j, int mu,
                                                int k_max);

/// The nu = 0 family D_{l,m;k,0;j,m} that couples an axially symmetric
/// mask's Legendre coefficients into the order-m operator block.
std::vector<std::pair<int, double>> gaunt_axial_range(int l, int j, int m,
                                                      int k_max);

}  // namespace sphrec
