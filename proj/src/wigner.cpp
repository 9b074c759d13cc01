#include "sphrec/wigner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "sphrec/error.hpp"

namespace sphrec {
namespace {

constexpr double kHuge = 0x1p+250;
constexpr double kTiny = 0x1p-250;
constexpr double kTinySq = 0x1p-500;

bool odd(int n) { return (n & 1) != 0; }

void check_pair(int l, int m, const char* name) {
  if (l < 0 || std::abs(m) > l)
    throw DomainError(std::string("wigner3j: invalid (l, m) for ") + name +
                      ": l=" + std::to_string(l) + " m=" + std::to_string(m));
}

// Both m2 = m3 = 0: only every second l1 contributes and the recurrence
// degenerates into a two-term one.
void family_zero_orders(double l2, double l3, double l1min,
                        std::vector<double>& f) {
  const int n = static_cast<int>(f.size());
  const double d2 = (l2 - l3) * (l2 - l3);
  const double pre1 = (l2 + l3 + 1.) * (l2 + l3 + 1.);
  f[0] = 1.;
  double sum = 2. * l1min + 1.;
  for (int i = 0; i + 2 < n; i += 2) {
    const double l1 = l1min + i + 1, l1sq = l1 * l1;
    const double l1p1 = l1 + 1., l1p1sq = l1p1 * l1p1;
    f[i + 1] = 0.;
    f[i + 2] = -f[i] * std::sqrt(((l1sq - d2) * (pre1 - l1sq)) /
                                 ((l1p1sq - d2) * (pre1 - l1p1sq)));
    sum += (2. * l1p1 + 1.) * f[i + 2] * f[i + 2];
  }
  const bool last_negative = (((n + 1) / 2) & 1) == 0;
  const bool should_be_negative =
      odd(static_cast<int>(std::lround(std::abs(l2 - l3))));
  double norm = 1. / std::sqrt(sum);
  if (last_negative != should_be_negative) norm = -norm;
  for (int i = 0; i < n; i += 2) f[i] *= norm;
}

void family_general(double l2, double l3, double m2, double m3, double m1,
                    double l1min, double l1max, std::vector<double>& f) {
  const int n = static_cast<int>(f.size());
  const double d2 = (l2 - l3) * (l2 - l3);
  const double pre1 = (l2 + l3 + 1.) * (l2 + l3 + 1.);
  const double m1sq = m1 * m1;
  const double pre2 = m1 * (l2 * (l2 + 1.) - l3 * (l3 + 1.));
  const double m3mm2 = m3 - m2;
  // A(l1) of the three-term recurrence.
  auto afac = [&](double l1) {
    const double s = l1 * l1;
    return std::sqrt((s - d2) * (pre1 - s) * (s - m1sq));
  };

  // Forward sweep from l1min, stopped once the growth factor stops
  // shrinking (entry into the oscillatory region).
  int i = 0;
  f[0] = 1.;
  double sumfor = 2. * l1min + 1.;
  double c1 = 0x1p+1000, oldfac = 0.;
  if (n > 1) {
    i = 1;
    const double l1 = l1min + 1.;
    const double newfac = afac(l1);
    c1 = (l1 > 1.000001)
             ? (2. * l1 - 1.) * (pre2 - (l1 * l1 - l1) * m3mm2) /
                   ((l1 - 1.) * newfac)
             : -(2. * l1 - 1.) * l1 * m3mm2 / newfac;
    f[1] = f[0] * c1;
    oldfac = newfac;
    sumfor += (2. * l1 + 1.) * f[1] * f[1];
    if (std::abs(f[1]) >= kHuge) {
      f[0] *= kTiny;
      f[1] *= kTiny;
      sumfor *= kTinySq;
    }
  }
  while (i + 1 < n) {
    ++i;
    const double l1 = l1min + i;
    const double newfac = afac(l1);
    const double c1old = std::abs(c1);
    c1 = (2. * l1 - 1.) * (pre2 - (l1 * l1 - l1) * m3mm2) /
         ((l1 - 1.) * newfac);
    const double c2 = l1 / ((l1 - 1.) * newfac);
    f[i] = f[i - 1] * c1 - f[i - 2] * c2 * oldfac;
    oldfac = newfac;
    sumfor += (2. * l1 + 1.) * f[i] * f[i];
    if (std::abs(f[i]) >= kHuge) {
      for (int k = 0; k <= i; ++k) f[k] *= kTiny;
      sumfor *= kTinySq;
    }
    if (c1old <= std::abs(c1)) break;
  }

  double sumbac = 0., fct_fwd = 1., fct_bwd = 1.;
  bool last_negative = false;
  int split = n;
  if (i + 1 < n) {
    // Backward sweep from l1max down to the last three forward points.
    const std::array<double, 3> x{f[i - 2], f[i - 1], f[i]};
    split = i - 2;
    i = n - 1;
    f[i] = 1.;
    sumbac = 2. * l1max + 1.;
    {
      --i;
      const double l1 = l1min + i;
      const double newfac = afac(l1 + 1.);
      const double l1p1sq = (l1 + 1.) * (l1 + 1.);
      f[i] = f[i + 1] * (2. * l1 + 3.) * (pre2 - (l1p1sq + l1 + 1.) * m3mm2) /
             ((l1 + 2.) * newfac);
      oldfac = newfac;
      sumbac += (2. * l1 + 1.) * f[i] * f[i];
      if (std::abs(f[i]) >= kHuge) {
        for (int k = i; k < n; ++k) f[k] *= kTiny;
        sumbac *= kTinySq;
      }
    }
    while (i > split) {
      --i;
      const double l1 = l1min + i;
      const double big = l1 + 1.;
      const double newfac = afac(big);
      const double bc1 =
          (2. * big + 1.) * (pre2 - (big * big + big) * m3mm2) /
          ((big + 1.) * newfac);
      const double bc2 = big / ((big + 1.) * newfac);
      f[i] = f[i + 1] * bc1 - f[i + 2] * bc2 * oldfac;
      oldfac = newfac;
      sumbac += (2. * l1 + 1.) * f[i] * f[i];
      if (std::abs(f[i]) >= kHuge) {
        for (int k = i; k < n; ++k) f[k] *= kTiny;
        sumbac *= kTinySq;
      }
    }
    // The overlap is counted once, on the forward side.
    for (int k = split; k < std::min(n, split + 3); ++k) {
      const double l1 = l1min + k;
      sumbac -= (2. * l1 + 1.) * f[k] * f[k];
    }
    const double ratio =
        (x[0] * f[split] + x[1] * f[split + 1] + x[2] * f[split + 2]) /
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (std::abs(ratio) < 1.) {
      fct_bwd = 1. / ratio;
      sumbac /= ratio * ratio;
      last_negative = ratio < 0.;
    } else {
      fct_fwd = ratio;
      sumfor *= ratio * ratio;
    }
  } else {
    last_negative = f[n - 1] < 0.;
  }

  double norm = 1. / std::sqrt(sumfor + sumbac);
  // Sign convention: sign(f(l1max)) = (-1)^(l2 - l3 - m1).
  const bool should_be_negative =
      odd(static_cast<int>(std::lround(std::abs(l2 - l3 + m2 + m3))));
  if (last_negative != should_be_negative) norm = -norm;
  for (int k = 0; k < split; ++k) f[k] *= norm * fct_fwd;
  for (int k = split; k < n; ++k) f[k] *= norm * fct_bwd;
}

double gaunt_prefactor(int l, int k, int j) {
  return std::sqrt((2. * l + 1.) * (2. * k + 1.) * (2. * j + 1.) /
                   (4. * std::numbers::pi));
}

}  // namespace

ThreeJFamily wigner3j_family(int l2, int l3, int m2, int m3) {
  check_pair(l2, m2, "l2");
  check_pair(l3, m3, "l3");
  const int m1 = -m2 - m3;
  ThreeJFamily out;
  out.l1_min = std::max(std::abs(l2 - l3), std::abs(m1));
  out.l1_max = l2 + l3;
  out.values.assign(out.l1_max - out.l1_min + 1, 0.);
  if (m2 == 0 && m3 == 0)
    family_zero_orders(l2, l3, out.l1_min, out.values);
  else
    family_general(l2, l3, m2, m3, m1, out.l1_min, out.l1_max, out.values);
  return out;
}

double wigner3j(int l1, int l2, int l3, int m1, int m2, int m3) {
  check_pair(l1, m1, "l1");
  check_pair(l2, m2, "l2");
  check_pair(l3, m3, "l3");
  if (m1 + m2 + m3 != 0) return 0.;
  if (l3 < std::abs(l1 - l2) || l3 > l1 + l2) return 0.;
  if (m1 == 0 && m2 == 0 && m3 == 0 && odd(l1 + l2 + l3)) return 0.;

  // Recurse over the largest degree; its family is the shortest.
  std::array<int, 3> ls{l1, l2, l3}, ms{m1, m2, m3};
  double sign = 1.;
  const int top = static_cast<int>(
      std::max_element(ls.begin(), ls.end()) - ls.begin());
  if (top != 0) {
    std::swap(ls[0], ls[top]);
    std::swap(ms[0], ms[top]);
    if (odd(l1 + l2 + l3)) sign = -1.;
  }
  return sign * wigner3j_family(ls[1], ls[2], ms[1], ms[2]).at(ls[0]);
}

double gaunt(int l, int m, int k, int nu, int j, int mu) {
  check_pair(l, m, "l");
  check_pair(k, nu, "k");
  check_pair(j, mu, "j");
  if (odd(j + l + k) || k < std::abs(j - l) || k > j + l || m + nu != mu)
    return 0.;
  const double sign = odd(mu) ? -1. : 1.;
  return sign * gaunt_prefactor(l, k, j) * wigner3j(l, k, j, 0, 0, 0) *
         wigner3j(l, k, j, m, nu, -mu);
}

std::vector<std::pair<int, double>> gaunt_range(int l, int m, int j, int mu,
                                                int k_max) {
  check_pair(l, m, "l");
  check_pair(j, mu, "j");
  std::vector<std::pair<int, double>> out;
  const int k_lo = std::abs(j - l);
  const int k_hi = std::min(j + l, k_max);
  if (k_hi < k_lo) return out;
  // (k l j; nu m -mu) equals (l k j; m nu -mu) whenever l+k+j is even.
  const ThreeJFamily zero = wigner3j_family(l, j, 0, 0);
  const ThreeJFamily order = wigner3j_family(l, j, m, -mu);
  const int nu = mu - m;
  const double sign = odd(mu) ? -1. : 1.;
  out.reserve((k_hi - k_lo) / 2 + 1);
  for (int k = k_lo; k <= k_hi; k += 2) {
    if (k < std::abs(nu)) continue;
    out.emplace_back(k, sign * gaunt_prefactor(l, k, j) * zero.at(k) *
                            order.at(k));
  }
  return out;
}

std::vector<std::pair<int, double>> gaunt_axial_range(int l, int j, int m,
                                                      int k_max) {
  if (std::abs(m) > std::min(l, j))
    throw DomainError("gaunt_axial_range: |m| exceeds min(l, j)");
  return gaunt_range(l, m, j, m, k_max);
}

}  // namespace sphrec
