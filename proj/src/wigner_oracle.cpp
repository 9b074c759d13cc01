#include "sphrec/wigner_oracle.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "sphrec/error.hpp"

namespace sphrec {
namespace {

namespace mp = boost::multiprecision;
using Int = mp::cpp_int;
using Rational = mp::cpp_rational;
using Float = mp::cpp_bin_float_50;

Int factorial(int n) {
  Int r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

double wigner3j_oracle(int l1, int l2, int l3, int m1, int m2, int m3) {
  for (auto [l, m] : {std::pair{l1, m1}, {l2, m2}, {l3, m3}}) {
    if (l < 0 || std::abs(m) > l)
      throw DomainError("wigner3j_oracle: invalid (l, m)");
    if (l > kOracleMaxDegree)
      throw UnsupportedRange("wigner3j_oracle: degree " + std::to_string(l) +
                             " above " + std::to_string(kOracleMaxDegree));
  }
  if (m1 + m2 + m3 != 0) return 0.;
  if (l3 < std::abs(l1 - l2) || l3 > l1 + l2) return 0.;

  const int t_lo = std::max({0, l2 - l3 - m1, l1 - l3 + m2});
  const int t_hi = std::min({l1 + l2 - l3, l1 - m1, l2 + m2});
  Rational sum = 0;
  for (int t = t_lo; t <= t_hi; ++t) {
    const Int denom = factorial(t) * factorial(l3 - l2 + t + m1) *
                      factorial(l3 - l1 + t - m2) *
                      factorial(l1 + l2 - l3 - t) * factorial(l1 - t - m1) *
                      factorial(l2 - t + m2);
    const Rational term(Int(1), denom);
    if (t % 2 == 0)
      sum += term;
    else
      sum -= term;
  }
  if (sum == 0) return 0.;

  const Rational triangle(factorial(l1 + l2 - l3) * factorial(l1 - l2 + l3) *
                              factorial(-l1 + l2 + l3),
                          factorial(l1 + l2 + l3 + 1));
  const Int orders = factorial(l1 + m1) * factorial(l1 - m1) *
                     factorial(l2 + m2) * factorial(l2 - m2) *
                     factorial(l3 + m3) * factorial(l3 - m3);
  const Rational squared = triangle * orders * sum * sum;

  const Float magnitude = mp::sqrt(Float(mp::numerator(squared)) /
                                   Float(mp::denominator(squared)));
  const bool phase_negative = (((l1 - l2 - m3) % 2) + 2) % 2 == 1;
  const bool negative = phase_negative != (sum < 0);
  return static_cast<double>(negative ? -magnitude : magnitude);
}

}  // namespace sphrec
