#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "doctest.h"
#include "sphrec/error.hpp"
#include "sphrec/harmonics.hpp"

using namespace sphrec;

namespace {

const double kPi = std::numbers::pi;

HarmonicCoeffs random_coeffs(int L, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  HarmonicCoeffs a(L);
  for (int l = 0; l <= L; ++l) {
    a(l, 0) = Complex(g(rng), 0.);
    for (int m = 1; m <= l; ++m) a(l, m) = Complex(g(rng), g(rng));
  }
  return a;
}

double max_abs_diff(const HarmonicCoeffs& a, const HarmonicCoeffs& b) {
  double worst = 0.;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

// Explicit power-series form of the normalised P_l^m in 50-digit floats.
double legendre_oracle(int l, int m, double xd) {
  using F = boost::multiprecision::cpp_bin_float_50;
  const F x = xd;
  F deriv = 0;  // d^m/dx^m of sum_k c_k x^{l-2k}
  for (int k = 0; 2 * k <= l; ++k) {
    const int p = l - 2 * k;
    if (p < m) continue;
    F c = boost::math::binomial_coefficient<F>(l, k) *
          boost::math::binomial_coefficient<F>(2 * l - 2 * k, l);
    if (k % 2) c = -c;
    F falling = 1;
    for (int q = 0; q < m; ++q) falling *= p - q;
    deriv += c * falling * pow(x, p - m);
  }
  deriv /= pow(F(2), l);
  F ratio = 1;  // (l-m)!/(l+m)!
  for (int q = l - m + 1; q <= l + m; ++q) ratio /= q;
  const F norm = sqrt((2 * l + 1) / (4 * boost::math::constants::pi<F>()) * ratio);
  F v = norm * pow(1 - x * x, F(m) / 2) * deriv;
  if (m % 2) v = -v;
  return static_cast<double>(v);
}

Complex grid_inner(const SphereGrid& g, int l1, int m1, int l2, int m2) {
  Complex acc = 0.;
  for (int i = 0; i < g.n_theta; ++i)
    for (int k = 0; k < g.n_phi; ++k)
      acc += g.weight(i) * spherical_harmonic(l1, m1, g.nodes_z[i], g.phi(k)) *
             std::conj(spherical_harmonic(l2, m2, g.nodes_z[i], g.phi(k)));
  return acc;
}

struct WarningCapture {
  std::vector<std::string> messages;
  WarningCapture() {
    set_warning_handler([this](const std::string& m) { messages.push_back(m); });
  }
  ~WarningCapture() { set_warning_handler(nullptr); }
};

}  // namespace

TEST_CASE("assoc_legendre_norm reference values") {
  for (double x : {-1., -0.4, 0., 0.7, 1.})
    CHECK(assoc_legendre_norm(0, 0, x) ==
          doctest::Approx(1. / std::sqrt(4. * kPi)).epsilon(1e-15));
  CHECK(assoc_legendre_norm(1, 0, 1.) ==
        doctest::Approx(std::sqrt(3. / (4. * kPi))).epsilon(1e-15));
  CHECK(std::abs(assoc_legendre_norm(6, 3, 0.3) - legendre_oracle(6, 3, 0.3)) <= 1e-12);
  CHECK_THROWS_AS(assoc_legendre_norm(2, 3, 0.1), DomainError);
  CHECK_THROWS_AS(assoc_legendre_norm(2, 1, 1.01), DomainError);
}

TEST_CASE("assoc_legendre_norm against the series oracle") {
  double worst = 0.;
  for (int l = 0; l <= 30; ++l)
    for (int m = 0; m <= l; ++m)
      for (double x : {-0.93, -0.31, 0.05, 0.6, 0.99})
        worst = std::max(worst, std::abs(assoc_legendre_norm(l, m, x) -
                                         legendre_oracle(l, m, x)));
  CHECK(worst <= 1e-12);
}

TEST_CASE("assoc_legendre_norm is stable at high degree") {
  const auto table = assoc_legendre_table(2100, 0.2);
  for (double v : table) REQUIRE(std::isfinite(v));
  // Sum over m of |Y_lm|^2 is (2l+1)/(4 pi) by the addition theorem.
  for (int l : {500, 1500, 2100}) {
    double s = table[HarmonicCoeffs::index(l, 0)] * table[HarmonicCoeffs::index(l, 0)];
    for (int m = 1; m <= l; ++m) {
      const double p = table[HarmonicCoeffs::index(l, m)];
      s += 2. * p * p;
    }
    CHECK(s == doctest::Approx((2. * l + 1.) / (4. * kPi)).epsilon(1e-10));
  }
  CHECK(assoc_legendre_norm(2100, 2100, 0.2) == table[HarmonicCoeffs::index(2100, 2100)]);
}

TEST_CASE("legendre_p values") {
  for (int l = 0; l <= 50; ++l) CHECK(legendre_p(l, 1.) == doctest::Approx(1.).epsilon(1e-14));
  CHECK(legendre_p(1, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(legendre_p(2, 0.5) == doctest::Approx(-0.125).epsilon(1e-15));
  CHECK(legendre_p(7, -1.) == doctest::Approx(-1.).epsilon(1e-14));
  CHECK_THROWS_AS(legendre_p(2, -1.5), DomainError);
}

TEST_CASE("gauss_legendre rules") {
  auto [z1, w1] = gauss_legendre(1);
  CHECK(z1.size() == 1);
  CHECK(z1[0] == doctest::Approx(0.));
  CHECK(w1[0] == doctest::Approx(2.).epsilon(1e-15));

  auto [z2, w2] = gauss_legendre(2);
  CHECK(z2[0] == doctest::Approx(-1. / std::sqrt(3.)).epsilon(1e-15));
  CHECK(z2[1] == doctest::Approx(1. / std::sqrt(3.)).epsilon(1e-15));
  CHECK(w2[0] == doctest::Approx(1.).epsilon(1e-15));
  CHECK(w2[1] == doctest::Approx(1.).epsilon(1e-15));

  auto [z3, w3] = gauss_legendre(3);
  double s = 0.;
  for (int i = 0; i < 3; ++i) s += w3[i] * std::pow(z3[i], 4);
  CHECK(s == doctest::Approx(0.4).epsilon(1e-15));

  for (int n : {5, 64, 1001}) {
    auto [z, w] = gauss_legendre(n);
    double total = 0.;
    for (double wi : w) total += wi;
    CHECK(total == doctest::Approx(2.).epsilon(1e-13));
    for (int i = 1; i < n; ++i) REQUIRE(z[i] > z[i - 1]);
    // Degree 2n-1 and 2n-2 integrands: P_n P_{n-1} and P_{n-1}^2.
    double cross = 0., sq = 0.;
    for (int i = 0; i < n; ++i) {
      const double p = legendre_p(n - 1, z[i]);
      cross += w[i] * legendre_p(n, z[i]) * p;
      sq += w[i] * p * p;
    }
    CHECK(std::abs(cross) <= 1e-13);
    CHECK(sq == doctest::Approx(2. / (2. * n - 1.)).epsilon(1e-12));
  }
  CHECK_THROWS(gauss_legendre(0));
}

TEST_CASE("make_grid sizes") {
  SphereGrid g = make_grid(0);
  CHECK(g.n_theta == 1);
  CHECK(g.n_phi == 1);
  for (int L : {4, 10, 100})
    for (int K : {0, 9, 900}) {
      g = make_grid(2 * L + K);
      CHECK(g.n_theta == (2 * L + K + 2) / 2);  // ceil((2L+K+1)/2)
      CHECK(g.n_phi == 2 * L + K + 1);
      CHECK(g.exactness_degree == 2 * L + K);
    }
  CHECK(grid_inner(make_grid(6), 3, 1, 3, 1).real() == doctest::Approx(1.).epsilon(1e-12));
}

TEST_CASE("orthonormality on an exactness-32 grid") {
  const SphereGrid g = make_grid(32);
  double worst = 0.;
  // Orders with m != m' integrate to zero by the longitude sum alone, so
  // check the nontrivial m = m' pairs exhaustively and a stride of the rest.
  for (int l1 = 0; l1 <= 16; ++l1)
    for (int l2 = 0; l2 <= 16; ++l2)
      for (int m = -std::min(l1, l2); m <= std::min(l1, l2); ++m) {
        const Complex v = grid_inner(g, l1, m, l2, m);
        worst = std::max(worst, std::abs(v - (l1 == l2 ? 1. : 0.)));
      }
  for (int l1 = 0; l1 <= 16; l1 += 3)
    for (int m1 = -l1; m1 <= l1; m1 += 2)
      for (int m2 = -16; m2 <= 16; m2 += 5)
        if (m2 != m1) worst = std::max(worst, std::abs(grid_inner(g, l1, m1, 16, m2)));
  CHECK(worst <= 1e-12);
}

TEST_CASE("synthesize simple fields") {
  const SphereGrid g = make_grid(8);
  HarmonicCoeffs a(4);
  FieldSamples zero = synthesize(a, g);
  for (double v : zero.values) CHECK(v == 0.);
  a(0, 0) = std::sqrt(4. * kPi);
  FieldSamples one = synthesize(a, g);
  for (double v : one.values) CHECK(v == doctest::Approx(1.).epsilon(1e-14));

  const HarmonicCoeffs back = analyze(one, 4);
  CHECK(back(0, 0).real() == doctest::Approx(std::sqrt(4. * kPi)).epsilon(1e-14));
  for (int l = 1; l <= 4; ++l)
    for (int m = 0; m <= l; ++m) CHECK(std::abs(back(l, m)) <= 1e-12);
}

TEST_CASE("synthesize matches direct evaluation") {
  const HarmonicCoeffs a = random_coeffs(7, 3);
  const SphereGrid g = make_grid(14);
  const FieldSamples f = synthesize(a, g);
  double worst = 0., imag = 0.;
  for (int i = 0; i < g.n_theta; ++i)
    for (int k = 0; k < g.n_phi; ++k) {
      Complex v = 0.;
      for (int l = 0; l <= 7; ++l)
        for (int m = -l; m <= l; ++m)
          v += a.value(l, m) * spherical_harmonic(l, m, g.nodes_z[i], g.phi(k));
      worst = std::max(worst, std::abs(v.real() - f(i, k)));
      imag = std::max(imag, std::abs(v.imag()));
    }
  CHECK(worst <= 1e-12);
  CHECK(imag <= 1e-12);
}

TEST_CASE("Y21 plus its conjugate partner") {
  // f = Y_{2,1} - Y_{2,-1} is real with a_{2,1} = 1 and a_{2,-1} = -1.
  const SphereGrid g = make_grid(8);
  FieldSamples f{g, std::vector<double>(g.size())};
  for (int i = 0; i < g.n_theta; ++i)
    for (int k = 0; k < g.n_phi; ++k) {
      const Complex v = spherical_harmonic(2, 1, g.nodes_z[i], g.phi(k)) -
                        spherical_harmonic(2, -1, g.nodes_z[i], g.phi(k));
      REQUIRE(std::abs(v.imag()) <= 1e-14);
      f(i, k) = v.real();
    }
  const HarmonicCoeffs a = analyze(f, 4);
  CHECK(std::abs(a(2, 1) - Complex(1., 0.)) <= 1e-12);
  CHECK(std::abs(a.value(2, -1) - Complex(-1., 0.)) <= 1e-12);
  for (int l = 0; l <= 4; ++l)
    for (int m = 0; m <= l; ++m)
      if (!(l == 2 && m == 1)) CHECK(std::abs(a(l, m)) <= 1e-12);
}

TEST_CASE("Parseval and round trip up to degree 64") {
  for (int L : {8, 31, 64}) {
    const HarmonicCoeffs a = random_coeffs(L, 10 + L);
    const SphereGrid g = make_grid(2 * L);
    const FieldSamples f = synthesize(a, g);
    double quad = 0.;
    for (int i = 0; i < g.n_theta; ++i)
      for (int k = 0; k < g.n_phi; ++k) quad += g.weight(i) * f(i, k) * f(i, k);
    double coef = 0.;
    for (int l = 0; l <= L; ++l)
      for (int m = -l; m <= l; ++m) coef += std::norm(a.value(l, m));
    CHECK(quad == doctest::Approx(coef).epsilon(1e-10));
    CHECK(max_abs_diff(analyze(f, L, L), a) <= 1e-10);
  }
}

TEST_CASE("analyze warns when the grid is too coarse") {
  WarningCapture cap;
  const HarmonicCoeffs a = random_coeffs(10, 4);
  const FieldSamples f = synthesize(a, make_grid(12));
  (void)analyze(f, 10, 10);
  CHECK(cap.messages.size() == 1);
  (void)analyze(f, 2, 10);
  CHECK(cap.messages.size() == 1);  // exactness 12 covers 10 + 2
  (void)analyze(f, 10);             // no field degree given
  CHECK(cap.messages.size() == 1);
}

TEST_CASE("value applies the reality symmetry") {
  const HarmonicCoeffs a = random_coeffs(5, 9);
  for (int l = 0; l <= 5; ++l) {
    CHECK(a(l, 0).imag() == 0.);
    for (int m = 1; m <= l; ++m)
      CHECK(a.value(l, -m) == (m % 2 ? -1. : 1.) * std::conj(a(l, m)));
  }
  CHECK(a.size() == 21u);
  CHECK(HarmonicCoeffs(100).size() == 101u * 102u / 2u);
}

TEST_CASE("coefficient and sample text round trip") {
  const HarmonicCoeffs a = random_coeffs(12, 5);
  std::stringstream ss;
  write_coeffs(ss, a);
  CHECK(ss.str().rfind("# L=12\n", 0) == 0);
  const HarmonicCoeffs b = read_coeffs(ss);
  CHECK(b.degree_bound() == 12);
  CHECK(max_abs_diff(a, b) == 0.);

  const FieldSamples f = synthesize(a, make_grid(24));
  std::stringstream st;
  write_samples(st, f);
  const FieldSamples h = read_samples(st);
  CHECK(h.grid.n_theta == f.grid.n_theta);
  CHECK(h.grid.n_phi == f.grid.n_phi);
  CHECK(h.values == f.values);

  std::stringstream bad("# L=2\n0 0 1 0\n1 5 0 0\n");
  CHECK_THROWS(read_coeffs(bad));
}
