#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace sphrec {

using Complex = std::complex<double>;

/// Coefficients a_{l,m} of a real band-limited field, 0 <= m <= l <= L.
/// Negative orders follow from a_{l,-m} = (-1)^m conj(a_{l,m}).
class HarmonicCoeffs {
 public:
  HarmonicCoeffs() = default;
  explicit HarmonicCoeffs(int degree_bound);

  int degree_bound() const { return degree_bound_; }
  std::size_t size() const { return data_.size(); }

  static constexpr std::size_t index(int l, int m) {
    return static_cast<std::size_t>(l) * (l + 1) / 2 + m;
  }

  Complex& operator()(int l, int m) { return data_[index(l, m)]; }
  const Complex& operator()(int l, int m) const { return data_[index(l, m)]; }

  /// Any order -l <= m <= l, negative orders through the reality symmetry.
  Complex value(int l, int m) const;

  /// Order-m slice (a_{m,m}, ..., a_{L,m}).
  std::vector<Complex> order_slice(int m) const;
  void set_order_slice(int m, const std::vector<Complex>& slice);

  /// Copy with degree bound changed; new entries are zero.
  HarmonicCoeffs resized(int degree_bound) const;

  std::vector<Complex>& data() { return data_; }
  const std::vector<Complex>& data() const { return data_; }

  HarmonicCoeffs& operator+=(const HarmonicCoeffs& other);
  HarmonicCoeffs& operator-=(const HarmonicCoeffs& other);
  friend HarmonicCoeffs operator+(HarmonicCoeffs a, const HarmonicCoeffs& b) {
    return a += b;
  }
  friend HarmonicCoeffs operator-(HarmonicCoeffs a, const HarmonicCoeffs& b) {
    return a -= b;
  }

 private:
  int degree_bound_ = -1;
  std::vector<Complex> data_;
};

/// Gauss-Legendre nodes in z = cos(theta) times equispaced longitudes.
struct SphereGrid {
  int n_theta = 0;
  int n_phi = 0;
  int exactness_degree = 0;
  std::vector<double> nodes_z;
  std::vector<double> weights_z;

  double phi(int k) const;
  /// Full quadrature weight of point (i, k).
  double weight(int i) const;
  std::size_t size() const {
    return static_cast<std::size_t>(n_theta) * n_phi;
  }
};

/// Real samples on a grid, row-major in (theta, phi).
struct FieldSamples {
  SphereGrid grid;
  std::vector<double> values;

  double& operator()(int i, int k) {
    return values[static_cast<std::size_t>(i) * grid.n_phi + k];
  }
  double operator()(int i, int k) const {
    return values[static_cast<std::size_t>(i) * grid.n_phi + k];
  }
};

/// Fully normalised associated Legendre function, so that
/// Y_{l,m}(theta, phi) = assoc_legendre_norm(l, m, cos theta) e^{i m phi}
/// (Condon-Shortley phase included).
double assoc_legendre_norm(int l, int m, double x);

/// Table of assoc_legendre_norm(l, m, x) for 0 <= m <= l <= L, stored with
/// HarmonicCoeffs::index.
std::vector<double> assoc_legendre_table(int L, double x);

/// Legendre polynomial with P_l(1) = 1.
double legendre_p(int l, double x);

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

/// Smallest grid integrating spherical polynomials of degree <= exactness.
SphereGrid make_grid(int exactness_degree);

/// Spherical harmonic Y_{l,m}(theta, phi) for any order.
Complex spherical_harmonic(int l, int m, double z, double phi);

FieldSamples synthesize(const HarmonicCoeffs& coeffs, const SphereGrid& grid);

/// Quadrature projection onto Y_{l,m}, l <= degree_bound. Warns (through
/// sphrec::warn) when the grid cannot project a field of degree
/// `field_degree` exactly; pass a negative field_degree to skip the check.
HarmonicCoeffs analyze(const FieldSamples& samples, int degree_bound,
                       int field_degree = -1);

// Shared coefficient text format: "# L=<int>" then "<l> <m> <re> <im>"
// for m >= 0, 17 significant digits.
void write_coeffs(std::ostream& os, const HarmonicCoeffs& coeffs);
HarmonicCoeffs read_coeffs(std::istream& is);
void save_coeffs(const std::string& path, const HarmonicCoeffs& coeffs);
HarmonicCoeffs load_coeffs(const std::string& path);

// Field sample text format: "# ntheta=<int> nphi=<int>" then one value
// per line, row-major. Reading rebuilds the grid from its dimensions.
void write_samples(std::ostream& os, const FieldSamples& samples);
FieldSamples read_samples(std::istream& is);

}  // namespace sphrec
