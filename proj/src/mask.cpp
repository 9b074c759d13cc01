#include "sphrec/mask.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sphrec/error.hpp"

namespace sphrec {
namespace {

constexpr double kPi = std::numbers::pi;

// sum_i weight_i v(z_i) P_k(z_i), k = 0..K, over one Gauss-Legendre rule
// mapped onto each piece.
std::vector<double> legendre_moments(const std::function<double(double)>& v,
                                     int K, const std::vector<double>& edges,
                                     int n_nodes) {
  std::vector<double> acc(K + 1, 0.);
  const auto [x, w] = gauss_legendre(n_nodes);
  std::vector<double> p(K + 1);
  for (std::size_t piece = 0; piece + 1 < edges.size(); ++piece) {
    const double lo = edges[piece], hi = edges[piece + 1];
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (int i = 0; i < n_nodes; ++i) {
      const double z = mid + half * x[i];
      const double f = v(z) * w[i] * half;
      if (f == 0.) continue;
      p[0] = 1.;
      if (K >= 1) p[1] = z;
      for (int k = 2; k <= K; ++k)
        p[k] = ((2. * k - 1.) * z * p[k - 1] - (k - 1.) * p[k - 2]) / k;
      for (int k = 0; k <= K; ++k) acc[k] += f * p[k];
    }
  }
  for (int k = 0; k <= K; ++k)
    acc[k] *= 2. * kPi * std::sqrt((2. * k + 1.) / (4. * kPi));
  return acc;
}

}  // namespace

void AxialMaskSpec::validate() const {
  if (!(0. < a_lat && a_lat < b_lat && b_lat < kPi / 2.))
    throw DomainError("AxialMaskSpec: need 0 < a_lat < b_lat < pi/2");
  if (degree < 1) throw DomainError("AxialMaskSpec: degree must be >= 1");
}

double smoothstep_p(double x) {
  if (x <= 0.) return 0.;
  if (x >= 1.) return 1.;
  const double x2 = x * x;
  return x2 * x2 * (35. + x * (-84. + x * (70. - 20. * x)));
}

double mask_value(double z, const AxialMaskSpec& spec) {
  const double za = std::sin(spec.a_lat), zb = std::sin(spec.b_lat);
  return smoothstep_p((std::abs(z) - za) / (zb - za));
}

MaskCoeffs axial_coeffs(const std::function<double(double)>& v, int degree,
                        std::span<const double> breakpoints) {
  if (degree < 0) throw DomainError("axial_coeffs: negative degree");
  std::vector<double> edges{-1.};
  for (double b : breakpoints)
    if (b > edges.back() && b < 1.) edges.push_back(b);
  edges.push_back(1.);

  int n = degree + 64;
  std::vector<double> prev = legendre_moments(v, degree, edges, n);
  for (int attempt = 0; attempt < 6; ++attempt) {
    n *= 2;
    std::vector<double> next = legendre_moments(v, degree, edges, n);
    double change = 0.;
    for (int k = 0; k <= degree; ++k)
      change = std::max(change, std::abs(next[k] - prev[k]));
    prev = std::move(next);
    if (change <= 1e-12) return MaskCoeffs{degree, std::move(prev)};
  }
  warn("axial_coeffs: w_k not stable to 1e-12 at " + std::to_string(n) +
       " nodes per piece");
  return MaskCoeffs{degree, std::move(prev)};
}

MaskCoeffs mask_coeffs(const AxialMaskSpec& spec) {
  spec.validate();
  const double za = std::sin(spec.a_lat), zb = std::sin(spec.b_lat);
  const double breaks[] = {-zb, -za, za, zb};
  MaskCoeffs out = axial_coeffs(
      [&spec](double z) { return mask_value(z, spec); }, spec.degree, breaks);
  for (int k = 1; k <= out.degree; k += 2) out.w[k] = 0.;
  return out;
}

double truncated_mask(const MaskCoeffs& coeffs, double z) {
  const double pts[] = {z};
  return truncated_mask(coeffs, pts).front();
}

std::vector<double> truncated_mask(const MaskCoeffs& coeffs,
                                   std::span<const double> z) {
  std::vector<double> out(z.size());
  const int K = coeffs.degree;
  std::vector<double> scale(K + 1);
  for (int k = 0; k <= K; ++k)
    scale[k] = coeffs.w[k] * std::sqrt((2. * k + 1.) / (4. * kPi));
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double x = z[i];
    double p0 = 1., p1 = x;
    double acc = scale[0];
    if (K >= 1) acc += scale[1] * x;
    for (int k = 2; k <= K; ++k) {
      const double p2 = ((2. * k - 1.) * x * p1 - (k - 1.) * p0) / k;
      acc += scale[k] * p2;
      p0 = p1;
      p1 = p2;
    }
    out[i] = acc;
  }
  return out;
}

std::pair<double, double> mask_extrema(const MaskCoeffs& coeffs,
                                       int n_samples) {
  n_samples = std::max(n_samples, 3);
  std::vector<double> z(n_samples);
  for (int i = 0; i < n_samples; ++i)
    z[i] = std::cos(kPi * i / (n_samples - 1));
  const std::vector<double> v = truncated_mask(coeffs, z);

  // Golden-section polish between the neighbours of an extreme sample.
  auto polish = [&](std::size_t idx, double sign) {
    double lo = z[std::min<std::size_t>(idx + 1, n_samples - 1)];
    double hi = z[idx == 0 ? 0 : idx - 1];
    double best = sign * v[idx];
    const double g = (std::sqrt(5.) - 1.) / 2.;
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = sign * truncated_mask(coeffs, c);
    double fd = sign * truncated_mask(coeffs, d);
    for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = sign * truncated_mask(coeffs, c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = sign * truncated_mask(coeffs, d);
      }
      best = std::max({best, fc, fd});
    }
    return sign * best;
  };
  // Neighbouring Gibbs lobes can differ by less than the sampling error, so
  // every sampled local extremum is polished.
  double vmin = *std::min_element(v.begin(), v.end());
  double vmax = *std::max_element(v.begin(), v.end());
  for (int i = 0; i < n_samples; ++i) {
    const double left = i > 0 ? v[i - 1] : v[i];
    const double right = i + 1 < n_samples ? v[i + 1] : v[i];
    if (v[i] >= left && v[i] >= right)
      vmax = std::max(vmax, polish(static_cast<std::size_t>(i), 1.));
    if (v[i] <= left && v[i] <= right)
      vmin = std::min(vmin, polish(static_cast<std::size_t>(i), -1.));
  }
  return {vmin, vmax};
}

HarmonicCoeffs as_harmonic(const MaskCoeffs& coeffs) {
  HarmonicCoeffs out(coeffs.degree);
  for (int k = 0; k <= coeffs.degree; ++k) out(k, 0) = coeffs.w[k];
  return out;
}

MaskCoeffs from_harmonic(const HarmonicCoeffs& coeffs) {
  MaskCoeffs out{coeffs.degree_bound(),
                 std::vector<double>(coeffs.degree_bound() + 1)};
  for (int k = 0; k <= out.degree; ++k) out.w[k] = coeffs(k, 0).real();
  return out;
}

}  // namespace sphrec
