#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "sphrec/harmonics.hpp"

namespace sphrec {

/// Axially symmetric mask: zero within a_lat of the equator, one beyond
/// b_lat, with a C^3 transition in between. Latitudes in radians.
struct AxialMaskSpec {
  double a_lat = 0.;
  double b_lat = 0.;
  int degree = 1;

  void validate() const;
};

/// Legendre coefficients w_k = int v conj(Y_{k,0}) dr, k = 0..degree.
struct MaskCoeffs {
  int degree = 0;
  std::vector<double> w;
};

/// C^3 smoothstep: 0 for x <= 0, x^4 (35 - 84x + 70x^2 - 20x^3) on (0, 1),
/// 1 for x >= 1.
double smoothstep_p(double x);

/// Mask at z = cos(theta), using z_a = sin(a_lat), z_b = sin(b_lat).
double mask_value(double z, const AxialMaskSpec& spec);

/// w_k for an arbitrary axially symmetric v(z). Gauss-Legendre on each
/// smooth piece between `breakpoints` (sorted, inside (-1, 1)), starting at
/// degree+64 nodes per piece and doubling until no w_k moves by more than
/// 1e-12.
MaskCoeffs axial_coeffs(const std::function<double(double)>& v, int degree,
                        std::span<const double> breakpoints = {});

/// w_k of the C^3 mask; odd k are exactly zero.
MaskCoeffs mask_coeffs(const AxialMaskSpec& spec);

/// Degree-K truncation sum_k w_k Y_{k,0}(z).
double truncated_mask(const MaskCoeffs& coeffs, double z);

/// Truncated mask at many points; one Legendre sweep per point.
std::vector<double> truncated_mask(const MaskCoeffs& coeffs,
                                   std::span<const double> z);

/// (v_min, v_max) of the truncated mask. Sampled on n_samples
/// Chebyshev-Lobatto points, then every sampled local extremum is polished by a
/// golden-section search between their neighbours. Gibbs overshoot can give
/// v_min < 0 and v_max > 1.
std::pair<double, double> mask_extrema(const MaskCoeffs& coeffs,
                                       int n_samples);

/// Mask coefficients as HarmonicCoeffs (only m = 0 entries nonzero).
HarmonicCoeffs as_harmonic(const MaskCoeffs& coeffs);
MaskCoeffs from_harmonic(const HarmonicCoeffs& coeffs);

}  // namespace sphrec
