#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sphrec/harmonics.hpp"
#include "sphrec/mask.hpp"
#include "sphrec/mask_operator.hpp"

namespace sphrec {

struct PowerSpectrum {
  std::vector<double> values;  // C_l, l = 0..L

  int degree_bound() const { return static_cast<int>(values.size()) - 1; }
  double operator[](int l) const { return values[l]; }
  void validate() const;
};

/// Diagonal noise covariance N_l = tau * C_l.
struct NoiseModel {
  double tau = 0.;
  PowerSpectrum base;

  double operator[](int l) const { return tau * base[l]; }
  PowerSpectrum spectrum() const;
};

/// Reproducible random stream: the same (value, label) always yields the
/// same draws; different labels give independent streams.
struct Seed {
  std::uint64_t value = 0;
  std::string label = "field";
};

/// C_l = g(l / (L+1)) with g = 1 on [0, 1/2] and 2 - 2x above. The
/// monopole and dipole are zeroed unless include_monopole_dipole is set.
PowerSpectrum paper_spectrum(int L, bool include_monopole_dipole = false);

/// Spectrum file: lines "<ell> <C_ell>".
PowerSpectrum load_spectrum(const std::string& path);
void save_spectrum(const std::string& path, const PowerSpectrum& spectrum);

/// Gaussian coefficients with <a_{l,m} conj(a_{l',m'})> = C_l delta delta:
/// a_{l,0} ~ N(0, C_l) real; for m > 0 real and imaginary parts are
/// independent N(0, C_l / 2).
HarmonicCoeffs sample_field(const PowerSpectrum& spectrum, const Seed& seed);

/// sample_field with spectrum tau*C on the seed's own stream. Callers pass a
/// label distinct from the field's.
HarmonicCoeffs sample_noise(const NoiseModel& model, const Seed& seed);

/// Per-order right-hand sides E^{(m)} (a + eps)^{(m)}, m = 0..L.
std::vector<Eigen::VectorXcd> masked_data_matrix(
    const HarmonicCoeffs& a, const HarmonicCoeffs& eps,
    const std::vector<MaskOperatorBlock>& blocks);

/// Pixel route: synthesise a + eps, multiply pointwise by the degree-K
/// truncated mask, analyse up to degree J. The default grid has exactness
/// L + K + J, which makes the result equal to the matrix route.
HarmonicCoeffs masked_data_pixel(const HarmonicCoeffs& a,
                                 const HarmonicCoeffs& eps,
                                 const MaskCoeffs& mask, int J,
                                 int grid_exactness = -1);
HarmonicCoeffs masked_data_pixel(const HarmonicCoeffs& a,
                                 const HarmonicCoeffs& eps,
                                 const AxialMaskSpec& spec, int J,
                                 int grid_exactness = -1);

/// Splits degree-J coefficients into per-order vectors (a_{m,m}..a_{J,m})
/// for m = 0..L.
std::vector<Eigen::VectorXcd> order_vectors(const HarmonicCoeffs& data,
                                            int L);

}  // namespace sphrec
