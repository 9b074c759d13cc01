#include "sphrec/field.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "sphrec/error.hpp"

namespace sphrec {
namespace {

std::mt19937_64 make_engine(const Seed& seed) {
  std::vector<std::uint32_t> words{
      static_cast<std::uint32_t>(seed.value & 0xffffffffu),
      static_cast<std::uint32_t>(seed.value >> 32)};
  for (unsigned char c : seed.label) words.push_back(c);
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

HarmonicCoeffs draw(const std::vector<double>& variance, const Seed& seed) {
  const int L = static_cast<int>(variance.size()) - 1;
  HarmonicCoeffs out(L);
  auto engine = make_engine(seed);
  std::normal_distribution<double> normal(0., 1.);
  for (int l = 0; l <= L; ++l) {
    const double sd = std::sqrt(variance[l]);
    const double half_sd = std::sqrt(0.5 * variance[l]);
    out(l, 0) = Complex(sd * normal(engine), 0.);
    for (int m = 1; m <= l; ++m) {
      const double re = normal(engine);
      const double im = normal(engine);
      out(l, m) = Complex(half_sd * re, half_sd * im);
    }
  }
  return out;
}

}  // namespace

void PowerSpectrum::validate() const {
  if (values.empty()) throw DomainError("PowerSpectrum: empty");
  for (double c : values)
    if (!(c >= 0.) || !std::isfinite(c))
      throw DomainError("PowerSpectrum: entries must be finite and >= 0");
}

PowerSpectrum NoiseModel::spectrum() const {
  PowerSpectrum s = base;
  for (double& c : s.values) c *= tau;
  return s;
}

PowerSpectrum paper_spectrum(int L, bool include_monopole_dipole) {
  if (L < 1) throw DomainError("paper_spectrum: need L >= 1");
  PowerSpectrum s;
  s.values.resize(L + 1);
  for (int l = 0; l <= L; ++l) {
    const double x = double(l) / (L + 1);
    s.values[l] = (x <= 0.5) ? 1. : 2. - 2. * x;
  }
  if (!include_monopole_dipole) s.values[0] = s.values[1] = 0.;
  return s;
}

PowerSpectrum load_spectrum(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::vector<std::pair<int, double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    int l;
    double c;
    if (!(ss >> l >> c) || l < 0)
      throw IoError("spectrum file: malformed line '" + line + "'");
    rows.emplace_back(l, c);
  }
  PowerSpectrum s;
  for (auto [l, c] : rows) {
    if (static_cast<std::size_t>(l) >= s.values.size())
      s.values.resize(l + 1, 0.);
    s.values[l] = c;
  }
  s.validate();
  return s;
}

void save_spectrum(const std::string& path, const PowerSpectrum& spectrum) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << std::setprecision(17);
  for (int l = 0; l <= spectrum.degree_bound(); ++l)
    os << l << ' ' << spectrum[l] << '\n';
}

HarmonicCoeffs sample_field(const PowerSpectrum& spectrum, const Seed& seed) {
  spectrum.validate();
  return draw(spectrum.values, seed);
}

HarmonicCoeffs sample_noise(const NoiseModel& model, const Seed& seed) {
  if (!(model.tau >= 0.)) throw DomainError("NoiseModel: tau must be >= 0");
  return sample_field(model.spectrum(), seed);
}

std::vector<Eigen::VectorXcd> masked_data_matrix(
    const HarmonicCoeffs& a, const HarmonicCoeffs& eps,
    const std::vector<MaskOperatorBlock>& blocks) {
  const int L = a.degree_bound();
  if (eps.degree_bound() != L ||
      blocks.size() != static_cast<std::size_t>(L + 1))
    throw ContractError("masked_data_matrix: degree mismatch");
  std::vector<Eigen::VectorXcd> out(L + 1);
  for (int m = 0; m <= L; ++m) {
    const MaskOperatorBlock& b = blocks[m];
    if (b.m != m || b.L != L)
      throw ContractError("masked_data_matrix: block " + std::to_string(m) +
                          " has inconsistent (m, L)");
    Eigen::VectorXcd x(L - m + 1);
    for (int l = m; l <= L; ++l) x[l - m] = a(l, m) + eps(l, m);
    out[m] = b.matrix.cast<Complex>() * x;
  }
  return out;
}

HarmonicCoeffs masked_data_pixel(const HarmonicCoeffs& a,
                                 const HarmonicCoeffs& eps,
                                 const MaskCoeffs& mask, int J,
                                 int grid_exactness) {
  const int L = a.degree_bound();
  if (eps.degree_bound() != L)
    throw ContractError("masked_data_pixel: noise degree mismatch");
  const int needed = L + mask.degree + J;
  const SphereGrid grid = make_grid(grid_exactness < 0 ? needed : grid_exactness);
  FieldSamples f = synthesize(a + eps, grid);
  const std::vector<double> v = truncated_mask(mask, grid.nodes_z);
  for (int i = 0; i < grid.n_theta; ++i)
    for (int k = 0; k < grid.n_phi; ++k) f(i, k) *= v[i];
  return analyze(f, J, L + mask.degree);
}

HarmonicCoeffs masked_data_pixel(const HarmonicCoeffs& a,
                                 const HarmonicCoeffs& eps,
                                 const AxialMaskSpec& spec, int J,
                                 int grid_exactness) {
  return masked_data_pixel(a, eps, mask_coeffs(spec), J, grid_exactness);
}

std::vector<Eigen::VectorXcd> order_vectors(const HarmonicCoeffs& data,
                                            int L) {
  const int J = data.degree_bound();
  if (L > J) throw ContractError("order_vectors: L exceeds data degree");
  std::vector<Eigen::VectorXcd> out(L + 1);
  for (int m = 0; m <= L; ++m) {
    out[m].resize(J - m + 1);
    for (int j = m; j <= J; ++j) out[m][j - m] = data(j, m);
  }
  return out;
}

}  // namespace sphrec
