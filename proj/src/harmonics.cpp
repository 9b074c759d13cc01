#include "sphrec/harmonics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "sphrec/error.hpp"

namespace sphrec {
namespace {

constexpr double kPi = std::numbers::pi;

void check_x(double x, const char* who) {
  if (!(std::abs(x) <= 1.))
    throw DomainError(std::string(who) + ": argument outside [-1, 1]");
}

// P̄_{l,m}(x) for l = m..L into out[0..L-m].
void legendre_column(int m, int L, double x, double* out) {
  const double s = std::sqrt(std::max(0., (1. - x) * (1. + x)));
  double pmm = 1. / std::sqrt(4. * kPi);
  for (int i = 1; i <= m; ++i) pmm *= -std::sqrt((2. * i + 1.) / (2. * i)) * s;
  out[0] = pmm;
  if (L == m) return;
  out[1] = std::sqrt(2. * m + 3.) * x * pmm;
  for (int l = m + 2; l <= L; ++l) {
    const double ll = l, mm = m;
    const double a = std::sqrt((4. * ll * ll - 1.) / (ll * ll - mm * mm));
    const double b = std::sqrt(((ll - 1.) * (ll - 1.) - mm * mm) /
                               (4. * (ll - 1.) * (ll - 1.) - 1.));
    out[l - m] = a * (x * out[l - m - 1] - b * out[l - m - 2]);
  }
}

constexpr int kBlock = 8;

// Same recurrence with the square roots tabulated once for a transform.
class LegendreRecurrence {
 public:
  explicit LegendreRecurrence(int L)
      : L_(L), diag_(L + 1), a_(HarmonicCoeffs::index(L + 1, 0)),
        b_(a_.size()) {
    for (int i = 1; i <= L; ++i) diag_[i] = std::sqrt((2. * i + 1.) / (2. * i));
    for (int m = 0; m <= L; ++m)
      for (int l = m + 2; l <= L; ++l) {
        const double ll = l, mm = m;
        const std::size_t k = HarmonicCoeffs::index(l, m);
        a_[k] = std::sqrt((4. * ll * ll - 1.) / (ll * ll - mm * mm));
        b_[k] = std::sqrt(((ll - 1.) * (ll - 1.) - mm * mm) /
                          (4. * (ll - 1.) * (ll - 1.) - 1.));
      }
  }

  // Columns for kBlock nodes at once, out[(l - m) * kBlock + b]; the
  // recurrence runs across the block so it vectorises.
  void column_block(int m, const double* x, double* out) const {
    std::array<double, kBlock> s, pmm;
    for (int b = 0; b < kBlock; ++b) {
      s[b] = std::sqrt(std::max(0., (1. - x[b]) * (1. + x[b])));
      pmm[b] = 1. / std::sqrt(4. * kPi);
    }
    for (int i = 1; i <= m; ++i)
      for (int b = 0; b < kBlock; ++b) pmm[b] *= -diag_[i] * s[b];
    for (int b = 0; b < kBlock; ++b) out[b] = pmm[b];
    if (L_ == m) return;
    const double c1 = std::sqrt(2. * m + 3.);
    for (int b = 0; b < kBlock; ++b) out[kBlock + b] = c1 * x[b] * pmm[b];
    for (int l = m + 2; l <= L_; ++l) {
      const std::size_t k = HarmonicCoeffs::index(l, m);
      const double a = a_[k], c = b_[k];
      double* o = out + static_cast<std::size_t>(l - m) * kBlock;
      const double* o1 = o - kBlock;
      const double* o2 = o1 - kBlock;
      for (int b = 0; b < kBlock; ++b) o[b] = a * (x[b] * o1[b] - c * o2[b]);
    }
  }

 private:
  int L_;
  std::vector<double> diag_, a_, b_;
};

// Latitude nodes grouped as mirror pairs (z, -z), so that
// P̄_{l,m}(-z) = (-1)^{l+m} P̄_{l,m}(z) halves the Legendre work. Grids that
// are not mirror-symmetric get one unpaired entry per node.
struct NodePair {
  int node;
  int mirror;  // -1 when unpaired
};

std::vector<NodePair> pair_nodes(const SphereGrid& g) {
  const int n = g.n_theta;
  bool symmetric = true;
  for (int i = 0; i < n / 2 && symmetric; ++i)
    symmetric = g.nodes_z[i] == -g.nodes_z[n - 1 - i] &&
                g.weights_z[i] == g.weights_z[n - 1 - i];
  std::vector<NodePair> out;
  if (!symmetric) {
    for (int i = 0; i < n; ++i) out.push_back({i, -1});
    return out;
  }
  for (int i = 0; i < n / 2; ++i) out.push_back({n - 1 - i, i});
  if (n % 2) out.push_back({n / 2, -1});
  return out;
}

// cos and sin of 2 pi j / n.
struct PhaseTable {
  explicit PhaseTable(int n) : n(n), c(n), s(n) {
    for (int j = 0; j < n; ++j) {
      const double ang = 2. * kPi * j / n;
      c[j] = std::cos(ang);
      s[j] = std::sin(ang);
    }
  }
  int n;
  std::vector<double> c, s;
};

}  // namespace

HarmonicCoeffs::HarmonicCoeffs(int degree_bound)
    : degree_bound_(degree_bound),
      data_(index(degree_bound + 1, 0), Complex(0., 0.)) {
  if (degree_bound < 0) throw DomainError("HarmonicCoeffs: negative L");
}

Complex HarmonicCoeffs::value(int l, int m) const {
  if (l < 0 || l > degree_bound_ || std::abs(m) > l)
    throw DomainError("HarmonicCoeffs::value: index out of range");
  if (m >= 0) return (*this)(l, m);
  const Complex c = std::conj((*this)(l, -m));
  return (m % 2 == 0) ? c : -c;
}

std::vector<Complex> HarmonicCoeffs::order_slice(int m) const {
  std::vector<Complex> out;
  if (m < 0 || m > degree_bound_) return out;
  out.reserve(degree_bound_ - m + 1);
  for (int l = m; l <= degree_bound_; ++l) out.push_back((*this)(l, m));
  return out;
}

void HarmonicCoeffs::set_order_slice(int m, const std::vector<Complex>& s) {
  if (m < 0 || m > degree_bound_ ||
      s.size() != static_cast<std::size_t>(degree_bound_ - m + 1))
    throw ContractError("set_order_slice: slice length mismatch");
  for (int l = m; l <= degree_bound_; ++l) (*this)(l, m) = s[l - m];
}

HarmonicCoeffs HarmonicCoeffs::resized(int degree_bound) const {
  HarmonicCoeffs out(degree_bound);
  const int lmax = std::min(degree_bound, degree_bound_);
  for (int l = 0; l <= lmax; ++l)
    for (int m = 0; m <= l; ++m) out(l, m) = (*this)(l, m);
  return out;
}

HarmonicCoeffs& HarmonicCoeffs::operator+=(const HarmonicCoeffs& other) {
  if (other.degree_bound_ != degree_bound_)
    throw ContractError("HarmonicCoeffs: degree bound mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

HarmonicCoeffs& HarmonicCoeffs::operator-=(const HarmonicCoeffs& other) {
  if (other.degree_bound_ != degree_bound_)
    throw ContractError("HarmonicCoeffs: degree bound mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

double SphereGrid::phi(int k) const { return 2. * kPi * k / n_phi; }

double SphereGrid::weight(int i) const {
  return weights_z[i] * 2. * kPi / n_phi;
}

double assoc_legendre_norm(int l, int m, double x) {
  check_x(x, "assoc_legendre_norm");
  if (m < 0 || m > l) throw DomainError("assoc_legendre_norm: need 0<=m<=l");
  std::vector<double> col(l - m + 1);
  legendre_column(m, l, x, col.data());
  return col.back();
}

std::vector<double> assoc_legendre_table(int L, double x) {
  check_x(x, "assoc_legendre_table");
  std::vector<double> table(HarmonicCoeffs::index(L + 1, 0));
  std::vector<double> col(L + 1);
  for (int m = 0; m <= L; ++m) {
    legendre_column(m, L, x, col.data());
    for (int l = m; l <= L; ++l) table[HarmonicCoeffs::index(l, m)] = col[l - m];
  }
  return table;
}

double legendre_p(int l, double x) {
  check_x(x, "legendre_p");
  if (l < 0) throw DomainError("legendre_p: negative degree");
  if (l == 0) return 1.;
  double p0 = 1., p1 = x;
  for (int k = 2; k <= l; ++k) {
    const double p2 = ((2. * k - 1.) * x * p1 - (k - 1.) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need n >= 1");
  std::vector<double> x(n), w(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // i-th largest root; Tricomi-style starting guess.
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1., p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2. * k - 1.) * z * p1 - (k - 1.) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? z : p1;
      const double pnm1 = (n == 1) ? 1. : p0;
      dp = n * (z * pn - pnm1) / (z * z - 1.);
      const double dz = pn / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // One more derivative at the converged root for the weight.
    double p0 = 1., p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2. * k - 1.) * z * p1 - (k - 1.) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1. : n * (z * p1 - p0) / (z * z - 1.);
    const double wi = 2. / ((1. - z * z) * dp * dp);
    x[n - 1 - i] = z;
    x[i] = -z;
    w[n - 1 - i] = wi;
    w[i] = wi;
  }
  if (n % 2 == 1) x[n / 2] = 0.;
  return {std::move(x), std::move(w)};
}

SphereGrid make_grid(int exactness_degree) {
  if (exactness_degree < 0) throw DomainError("make_grid: negative degree");
  SphereGrid g;
  g.exactness_degree = exactness_degree;
  g.n_theta = (exactness_degree + 2) / 2;
  g.n_phi = exactness_degree + 1;
  auto [z, w] = gauss_legendre(g.n_theta);
  g.nodes_z = std::move(z);
  g.weights_z = std::move(w);
  return g;
}

Complex spherical_harmonic(int l, int m, double z, double phi) {
  const int am = std::abs(m);
  double p = assoc_legendre_norm(l, am, z);
  if (m < 0 && am % 2 == 1) p = -p;
  return p * Complex(std::cos(m * phi), std::sin(m * phi));
}

FieldSamples synthesize(const HarmonicCoeffs& coeffs, const SphereGrid& grid) {
  const int L = coeffs.degree_bound();
  const int n_theta = grid.n_theta;
  const std::vector<NodePair> pairs = pair_nodes(grid);
  const int n_pairs = static_cast<int>(pairs.size());
  const LegendreRecurrence rec(L);

  // F[i][m] = sum_l a_{l,m} P̄_{l,m}(z_i), split into even and odd l - m so
  // one recurrence serves both nodes of a mirror pair.
  std::vector<Complex> F(static_cast<std::size_t>(n_theta) * (L + 1));
#pragma omp parallel for schedule(dynamic)
  for (int m = 0; m <= L; ++m) {
    std::vector<double> P(static_cast<std::size_t>(L - m + 1) * kBlock);
    for (int u0 = 0; u0 < n_pairs; u0 += kBlock) {
      std::array<double, kBlock> x{};
      const int nb = std::min(kBlock, n_pairs - u0);
      for (int b = 0; b < nb; ++b) x[b] = grid.nodes_z[pairs[u0 + b].node];
      rec.column_block(m, x.data(), P.data());
      std::array<double, kBlock> er{}, ei{}, orr{}, oi{};
      for (int l = m; l <= L; ++l) {
        const Complex c = coeffs(l, m);
        const double* row = P.data() + static_cast<std::size_t>(l - m) * kBlock;
        auto& re = (l - m) % 2 == 0 ? er : orr;
        auto& im = (l - m) % 2 == 0 ? ei : oi;
        for (int b = 0; b < kBlock; ++b) {
          re[b] += c.real() * row[b];
          im[b] += c.imag() * row[b];
        }
      }
      for (int b = 0; b < nb; ++b) {
        const NodePair& p = pairs[u0 + b];
        const Complex e(er[b], ei[b]), o(orr[b], oi[b]);
        F[static_cast<std::size_t>(p.node) * (L + 1) + m] = e + o;
        if (p.mirror >= 0)
          F[static_cast<std::size_t>(p.mirror) * (L + 1) + m] = e - o;
      }
    }
  }

  FieldSamples out{grid, std::vector<double>(grid.size(), 0.)};
  const PhaseTable phase(grid.n_phi);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_theta; ++i) {
    const Complex* Fi = F.data() + static_cast<std::size_t>(i) * (L + 1);
    for (int k = 0; k < grid.n_phi; ++k) {
      double v = Fi[0].real();
      int j = 0;
      for (int m = 1; m <= L; ++m) {
        j += k;
        if (j >= grid.n_phi) j -= grid.n_phi;
        v += 2. * (Fi[m].real() * phase.c[j] - Fi[m].imag() * phase.s[j]);
      }
      out(i, k) = v;
    }
  }
  return out;
}

HarmonicCoeffs analyze(const FieldSamples& samples, int degree_bound,
                       int field_degree) {
  const SphereGrid& grid = samples.grid;
  if (samples.values.size() != grid.size())
    throw ContractError("analyze: sample count does not match grid");
  if (field_degree >= 0) {
    const int need = field_degree + degree_bound;
    if (grid.exactness_degree < need)
      warn("analyze: grid exactness " + std::to_string(grid.exactness_degree) +
           " below field degree + L = " + std::to_string(need) +
           "; projection is not exact");
  }
  const int J = degree_bound;
  const PhaseTable phase(grid.n_phi);
  // Longitude transform per row: G[i][m] = dphi * sum_k f e^{-i m phi_k}.
  std::vector<Complex> G(static_cast<std::size_t>(grid.n_theta) * (J + 1));
  const double dphi = 2. * kPi / grid.n_phi;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < grid.n_theta; ++i) {
    for (int m = 0; m <= J; ++m) {
      const int step = m % grid.n_phi;
      double re = 0., im = 0.;
      int j = 0;
      for (int k = 0; k < grid.n_phi; ++k) {
        const double f = samples(i, k);
        re += f * phase.c[j];
        im -= f * phase.s[j];
        j += step;
        if (j >= grid.n_phi) j -= grid.n_phi;
      }
      G[static_cast<std::size_t>(i) * (J + 1) + m] =
          Complex(re * dphi, im * dphi);
    }
  }

  const std::vector<NodePair> pairs = pair_nodes(grid);
  const int n_pairs = static_cast<int>(pairs.size());
  const LegendreRecurrence rec(J);
  HarmonicCoeffs out(J);
#pragma omp parallel for schedule(dynamic)
  for (int m = 0; m <= J; ++m) {
    std::vector<double> P(static_cast<std::size_t>(J - m + 1) * kBlock);
    std::vector<Complex> acc(J - m + 1, Complex(0., 0.));
    for (int u0 = 0; u0 < n_pairs; u0 += kBlock) {
      std::array<double, kBlock> x{}, er{}, ei{}, orr{}, oi{};
      const int nb = std::min(kBlock, n_pairs - u0);
      for (int b = 0; b < nb; ++b) {
        const NodePair& p = pairs[u0 + b];
        x[b] = grid.nodes_z[p.node];
        const double w = grid.weights_z[p.node];
        const Complex g1 = G[static_cast<std::size_t>(p.node) * (J + 1) + m];
        const Complex g2 =
            p.mirror >= 0 ? G[static_cast<std::size_t>(p.mirror) * (J + 1) + m]
                          : Complex(0., 0.);
        er[b] = w * (g1 + g2).real();
        ei[b] = w * (g1 + g2).imag();
        orr[b] = w * (g1 - g2).real();
        oi[b] = w * (g1 - g2).imag();
      }
      rec.column_block(m, x.data(), P.data());
      for (int l = m; l <= J; ++l) {
        const double* row = P.data() + static_cast<std::size_t>(l - m) * kBlock;
        const auto& re = (l - m) % 2 == 0 ? er : orr;
        const auto& im = (l - m) % 2 == 0 ? ei : oi;
        double sr = 0., si = 0.;
        for (int b = 0; b < kBlock; ++b) {
          sr += re[b] * row[b];
          si += im[b] * row[b];
        }
        acc[l - m] += Complex(sr, si);
      }
    }
    for (int l = m; l <= J; ++l) out(l, m) = acc[l - m];
  }
  return out;
}

void write_coeffs(std::ostream& os, const HarmonicCoeffs& coeffs) {
  os << "# L=" << coeffs.degree_bound() << '\n';
  os << std::setprecision(17);
  for (int l = 0; l <= coeffs.degree_bound(); ++l)
    for (int m = 0; m <= l; ++m)
      os << l << ' ' << m << ' ' << coeffs(l, m).real() << ' '
         << coeffs(l, m).imag() << '\n';
}

HarmonicCoeffs read_coeffs(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# L=", 0) != 0)
    throw IoError("coefficient file: missing '# L=' header");
  int L = -1;
  try {
    L = std::stoi(line.substr(4));
  } catch (const std::exception&) {
    throw IoError("coefficient file: bad header '" + line + "'");
  }
  HarmonicCoeffs out(L);
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    int l, m;
    double re, im;
    if (!(ss >> l >> m >> re >> im))
      throw IoError("coefficient file: malformed line '" + line + "'");
    if (l < 0 || l > L || m < 0 || m > l)
      throw IoError("coefficient file: index out of range in '" + line + "'");
    out(l, m) = Complex(re, im);
  }
  return out;
}

void save_coeffs(const std::string& path, const HarmonicCoeffs& coeffs) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_coeffs(os, coeffs);
  if (!os) throw IoError("write failed: " + path);
}

HarmonicCoeffs load_coeffs(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  return read_coeffs(is);
}

void write_samples(std::ostream& os, const FieldSamples& samples) {
  os << "# ntheta=" << samples.grid.n_theta << " nphi=" << samples.grid.n_phi
     << '\n';
  os << std::setprecision(17);
  for (double v : samples.values) os << v << '\n';
}

FieldSamples read_samples(std::istream& is) {
  std::string line;
  int nt = 0, np = 0;
  if (!std::getline(is, line) ||
      std::sscanf(line.c_str(), "# ntheta=%d nphi=%d", &nt, &np) != 2 ||
      nt < 1 || np < 1)
    throw IoError("sample file: missing '# ntheta=.. nphi=..' header");
  FieldSamples out;
  out.grid.n_theta = nt;
  out.grid.n_phi = np;
  out.grid.exactness_degree = std::min(2 * nt - 1, np - 1);
  auto [z, w] = gauss_legendre(nt);
  out.grid.nodes_z = std::move(z);
  out.grid.weights_z = std::move(w);
  out.values.reserve(out.grid.size());
  double v;
  while (out.values.size() < out.grid.size() && (is >> v))
    out.values.push_back(v);
  if (out.values.size() != out.grid.size())
    throw IoError("sample file: expected " + std::to_string(out.grid.size()) +
                  " values");
  return out;
}

}  // namespace sphrec
