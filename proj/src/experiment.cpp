#include "sphrec/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sphrec/error.hpp"
#include "sphrec/field.hpp"

namespace sphrec {
namespace fs = std::filesystem;
namespace {

constexpr double kDeg = std::numbers::pi / 180.;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream ss(value);
  T out{};
  if (!(ss >> out) || !(ss >> std::ws).eof())
    throw ConfigError("config: cannot parse '" + value + "' for " + key);
  return out;
}

std::vector<double> parse_list(const std::string& key,
                               const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(parse_number<double>(key, trim(item)));
  if (out.empty()) throw ConfigError("config: empty list for " + key);
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("config: '" + v + "' is not a boolean for " + key);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string tau_tag(double tau) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", tau);
  return buf;
}

void apply_threads(const ExperimentConfig& c) {
#ifdef _OPENMP
  if (c.threads > 0) omp_set_num_threads(c.threads);
#else
  (void)c;
#endif
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create directory " + p.string());
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw IoError("cannot open " + p.string() + " for writing");
  return os;
}

// 64-bit FNV-1a, used only to fingerprint the mask in the cache manifest.
std::uint64_t fingerprint(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string manifest_text(const ExperimentConfig& c, const MaskCoeffs& w) {
  std::string ws;
  for (double x : w.w) ws += num(x) + ';';
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fingerprint(ws)));
  std::ostringstream os;
  os << "L=" << c.L << "\nK=" << c.K << "\nJ=" << c.resolved_J()
     << "\nmask-a-deg=" << num(c.mask_a_deg)
     << "\nmask-b-deg=" << num(c.mask_b_deg) << "\nmask-hash=" << hash
     << "\nblocks=" << c.L + 1 << '\n';
  return os.str();
}

fs::path block_path(const fs::path& dir, int m) {
  char name[32];
  std::snprintf(name, sizeof name, "block_%04d.bin", m);
  return dir / name;
}

void write_plot_csv(const fs::path& path, const FieldSamples& truth,
                    const FieldSamples& recon) {
  std::ofstream os = open_out(path);
  os << "theta_deg,phi_deg,truth,recon,error\n";
  char line[160];
  const SphereGrid& g = truth.grid;
  for (int i = 0; i < g.n_theta; ++i)
    for (int k = 0; k < g.n_phi; ++k) {
      std::snprintf(line, sizeof line, "%.6f,%.6f,%.10e,%.10e,%.10e\n",
                    std::acos(g.nodes_z[i]) / kDeg, g.phi(k) / kDeg,
                    truth(i, k), recon(i, k), recon(i, k) - truth(i, k));
      os << line;
    }
}

}  // namespace

AxialMaskSpec ExperimentConfig::mask_spec() const {
  return AxialMaskSpec{mask_a_deg * kDeg, mask_b_deg * kDeg, K};
}

void ExperimentConfig::validate() const {
  if (L < 1) throw ConfigError("config: L must be >= 1");
  if (K < 1) throw ConfigError("config: K must be >= 1");
  const int j = resolved_J();
  if (j < L || j > L + K)
    throw ConfigError("config: need L <= J <= L + K (J=" + std::to_string(j) +
                      ")");
  if (!(0. < mask_a_deg && mask_a_deg < mask_b_deg && mask_b_deg < 90.))
    throw ConfigError("config: need 0 < mask-a-deg < mask-b-deg < 90");
  if (taus.empty()) throw ConfigError("config: tau list is empty");
  for (double t : taus)
    if (!(t >= 0.)) throw ConfigError("config: tau must be >= 0");
  if (nu_grid.empty()) throw ConfigError("config: nu grid is empty");
  for (double n : nu_grid)
    if (!(n >= 0.)) throw ConfigError("config: nu values must be >= 0");
  if (out.empty()) throw ConfigError("config: out directory is empty");
  if (grid_exactness >= 0 && grid_exactness < 2 * L)
    throw ConfigError("config: grid-exactness must be >= 2L");
  if (!(rank_tolerance >= 0.))
    throw ConfigError("config: rank-tolerance must be >= 0");
  if (threads < 0) throw ConfigError("config: threads must be >= 0");
}

void apply_setting(ExperimentConfig& c, const std::string& key,
                   const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "L")
    c.L = parse_number<int>(key, v);
  else if (key == "K")
    c.K = parse_number<int>(key, v);
  else if (key == "J")
    c.J = parse_number<int>(key, v);
  else if (key == "mask-a-deg")
    c.mask_a_deg = parse_number<double>(key, v);
  else if (key == "mask-b-deg")
    c.mask_b_deg = parse_number<double>(key, v);
  else if (key == "tau")
    c.taus = parse_list(key, v);
  else if (key == "seed")
    c.seed = parse_number<std::uint64_t>(key, v);
  else if (key == "method") {
    if (v == "qr")
      c.method = SolveMethod::qr;
    else if (v == "regularized")
      c.method = SolveMethod::regularized;
    else
      throw ConfigError("config: method must be qr or regularized");
  } else if (key == "nu")
    c.nu_grid = parse_list(key, v);
  else if (key == "spectrum")
    c.spectrum = v;
  else if (key == "include-monopole-dipole")
    c.include_monopole_dipole = parse_bool(key, v);
  else if (key == "out")
    c.out = v;
  else if (key == "grid-exactness")
    c.grid_exactness = parse_number<int>(key, v);
  else if (key == "rank-tolerance")
    c.rank_tolerance = parse_number<double>(key, v);
  else if (key == "threads")
    c.threads = parse_number<int>(key, v);
  else
    throw ConfigError("config: unknown key '" + key + "'");
}

void load_config_file(ExperimentConfig& c, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key=value");
    apply_setting(c, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

PowerSpectrum config_spectrum(const ExperimentConfig& c) {
  if (c.spectrum == "paper")
    return paper_spectrum(c.L, c.include_monopole_dipole);
  PowerSpectrum s = load_spectrum(c.spectrum);
  if (s.degree_bound() < c.L)
    throw ConfigError("spectrum file covers degrees up to " +
                      std::to_string(s.degree_bound()) + " < L");
  s.values.resize(c.L + 1);
  if (!c.include_monopole_dipole) s.values[0] = s.values[1] = 0.;
  return s;
}

OperatorCache cmd_build_operator(const ExperimentConfig& c) {
  c.validate();
  apply_threads(c);
  OperatorCache cache;
  cache.mask = mask_coeffs(c.mask_spec());
  const int J = c.resolved_J();
  const fs::path dir = fs::path(c.out) / "operator";
  ensure_dir(dir);
  const std::string manifest = manifest_text(c, cache.mask);

  bool reuse = false;
  {
    std::ifstream is(dir / "manifest.txt");
    if (is) {
      std::stringstream ss;
      ss << is.rdbuf();
      reuse = ss.str() == manifest;
    }
  }
  if (reuse) {
    try {
      for (int m = 0; m <= c.L; ++m) {
        MaskOperatorBlock b = load_block(block_path(dir, m).string());
        if (b.m != m || b.L != c.L || b.J != J)
          throw IoError("cached block header mismatch");
        cache.blocks.push_back(std::move(b));
      }
      cache.reused = c.L + 1;
      return cache;
    } catch (const IoError&) {
      cache.blocks.clear();
    }
  }
  cache.blocks = build_axial_blocks(cache.mask, c.L, J);
  for (const MaskOperatorBlock& b : cache.blocks)
    save_block(block_path(dir, b.m).string(), b);
  cache.built = c.L + 1;
  std::ofstream os = open_out(dir / "manifest.txt");
  os << manifest;
  if (!os) throw IoError("cannot write operator manifest");
  return cache;
}

std::vector<ErrorReport> cmd_experiment(const ExperimentConfig& c) {
  c.validate();
  const OperatorCache cache = cmd_build_operator(c);
  const fs::path out(c.out);
  const int J = c.resolved_J();
  const PowerSpectrum C = config_spectrum(c);
  const AxialMaskSpec spec = c.mask_spec();

  const HarmonicCoeffs truth = sample_field(C, Seed{c.seed, "field"});
  save_coeffs((out / "truth.coeffs").string(), truth);

  const SphereGrid metric_grid = make_grid(c.resolved_exactness());
  const SphereGrid plot_grid = make_grid(4 * c.L);
  const FieldSamples truth_samples = synthesize(truth, metric_grid);
  const FieldSamples truth_plot = synthesize(truth, plot_grid);
  const RegionPartition partition = make_partition(metric_grid, spec);

  std::vector<ErrorReport> rows;
  std::ofstream log = open_out(out / "solver_log.txt");
  for (double tau : c.taus) {
    const NoiseModel noise{tau, C};
    const HarmonicCoeffs eps = sample_noise(noise, Seed{c.seed, "noise"});
    const HarmonicCoeffs data =
        masked_data_pixel(truth, eps, cache.mask, J, c.resolved_exactness());
    const auto rhs = order_vectors(data, c.L);

    EstimatorConfig est;
    est.rank_tolerance = c.rank_tolerance;
    ReconstructionResult result;
    bool regularize = c.method == SolveMethod::regularized;
    if (!regularize) {
      try {
        est.method = SolveMethod::qr;
        result = reconstruct(cache.blocks, rhs, C, noise, est);
        log << "tau=" << tau_tag(tau) << " method=qr\n";
      } catch (const RankError& e) {
        log << "tau=" << tau_tag(tau) << " qr rank failure: " << e.what()
            << "; switching to regularized\n";
        warn(std::string("experiment: ") + e.what() +
             "; switching to the regularized path");
        regularize = true;
      }
    }
    if (regularize) {
      const NuSearchResult search = grid_search_nu(
          cache.blocks, rhs, C, noise.spectrum(), truth, c.nu_grid, true);
      est.method = SolveMethod::regularized;
      est.nu = search.best_nu;
      result = reconstruct(cache.blocks, rhs, C, noise, est);
      log << "tau=" << tau_tag(tau) << " method=regularized nu="
          << num(search.best_nu) << " l2=" << num(search.l2_error) << '\n';
    }
    {
      std::ofstream d =
          open_out(out / ("diagnostics_tau" + tau_tag(tau) + ".csv"));
      d << "m,active_columns,condition_estimate,residual_norm,rank_ok\n";
      for (const BlockDiagnostics& b : result.diagnostics)
        d << b.m << ',' << b.active_columns << ','
          << num(b.condition_estimate) << ',' << num(b.residual_norm) << ','
          << (b.rank_ok ? 1 : 0) << '\n';
    }

    const FieldSamples recon = synthesize(result.a_hat, metric_grid);
    ErrorReport row;
    row.tau = tau;
    row.truth_norm = field_norm(truth_samples);
    row.rms = rms_error(recon, truth_samples);
    row.rel = row.rms / row.truth_norm;
    row.regions = region_errors(recon, truth_samples, partition);
    row.coeff_l2 = coeff_l2_error(result.a_hat, truth);
    rows.push_back(row);

    const std::string tag = "_tau" + tau_tag(tau);
    save_coeffs((out / ("recon" + tag + ".coeffs")).string(), result.a_hat);
    save_coeffs((out / ("error" + tag + ".coeffs")).string(),
                result.a_hat - truth);
    write_plot_csv(out / ("fields" + tag + ".csv"), truth_plot,
                   synthesize(result.a_hat, plot_grid));
  }
  {
    std::ofstream os = open_out(out / "report.txt");
    write_report_table(os, rows);
  }
  {
    std::ofstream os = open_out(out / "report.csv");
    write_report_csv(os, rows);
  }
  return rows;
}

DiagnoseReport cmd_diagnose(const ExperimentConfig& c) {
  c.validate();
  const OperatorCache cache = cmd_build_operator(c);
  DiagnoseReport rep;
  const auto [vmin, vmax] =
      mask_extrema(cache.mask, std::max(4 * c.K, 4096));
  rep.v_min = vmin;
  rep.v_max = vmax;
  const double vabs = std::max(std::abs(vmin), std::abs(vmax));
  rep.rows.resize(cache.blocks.size());
#pragma omp parallel for schedule(dynamic)
  for (int m = 0; m < static_cast<int>(cache.blocks.size()); ++m) {
    const std::vector<double> s = singular_values(cache.blocks[m]);
    SpectralRow& r = rep.rows[m];
    r.m = m;
    r.sigma_max = s.front();
    r.sigma_min = s.back();
    r.condition = s.back() > 0. ? s.front() / s.back()
                                : std::numeric_limits<double>::infinity();
  }
  for (const SpectralRow& r : rep.rows)
    if (r.sigma_max > vabs + 1e-8) rep.bound_ok = false;

  const fs::path out(c.out);
  {
    std::ofstream os = open_out(out / "diagnose.csv");
    os << "m,sigma_max,sigma_min,condition\n";
    for (const SpectralRow& r : rep.rows)
      os << r.m << ',' << num(r.sigma_max) << ',' << num(r.sigma_min) << ','
         << num(r.condition) << '\n';
  }
  {
    std::ofstream os = open_out(out / "diagnose.txt");
    double smax = 0.;
    for (const SpectralRow& r : rep.rows) smax = std::max(smax, r.sigma_max);
    os << "v_min=" << num(vmin) << "\nv_max=" << num(vmax)
       << "\nsigma_max=" << num(smax) << '\n'
       << "bound sigma_max <= max|v| + 1e-8: "
       << (rep.bound_ok ? "PASS" : "FAIL") << '\n';
  }
  return rep;
}

MaskCoeffs cmd_mask_coeffs(const ExperimentConfig& c) {
  c.validate();
  MaskCoeffs w = mask_coeffs(c.mask_spec());
  ensure_dir(c.out);
  save_coeffs((fs::path(c.out) / "mask_coeffs.txt").string(), as_harmonic(w));
  return w;
}

HarmonicCoeffs cmd_synth(const ExperimentConfig& c) {
  c.validate();
  apply_threads(c);
  ensure_dir(c.out);
  const HarmonicCoeffs a = sample_field(config_spectrum(c), Seed{c.seed, "field"});
  save_coeffs((fs::path(c.out) / "field.coeffs").string(), a);
  std::ofstream os = open_out(fs::path(c.out) / "field_samples.txt");
  write_samples(os, synthesize(a, make_grid(2 * c.L)));
  return a;
}

}  // namespace sphrec
