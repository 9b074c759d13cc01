// Command-line front end: build-operator, experiment, diagnose,
// mask-coeffs, synth. Exit codes: 0 ok, 2 config, 3 numerical, 4 I/O.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sphrec/error.hpp"
#include "sphrec/experiment.hpp"

namespace {

const std::vector<std::string> kKeys = {
    "L",   "K",    "J",   "mask-a-deg", "mask-b-deg",     "tau",
    "seed", "method", "nu", "spectrum", "out", "grid-exactness",
    "rank-tolerance", "threads"};

struct Settings {
  std::string config_path;
  std::map<std::string, std::string> values;
  bool monopole_dipole = false;
};

void add_settings(CLI::App* cmd, Settings& s) {
  cmd->add_option("--config", s.config_path, "key=value config file");
  for (const std::string& key : kKeys)
    cmd->add_option("--" + key, s.values[key], key);
  cmd->add_flag("--include-monopole-dipole", s.monopole_dipole,
                "keep C_0 and C_1 from the spectrum formula");
}

sphrec::ExperimentConfig resolve(const Settings& s) {
  sphrec::ExperimentConfig c;
  if (!s.config_path.empty()) sphrec::load_config_file(c, s.config_path);
  for (const auto& [key, value] : s.values)
    if (!value.empty()) sphrec::apply_setting(c, key, value);
  if (s.monopole_dipole) c.include_monopole_dipole = true;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reconstruct band-limited spherical fields from masked data"};
  app.require_subcommand(1);

  Settings build_s, exp_s, diag_s, mask_s, synth_s;
  auto* build = app.add_subcommand("build-operator",
                                   "precompute and cache the E^(m) blocks");
  auto* experiment =
      app.add_subcommand("experiment", "run the reconstruction experiment");
  auto* diagnose =
      app.add_subcommand("diagnose", "singular values per order block");
  auto* maskc =
      app.add_subcommand("mask-coeffs", "Legendre coefficients of the mask");
  auto* synth = app.add_subcommand("synth", "draw one Gaussian random field");
  add_settings(build, build_s);
  add_settings(experiment, exp_s);
  add_settings(diagnose, diag_s);
  add_settings(maskc, mask_s);
  add_settings(synth, synth_s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*build) {
      const auto c = resolve(build_s);
      const auto cache = sphrec::cmd_build_operator(c);
      std::cout << "blocks: " << cache.blocks.size() << " (built "
                << cache.built << ", cached " << cache.reused << ")\n";
    } else if (*experiment) {
      const auto c = resolve(exp_s);
      const auto rows = sphrec::cmd_experiment(c);
      sphrec::write_report_table(std::cout, rows);
    } else if (*diagnose) {
      const auto c = resolve(diag_s);
      const auto rep = sphrec::cmd_diagnose(c);
      std::printf("v_min=%.6g v_max=%.6g bound %s\n", rep.v_min, rep.v_max,
                  rep.bound_ok ? "PASS" : "FAIL");
      for (const auto& r : rep.rows)
        std::printf("m=%d sigma_max=%.6e sigma_min=%.6e cond=%.6e\n", r.m,
                    r.sigma_max, r.sigma_min, r.condition);
      if (!rep.bound_ok) return 3;
    } else if (*maskc) {
      const auto c = resolve(mask_s);
      const auto w = sphrec::cmd_mask_coeffs(c);
      std::cout << "wrote " << w.degree + 1 << " coefficients\n";
    } else if (*synth) {
      const auto c = resolve(synth_s);
      const auto a = sphrec::cmd_synth(c);
      std::cout << "wrote field with L=" << a.degree_bound() << '\n';
    }
  } catch (const sphrec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const sphrec::RankError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const sphrec::SolverError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const sphrec::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
