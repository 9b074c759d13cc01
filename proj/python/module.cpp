#include <algorithm>
#include <complex>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sphrec/error.hpp"
#include "sphrec/estimator.hpp"
#include "sphrec/experiment.hpp"
#include "sphrec/field.hpp"
#include "sphrec/harmonics.hpp"
#include "sphrec/mask.hpp"
#include "sphrec/mask_operator.hpp"
#include "sphrec/metrics.hpp"
#include "sphrec/wigner.hpp"

namespace py = pybind11;
using namespace sphrec;

namespace {

// Coefficients cross the boundary as packed complex arrays, entry
// l(l+1)/2 + m holding a_{l,m} for 0 <= m <= l.
using CArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

HarmonicCoeffs to_coeffs(const CArray& packed) {
  const auto n = static_cast<std::size_t>(packed.size());
  int L = -1;
  while (HarmonicCoeffs::index(L + 1, 0) < n) ++L;
  if (L < 0 || HarmonicCoeffs::index(L + 1, 0) != n)
    throw ContractError("packed length " + std::to_string(n) +
                        " is not (L+1)(L+2)/2");
  HarmonicCoeffs a(L);
  std::copy(packed.data(), packed.data() + n, a.data().begin());
  return a;
}

CArray to_array(const HarmonicCoeffs& a) {
  CArray out(static_cast<py::ssize_t>(a.size()));
  std::copy(a.data().begin(), a.data().end(), out.mutable_data());
  return out;
}

py::array_t<double> samples_array(const FieldSamples& f) {
  py::array_t<double> out({f.grid.n_theta, f.grid.n_phi});
  std::copy(f.values.begin(), f.values.end(), out.mutable_data());
  return out;
}

FieldSamples to_samples(const SphereGrid& grid,
                        const py::array_t<double, py::array::c_style | py::array::forcecast>& v) {
  if (v.ndim() != 2 || v.shape(0) != grid.n_theta || v.shape(1) != grid.n_phi)
    throw ContractError("samples must have shape (n_theta, n_phi)");
  FieldSamples f{grid, std::vector<double>(v.data(), v.data() + v.size())};
  return f;
}

AxialMaskSpec mask_spec(double a_deg, double b_deg, int K) {
  ExperimentConfig c;
  c.mask_a_deg = a_deg;
  c.mask_b_deg = b_deg;
  c.K = K;
  return c.mask_spec();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<RankError>(m, "RankError", PyExc_ArithmeticError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_ArithmeticError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("wigner3j", &wigner3j, py::arg("l1"), py::arg("l2"), py::arg("l3"),
        py::arg("m1"), py::arg("m2"), py::arg("m3"));
  m.def("gaunt", &gaunt, py::arg("l"), py::arg("m"), py::arg("k"), py::arg("nu"),
        py::arg("j"), py::arg("mu"));

  py::class_<SphereGrid>(m, "SphereGrid")
      .def_readonly("n_theta", &SphereGrid::n_theta)
      .def_readonly("n_phi", &SphereGrid::n_phi)
      .def_readonly("exactness_degree", &SphereGrid::exactness_degree)
      .def_readonly("z", &SphereGrid::nodes_z)
      .def_readonly("weights_z", &SphereGrid::weights_z)
      .def_property_readonly("phi", [](const SphereGrid& g) {
        std::vector<double> p(g.n_phi);
        for (int k = 0; k < g.n_phi; ++k) p[k] = g.phi(k);
        return p;
      });
  m.def("make_grid", &make_grid, py::arg("exactness_degree"));

  m.def("synthesize", [](const CArray& a, const SphereGrid& g) {
    return samples_array(synthesize(to_coeffs(a), g));
  }, py::arg("coeffs"), py::arg("grid"));
  m.def("analyze", [](const SphereGrid& g,
                      const py::array_t<double, py::array::c_style | py::array::forcecast>& v,
                      int L) { return to_array(analyze(to_samples(g, v), L)); },
        py::arg("grid"), py::arg("samples"), py::arg("L"));

  m.def("paper_spectrum", [](int L, bool include_low) {
    return paper_spectrum(L, include_low).values;
  }, py::arg("L"), py::arg("include_monopole_dipole") = false);
  m.def("sample_field", [](const std::vector<double>& C, std::uint64_t seed,
                           const std::string& label) {
    return to_array(sample_field(PowerSpectrum{C}, Seed{seed, label}));
  }, py::arg("spectrum"), py::arg("seed"), py::arg("label") = "field");

  m.def("mask_coeffs", [](double a_deg, double b_deg, int K) {
    return mask_coeffs(mask_spec(a_deg, b_deg, K)).w;
  }, py::arg("a_deg") = 10., py::arg("b_deg") = 20., py::arg("K"));
  m.def("mask_extrema", [](const std::vector<double>& w, int n_samples) {
    return mask_extrema(MaskCoeffs{static_cast<int>(w.size()) - 1, w}, n_samples);
  }, py::arg("w"), py::arg("n_samples") = 2000);

  m.def("axial_block", [](int order, const std::vector<double>& w, int L, int J) {
    return build_axial_block(order, MaskCoeffs{static_cast<int>(w.size()) - 1, w}, L, J)
        .matrix;
  }, py::arg("m"), py::arg("w"), py::arg("L"), py::arg("J"));

  m.def("reconstruct", [](const std::vector<double>& w, const CArray& data, int L,
                          const std::vector<double>& C, double tau) {
    const MaskCoeffs mask{static_cast<int>(w.size()) - 1, w};
    const HarmonicCoeffs d = to_coeffs(data);
    const auto blocks = build_axial_blocks(mask, L, d.degree_bound());
    const PowerSpectrum S{C};
    return to_array(
        reconstruct(blocks, order_vectors(d, L), S, NoiseModel{tau, S}, {}).a_hat);
  }, py::arg("w"), py::arg("data"), py::arg("L"), py::arg("spectrum"), py::arg("tau"));

  m.def("masked_data", [](const CArray& a, const CArray& eps, const std::vector<double>& w,
                          int J) {
    return to_array(masked_data_pixel(to_coeffs(a), to_coeffs(eps),
                                      MaskCoeffs{static_cast<int>(w.size()) - 1, w}, J));
  }, py::arg("a"), py::arg("eps"), py::arg("w"), py::arg("J"));

  m.def("coeff_l2_error", [](const CArray& a_hat, const CArray& a) {
    return coeff_l2_error(to_coeffs(a_hat), to_coeffs(a));
  }, py::arg("a_hat"), py::arg("a"));

  // Keyword arguments are config keys with '_' for '-', values as strings.
  m.def("run_experiment", [](const py::kwargs& settings) {
    ExperimentConfig c;
    for (const auto& [key, value] : settings) {
      std::string k = py::str(key);
      std::replace(k.begin(), k.end(), '_', '-');
      std::string v;
      if (py::isinstance<py::list>(value) || py::isinstance<py::tuple>(value)) {
        for (const auto& item : value) v += (v.empty() ? "" : ",") + std::string(py::str(item));
      } else {
        v = py::str(value);
      }
      apply_setting(c, k, v);
    }
    c.validate();
    py::list rows;
    for (const ErrorReport& r : cmd_experiment(c)) {
      py::dict d;
      d["tau"] = r.tau;
      d["rms_err"] = r.rms;
      d["relative_err"] = r.rel;
      d["rms_err0"] = r.regions.rms0;
      d["relative_err0"] = r.regions.rel0;
      d["rms_err1"] = r.regions.rms1;
      d["relative_err1"] = r.regions.rel1;
      d["coeff_l2_err"] = r.coeff_l2;
      d["truth_norm"] = r.truth_norm;
      rows.append(d);
    }
    return rows;
  });
}
