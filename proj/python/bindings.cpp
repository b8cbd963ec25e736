// Copyright 2026 The irelab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "irelab/config.hpp"
#include "irelab/experiment.hpp"
#include "irelab/ire.hpp"
#include "irelab/landscapes.hpp"
#include "irelab/linalg.hpp"
#include "irelab/theory.hpp"
#include "irelab/verify.hpp"

namespace py = pybind11;
using namespace irelab;

namespace {

py::dict run_dict(const expcli::TrajectoryLog& log) {
  py::dict d;
  d["status"] = std::string(expcli::to_string(log.status));
  d["final_step"] = log.final_step;
  d["final_theta"] = log.final_theta;
  d["grad_evals"] = log.grad_evals;
  d["message"] = log.message;
  d["warnings"] = log.warnings;
  d["csv"] = expcli::to_csv(log);
  return d;
}

}  // namespace

PYBIND11_MODULE(_irelab, m) {
  m.doc() = "Implicit regularization enhancement lab";

  py::register_exception<DivergenceError>(m, "DivergenceError");
  py::register_exception<NonConvergenceError>(m, "NonConvergenceError");
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Landscape>(m, "Landscape")
      .def_property_readonly("name", &Landscape::name)
      .def_property_readonly("dim", &Landscape::dim)
      .def_property_readonly("num_samples", &Landscape::num_samples)
      .def_property_readonly("sharp_dim", &Landscape::sharp_dim)
      .def("loss", &Landscape::loss, py::arg("theta"))
      .def("grad", &Landscape::grad, py::arg("theta"))
      .def("hessian", [](const Landscape& L, const Vector& theta) { return L.hessian(theta).matrix(); },
           py::arg("theta"))
      .def("diag_hessian", &Landscape::diag_hessian, py::arg("theta"));

  py::class_<Toy2D, Landscape>(m, "Toy2D").def(py::init<>());

  py::class_<QuadraticValley, Landscape>(m, "QuadraticValley")
      .def_static("default_instance", &QuadraticValley::default_instance)
      .def_static("shifted_norm", &QuadraticValley::shifted_norm, py::arg("p"), py::arg("a"))
      .def_static("constant", &QuadraticValley::constant, py::arg("p"), py::arg("a"))
      .def_static("default_start", &QuadraticValley::default_start);

  py::class_<InterpolatingRegression, Landscape>(m, "InterpolatingRegression")
      .def_static("default_instance", &InterpolatingRegression::default_instance)
      .def_static("default_start", &InterpolatingRegression::default_start);

  py::class_<SoftmaxModel, Landscape>(m, "SoftmaxModel")
      .def_static("default_instance", &SoftmaxModel::default_instance, py::arg("seed") = 20240611)
      .def("initial_point", &SoftmaxModel::initial_point, py::arg("seed"), py::arg("scale") = 0.5);

  m.def(
      "eigh",
      [](const Matrix& a) {
        const auto e = linalg::sym_eigh(linalg::SymMatrix(a));
        return py::make_tuple(e.eigvals, e.eigvecs);
      },
      py::arg("a"), "Eigenvalues (descending) and eigenvectors of the symmetric part of a.");

  m.def("flat_count", &ire::flat_count, py::arg("p"), py::arg("gamma"));
  m.def(
      "build_mask", [](const Vector& h, double gamma) { return ire::build_mask(h, gamma).selected; },
      py::arg("h"), py::arg("gamma"));

  m.def(
      "phi_limit", [](const Landscape& L, const Vector& theta) { return theory::phi_limit(L, theta); },
      py::arg("landscape"), py::arg("theta"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "dist_to_manifold", [](const Landscape& L, const Vector& theta) { return theory::dist_to_manifold(L, theta); },
      py::arg("landscape"), py::arg("theta"), py::call_guard<py::gil_scoped_release>());
  m.def("trace_hessian", &theory::trace_hessian, py::arg("landscape"), py::arg("theta"));
  m.def(
      "riemannian_trace_grad",
      [](const Landscape& L, const Vector& z, Index m) { return theory::riemannian_trace_grad(L, z, m).value; },
      py::arg("landscape"), py::arg("z"), py::arg("sharp_dim") = 0);

  m.def(
      "measure_drift",
      [](const Landscape& L, const Vector& theta0, const std::string& variant, std::vector<double> kappas,
         std::int64_t repetitions, double lr, double rho, std::uint64_t seed, int jobs) {
        theory::DriftConfig cfg;
        cfg.base.variant = theory::parse_sam_variant(variant);
        cfg.base.lr = lr;
        cfg.base.rho = rho;
        cfg.base.seed = seed;
        cfg.kappas = std::move(kappas);
        cfg.repetitions = repetitions;
        cfg.jobs = jobs;
        theory::DriftReport rep;
        {
          py::gil_scoped_release release;
          rep = theory::measure_drift(L, theta0, cfg);
        }
        py::list estimates;
        for (const auto& e : rep.estimates) {
          py::dict d;
          d["kappa"] = e.kappa;
          d["mean"] = e.mean;
          d["standard_error"] = e.standard_error;
          d["cosine"] = e.cosine;
          d["magnitude"] = e.magnitude;
          d["predicted"] = e.predicted;
          estimates.append(d);
        }
        py::dict out;
        out["z0"] = rep.z0;
        out["riemannian_grad"] = rep.riemannian_grad;
        out["estimates"] = estimates;
        return out;
      },
      py::arg("landscape"), py::arg("theta0"), py::arg("variant") = "average",
      py::arg("kappas") = std::vector<double>{0.0, 9.0}, py::arg("repetitions") = 2000, py::arg("lr") = 0.01,
      py::arg("rho") = 0.05, py::arg("seed") = 0, py::arg("jobs") = 1);

  m.def(
      "sde_simulate",
      [](std::function<double(double)> h, std::function<double(double)> dh, double sigma, double lr, double kappa,
         double dt, double horizon, double u0, double v0, std::int64_t record_every, std::uint64_t seed) {
        theory::SdeConfig cfg;
        cfg.h = std::move(h);
        cfg.dh = std::move(dh);
        cfg.sigma = sigma;
        cfg.lr = lr;
        cfg.kappa = kappa;
        cfg.dt = dt;
        cfg.horizon = horizon;
        cfg.u0 = u0;
        cfg.v0 = v0;
        cfg.record_every = record_every;
        CounterRng rng = CounterRng::stream(seed, 0);
        const auto path = theory::sde_simulate(cfg, rng);
        py::dict out;
        out["time"] = path.time;
        out["u"] = path.u;
        out["v"] = path.v;
        out["dt"] = path.dt;
        return out;
      },
      py::arg("h"), py::arg("dh"), py::arg("sigma") = 1.0, py::arg("lr") = 0.01, py::arg("kappa") = 0.0,
      py::arg("dt") = 0.0, py::arg("horizon") = 1.0, py::arg("u0") = 1.0, py::arg("v0") = 0.0,
      py::arg("record_every") = 1, py::arg("seed") = 0);

  m.def(
      "canonical_config", [](const std::string& text) { return expcli::to_text(expcli::parse_config(text)); },
      py::arg("text"), "Parses a config and returns its canonical text.");
  m.def(
      "run",
      [](const std::string& text) {
        const auto cfg = expcli::parse_config(text);
        expcli::TrajectoryLog log;
        {
          py::gil_scoped_release release;
          log = expcli::run(cfg);
        }
        return run_dict(log);
      },
      py::arg("config_text"));
  m.def(
      "sweep",
      [](const std::string& text, int jobs) {
        const auto cfg = expcli::parse_config(text);
        py::gil_scoped_release release;
        return expcli::to_sweep_csv(expcli::sweep(cfg, jobs));
      },
      py::arg("config_text"), py::arg("jobs") = 1, "Runs the grid and returns the summary CSV.");

  m.def("suite_names", &verify::suite_names);
  m.def(
      "verify",
      [](const std::string& suite, int jobs, std::uint64_t seed) {
        verify::SuiteReport rep;
        {
          py::gil_scoped_release release;
          rep = verify::run_suite(suite, {jobs, seed});
        }
        py::list checks;
        for (const auto& c : rep.criteria)
          for (const auto& k : c.checks) {
            py::dict d;
            d["criterion"] = c.id;
            d["name"] = k.name;
            d["measured"] = k.measured;
            d["expectation"] = k.expectation;
            d["pass"] = k.pass;
            checks.append(d);
          }
        py::dict out;
        out["suite"] = rep.suite;
        out["passed"] = rep.passed();
        out["checks"] = checks;
        return out;
      },
      py::arg("suite"), py::arg("jobs") = 1, py::arg("seed") = 1);
}
