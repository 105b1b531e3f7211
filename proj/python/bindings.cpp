#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <vector>

#include "prvacc/accountants.hpp"
#include "prvacc/report.hpp"

namespace py = pybind11;
using namespace prvacc;

namespace {

// Spec plus its built loss variable, shared by queries and compositions.
struct Mechanism {
  MechanismSpec spec;
  std::shared_ptr<const Prv> prv;
};

Mechanism Make(MechanismSpec spec) {
  return Mechanism{spec, std::shared_ptr<const Prv>(BuildPrv(spec))};
}

struct Result {
  CompositionResult run;
};

Result Compose(const Mechanism& mechanism, std::int64_t compositions,
               double eps_err, double delta_err, const std::string& algorithm,
               bool loose_constants) {
  const ErrorBudget budget{eps_err, delta_err};
  switch (AlgorithmFromString(algorithm)) {
    case Algorithm::kSingleStage:
      return {ComposeSingleStage(mechanism.spec, compositions, budget)};
    case Algorithm::kRecursive:
      return {ComposeRecursive(mechanism.spec, compositions, budget,
                               loose_constants)};
    case Algorithm::kTwoStage:
      return {ComposeTwoStage(mechanism.spec, compositions, budget)};
    default:
      throw std::invalid_argument("unsupported algorithm: " + algorithm);
  }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Numerical privacy accountant: composes privacy loss distributions by "
      "staged FFT convolutions and reports rigorous bounds on delta(eps).";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<Mechanism>(m, "Mechanism")
      .def_property_readonly(
          "description",
          [](const Mechanism& self) { return Describe(self.spec); })
      .def("cdf", [](const Mechanism& self, double y) { return self.prv->Cdf(y); },
           py::arg("y"), "CDF of the privacy loss variable")
      .def("mean", [](const Mechanism& self) { return self.prv->Mean(); })
      .def("delta",
           [](const Mechanism& self, double eps) { return self.prv->Delta(eps); },
           py::arg("eps"), "exact single-use delta(eps)")
      .def("log_mgf",
           [](const Mechanism& self, double lam) { return self.prv->LogMgf(lam); },
           py::arg("lam"))
      .def("eps_upper_bound",
           [](const Mechanism& self, std::int64_t compositions, double delta) {
             return EpsUpperBound(*self.prv, compositions, delta);
           },
           py::arg("compositions"), py::arg("delta"),
           "Chernoff upper bound on eps(delta) of the composed mechanism")
      .def("__repr__", [](const Mechanism& self) {
        return "<prvacc.Mechanism " + Describe(self.spec) + ">";
      });

  m.def("laplace", [](double scale) { return Make(LaplaceSpec{scale}); },
        py::arg("scale"), "Laplace mechanism with noise scale b, sensitivity 1");
  m.def("gaussian", [](double sigma) { return Make(GaussianSpec{sigma}); },
        py::arg("sigma"), "Gaussian mechanism with noise sigma, sensitivity 1");
  m.def(
      "subsampled_gaussian",
      [](double sigma, double sampling_prob, const std::string& direction) {
        return Make(SubsampledGaussianSpec{sigma, sampling_prob,
                                           AdjacencyFromString(direction)});
      },
      py::arg("sigma"), py::arg("sampling_prob"),
      py::arg("direction") = "remove",
      "Poisson-subsampled Gaussian mechanism; direction is 'remove' or 'add'");

  py::class_<Result>(m, "CompositionResult")
      .def_property_readonly(
          "algorithm", [](const Result& self) { return ToString(self.run.algorithm); })
      .def_property_readonly(
          "compositions", [](const Result& self) { return self.run.compositions; })
      .def_property_readonly(
          "mechanism", [](const Result& self) { return self.run.mechanism; })
      .def_property_readonly(
          "stage_buckets", [](const Result& self) { return self.run.stage_buckets; })
      .def_property_readonly(
          "stage_seconds", [](const Result& self) { return self.run.stage_seconds; })
      .def_property_readonly("eps_err",
                             [](const Result& self) { return self.run.budget.eps_err; })
      .def_property_readonly(
          "delta_err", [](const Result& self) { return self.run.budget.delta_err; })
      .def_property_readonly("mesh",
                             [](const Result& self) { return self.run.final.mesh(); })
      .def_property_readonly("shift",
                             [](const Result& self) { return self.run.final.shift(); })
      .def_property_readonly(
          "pmf", [](const Result& self) { return self.run.final.pmf(); })
      .def("delta_estimate",
           [](const Result& self, double eps) {
             return DeltaFromPmf(self.run.final, eps);
           },
           py::arg("eps"))
      .def("sandwich",
           [](const Result& self, double eps) {
             const DeltaSandwich s = Sandwich(self.run, eps);
             return py::make_tuple(s.lower, s.estimate, s.upper);
           },
           py::arg("eps"),
           "(lower, estimate, upper) bracket of the true delta(eps)")
      .def("eps_from_delta",
           [](const Result& self, double delta) {
             const EpsilonTriple t = EpsFromDelta(self.run, delta);
             return py::make_tuple(t.lower, t.estimate, t.upper);
           },
           py::arg("delta"),
           "(lower, estimate, upper) of the smallest eps with delta(eps) <= delta")
      .def("__repr__", [](const Result& self) {
        return "<prvacc.CompositionResult " + ToString(self.run.algorithm) +
               " k=" + std::to_string(self.run.compositions) + ">";
      });

  m.def("compose", &Compose, py::arg("mechanism"), py::arg("compositions"),
        py::arg("eps_err") = 0.1, py::arg("delta_err") = 1e-10,
        py::arg("algorithm") = "two-stage", py::arg("loose_constants") = false,
        py::call_guard<py::gil_scoped_release>(),
        "Compose a mechanism with itself `compositions` times.");

  m.def(
      "compose_heterogeneous",
      [](const std::vector<Mechanism>& mechanisms, double eps_err,
         double delta_err) {
        std::vector<MechanismSpec> specs;
        specs.reserve(mechanisms.size());
        for (const Mechanism& mech : mechanisms) specs.push_back(mech.spec);
        return Result{ComposeHeterogeneous(specs, ErrorBudget{eps_err, delta_err})};
      },
      py::arg("mechanisms"), py::arg("eps_err") = 0.1,
      py::arg("delta_err") = 1e-10,
      "Compose a list of different mechanisms once each.");
}
