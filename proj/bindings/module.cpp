#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "robinpq/asymptotics.hpp"
#include "robinpq/energy.hpp"
#include "robinpq/mesh.hpp"
#include "robinpq/oracles.hpp"
#include "robinpq/postprocess.hpp"
#include "robinpq/problem.hpp"
#include "robinpq/solvers.hpp"

namespace py = pybind11;
using namespace robinpq;

namespace {

// The C++ API passes meshes as shared_ptr<const Mesh>; python sees this
// immutable handle instead.
struct MeshHandle {
  MeshPtr ptr;
  const Mesh& get() const { return *ptr; }
};

SourceTerm source_from_py(const py::object& obj) {
  if (py::isinstance<py::float_>(obj) || py::isinstance<py::int_>(obj))
    return SourceConstant{obj.cast<double>()};
  if (py::isinstance<py::dict>(obj)) {
    auto d = obj.cast<py::dict>();
    const std::string kind = d["kind"].cast<std::string>();
    if (kind == "constant") return SourceConstant{d["value"].cast<double>()};
    if (kind == "polynomial") {
      SourcePolynomial poly;
      for (auto t : d["monomials"].cast<py::list>()) {
        auto seq = t.cast<py::sequence>();
        poly.terms.push_back({seq[0].cast<int>(), seq[1].cast<int>(), seq[2].cast<double>()});
      }
      return poly;
    }
    if (kind == "nodal") return SourceNodal{d["values"].cast<std::vector<double>>()};
  }
  throw py::value_error("source must be a number or a dict with kind constant/polynomial/nodal");
}

SolverConfig cfg_or_default(const py::object& cfg) {
  return cfg.is_none() ? SolverConfig{} : cfg.cast<SolverConfig>();
}

py::object opt_to_py(const std::optional<double>& v) {
  return v ? py::cast(*v) : py::object(py::none());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Robin p-Laplacian energy solver: meshes, solvers, asymptotic checks";

  py::class_<MeshHandle>(m, "Mesh")
      .def_property_readonly("dimension", [](const MeshHandle& s) { return s.get().dimension; })
      .def_property_readonly("num_vertices", [](const MeshHandle& s) { return s.get().num_vertices(); })
      .def_property_readonly("num_cells", [](const MeshHandle& s) { return s.get().num_cells(); })
      .def_property_readonly("num_facets", [](const MeshHandle& s) { return s.get().num_facets(); })
      .def("domain_measure", [](const MeshHandle& s) { return s.get().domain_measure(); })
      .def("boundary_measure", [](const MeshHandle& s) { return s.get().boundary_measure(); })
      .def("max_cell_diameter", [](const MeshHandle& s) { return s.get().max_cell_diameter(); })
      .def("boundary_vertices", [](const MeshHandle& s) { return s.get().boundary_vertices(); })
      .def("vertex", [](const MeshHandle& s, int i) {
        return py::make_tuple(s.get().vertices.at(i).x, s.get().vertices.at(i).y);
      });

  m.def("build_interval_mesh",
        [](double a, double b, int n) { return MeshHandle{share(build_interval_mesh(a, b, n))}; },
        py::arg("a"), py::arg("b"), py::arg("n"));
  m.def("build_rectangle_mesh",
        [](double lx, double ly, int nx, int ny) {
          return MeshHandle{share(build_rectangle_mesh(lx, ly, nx, ny))};
        },
        py::arg("lx"), py::arg("ly"), py::arg("nx"), py::arg("ny"));
  m.def("import_mesh",
        [](const std::string& path) { return MeshHandle{share(import_mesh(path))}; });
  m.def("export_mesh",
        [](const MeshHandle& mesh, const std::string& path) { export_mesh(mesh.get(), path); });

  py::class_<ProblemSpec>(m, "ProblemSpec")
      .def(py::init([](const MeshHandle& mesh, double p, double q, double alpha,
                       const py::object& source) {
             ProblemSpec spec{mesh.ptr, p, q, alpha, source_from_py(source)};
             spec.validate();
             return spec;
           }),
           py::arg("mesh"), py::arg("p"), py::arg("q"), py::arg("alpha"), py::arg("source"))
      .def_readonly("p", &ProblemSpec::p)
      .def_readonly("q", &ProblemSpec::q)
      .def_readwrite("alpha", &ProblemSpec::alpha)
      .def_property_readonly("mesh", [](const ProblemSpec& s) { return MeshHandle{s.mesh}; })
      .def("fingerprint", &ProblemSpec::fingerprint);

  py::class_<LoadVector>(m, "LoadVector")
      .def_readonly("entries", &LoadVector::entries)
      .def_readonly("total_mass", &LoadVector::total_mass);
  m.def("assemble_source", [](const MeshHandle& mesh, const py::object& src) {
    return assemble_source(mesh.get(), source_from_py(src));
  });
  m.def("classify_regime", [](const LoadVector& load, double tol) {
    return classify_regime(load, tol) == Regime::Compatible ? "compatible" : "incompatible";
  });

  py::class_<DiscreteField>(m, "DiscreteField")
      .def(py::init([](const MeshHandle& mesh, std::vector<double> values) {
             return DiscreteField(mesh.ptr, std::move(values));
           }),
           py::arg("mesh"), py::arg("values"))
      .def_readonly("values", &DiscreteField::values)
      .def_property_readonly("mesh", [](const DiscreteField& f) { return MeshHandle{f.mesh}; });

  py::class_<EnergyBreakdown>(m, "EnergyBreakdown")
      .def_readonly("bulk", &EnergyBreakdown::bulk)
      .def_readonly("boundary", &EnergyBreakdown::boundary)
      .def_readonly("source", &EnergyBreakdown::source)
      .def_readonly("total", &EnergyBreakdown::total);

  m.def("energy",
        [](const ProblemSpec& spec, const DiscreteField& u) { return energy(spec, u); });
  m.def("residual",
        [](const ProblemSpec& spec, const DiscreteField& u) { return residual(spec, u); });
  m.def("boundary_q_integral", [](const MeshHandle& mesh, const DiscreteField& u, double q) {
    return boundary_q_integral(mesh.get(), u, q);
  });
  m.def("poincare_ratio", [](const MeshHandle& mesh, const DiscreteField& u, double p, double q) {
    return poincare_ratio(mesh.get(), u, p, q);
  });

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("gradient_tol", &SolverConfig::gradient_tol)
      .def_readwrite("max_iterations", &SolverConfig::max_iterations)
      .def_readwrite("contraction", &SolverConfig::contraction)
      .def_readwrite("sufficient_decrease", &SolverConfig::sufficient_decrease)
      .def_readwrite("exact_linear_p2", &SolverConfig::exact_linear_p2)
      .def_readwrite("preconditioned", &SolverConfig::preconditioned);

  py::class_<Solution>(m, "Solution")
      .def_readonly("field", &Solution::field)
      .def_readonly("energy", &Solution::energy)
      .def_readonly("iterations", &Solution::iterations)
      .def_readonly("residual_norm", &Solution::residual_norm)
      .def_property_readonly("converged", [](const Solution& s) {
        return s.status == SolveStatus::Converged;
      });

  m.def("solve_robin",
        [](const ProblemSpec& spec, const py::object& cfg) {
          return solve_robin(spec, cfg_or_default(cfg));
        },
        py::arg("spec"), py::arg("config") = py::none());
  m.def("solve_dirichlet",
        [](const ProblemSpec& spec, const py::object& cfg) {
          return solve_dirichlet(spec, cfg_or_default(cfg));
        },
        py::arg("spec"), py::arg("config") = py::none());
  m.def("solve_neumann_normalized",
        [](const ProblemSpec& spec, const py::object& cfg) {
          return solve_neumann_normalized(spec, cfg_or_default(cfg));
        },
        py::arg("spec"), py::arg("config") = py::none());
  m.def("solve_kf",
        [](const ProblemSpec& spec, const py::object& cfg) {
          return solve_kf(spec, cfg_or_default(cfg));
        },
        py::arg("spec"), py::arg("config") = py::none());

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("alpha", &SweepRow::alpha)
      .def_readonly("energy", &SweepRow::energy)
      .def_readonly("boundary_q", &SweepRow::boundary_q)
      .def_readonly("iterations", &SweepRow::iterations)
      .def_readonly("residual_norm", &SweepRow::residual_norm)
      .def_readonly("failed", &SweepRow::failed);
  py::class_<SweepTable>(m, "SweepTable")
      .def_readonly("rows", &SweepTable::rows)
      .def_readonly("fingerprint", &SweepTable::fingerprint);
  m.def("sweep",
        [](const ProblemSpec& spec, const std::vector<double>& alphas, const py::object& cfg,
           bool warm_start) { return sweep(spec, alphas, cfg_or_default(cfg), warm_start); },
        py::arg("spec"), py::arg("alphas"), py::arg("config") = py::none(),
        py::arg("warm_start") = true);
  m.def("geometric_grid", &geometric_grid, py::arg("lo"), py::arg("hi"), py::arg("ratio"));

  py::class_<RateFit>(m, "RateFit")
      .def_readonly("exponent", &RateFit::exponent)
      .def_readonly("prefactor", &RateFit::prefactor)
      .def_readonly("r_squared", &RateFit::r_squared)
      .def_readonly("used_rows", &RateFit::used_rows);
  m.def("fit_power_law",
        [](const SweepTable& t, double ref, int sign) { return fit_power_law(t, ref, sign); },
        py::arg("table"), py::arg("reference_energy"), py::arg("sign"));

  py::class_<DerivativeCheck>(m, "DerivativeCheck")
      .def_readonly("lhs", &DerivativeCheck::lhs)
      .def_readonly("rhs", &DerivativeCheck::rhs)
      .def_readonly("relative_gap", &DerivativeCheck::relative_gap);
  m.def("check_derivative_identity",
        [](const ProblemSpec& spec, double alpha, double delta, const py::object& cfg) {
          return check_derivative_identity(spec, alpha, delta, cfg_or_default(cfg));
        },
        py::arg("spec"), py::arg("alpha"), py::arg("delta"), py::arg("config") = py::none());

  py::enum_<VerifyRegime>(m, "VerifyRegime")
      .value("DirichletLimit", VerifyRegime::DirichletLimit)
      .value("NeumannCompatible", VerifyRegime::NeumannCompatible)
      .value("NeumannIncompatible", VerifyRegime::NeumannIncompatible);
  py::class_<VerificationReport>(m, "VerificationReport")
      .def_property_readonly("passed", [](const VerificationReport& r) { return r.pass; })
      .def_readonly("predicted_exponent", &VerificationReport::predicted_exponent)
      .def_readonly("fitted_exponent", &VerificationReport::fitted_exponent)
      .def_readonly("predicted_constant", &VerificationReport::predicted_constant)
      .def_readonly("fitted_constant", &VerificationReport::fitted_constant)
      .def_readonly("reference_energy", &VerificationReport::reference_energy);
  m.def("verify_expansion",
        [](const ProblemSpec& spec, const std::vector<double>& alphas, VerifyRegime regime,
           const py::object& cfg) {
          return verify_expansion(spec, alphas, cfg_or_default(cfg), regime);
        },
        py::arg("spec"), py::arg("alphas"), py::arg("regime"), py::arg("config") = py::none());

  py::class_<BoundaryFlux>(m, "BoundaryFlux")
      .def_readonly("vertices", &BoundaryFlux::vertices)
      .def_readonly("values", &BoundaryFlux::values)
      .def_readonly("weights", &BoundaryFlux::weights);
  m.def("recover_boundary_flux", &recover_boundary_flux);
  m.def("dirichlet_expansion_constant", &dirichlet_expansion_constant);
  m.def("neumann_slope", [](const MeshHandle& mesh, const DiscreteField& u0, double q) {
    return neumann_slope(mesh.get(), u0, q);
  });
  m.def("incompat_constant", &incompat_constant);
  m.def("min_g", [](double a, double b, double q) {
    auto r = min_g(a, b, q);
    return py::make_tuple(r.argmin, r.minimum);
  });
  m.def("brute_min_g", [](double a, double b, double q) {
    auto r = brute_min_g(a, b, q);
    return py::make_tuple(r.argmin, r.minimum);
  });
  m.def("compute_rho_alpha", &compute_rho_alpha);
  m.def("extend_boundary_datum",
        [](const MeshHandle& mesh, const std::vector<double>& values, double p) {
          return extend_boundary_datum(mesh.ptr, values, p);
        });
  m.def("dirichlet_corrector_datum", &dirichlet_corrector_datum);

  py::class_<OracleSolution>(m, "OracleSolution")
      .def_property_readonly("energy_alpha",
                             [](const OracleSolution& s) { return opt_to_py(s.energy_alpha); })
      .def_property_readonly("energy_dirichlet",
                             [](const OracleSolution& s) { return opt_to_py(s.energy_dirichlet); })
      .def_property_readonly("energy_neumann",
                             [](const OracleSolution& s) { return opt_to_py(s.energy_neumann); })
      .def_property_readonly("energy_kf",
                             [](const OracleSolution& s) { return opt_to_py(s.energy_kf); })
      .def("__call__", [](const OracleSolution& s, double x) { return s.evaluate(x); });
  m.def("oracle_1d_linear", &oracle_1d_linear, py::arg("a"), py::arg("b"), py::arg("alpha"),
        py::arg("c"));
  m.def("oracle_1d_general_p",
        [](double a, double b, double p, double q, double alpha, const py::object& src) {
          return oracle_1d_general_p(a, b, p, q, alpha, source_from_py(src));
        },
        py::arg("a"), py::arg("b"), py::arg("p"), py::arg("q"), py::arg("alpha"),
        py::arg("source"));

  m.attr("__version__") = "0.1.0";
}
