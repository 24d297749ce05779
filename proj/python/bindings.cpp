#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rotmap/baseline_ot.hpp"
#include "rotmap/cli.hpp"
#include "rotmap/dual_solver.hpp"
#include "rotmap/error.hpp"
#include "rotmap/experiments.hpp"
#include "rotmap/transport_map.hpp"

namespace py = pybind11;
using namespace rotmap;

namespace {

py::dict scan_to_dict(const ScanResult& r) {
  py::dict d;
  d["name"] = r.name;
  py::dict table;
  for (const auto& c : r.table.columns) table[py::str(c)] = r.table.column(c);
  d["table"] = table;
  if (r.fit) {
    d["slope"] = r.fit->slope;
    d["intercept"] = r.fit->intercept;
    d["r_squared"] = r.fit->r_squared;
  } else {
    d["slope"] = py::none();
    d["intercept"] = py::none();
    d["r_squared"] = py::none();
  }
  py::dict pred, checks;
  for (const auto& [k, v] : r.predictions) pred[py::str(k)] = v;
  for (const auto& [k, v] : r.checks) checks[py::str(k)] = v;
  d["predictions"] = pred;
  d["checks"] = checks;
  py::list dropped;
  for (const auto& p : r.dropped) dropped.append(py::make_tuple(p.eps, p.reason));
  d["dropped"] = dropped;
  return d;
}

SweepConfig sweep(const std::string& instance, int n, double p, std::vector<double> eps, double amplitude,
                  std::uint64_t seed) {
  SweepConfig c;
  c.instance = {instance, n, amplitude, seed};
  c.reg = Regularizer::from_p(p);
  c.eps_values = std::move(eps);
  return c;
}

}  // namespace

PYBIND11_MODULE(_rotmap, m) {
  m.doc() = "Regularised quadratic optimal transport";

  static py::exception<NonConvergenceError> non_convergence(m, "NonConvergenceError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const NonConvergenceError& e) {
      py::set_error(non_convergence, e.what());
    }
  });

  py::class_<Regularizer>(m, "Regularizer")
      .def_static("entropic", &Regularizer::entropic)
      .def_static("polynomial", &Regularizer::polynomial, py::arg("p"))
      .def_static("from_p", &Regularizer::from_p, py::arg("p"))
      .def_property_readonly("p", &Regularizer::p)
      .def_property_readonly("is_entropic", &Regularizer::is_entropic)
      .def("h", &Regularizer::h)
      .def("h_prime", &Regularizer::h_prime)
      .def("h_second", &Regularizer::h_second)
      .def("h_prime_inv", &Regularizer::h_prime_inv)
      .def("h_star", &Regularizer::h_star)
      .def("conjugate_weight", &Regularizer::conjugate_weight)
      .def("__repr__", &Regularizer::name);

  py::class_<DiscreteMeasure>(m, "DiscreteMeasure")
      .def(py::init<Eigen::MatrixXd, Eigen::VectorXd, double>(), py::arg("points"), py::arg("weights"),
           py::arg("grid_spacing") = 0.0)
      .def_property_readonly("points", &DiscreteMeasure::points)
      .def_property_readonly("weights", &DiscreteMeasure::weights)
      .def_property_readonly("dim", &DiscreteMeasure::dim)
      .def_property_readonly("grid_spacing", &DiscreteMeasure::grid_spacing)
      .def_property_readonly("total_mass", &DiscreteMeasure::total_mass)
      .def("__len__", &DiscreteMeasure::size);

  py::class_<InteriorWindow>(m, "InteriorWindow")
      .def(py::init([](Point c, double r) { return InteriorWindow{std::move(c), r}; }), py::arg("center"),
           py::arg("radius"))
      .def_readonly("center", &InteriorWindow::center)
      .def_readonly("radius", &InteriorWindow::radius);

  m.def("uniform_on_box", &uniform_on_box, py::arg("d"), py::arg("lo"), py::arg("hi"), py::arg("n_per_axis"));
  m.def("holder_perturbed", &holder_perturbed, py::arg("d"), py::arg("lo"), py::arg("hi"), py::arg("n_per_axis"),
        py::arg("amplitude"), py::arg("wavevector"), py::arg("seed"));
  m.def("pushforward_affine", &pushforward_affine, py::arg("measure"), py::arg("A"), py::arg("b"),
        py::arg("mass_scale") = 1.0);
  m.def("default_window", &default_window);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("residual", &SolveReport::residual)
      .def_readonly("primal", &SolveReport::primal)
      .def_readonly("dual", &SolveReport::dual)
      .def_readonly("gap", &SolveReport::gap)
      .def_readonly("wall_ms", &SolveReport::wall_ms);

  py::class_<Solution>(m, "Solution")
      .def_property_readonly("f", [](const Solution& s) { return s.potentials.f; })
      .def_property_readonly("g", [](const Solution& s) { return s.potentials.g; })
      .def_property_readonly("plan", [](const Solution& s) { return s.plan.to_dense(); })
      .def_readonly("report", &Solution::report)
      .def(
          "map",
          [](const Solution& s, const DiscreteMeasure& lambda, const DiscreteMeasure& mu) {
            const auto samples = map_samples(s.potentials, s.plan, lambda, mu);
            Eigen::MatrixXd T(static_cast<Eigen::Index>(samples.size()), lambda.dim());
            for (std::size_t i = 0; i < samples.size(); ++i) T.row(static_cast<Eigen::Index>(i)) = samples[i].T;
            return T;
          },
          py::arg("lambda_"), py::arg("mu"), "T_eps at every atom of lambda, one row per atom")
      .def(
          "monotonicity_violations",
          [](const Solution& s, const DiscreteMeasure& lambda, const DiscreteMeasure& mu, std::size_t quadruples,
             std::uint64_t seed) {
            return audit_monotonicity(s.plan, s.potentials, lambda, mu, quadruples, seed).violations;
          },
          py::arg("lambda_"), py::arg("mu"), py::arg("quadruples") = 10000, py::arg("seed") = 0);

  m.def(
      "solve",
      [](const DiscreteMeasure& lambda, const DiscreteMeasure& mu, const Regularizer& reg, double eps, double tol,
         int max_iter, int threads) {
        SolverOptions opt;
        opt.tol = tol;
        opt.max_iter = max_iter;
        opt.threads = threads;
        py::gil_scoped_release release;
        return solve(lambda, mu, reg, eps, opt);
      },
      py::arg("lambda_"), py::arg("mu"), py::arg("reg"), py::arg("eps"), py::arg("tol") = 1e-8,
      py::arg("max_iter") = 20000, py::arg("threads") = 1);

  py::class_<ExactSolution>(m, "ExactSolution")
      .def_readonly("cost", &ExactSolution::cost)
      .def_readonly("f", &ExactSolution::potential_f)
      .def_readonly("g", &ExactSolution::potential_g)
      .def_property_readonly("map", [](const ExactSolution& e) {
        Eigen::MatrixXd T(static_cast<Eigen::Index>(e.map.size()), e.map.empty() ? 0 : e.map.front().size());
        for (std::size_t i = 0; i < e.map.size(); ++i) T.row(static_cast<Eigen::Index>(i)) = e.map[i];
        return T;
      });
  m.def("exact_1d", &exact_1d);
  m.def("exact_assignment", &exact_assignment);

  py::class_<Instance>(m, "Instance")
      .def_readonly("lambda_", &Instance::lambda)
      .def_readonly("mu", &Instance::mu)
      .def_readonly("exact", &Instance::exact);
  m.def("instance_names", &instance_names);
  m.def(
      "make_instance",
      [](const std::string& name, int n, double amplitude, std::uint64_t seed) {
        return make_instance({name, n, amplitude, seed});
      },
      py::arg("name"), py::arg("n_per_axis") = 64, py::arg("amplitude") = 0.3, py::arg("seed") = 0);

  m.def("tau", &tau);
  m.def("mesh_rule_n", &mesh_rule_n);
  m.def(
      "fit_rate",
      [](const std::vector<std::pair<double, double>>& pts) {
        const RateFit f = fit_rate(pts);
        return py::make_tuple(f.slope, f.intercept, f.r_squared);
      },
      "(slope, intercept, r_squared) of log(value) against log(eps)");

  const auto sweep_args = [] {
    return std::make_tuple(py::arg("instance"), py::arg("n_per_axis"), py::arg("p"), py::arg("eps"),
                           py::arg("amplitude") = 0.3, py::arg("seed") = 0);
  };
  auto [a1, a2, a3, a4, a5, a6] = sweep_args();
  m.def(
      "scan_support_radius",
      [](const std::string& i, int n, double p, std::vector<double> e, double a, std::uint64_t s) {
        return scan_to_dict(scan_support_radius(sweep(i, n, p, std::move(e), a, s)));
      },
      a1, a2, a3, a4, a5, a6);
  m.def(
      "scan_energy_gap",
      [](const std::string& i, int n, double p, std::vector<double> e, double a, std::uint64_t s) {
        return scan_to_dict(scan_energy_gap(sweep(i, n, p, std::move(e), a, s)));
      },
      a1, a2, a3, a4, a5, a6);
  m.def(
      "scan_map_convergence",
      [](const std::string& i, int n, double p, std::vector<double> e, double a, std::uint64_t s) {
        const SweepConfig c = sweep(i, n, p, std::move(e), a, s);
        const Instance inst = make_instance(c.instance);
        if (!inst.exact) throw InputError("instance has no exact baseline");
        return scan_to_dict(scan_map_convergence(c, *inst.exact));
      },
      a1, a2, a3, a4, a5, a6);

  m.def(
      "audit_rescaling",
      [](const DiscreteMeasure& l, const DiscreteMeasure& mu, const Regularizer& reg, double eps,
         const Eigen::MatrixXd& A, const Point& b, double gamma, double kappa) {
        const RescalingAudit r = audit_rescaling(l, mu, reg, eps, A, b, gamma, kappa);
        return py::make_tuple(r.plan_distance, r.objective_difference, r.eps_transformed);
      },
      py::arg("lambda_"), py::arg("mu"), py::arg("reg"), py::arg("eps"), py::arg("A"), py::arg("b"),
      py::arg("gamma"), py::arg("kappa") = 1.0, "(plan_distance, objective_difference, eps_transformed)");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line in-process; returns (exit_code, stdout, stderr)");
}
