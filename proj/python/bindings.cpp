#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "choquard/closed_forms.hpp"
#include "choquard/decompose.hpp"
#include "choquard/errors.hpp"
#include "choquard/functionals.hpp"
#include "choquard/grid.hpp"
#include "choquard/params.hpp"
#include "choquard/parallel.hpp"
#include "choquard/poisson.hpp"
#include "choquard/riesz.hpp"
#include "choquard/solver.hpp"
#include "choquard/testfamily.hpp"

namespace py = pybind11;
using namespace choquard;

namespace {

py::array_t<double> to_numpy(const Field& f) {
  std::vector<py::ssize_t> shape(f.domain().nodes().begin(), f.domain().nodes().end());
  py::array_t<double> out(shape);
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

Field from_numpy(const DomainPtr& d, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (static_cast<std::size_t>(a.size()) != d->size()) throw ConfigError("array size does not match the grid");
  return Field(d, std::vector<double>(a.data(), a.data() + a.size()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Critical Choquard equation: constants, discrete functionals, solver and decompositions";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("set_threads", &set_threads, py::arg("n"));

  py::class_<Params>(m, "Params")
      .def(py::init(&Params::make), py::arg("N") = 3, py::arg("mu") = 1.0)
      .def_readonly("N", &Params::N)
      .def_readonly("mu", &Params::mu)
      .def("__repr__", [](const Params& p) {
        return "Params(N=" + std::to_string(p.N) + ", mu=" + std::to_string(p.mu) + ")";
      });

  py::class_<Exponents>(m, "Exponents")
      .def_readonly("twoStar", &Exponents::twoStar)
      .def_readonly("twoStarMu", &Exponents::twoStarMu)
      .def_readonly("p", &Exponents::p);

  py::class_<ConstantSet>(m, "ConstantSet")
      .def_readonly("cNmu", &ConstantSet::cNmu)
      .def_readonly("S", &ConstantSet::S)
      .def_readonly("sHL", &ConstantSet::sHL)
      .def_readonly("beta", &ConstantSet::beta)
      .def_property_readonly("window", [](const ConstantSet& c) { return std::make_pair(c.window.lo, c.window.hi); })
      .def_property_readonly("quotientWindow",
                             [](const ConstantSet& c) { return std::make_pair(c.quotientWindow.lo, c.quotientWindow.hi); })
      .def_readonly("liebCNmu", &ConstantSet::liebCNmu)
      .def_readonly("liebSHL", &ConstantSet::liebSHL)
      .def_readonly("liebBeta", &ConstantSet::liebBeta);

  m.def("derive_exponents", &derive_exponents);
  m.def("sharp_hls_constant", &sharp_hls_constant);
  m.def("lieb_hls_constant", &lieb_hls_constant);
  m.def("sobolev_constant", &sobolev_constant);
  m.def("best_constants", &best_constants);
  m.def("level_of_quotient", &level_of_quotient);
  m.def("family_amplitude", &family_amplitude);
  m.def("solution_amplitude", &solution_amplitude);
  m.def("unit_bubble_dirichlet", &unit_bubble_dirichlet);

  py::class_<GridDomain, std::shared_ptr<GridDomain>>(m, "GridDomain")
      .def_static("box", [](Point o, std::vector<double> e, std::vector<int> n) {
        return std::const_pointer_cast<GridDomain>(GridDomain::box(o, e, n));
      })
      .def_static("ball", [](int N, double r, int n, double hw) {
        return std::const_pointer_cast<GridDomain>(GridDomain::ball(N, r, n, hw));
      }, py::arg("N"), py::arg("radius"), py::arg("nodes"), py::arg("half_width") = 0.0)
      .def_static("annulus", [](int N, double r1, double r2, int n, double hw) {
        return std::const_pointer_cast<GridDomain>(GridDomain::annulus(N, r1, r2, n, hw));
      }, py::arg("N"), py::arg("r1"), py::arg("r2"), py::arg("nodes"), py::arg("half_width") = 0.0)
      .def_static("half_space", [](int N, double lat, double depth, std::vector<int> n) {
        return std::const_pointer_cast<GridDomain>(GridDomain::half_space(N, lat, depth, n));
      })
      .def_static("free_space", [](int N, double L, int n) {
        return std::const_pointer_cast<GridDomain>(GridDomain::free_space(N, L, n));
      })
      .def_property_readonly("dim", &GridDomain::dim)
      .def_property_readonly("nodes", py::overload_cast<>(&GridDomain::nodes, py::const_))
      .def_property_readonly("h", [](const GridDomain& d) {
        std::vector<double> h(d.dim());
        for (int k = 0; k < d.dim(); ++k) h[k] = d.h(k);
        return h;
      })
      .def_property_readonly("mask_count", &GridDomain::mask_count)
      .def_property_readonly("mask_hash", &GridDomain::mask_hash)
      .def("coordinates", [](const GridDomain& d) {
        std::vector<std::vector<double>> out(d.dim());
        for (int k = 0; k < d.dim(); ++k) {
          for (int i = 0; i < d.nodes(k); ++i) out[k].push_back(d.coord(k, i));
        }
        return out;
      })
      .def("mask", [](const GridDomain& d) {
        std::vector<py::ssize_t> shape(d.nodes().begin(), d.nodes().end());
        py::array_t<bool> a(shape);
        for (std::size_t i = 0; i < d.size(); ++i) a.mutable_data()[i] = d.in_mask(i);
        return a;
      });

  py::class_<Field>(m, "Field")
      .def(py::init([](std::shared_ptr<GridDomain> d, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
        return from_numpy(d, a);
      }))
      .def("array", &to_numpy)
      .def_property_readonly("domain", [](const Field& f) { return std::const_pointer_cast<GridDomain>(f.domain_ptr()); })
      .def("__add__", [](const Field& a, const Field& b) { return a + b; })
      .def("__sub__", [](const Field& a, const Field& b) { return a - b; })
      .def("__mul__", [](const Field& a, double c) { return c * a; })
      .def("__rmul__", [](const Field& a, double c) { return c * a; });

  py::class_<RieszOperator>(m, "RieszOperator")
      .def(py::init([](const Params& p, std::shared_ptr<GridDomain> d, const std::string& method, double pad) {
        return std::make_unique<RieszOperator>(p, d, riesz_method_from_string(method), pad);
      }), py::arg("params"), py::arg("domain"), py::arg("method") = "fourier", py::arg("pad") = 2.0)
      .def("apply", &RieszOperator::apply)
      .def("convolution_energy", &RieszOperator::convolution_energy)
      .def_property_readonly("self_cell_weight", &RieszOperator::self_cell_weight);

  py::class_<BubbleSpec>(m, "BubbleSpec")
      .def(py::init([](Point c, double s, double a) { return BubbleSpec{c, s, a}; }),
           py::arg("center"), py::arg("scale"), py::arg("amplitude"))
      .def_static("from_family", &BubbleSpec::from_family)
      .def_readwrite("center", &BubbleSpec::center)
      .def_readwrite("scale", &BubbleSpec::scale)
      .def_readwrite("amplitude", &BubbleSpec::amplitude);

  m.def("eval_bubble", &eval_bubble);
  m.def("sample_bubble", [](const BubbleSpec& b, const Params& p, std::shared_ptr<GridDomain> d) {
    return sample_bubble(b, p, d);
  });
  m.def("eval_cutoff", [](double R, const Point& x) { return eval_cutoff(CutoffSpec{R}, x); });
  m.def("build_truncated_family", [](const Point& sigma, double t, double R, const RieszOperator& op) {
    auto tf = build_truncated_family(sigma, t, CutoffSpec{R}, op);
    return py::make_tuple(tf.g, tf.f, tf.gNorm);
  });

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("spec", &FitResult::spec)
      .def_readonly("c1", &FitResult::c1)
      .def_readonly("c2", &FitResult::c2)
      .def_readonly("residual", &FitResult::residual)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("iterations", &FitResult::iterations);
  m.def("fit_bubble", [](const Field& f, const Params& p, std::optional<Point> center,
                         std::optional<double> scale, std::optional<double> window) {
    FitOptions o;
    o.initialCenter = center;
    o.initialScale = scale;
    o.windowHalfWidth = window;
    return fit_bubble(f, p, o);
  }, py::arg("field"), py::arg("params"), py::arg("center") = py::none(), py::arg("scale") = py::none(),
     py::arg("window") = py::none());

  m.def("integrate", py::overload_cast<const Field&>(&integrate));
  m.def("dirichlet_energy", &dirichlet_energy);
  m.def("barycenter", [](const Field& u) { return barycenter(u).normalized; });
  m.def("nl_norm", &nl_norm);
  m.def("nonlocal_energy", &nonlocal_energy);
  m.def("quotient", &quotient);
  m.def("gradient", &gradient);

  py::class_<EnergyReport>(m, "EnergyReport")
      .def_readonly("dirichlet", &EnergyReport::dirichlet)
      .def_readonly("nlNorm", &EnergyReport::nlNorm)
      .def_readonly("nonlocal", &EnergyReport::nonlocal)
      .def_readonly("I", &EnergyReport::I)
      .def_readonly("quotient", &EnergyReport::quotient)
      .def_readonly("pohozaevResidual", &EnergyReport::pohozaevResidual)
      .def_readonly("barycenterNorm", &EnergyReport::barycenterNorm);
  m.def("energy", [](const Field& u, const RieszOperator& op) { return energy(u, op); });
  m.def("pohozaev_relative", [](const Field& u, const RieszOperator& op) { return pohozaev(u, op).relative; });
  m.def("morrey_norm", [](const Field& u) {
    auto r = morrey_norm(u);
    return py::make_tuple(r.value, r.center, r.radius);
  });

  m.def("minimize_quotient", [](const Field& seed, const RieszOperator& op, int maxIters, double step,
                                double gradTol, int traceEvery) {
    SolveConfig cfg;
    cfg.maxIters = maxIters;
    cfg.stepSize = step;
    cfg.gradTol = gradTol;
    cfg.traceEvery = traceEvery;
    cfg.seed = FieldSeed{seed};
    const SolveResult r = minimize_quotient(cfg, op);
    py::list trace;
    for (const auto& e : r.trace) {
      trace.append(py::make_tuple(e.iter, e.quotient, e.projGradNorm, e.step, e.morreyRadius));
    }
    py::dict out;
    out["u"] = r.u;
    out["solution"] = r.solution;
    out["quotient"] = r.quotient;
    out["projGradNorm"] = r.projGradNorm;
    out["converged"] = r.converged;
    out["status"] = to_string(r.status);
    out["iterations"] = r.iterations;
    out["lambdaStar"] = r.lambdaStar;
    out["weakResidual"] = r.weakResidual;
    out["trace"] = trace;
    return out;
  }, py::arg("seed"), py::arg("op"), py::arg("max_iters") = 500, py::arg("step") = 0.5,
     py::arg("grad_tol") = 1e-6, py::arg("trace_every") = 10);

  py::class_<ProfileSpec>(m, "ProfileSpec")
      .def(py::init([](Point c, double s, int sign) { return ProfileSpec{c, s, sign}; }),
           py::arg("center"), py::arg("scale"), py::arg("sign") = 1)
      .def_readwrite("center", &ProfileSpec::center)
      .def_readwrite("scale", &ProfileSpec::scale)
      .def_readwrite("sign", &ProfileSpec::sign);
  m.def("synthesize_ps_field",
        [](const std::vector<ProfileSpec>& profiles, std::shared_ptr<GridDomain> d, const Params& p,
           std::optional<BubbleSpec> v0Bubble, std::optional<Field> v0Field) {
          V0Source v0;
          if (v0Bubble) v0 = *v0Bubble;
          if (v0Field) v0 = *v0Field;
          return synthesize_ps_field(v0, profiles, d, p);
        },
        py::arg("profiles"), py::arg("domain"), py::arg("params"), py::arg("v0_bubble") = py::none(),
        py::arg("v0_field") = py::none());
  m.def("bubble_energy_inf", &bubble_energy_inf);
  m.def("bubble_morrey_value", &bubble_morrey_value);
  m.def("decompose", [](const Field& u, const RieszOperator& op, int maxBubbles, double theta) {
    DecomposeOptions o;
    o.theta = theta;
    const DecompositionResult r = decompose(u, op, maxBubbles, o);
    py::list bubbles;
    for (const auto& b : r.bubbles) {
      py::dict e;
      e["center"] = b.spec.center;
      e["scale"] = b.spec.scale;
      e["amplitude"] = b.spec.amplitude;
      e["dirichlet"] = b.dirichlet;
      e["energy_inf"] = b.energyInf;
      e["energy_grid"] = b.energyGrid;
      e["fit_residual"] = b.fitResidual;
      e["morrey_radius"] = b.morreyRadius;
      e["boundary_adjacent"] = b.boundaryAdjacent;
      bubbles.append(e);
    }
    py::dict out;
    out["k"] = r.k;
    out["bubbles"] = bubbles;
    out["v0"] = r.v0;
    out["v0_resolved"] = r.v0Resolved;
    out["residual"] = r.residual;
    out["residual_dirichlet"] = r.residualDirichlet;
    out["input_dirichlet"] = r.ledger.inputDirichlet;
    out["sum_parts"] = r.ledger.sumParts;
    out["relative_gap"] = r.ledger.relativeGap;
    out["partial"] = r.partial;
    out["stop_reason"] = r.stopReason;
    return out;
  }, py::arg("u"), py::arg("op"), py::arg("max_bubbles") = 4, py::arg("theta") = 0.1);

  m.def("sphere_samples", &sphere_samples);
  m.def("family_ts", &family_ts);
  m.def("sweep", [](double R, const RieszOperator& op, int nSigma, int nT, bool allowUnresolvedHole) {
    SweepOptions o{nSigma, nT, allowUnresolvedHole};
    const FamilySweep s = sweep(R, op, o);
    py::dict out;
    out["R"] = s.R;
    out["sigmas"] = s.sigmas;
    out["ts"] = s.ts;
    out["quotients"] = s.quotients;
    out["dirichlet_gaps"] = s.dirichletGaps;
    out["sup_quotient"] = s.supQuotient;
    return out;
  }, py::arg("R"), py::arg("op"), py::arg("n_sigma") = 12, py::arg("n_t") = 10,
     py::arg("allow_unresolved_hole") = false);
  m.def("empirical_shl", [](double R, const RieszOperator& op) {
    const EmpiricalShl e = empirical_shl(R, op);
    py::dict out;
    out["value"] = e.value;
    out["scale"] = e.scale;
    out["scales"] = e.scales;
    out["quotients"] = e.quotients;
    return out;
  });
  m.def("truncation_error_curve", [](double t, const Point& sigma, const std::vector<double>& Rs, int nodes,
                                     const Params& p) {
    const TruncationCurve c = truncation_error_curve(t, sigma, Rs, nodes, p);
    py::list recs;
    for (const auto& r : c.records) recs.append(py::make_tuple(r.R, r.h, r.dirichletGap, r.nlGap));
    py::dict out;
    out["records"] = recs;
    out["dirichlet_slope"] = c.dirichletSlope;
    out["nl_slope"] = c.nlSlope;
    return out;
  });
  m.def("loglog_slope", &loglog_slope);
}
