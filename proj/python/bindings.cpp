#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "polyvf/cli.hpp"
#include "polyvf/realize.hpp"
#include "polyvf/stability.hpp"

namespace py = pybind11;
using namespace polyvf;

namespace {

PyObject* error_type = nullptr;
PyObject* uncertain_type = nullptr;

Bracketing as_class(const py::object& o) {
  if (py::isinstance<py::str>(o)) return parse_bracketing(o.cast<std::string>());
  return o.cast<Bracketing>();
}

MetricGraph as_metric(const py::object& o) {
  if (py::isinstance<py::str>(o)) return parse_metric_graph(o.cast<std::string>());
  return o.cast<MetricGraph>();
}

Polynomial as_poly(const py::object& o) {
  if (py::isinstance<py::str>(o)) return parse_polynomial(o.cast<std::string>());
  if (py::isinstance<Polynomial>(o)) return o.cast<Polynomial>();
  return Polynomial::from_coefficients(o.cast<std::vector<cplx>>());
}

py::list pairs(const std::vector<IndexPair>& v) {
  py::list out;
  for (const auto& [k, j] : v) out.append(py::make_tuple(k, j));
  return out;
}

py::dict trace_dict(const SeparatrixTrace& t) {
  py::dict d;
  d["index"] = t.index;
  d["outcome"] = std::string(to_string(t.outcome));
  d["root"] = t.root;
  d["partner"] = t.partner;
  d["tau"] = t.tau;
  d["diagnostic"] = t.diagnostic;
  d["path"] = t.path;
  return d;
}

py::dict dims_dict(const Dimensions& d) {
  py::dict out;
  out["dim"] = d.dim;
  out["codim"] = d.codim;
  out["s"] = d.s;
  out["h"] = d.h;
  out["mstar"] = d.mstar;
  return out;
}

}  // namespace

PYBIND11_MODULE(_polyvf, m) {
  m.doc() = "Classification and realization of polynomial vector fields";
  m.attr("__version__") = kVersion;

  error_type = PyErr_NewException("polyvf.PolyvfError", PyExc_RuntimeError, nullptr);
  uncertain_type = PyErr_NewException("polyvf.UncertainClassificationError", error_type, nullptr);
  m.attr("PolyvfError") = py::handle(error_type);
  m.attr("UncertainClassificationError") = py::handle(uncertain_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyObject* type = e.kind() == ErrorKind::UncertainClassification ? uncertain_type : error_type;
      py::object inst = py::reinterpret_borrow<py::object>(type)(e.what());
      inst.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(type, inst.ptr());
    }
  });

  py::class_<Polynomial>(m, "Polynomial")
      .def(py::init([](const std::vector<cplx>& c) { return Polynomial::from_coefficients(c); }), py::arg("coefficients"))
      .def_static("parse", &parse_polynomial, py::arg("text"))
      .def_static(
          "from_roots",
          [](const std::vector<std::pair<cplx, int>>& roots) {
            std::vector<Root> r;
            for (const auto& [z, mult] : roots) r.push_back({z, mult});
            return Polynomial::from_roots(r);
          },
          py::arg("roots"))
      .def_property_readonly("degree", &Polynomial::degree)
      .def_property_readonly("coefficients", &Polynomial::coefficients)
      .def_property_readonly("roots",
                             [](const Polynomial& p) {
                               py::list out;
                               for (const auto& r : p.roots()) out.append(py::make_tuple(r.position, r.multiplicity));
                               return out;
                             })
      .def("__call__", &Polynomial::operator(), py::arg("z"))
      .def("derivative", &Polynomial::derivative, py::arg("z"))
      .def("root_scale", &Polynomial::root_scale)
      .def("residue", [](const Polynomial& p, cplx z) { return residue(p, z); }, py::arg("zeta"))
      .def("scaled", &scale_roots, py::arg("c"))
      .def("__str__", &format_coefficients)
      .def("__repr__", [](const Polynomial& p) { return "Polynomial('" + format_coefficients(p) + "')"; });

  py::class_<Bracketing>(m, "Bracketing")
      .def(py::init([](const std::string& s) { return parse_bracketing(s); }), py::arg("text"))
      .def_readonly("d", &Bracketing::d)
      .def_property_readonly("round", [](const Bracketing& b) { return pairs(b.round); })
      .def_property_readonly("square", [](const Bracketing& b) { return pairs(b.square); })
      .def_readonly("unpaired", &Bracketing::unpaired)
      .def("__eq__", [](const Bracketing& a, const Bracketing& b) { return a == b; })
      .def("__str__", &format_bracketing)
      .def("__repr__", [](const Bracketing& b) { return "Bracketing('" + format_bracketing(b) + "')"; });

  py::class_<MetricGraph>(m, "MetricGraph")
      .def(py::init([](const py::object& cls, std::vector<double> taus, std::vector<cplx> alphas) {
             MetricGraph g{as_class(cls), std::move(taus), std::move(alphas)};
             check_metric_graph(g);
             return g;
           }),
           py::arg("cls"), py::arg("taus") = std::vector<double>{}, py::arg("alphas") = std::vector<cplx>{})
      .def_static("parse", &parse_metric_graph, py::arg("text"))
      .def_readonly("cls", &MetricGraph::cls)
      .def_readonly("taus", &MetricGraph::taus)
      .def_readonly("alphas", &MetricGraph::alphas)
      .def("residues", &residues_from_graph)
      .def("distance", &invariant_distance, py::arg("other"))
      .def("format", &format_metric_graph)
      .def("__str__", &format_metric_graph);

  py::class_<Classification>(m, "Classification")
      .def_readonly("cls", &Classification::cls)
      .def_readonly("metric", &Classification::metric)
      .def_readonly("face_root", &Classification::face_root)
      .def_property_readonly("polynomial", [](const Classification& c) { return c.graph.poly; })
      .def_property_readonly("separatrices",
                             [](const Classification& c) {
                               py::list out;
                               for (const auto& t : c.graph.traces) out.append(trace_dict(t));
                               return out;
                             })
      .def_property_readonly("equilibria", [](const Classification& c) {
        py::list out;
        for (const auto& e : c.graph.equilibria) {
          py::dict d;
          d["position"] = e.position;
          d["multiplicity"] = e.multiplicity;
          d["residue"] = e.residue;
          d["kind"] = std::string(to_string(e.kind));
          out.append(d);
        }
        return out;
      });

  py::class_<RealizationResult>(m, "RealizationResult")
      .def_readonly("polynomial", &RealizationResult::polynomial)
      .def_readonly("achieved", &RealizationResult::achieved)
      .def_readonly("residual", &RealizationResult::residual)
      .def_readonly("iterations", &RealizationResult::iterations)
      .def_readonly("starts", &RealizationResult::starts)
      .def_property_readonly("status", [](const RealizationResult& r) { return std::string(to_string(r.status)); })
      .def_readonly("note", &RealizationResult::note);

  m.def("parse_polynomial", &parse_polynomial, py::arg("text"));

  m.def(
      "classify", [](const py::object& p, int threads) { return classify(as_poly(p), {}, threads); },
      py::arg("polynomial"), py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());

  m.def(
      "realize",
      [](const py::object& target, std::optional<Polynomial> seed_poly, int max_seeds, double tol, std::uint64_t seed) {
        RealizeOptions o;
        o.max_seeds = max_seeds;
        o.tol = tol;
        o.seed = seed;
        const MetricGraph g = as_metric(target);
        py::gil_scoped_release release;
        return realize(g, seed_poly, o);
      },
      py::arg("target"), py::arg("seed_polynomial") = std::nullopt, py::arg("max_seeds") = 400,
      py::arg("tol") = 1e-8, py::arg("seed") = 0);

  m.def("class_dimensions", [](const py::object& c) { return dims_dict(class_dimensions(as_class(c))); },
        py::arg("cls"));

  m.def(
      "enumerate_classes",
      [](int d, bool confirm) {
        WitnessFn witness;
        if (confirm)
          witness = [](const Bracketing& b) {
            MetricGraph g{b, std::vector<double>(b.h(), 1.0), std::vector<cplx>(b.s(), cplx(0.0, 1.0))};
            return realize(g).status == RealizeStatus::Converged;
          };
        py::list out;
        for (const auto& e : enumerate_classes(d, 5, witness)) {
          py::dict row = dims_dict(e.dims);
          row["cls"] = format_bracketing(e.cls);
          row["flag"] = std::string(to_string(e.flag));
          out.append(row);
        }
        return out;
      },
      py::arg("degree"), py::arg("confirm") = false);

  m.def(
      "can_form_homoclinic",
      [](const py::object& c, int k, int j) {
        const auto r = can_form_homoclinic(as_class(c), k, j);
        py::dict d;
        d["possible"] = r.possible;
        d["chain"] = pairs(r.chain.sequence);
        d["itinerary"] = r.chain.itinerary;
        d["sign_conditions"] = r.sign_conditions;
        return d;
      },
      py::arg("cls"), py::arg("k"), py::arg("j"));

  m.def(
      "break_homoclinic",
      [](const py::object& c, int k, int j, int half_plane) {
        return break_homoclinic(as_class(c), {k, j}, half_plane);
      },
      py::arg("cls"), py::arg("k"), py::arg("j"), py::arg("half_plane"));

  m.def(
      "protective_sector",
      [](const py::object& p, int l, double margin) {
        const auto s = protective_sector(as_poly(p), l, margin);
        py::dict d;
        d["index"] = s.index;
        d["root"] = s.root;
        d["angle"] = s.angle;
        d["case"] = std::string(to_string(s.kind));
        d["partial_sums"] = s.partial_sums;
        d["full_turn"] = s.full_turn;
        return d;
      },
      py::arg("polynomial"), py::arg("separatrix"), py::arg("margin") = 1e-3);

  m.def(
      "check_landing_stability",
      [](const py::object& p, int l, double delta, int trials, std::uint64_t seed, int threads) {
        const Polynomial poly = as_poly(p);
        LandingStabilityReport r;
        {
          py::gil_scoped_release release;
          r = check_landing_stability(poly, l, delta, trials, seed, {}, threads);
        }
        py::dict d;
        d["delta"] = r.delta;
        d["trials"] = r.trials;
        d["continued"] = r.continued;
        d["elsewhere"] = r.elsewhere;
        d["homoclinic"] = r.homoclinic;
        d["uncertain"] = r.uncertain;
        d["max_s_bound"] = r.max_s_bound;
        d["threshold"] = r.threshold;
        return d;
      },
      py::arg("polynomial"), py::arg("separatrix"), py::arg("delta"), py::arg("trials") = 100, py::arg("seed") = 0,
      py::arg("threads") = 0);

  m.def(
      "sweep",
      [](int degree, int samples, double box, std::uint64_t seed, int threads) {
        SweepOptions o;
        o.degree = degree;
        o.samples = samples;
        o.box = box;
        o.seed = seed;
        o.threads = threads;
        SweepReport r;
        {
          py::gil_scoped_release release;
          r = sweep_classes(o);
        }
        py::dict d;
        d["samples"] = r.samples;
        d["uncertain"] = r.uncertain;
        d["full_dimension"] = r.full_dimension;
        d["full_fraction"] = r.full_fraction();
        d["counts"] = r.counts;
        d["dims"] = r.dims;
        return d;
      },
      py::arg("degree") = 3, py::arg("samples") = 1000, py::arg("box") = 2.0, py::arg("seed") = 0,
      py::arg("threads") = 0);

  m.def(
      "render_portrait",
      [](const py::object& p, int size, int streamlines, double view_factor) {
        PortraitOptions o;
        o.size = size;
        o.streamlines = streamlines;
        o.view_factor = view_factor;
        return render_portrait(as_poly(p), o);
      },
      py::arg("polynomial"), py::arg("size") = 600, py::arg("streamlines") = 0, py::arg("view_factor") = 2.0);

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "polyvf");
        const auto r = execute_command(args);
        return py::make_tuple(r.exit_code, r.payload);
      },
      py::arg("args"));
}
