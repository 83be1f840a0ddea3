// Python bindings for the core operations. Exact quantities cross the
// boundary as fractions.Fraction; points are (x, y) pairs.

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "radial_lab/bounds.hpp"
#include "radial_lab/experiment.hpp"
#include "radial_lab/frostman.hpp"
#include "radial_lab/generators.hpp"
#include "radial_lab/incidence.hpp"
#include "radial_lab/projection.hpp"
#include "radial_lab/set_io.hpp"

namespace py = pybind11;
namespace rl = radial_lab;

namespace {

py::object fraction_type() {
  static py::object type = py::module_::import("fractions").attr("Fraction");
  return type;
}

py::object to_py(const rl::Rational& r) { return fraction_type()(r.numerator(), r.denominator()); }

// int, Fraction, str ("3/8", "0.375") or float (taken exactly).
rl::Rational to_rational(const py::handle& v) {
  if (py::isinstance<py::str>(v)) return rl::parse_rational(v.cast<std::string>());
  const py::object frac = fraction_type()(v);
  return rl::Rational(frac.attr("numerator").cast<std::int64_t>(), frac.attr("denominator").cast<std::int64_t>());
}

rl::Dyadic to_dyadic(const py::handle& v) {
  if (py::isinstance<py::float_>(v)) return rl::Dyadic::from_double(v.cast<double>());
  return rl::Dyadic::from_rational(to_rational(v));
}

rl::Point2 to_point(const py::sequence& p) {
  if (py::len(p) != 2) throw rl::ArgumentError("a point is an (x, y) pair");
  return rl::Point2{to_dyadic(p[0]), to_dyadic(p[1])};
}

py::tuple point_out(const rl::Point2& p) { return py::make_tuple(to_py(p.x.to_rational()), to_py(p.y.to_rational())); }

py::dict certificate_out(const rl::FrostmanCertificate& c) {
  py::dict d;
  d["kind"] = rl::to_string(c.kind);
  d["s"] = to_py(c.s);
  d["C"] = to_py(c.C);
  d["verified"] = c.verified;
  d["level"] = c.level;
  d["set_size"] = c.set_size;
  if (c.witness) {
    py::dict w;
    w["scale"] = c.witness->scale;
    w["index"] = py::make_tuple(c.witness->cube.i, c.witness->cube.j);
    w["count"] = c.witness->count;
    w["bound"] = c.witness->bound;
    d["witness"] = w;
  } else {
    d["witness"] = py::none();
  }
  return d;
}

py::dict record_out(const rl::IncidenceRecord& r) {
  py::dict d;
  d["n"] = r.level;
  d["cubes"] = r.cube_count;
  d["M"] = r.family_size;
  d["s"] = r.s;
  d["t"] = r.t;
  d["eps"] = r.eps;
  d["union_size"] = r.union_size;
  d["incidences"] = r.incidences;
  d["per_cube"] = r.per_cube;
  d["exponent_hat"] = r.exponent_hat;
  d["exponent_floor"] = r.exponent_floor;
  return d;
}

py::dict estimate_out(const rl::DimensionEstimate& e) {
  py::dict d;
  d["slope"] = e.slope;
  d["intercept"] = e.intercept;
  d["m_lo"] = e.m_lo;
  d["m_hi"] = e.m_hi;
  d["residual"] = e.residual;
  d["counts"] = e.counts;
  return d;
}

using Cells = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

Cells cells_of(const rl::CubeSet& s) {
  Cells out;
  for (const auto& c : s.cubes()) out.emplace_back(c.i, c.j);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dyadic radial projection and incidence toolkit";
  m.attr("__version__") = RADIAL_LAB_VERSION;

  py::register_exception<rl::ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<rl::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<rl::DegeneratePairError>(m, "DegeneratePairError", PyExc_ValueError);
  py::register_exception<rl::ValidationError>(m, "ValidationError", PyExc_RuntimeError);
  py::register_exception<rl::GenerationError>(m, "GenerationError", PyExc_RuntimeError);
  py::register_exception<rl::ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<rl::CubeSet>(m, "CubeSet", "Distinct same-level dyadic cubes, held in (i, j) order.")
      .def(py::init([](int level, const Cells& cells) { return rl::CubeSet::from_indices(level, cells); }),
           py::arg("level"), py::arg("cells"))
      .def_static("full_grid", &rl::CubeSet::full_grid, py::arg("level"))
      .def_property_readonly("level", &rl::CubeSet::level)
      .def("__len__", &rl::CubeSet::size)
      .def("cells", &cells_of, "Members as (i, j) pairs.")
      .def("__contains__", [](const rl::CubeSet& s, std::pair<std::uint32_t, std::uint32_t> ij) {
        return s.contains(rl::DyadicCube{s.level(), ij.first, ij.second});
      })
      .def("box_count", [](const rl::CubeSet& s, int m) { return rl::box_count(s, m); }, py::arg("m"))
      .def("cubes_in_ball", [](const rl::CubeSet& s, const py::sequence& c, const py::object& r) {
        return rl::cubes_in_ball(s, to_point(c), to_dyadic(r));
      }, py::arg("center"), py::arg("r"))
      .def("branching_profile", [](const rl::CubeSet& s) { return rl::branching_profile(s).counts; })
      .def(py::self == py::self)
      .def("__repr__", [](const rl::CubeSet& s) {
        return "CubeSet(level=" + std::to_string(s.level()) + ", size=" + std::to_string(s.size()) + ")";
      });

  py::class_<rl::TubeSet>(m, "TubeSet", "Distinct same-level tubes given by their parameter cells (a, b).")
      .def(py::init([](int level, const Cells& cells) {
             std::vector<rl::Tube> tubes;
             for (auto [a, b] : cells) tubes.push_back(rl::Tube{rl::DyadicCube{level, a, b}});
             return rl::TubeSet(level, std::move(tubes));
           }),
           py::arg("level"), py::arg("cells"))
      .def_static("full", &rl::TubeSet::full, py::arg("level"))
      .def_property_readonly("level", &rl::TubeSet::level)
      .def("__len__", &rl::TubeSet::size)
      .def("cells", [](const rl::TubeSet& ts) {
        Cells out;
        for (const auto& t : ts.tubes()) out.emplace_back(t.param.i, t.param.j);
        return out;
      });

  // generators
  m.def("cantor_product", &rl::cantor_product, py::arg("level"), py::arg("digits_x"), py::arg("digits_y"));
  m.def("line_set", [](int level, const py::object& a, const py::object& b) {
    return rl::line_set(level, to_dyadic(a), to_dyadic(b));
  }, py::arg("level"), py::arg("slope"), py::arg("intercept"));
  m.def("random_tree_set", [](int level, const py::object& t, std::uint64_t seed) {
    auto r = rl::random_tree_set(level, to_rational(t), seed);
    return py::make_tuple(r.set, certificate_out(r.certificate));
  }, py::arg("level"), py::arg("target"), py::arg("seed"), "Returns (set, certificate).");
  m.def("graph_set", [](int level, const py::object& a, const py::object& b, std::uint64_t seed) {
    return rl::graph_set(level, to_dyadic(a), to_dyadic(b), seed);
  }, py::arg("level"), py::arg("slope"), py::arg("intercept"), py::arg("seed"));
  m.def("embed", [](const rl::CubeSet& s, int level, std::uint32_t i, std::uint32_t j) {
    return rl::embed(s, rl::DyadicCube::make(level, i, j));
  }, py::arg("set"), py::arg("host_level"), py::arg("host_i"), py::arg("host_j"));

  // Frostman
  m.def("check_dyadic_frostman", [](const rl::CubeSet& s, const py::object& e, const py::object& c) {
    return certificate_out(rl::check_dyadic_frostman(s, to_rational(e), to_rational(c)));
  }, py::arg("set"), py::arg("s"), py::arg("C"));
  m.def("check_ball_frostman", [](const rl::CubeSet& s, const py::object& e, const py::object& c) {
    return certificate_out(rl::check_ball_frostman(s, to_rational(e), to_rational(c)));
  }, py::arg("set"), py::arg("s"), py::arg("C"));
  m.def("certify_with_min_constant", [](const rl::CubeSet& s, const py::object& e) {
    return certificate_out(rl::certify_with_min_constant(s, to_rational(e)));
  }, py::arg("set"), py::arg("s"));
  m.def("max_dyadic_exponent", [](const rl::CubeSet& s, const py::object& c, const py::object& step) -> py::object {
    const auto r = rl::max_dyadic_exponent(s, to_rational(c), to_rational(step));
    return r ? to_py(*r) : py::none();
  }, py::arg("set"), py::arg("C"), py::arg("step") = "1/64");
  m.def("extract_uniform_subset", [](const rl::CubeSet& p, const py::object& eps) {
    auto r = rl::extract_uniform_subset(p, to_rational(eps));
    py::dict d;
    d["subset"] = r.subset;
    d["certificate"] = certificate_out(r.certificate);
    d["block"] = r.block;
    d["size_floor"] = r.size_floor;
    return d;
  }, py::arg("set"), py::arg("eps"));

  // incidence
  m.def("tube_meets_cube", [](int level, std::pair<std::uint32_t, std::uint32_t> tube,
                              std::pair<std::uint32_t, std::uint32_t> cube) {
    return rl::tube_meets_cube(rl::Tube{rl::DyadicCube::make(level, tube.first, tube.second)},
                               rl::DyadicCube::make(level, cube.first, cube.second));
  }, py::arg("level"), py::arg("tube"), py::arg("cube"));
  m.def("count_tubes_through_cube", [](const rl::TubeSet& ts, std::pair<std::uint32_t, std::uint32_t> q) {
    return rl::count_tubes_through_cube(ts, rl::DyadicCube::make(ts.level(), q.first, q.second));
  }, py::arg("tubes"), py::arg("cube"));
  m.def("count_incidences", [](const rl::CubeSet& p, const rl::TubeSet& ts) {
    return record_out(rl::count_incidences(p, ts));
  }, py::arg("cubes"), py::arg("tubes"));
  m.def("incidence_harness", [](const py::object& s, const py::object& t, int level, std::uint64_t seed,
                                const py::object& eps) {
    const auto rs = to_rational(s), rt = to_rational(t), re = to_rational(eps);
    rl::IncidenceRecord rec;
    {
      py::gil_scoped_release release;
      rec = rl::renwang_harness(rl::make_harness_input(rs, rt, level, seed, re));
    }
    return record_out(rec);
  }, py::arg("s"), py::arg("t"), py::arg("level"), py::arg("seed"), py::arg("eps") = 0,
        "Builds the certified harness configuration at one level and measures its union.");

  // projections
  m.def("direction_between", [](const py::sequence& x, const py::sequence& y) {
    const auto d = rl::direction_between(to_point(x), to_point(y));
    return py::make_tuple(d.angle, d.dx, d.dy);
  }, py::arg("x"), py::arg("y"), "Returns (angle, dx, dy).");
  m.def("radial_project", [](const py::sequence& x, const rl::CubeSet& y, int precision, const py::object& rho) {
    const auto d = rl::radial_project(to_point(x), y, precision, to_dyadic(rho));
    py::dict out;
    out["bins"] = d.bins;
    out["excluded"] = d.excluded;
    return out;
  }, py::arg("x"), py::arg("y"), py::arg("precision"), py::arg("rho"));
  m.def("orthogonal_project", &rl::orthogonal_project, py::arg("theta"), py::arg("set"), py::arg("precision"));
  m.def("estimate_dimension", [](const std::vector<std::uint64_t>& counts, int m_lo, int m_hi) {
    return estimate_out(rl::estimate_dimension(counts, m_lo, m_hi));
  }, py::arg("counts_by_scale"), py::arg("m_lo"), py::arg("m_hi"));
  m.def("sup_radial_dimension", [](const std::vector<py::sequence>& xs, const rl::CubeSet& y, int m_lo, int m_hi,
                                   const py::object& rho) {
    std::vector<rl::Point2> points;
    for (const auto& p : xs) points.push_back(to_point(p));
    const auto r = rl::sup_radial_dimension(points, y, m_lo, m_hi, to_dyadic(rho));
    py::list per_x;
    for (const auto& e : r.per_x) per_x.append(e.estimate ? py::object(estimate_out(*e.estimate)) : py::none());
    py::dict out;
    out["per_x"] = per_x;
    out["max_slope"] = r.max_slope;
    out["best"] = r.best ? py::object(point_out(r.per_x[*r.best].x)) : py::none();
    out["empty"] = r.empty;
    return out;
  }, py::arg("xs"), py::arg("y"), py::arg("m_lo"), py::arg("m_hi"), py::arg("rho"));

  // bounds
  m.def("bound_osw1", &rl::bound_osw1, py::arg("dim_x"), py::arg("dim_y"));
  m.def("bound_osw2", &rl::bound_osw2, py::arg("dim_x"), py::arg("dim_y"));
  m.def("bound_main", [](double x, double y) { return rl::bound_main(x, y).value; }, py::arg("dim_x"), py::arg("dim_y"));
  m.def("bound_orthogonal_exceptional", &rl::bound_orthogonal_exceptional, py::arg("dim_y"), py::arg("u"));
  m.def("incidence_exponent", &rl::incidence_exponent, py::arg("s"), py::arg("t"));
  m.def("coupled_fixed_point", [](double tx, double ty, double tol) {
    const auto s = rl::coupled_fixed_point(tx, ty, tol);
    return py::make_tuple(s.s_x, s.s_y);
  }, py::arg("t_x"), py::arg("t_y"), py::arg("tol") = 1e-9);
  m.def("dominance_report", [](double x, double y) {
    const auto r = rl::dominance_report(x, y);
    py::dict d;
    d["main"] = r.main;
    d["osw1"] = r.osw1;
    d["osw2"] = r.osw2 ? py::object(py::float_(*r.osw2)) : py::none();
    d["main_gt_osw1"] = r.main_gt_osw1;
    d["main_gt_osw2"] = r.main_gt_osw2;
    return d;
  }, py::arg("dim_x"), py::arg("dim_y"));

  // files and experiments
  m.def("load_cube_set", &rl::load_cube_set, py::arg("path"));
  m.def("save_cube_set", [](const std::filesystem::path& p, const rl::CubeSet& s) { rl::save_set(p, s); },
        py::arg("path"), py::arg("set"));
  m.def("run_experiment", [](const std::filesystem::path& config, const std::optional<std::filesystem::path>& out) {
    auto c = rl::load_config(config);
    if (out) c.output_dir = *out;
    rl::RunReport report;
    {
      py::gil_scoped_release release;
      report = rl::run(c);
    }
    py::list parts;
    for (const auto& p : report.parts) {
      py::dict d;
      d["name"] = p.name;
      d["ok"] = p.ok;
      d["error"] = p.error;
      d["outputs"] = p.outputs;
      parts.append(d);
    }
    py::dict d;
    d["ok"] = report.ok();
    d["output_dir"] = c.output_dir;
    d["parts"] = parts;
    return d;
  }, py::arg("config"), py::arg("out") = py::none(), "Runs an INI experiment configuration.");
}
