#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "shrinker/acceptance.hpp"
#include "shrinker/entropy.hpp"
#include "shrinker/error.hpp"
#include "shrinker/gaussian_measure.hpp"
#include "shrinker/obj_io.hpp"
#include "shrinker/parallel.hpp"
#include "shrinker/primitives.hpp"
#include "shrinker/report.hpp"
#include "shrinker/sweepout.hpp"
#include "shrinker/tightening.hpp"
#include "shrinker/topology.hpp"
#include "shrinker/variation.hpp"

namespace py = pybind11;
using namespace shrinker;

namespace {

using RowsX3 = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using RowsI3 = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

RowsX3 vertex_array(const TriMesh& m) {
  RowsX3 a(m.num_vertices(), 3);
  for (std::size_t i = 0; i < m.num_vertices(); ++i) a.row(i) = m.vertex(i).transpose();
  return a;
}

RowsI3 face_array(const TriMesh& m) {
  RowsI3 a(m.num_faces(), 3);
  for (std::size_t f = 0; f < m.num_faces(); ++f)
    for (int k = 0; k < 3; ++k) a(f, k) = m.face(f)[k];
  return a;
}

TriMesh mesh_from_arrays(const RowsX3& v, const RowsI3& f) {
  std::vector<Vec3> verts(v.rows());
  for (Eigen::Index i = 0; i < v.rows(); ++i) verts[i] = v.row(i).transpose();
  std::vector<Face> faces(f.rows());
  for (Eigen::Index i = 0; i < f.rows(); ++i) faces[i] = {f(i, 0), f(i, 1), f(i, 2)};
  return TriMesh(std::move(verts), std::move(faces));
}

PrimitiveParams params_from_kwargs(const py::kwargs& kw) {
  PrimitiveParams p;
  for (const auto& item : kw) {
    const std::string k = py::str(item.first);
    const py::handle v = item.second;
    if (k == "radius") p.radius = v.cast<double>();
    else if (k == "half_length") p.half_length = v.cast<double>();
    else if (k == "major_radius") p.major_radius = v.cast<double>();
    else if (k == "minor_radius") p.minor_radius = v.cast<double>();
    else if (k == "semi_axes") p.semi_axes = v.cast<Vec3>();
    else if (k == "epsilon") p.epsilon = v.cast<double>();
    else if (k == "harmonic_degree") p.harmonic_degree = v.cast<int>();
    else if (k == "axis") p.axis = v.cast<Vec3>();
    else if (k == "offset") p.offset = v.cast<double>();
    else if (k == "center") p.center = v.cast<Vec3>();
    else if (k == "with_tail") p.with_tail = v.cast<bool>();
    else if (k == "scale") p.scale = v.cast<double>();
    else throw py::type_error("unknown primitive parameter '" + k + "'");
  }
  return p;
}

}  // namespace

PYBIND11_MODULE(_shrinker, m) {
  m.doc() = "Gaussian area, entropy, stability and sweepout computations on triangle meshes";
  m.attr("__version__") = kVersion;

  static py::exception<Error> error(m, "ShrinkerError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg = std::string(error_code_name(e.code())) + " [" + e.module() + "]: " + e.what();
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(msg);
      exc.attr("code") = error_code_name(e.code());
      exc.attr("module") = e.module();
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<TriMesh>(m, "TriMesh")
      .def(py::init(&mesh_from_arrays), py::arg("vertices"), py::arg("faces"))
      .def_property_readonly("vertices", &vertex_array)
      .def_property_readonly("faces", &face_array)
      .def_property_readonly("num_vertices", &TriMesh::num_vertices)
      .def_property_readonly("num_faces", &TriMesh::num_faces)
      .def_property_readonly("has_tail", [](const TriMesh& t) { return t.tail().has_value(); })
      .def("is_closed", &TriMesh::is_closed)
      .def("euclidean_area", &TriMesh::euclidean_area)
      .def("genus", [](const TriMesh& t) { return topology_report(t).total_genus(); })
      .def("__repr__", [](const TriMesh& t) {
        return "<TriMesh " + std::to_string(t.num_vertices()) + " vertices, " + std::to_string(t.num_faces()) +
               " faces>";
      });

  m.def(
      "generate",
      [](const std::string& kind, int refinement, const py::kwargs& kw) {
        return generate_primitive(parse_primitive_kind(kind), params_from_kwargs(kw), refinement);
      },
      py::arg("kind"), py::arg("refinement") = 3);
  m.def("read_obj", &read_obj, py::arg("path"));
  m.def("write_obj", &write_obj, py::arg("path"), py::arg("mesh"));
  m.def("translate_dilate", &translate_dilate, py::arg("mesh"), py::arg("t"), py::arg("s"));
  m.def("set_threads", &set_thread_count, py::arg("n"));

  m.def(
      "gaussian_area",
      [](const TriMesh& mesh) {
        const AreaResult a = gaussian_area(mesh);
        return py::dict(py::arg("value") = a.value, py::arg("error_estimate") = a.error_estimate,
                        py::arg("tail") = a.tail_correction);
      },
      py::arg("mesh"));
  m.def(
      "f_density", [](const TriMesh& mesh, const Vec3& x0, double t0) { return f_density(mesh, {x0, t0}); },
      py::arg("mesh"), py::arg("x0"), py::arg("t0"));
  m.def(
      "entropy",
      [](const TriMesh& mesh, int starts) {
        EntropyOptions o;
        o.starts = starts;
        const EntropyResult r = entropy(mesh, o);
        return py::dict(py::arg("lambda_") = r.lambda, py::arg("x0") = r.argmax.x0, py::arg("t0") = r.argmax.t0);
      },
      py::arg("mesh"), py::arg("starts") = 5);
  m.def(
      "shrinker_residual",
      [](const TriMesh& mesh) {
        const ResidualReport r = shrinker_residual(mesh);
        return py::dict(py::arg("l2") = r.l2, py::arg("sup") = r.sup, py::arg("per_vertex") = r.per_vertex);
      },
      py::arg("mesh"));
  m.def(
      "stability_spectrum",
      [](const TriMesh& mesh, int k) {
        const StabilitySpectrum s = stability_spectrum(mesh, k);
        return py::dict(py::arg("eigenvalues") = s.eigenvalues, py::arg("index") = s.index);
      },
      py::arg("mesh"), py::arg("k") = 9);
  m.def(
      "gauss_degree",
      [](const TriMesh& mesh) {
        const GaussDegree d = gauss_degree(mesh);
        return py::dict(py::arg("degree") = d.degree, py::arg("raw") = d.raw, py::arg("residual") = d.residual);
      },
      py::arg("mesh"));
  m.def(
      "tighten",
      [](const TriMesh& mesh, int steps) {
        const TightenResult r = tighten(mesh, steps);
        std::vector<double> F;
        std::vector<std::string> cases;
        for (const auto& t : r.trace) {
          F.push_back(t.area);
          cases.push_back(descent_case_name(t.which));
        }
        return py::dict(py::arg("F") = F, py::arg("case") = cases, py::arg("final_gamma") = r.final_gamma,
                        py::arg("reached_gate") = r.reached_gate, py::arg("mesh") = r.mesh);
      },
      py::arg("mesh"), py::arg("steps") = 100);
  m.def(
      "width",
      [](const std::string& family, py::object mesh, int tau_points, double shift) {
        SweepoutFamily f = [&] {
          if (family == "plane") return SweepoutFamily::plane_family();
          if (family == "sphere") return SweepoutFamily::sphere_family();
          if (family == "translated") return SweepoutFamily::translated_sphere_family(shift);
          if (family == "canonical") {
            if (mesh.is_none()) throw py::value_error("canonical family needs a mesh");
            return SweepoutFamily::canonical(mesh.cast<const TriMesh&>());
          }
          throw py::value_error("unknown family '" + family + "'");
        }();
        WidthGrid g;
        g.tau_points = tau_points;
        const WidthReport w = width_upper_bound(f, g);
        py::dict d(py::arg("max_area") = w.max_area, py::arg("argmax_t") = w.argmax_t,
                   py::arg("argmax_tau") = w.argmax_tau);
        d["analytic_max"] = w.analytic_max ? py::cast(*w.analytic_max) : py::none();
        return d;
      },
      py::arg("family"), py::arg("mesh") = py::none(), py::arg("tau_points") = 33, py::arg("shift") = 50.0);
  m.def(
      "run_criterion",
      [](int id) {
        const CriterionResult r = run_criterion(id);
        return py::dict(py::arg("id") = r.id, py::arg("title") = r.title, py::arg("pass_") = r.pass,
                        py::arg("detail") = r.detail, py::arg("seconds") = r.seconds);
      },
      py::arg("id"));
}
