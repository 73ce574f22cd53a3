// Python bindings for the main gbspec operations.

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gbspec/alignment.hpp"
#include "gbspec/bessel.hpp"
#include "gbspec/discretize.hpp"
#include "gbspec/eigensolve.hpp"
#include "gbspec/experiments.hpp"
#include "gbspec/muffin.hpp"
#include "gbspec/version.hpp"

namespace py = pybind11;
using namespace gbspec;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_gbspec, m) {
  m.attr("__version__") = kVersion;

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);

  py::class_<RotationAngle>(m, "RotationAngle")
      .def(py::init<double>(), py::arg("theta"))
      .def_property_readonly("theta", &RotationAngle::theta)
      .def_property_readonly("cos", &RotationAngle::cos)
      .def_property_readonly("sin", &RotationAngle::sin)
      .def_property_readonly("tan", &RotationAngle::tan);

  py::class_<PeriodicPotential>(m, "PeriodicPotential")
      .def_static("cosine_sum", &PeriodicPotential::cosine_sum, py::arg("amplitude"))
      .def_static("smooth_muffin", &PeriodicPotential::smooth_muffin,
                  py::arg("amplitude"), py::arg("radius"), py::arg("ramp"))
      .def_static("flat", &PeriodicPotential::flat)
      .def("__call__", &PeriodicPotential::operator(), py::arg("x"), py::arg("y"))
      .def_property_readonly("lipschitz_constant",
                             &PeriodicPotential::lipschitz_constant);

  py::class_<GrainPotential>(m, "GrainPotential")
      .def_static("rotation", &GrainPotential::rotation, py::arg("v"), py::arg("theta"))
      .def_static("dislocation", &GrainPotential::dislocation, py::arg("v"),
                  py::arg("t"))
      .def_static("symmetric_rotation", &GrainPotential::symmetric_rotation)
      .def_static("symmetric_dislocation", &GrainPotential::symmetric_dislocation)
      .def_static("two_sided", &GrainPotential::two_sided, py::arg("left"),
                  py::arg("right"))
      .def("__call__", &GrainPotential::operator(), py::arg("x"), py::arg("y"));

  py::class_<Rect>(m, "Rect")
      .def(py::init([](double x0, double x1, double y0, double y1) {
             return Rect{x0, x1, y0, y1};
           }),
           py::arg("x0"), py::arg("x1"), py::arg("y0"), py::arg("y1"))
      .def_static("q_box", &Rect::q_box, py::arg("n"), py::arg("eta"));

  m.def("mismatch_bound", &mismatch_bound, py::arg("v"), py::arg("theta"), py::arg("t"),
        py::arg("box"), py::arg("samples_per_unit") = 100);
  m.def("pythagorean_period", [](const RotationAngle& a) -> py::object {
    auto p = pythagorean_period(a);
    if (!p) return py::none();
    return py::int_(*p);
  });

  py::class_<AlignmentSolution>(m, "AlignmentSolution")
      .def_readonly("m", &AlignmentSolution::m)
      .def_readonly("N", &AlignmentSolution::N)
      .def_readonly("theta", &AlignmentSolution::theta)
      .def_readonly("t", &AlignmentSolution::t)
      .def_readonly("epsilon", &AlignmentSolution::epsilon)
      .def_readonly("residual_x", &AlignmentSolution::residual_x)
      .def_readonly("residual_y", &AlignmentSolution::residual_y);

  m.def("rational_dependence", [](const RotationAngle& a, std::int64_t cap) -> py::object {
    auto dep = rational_dependence(a, cap);
    if (!dep) return py::none();
    return py::make_tuple((*dep)[0], (*dep)[1], (*dep)[2]);
  });
  m.def("find_alignment", [](const RotationAngle& a, double t, double eps,
                             std::int64_t m_max) -> py::object {
    auto sol = find_alignment(a, t, eps, m_max);
    if (!sol) return py::none();
    return py::cast(*sol);
  });
  m.def("find_spaced_alignments",
        [](const RotationAngle& a, double t, double eps, std::int64_t nu,
           std::int64_t horizon) {
          auto set = find_spaced_alignments(a, t, eps, nu, horizon);
          py::list ms;
          for (const auto& s : set.solutions) ms.append(s.m);
          return py::make_tuple(ms, set.density_estimate);
        });

  py::class_<BandedMatrix<double>>(m, "Operator")
      .def_property_readonly("dim", &BandedMatrix<double>::dim)
      .def_property_readonly("bandwidth", &BandedMatrix<double>::bandwidth)
      .def("one_norm", &BandedMatrix<double>::one_norm)
      .def("apply",
           [](const BandedMatrix<double>& A, py::array_t<double> x) {
             if (static_cast<std::size_t>(x.size()) != A.dim())
               throw PreconditionError("apply: dimension mismatch");
             std::vector<double> xv(x.data(), x.data() + A.dim());
             return to_array(A.apply(xv));
           })
      .def("coordinate_dump", [](const BandedMatrix<double>& A) {
        std::ostringstream os;
        A.write_coordinate(os);
        return os.str();
      });

  py::class_<GridSpec>(m, "GridSpec")
      .def_static("box", &GridSpec::box, py::arg("n"), py::arg("h"))
      .def_static("strip", &GridSpec::strip, py::arg("n"), py::arg("h"))
      .def_static("cell", &GridSpec::cell, py::arg("px"), py::arg("py"), py::arg("h"));

  m.def("assemble",
        [](const PeriodicPotential& v, const GridSpec& g) { return assemble(v, g); });
  m.def("assemble",
        [](const GrainPotential& w, const GridSpec& g) { return assemble(w, g); });
  m.def("count_below", [](const BandedMatrix<double>& A, double sigma) {
    return count_below(A, sigma).negatives;
  });
  m.def("count_interval",
        [](const BandedMatrix<double>& A, double a, double b) {
          return count_interval(A, a, b);
        });
  m.def("eigenpairs_near", [](const BandedMatrix<double>& A, double sigma,
                              std::size_t count) {
    auto pairs = eigenpairs_near(A, sigma, count);
    py::list out;
    for (auto& p : pairs)
      out.append(py::make_tuple(p.value, to_array(p.vector), p.residual));
    return out;
  });
  m.def("lowest_eigenvalues", [](const BandedMatrix<double>& A, std::size_t k) {
    return to_array(lowest_eigenvalues(A, k));
  });

  m.def("find_gap", [](const PeriodicPotential& v, double h, int momentum_grid,
                       int nbands) -> py::object {
    auto gap = find_gap(v, h, momentum_grid, nbands);
    if (!gap) return py::none();
    return py::make_tuple(gap->a, gap->b, gap->band_index);
  }, py::arg("v"), py::arg("h"), py::arg("momentum_grid") = 12, py::arg("nbands") = 8);

  m.def("disc_eigenvalues", [](double r, int k) { return to_array(disc_eigenvalues(r, k)); });
  m.def("cut_disc_eigenvalues", [](double r, double xi, int k, double h) {
    return to_array(cut_disc_eigenvalues(r, xi, k, h));
  });
  m.def("enumerate_cut_discs", [](double r, const RotationAngle& th, double y_max) {
    py::list out;
    for (const auto& d : enumerate_cut_discs(r, th, y_max))
      out.append(py::make_tuple(d.index, d.xi, d.center_y));
    return out;
  });
  m.def("bessel_j", &bessel_j, py::arg("nu"), py::arg("x"));
  m.def("bessel_j_zero", &bessel_j_zero, py::arg("nu"), py::arg("s"));
}
