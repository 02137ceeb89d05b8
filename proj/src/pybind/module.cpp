#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kscrit/evolution.hpp"
#include "kscrit/experiments.hpp"
#include "kscrit/io.hpp"
#include "kscrit/lyapunov.hpp"
#include "kscrit/params.hpp"
#include "kscrit/profile.hpp"
#include "kscrit/selfsim.hpp"
#include "kscrit/stationary.hpp"

namespace py = pybind11;
using namespace kscrit;

namespace {

const char* kind_name(MassClassification::Kind k) {
  switch (k) {
    case MassClassification::Kind::unique: return "unique";
    case MassClassification::Kind::continuum: return "continuum";
    default: return "none";
  }
}

}  // namespace

PYBIND11_MODULE(_kscrit, mod) {
  mod.doc() = "Critical-mass dichotomy solvers for the radial aggregation model";

  py::register_exception<invalid_input>(mod, "InvalidInput", PyExc_ValueError);
  py::register_exception<no_convergence>(mod, "NoConvergence", PyExc_RuntimeError);
  py::register_exception<numerical_failure>(mod, "NumericalFailure", PyExc_RuntimeError);
  py::register_exception<inconsistency_error>(mod, "InconsistencyError", PyExc_RuntimeError);
  py::register_exception<constraint_violation>(mod, "ConstraintViolation", PyExc_RuntimeError);

  py::class_<Grid>(mod, "Grid")
      .def_static("graded", &Grid::graded, py::arg("x_max"), py::arg("p"),
                  py::arg("n_cells"))
      .def_static("uniform", &Grid::uniform, py::arg("x_max"), py::arg("n_cells"))
      .def_readonly("x_max", &Grid::x_max)
      .def_readonly("grading_exponent", &Grid::grading_exponent)
      .def_readonly("n_cells", &Grid::n_cells)
      .def_readonly("nodes", &Grid::nodes);

  py::class_<Profile>(mod, "Profile")
      .def(py::init<Grid, std::vector<double>, double>(), py::arg("grid"),
           py::arg("values"), py::arg("du0"))
      .def_readonly("grid", &Profile::grid)
      .def_readonly("values", &Profile::values)
      .def_readonly("derivative_at_zero", &Profile::derivative_at_zero);

  py::class_<Parameters>(mod, "Parameters")
      .def(py::init<int, double>(), py::arg("N"), py::arg("m") = 0.0)
      .def_readonly("N", &Parameters::N)
      .def_readonly("q", &Parameters::q)
      .def_readonly("m", &Parameters::m);

  py::class_<StationaryProfile>(mod, "StationaryProfile")
      .def_readonly("a", &StationaryProfile::a)
      .def_readonly("profile", &StationaryProfile::profile)
      .def_readonly("max_value", &StationaryProfile::max_value)
      .def_readonly("flat_point", &StationaryProfile::flat_point);

  py::class_<CriticalConstants>(mod, "CriticalConstants")
      .def_readonly("N", &CriticalConstants::N)
      .def_readonly("M", &CriticalConstants::M)
      .def_readonly("A", &CriticalConstants::A)
      .def_readonly("M_bar", &CriticalConstants::M_bar)
      .def_readonly("tol", &CriticalConstants::tol);

  py::class_<SelfSimProfile>(mod, "SelfSimProfile")
      .def_readonly("eps", &SelfSimProfile::eps)
      .def_readonly("profile", &SelfSimProfile::profile)
      .def_readonly("A_eps", &SelfSimProfile::A_eps)
      .def_readonly("M_eps", &SelfSimProfile::M_eps)
      .def_readonly("concave", &SelfSimProfile::concave)
      .def_readonly("K_eps", &SelfSimProfile::K_eps);

  py::class_<AmplitudeLaw>(mod, "AmplitudeLaw")
      .def_static("make", &AmplitudeLaw::make, py::arg("a0"), py::arg("eps"),
                  py::arg("q"))
      .def_readonly("a0", &AmplitudeLaw::a0)
      .def_readonly("eps", &AmplitudeLaw::eps)
      .def_readonly("q", &AmplitudeLaw::q)
      .def_readonly("T_star", &AmplitudeLaw::T_star);

  py::class_<BandEntry>(mod, "BandEntry")
      .def_readonly("eps", &BandEntry::eps)
      .def_readonly("A_eps", &BandEntry::A_eps)
      .def_readonly("M_eps", &BandEntry::M_eps)
      .def_readonly("plateau", &BandEntry::plateau)
      .def_readonly("concave", &BandEntry::concave)
      .def_readonly("flat_detected", &BandEntry::flat_detected);

  py::class_<PhysicalField>(mod, "PhysicalField")
      .def_readonly("t", &PhysicalField::t)
      .def_readonly("r", &PhysicalField::r)
      .def_readonly("rho", &PhysicalField::rho)
      .def_readonly("c", &PhysicalField::c)
      .def_readonly("total_mass", &PhysicalField::total_mass);

  py::class_<RateFit>(mod, "RateFit")
      .def_readonly("exponent", &RateFit::exponent)
      .def_readonly("r2", &RateFit::r2)
      .def_readonly("T_estimate", &RateFit::T_estimate);

  mod.def("solve_Pa", &solve_Pa, py::arg("a"), py::arg("params"), py::arg("x_max"),
          py::arg("tol"));
  mod.def("integral_equation_solve", &integral_equation_solve, py::arg("params"),
          py::arg("x_max"), py::arg("tol"));
  mod.def("critical_constants", &critical_constants, py::arg("params"), py::arg("tol"));
  mod.def(
      "find_a_for_mass",
      [](double m, const Parameters& params, double tol) {
        const MassClassification c = find_a_for_mass(m, params, tol);
        return py::make_tuple(kind_name(c.kind), c.a, c.tolerance_band);
      },
      py::arg("m"), py::arg("params"), py::arg("tol"));
  mod.def("solve_Qeps", &solve_Qeps, py::arg("eps"), py::arg("params"),
          py::arg("x_max"), py::arg("tol"));
  mod.def("critical_band", &critical_band, py::arg("params"), py::arg("eps_grid"),
          py::arg("tol"));
  mod.def("amplitude", &amplitude, py::arg("law"), py::arg("t"));
  mod.def("self_similar_field", &self_similar_field, py::arg("V"), py::arg("law"),
          py::arg("t"), py::arg("grid"));
  mod.def("energy_F", &energy_F, py::arg("u"), py::arg("params"), py::arg("tol"));
  mod.def("energy_F_eps", &energy_F_eps, py::arg("u"), py::arg("params"),
          py::arg("eps"), py::arg("tol"));
  mod.def("H_eps", &H_eps, py::arg("x"), py::arg("eps"), py::arg("q"), py::arg("tol"));
  mod.def("H_of", &H_of, py::arg("v"), py::arg("q"));
  mod.def("f_eps", &f_eps, py::arg("x"), py::arg("eps"), py::arg("q"));
  mod.def("nmax", &nmax, py::arg("u"));
  mod.def("c1_distance", &c1_distance, py::arg("u"), py::arg("v"));
  mod.def("derivative_samples", &derivative_samples, py::arg("u"));
  mod.def("reconstruct_physical", &reconstruct_physical, py::arg("u"),
          py::arg("params"), py::arg("t") = 0.0);
  mod.def("fit_blowup_rate", &fit_blowup_rate, py::arg("series"), py::arg("q"),
          py::arg("window_decades") = 1.0);
  mod.def(
      "classify_json",
      [](const std::string& config_path) {
        const ConfigFile cfg = ConfigFile::parse_file(config_path);
        return classify(scenario_from_config(cfg)).to_json().dump();
      },
      py::arg("config_path"),
      "Run a classification scenario from a config file; returns the report as a "
      "JSON string.");
  mod.def("write_profile_csv", &write_profile_csv, py::arg("u"), py::arg("path"));
  mod.def("read_profile_csv", &read_profile_csv, py::arg("path"));
}
