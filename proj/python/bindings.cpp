// pybind11 surface over the main operations: collision models and
// Chapman-Enskog functions, wall moments and slip coefficients, the Knudsen
// half-space solver, the kinetic slab simulator, and the CNS solver.
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kinslip/harness.hpp"

namespace py = pybind11;
using namespace kinslip;

namespace {

Vec3 to_vec3(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

py::dict couette_measurement(const WallMeasurement& m) {
  py::dict d;
  d["slip_t"] = m.slip_t;
  d["shear_t"] = m.shear_t;
  d["ratio"] = m.ratio;
  d["theta_jump"] = m.theta_jump;
  d["dtheta_n"] = m.dtheta_n;
  d["rho_wall"] = m.rho_wall;
  return d;
}

py::dict fields_dict(const SlabFields& f) {
  py::dict d;
  d["x"] = f.x;
  d["rho"] = f.rho;
  d["u1"] = f.u1;
  d["u2"] = f.u2;
  d["u3"] = f.u3;
  d["theta"] = f.theta;
  d["time"] = f.time;
  return d;
}

}  // namespace

PYBIND11_MODULE(_kinslip, m) {
  m.doc() = "kinetic-fluid slip boundary verification toolkit";

  py::class_<VelocityLattice, std::shared_ptr<VelocityLattice>>(m, "VelocityLattice")
      .def(py::init([](const std::string& scheme, std::array<int, 3> counts, double vmax) {
             return std::make_shared<VelocityLattice>(lattice_scheme_from_string(scheme), counts,
                                                      vmax);
           }),
           py::arg("scheme") = "uniform-cartesian",
           py::arg("counts") = std::array<int, 3>{24, 24, 24}, py::arg("v_max") = 6.2)
      .def_property_readonly("size", &VelocityLattice::size)
      .def_property_readonly("v_max", &VelocityLattice::v_max)
      .def("nodes",
           [](const VelocityLattice& lat) {
             py::array_t<double> out({lat.size(), size_t(3)});
             auto r = out.mutable_unchecked<2>();
             for (size_t k = 0; k < lat.size(); ++k)
               for (int d = 0; d < 3; ++d) r(k, d) = lat.node(k)[d];
             return out;
           })
      .def("weights", [](const VelocityLattice& lat) { return lat.weights(); });

  py::class_<CollisionModel>(m, "CollisionModel")
      .def_static("bgk_constant", &CollisionModel::bgk_constant, py::arg("nu0"),
                  py::arg("theta_ref") = 1.0, py::arg("v_max") = 6.2)
      .def_static("bgk_matched", &CollisionModel::bgk_matched, py::arg("theta_ref") = 1.0,
                  py::arg("v_max") = 6.2, py::arg("sonine_order") = 3)
      .def_static("hard_sphere", &CollisionModel::hard_sphere, py::arg("nu0") = kHsNuZeroRaw,
                  py::arg("sonine_order") = 3, py::arg("v_max") = 6.2)
      .def_property_readonly("kind", [](const CollisionModel& c) { return to_string(c.kind); })
      .def_readonly("nu0", &CollisionModel::nu0)
      .def("a", [](const CollisionModel& c, double r) { return c.a_of(r); })
      .def("b", [](const CollisionModel& c, double r) { return c.b_of(r); })
      .def("tables", [](const CollisionModel& c) {
        return py::make_tuple(c.tables.r, c.tables.a, c.tables.b);
      });

  m.def("global_maxwellian", [](std::array<double, 3> v) { return global_maxwellian(to_vec3(v)); });
  m.def("collision_frequency",
        [](std::array<double, 3> v, const CollisionModel& c) {
          return collision_frequency(to_vec3(v), c);
        });
  m.def("transport_coefficients",
        [](const CollisionModel& c, double theta) { return transport_coefficients(c, theta); },
        py::arg("model"), py::arg("theta") = 1.0);
  m.def("local_maxwellian", [](double rho, std::array<double, 3> u, double theta,
                               std::array<double, 3> v) {
    return local_maxwellian(FluidState{rho, to_vec3(u), theta}, to_vec3(v));
  });

  m.def("half_space_moment_mass", &half_space_moment_mass);
  m.def("shear_bracket", [](const CollisionModel& c, double theta_w) {
    ShearBracket sb = shear_bracket(c, theta_w);
    return py::make_tuple(sb.F, sb.check_n3, sb.check_nt2, sb.check_nr2);
  });
  m.def("slip_coefficients",
        [](const CollisionModel& c, double theta_w) {
          SlipCoefficients sc = compute_slip_coefficients(c, theta_w);
          py::dict d;
          d["bI_u"] = sc.bI_u;
          d["bI_theta"] = sc.bI_theta;
          d["cI_u"] = sc.cI_u;
          d["cI_theta"] = sc.cI_theta;
          d["F_thetaw"] = sc.F_thetaw;
          return d;
        },
        py::arg("model"), py::arg("theta_w") = 1.0);

  m.def("extract_slip",
        [](const CollisionModel& c, const std::string& variant, double chi, double gradient) {
          HalfSpaceProblem p;
          p.ordinates = HalfSpaceProblem::default_ordinates();
          p.frame = WallFrame::slab_left();
          p.model = c;
          SlipExtraction ex = extract_slip(
              p, variant == "heat" ? SlipVariant::Heat : SlipVariant::Shear, chi, gradient);
          py::dict d;
          d["jump"] = ex.jump;
          d["coefficient"] = ex.coefficient;
          d["decay_rate"] = ex.solution.decay_rate;
          d["iterations"] = ex.solution.iterations;
          d["residual"] = ex.solution.residual;
          return d;
        },
        py::arg("model"), py::arg("variant") = "shear", py::arg("chi") = 1.0,
        py::arg("gradient") = 1.0);

  m.def("steady_couette",
        [](const CollisionModel& c, double u_wall, double epsilon, double chi, double beta,
           int nx, std::array<int, 3> counts) {
          CouetteConfig cfg;
          cfg.u_wall = u_wall;
          cfg.epsilon = epsilon;
          cfg.law = beta <= 0 ? AccommodationLaw::specular() : AccommodationLaw::power_law(chi, beta);
          cfg.nx = nx;
          cfg.lattice_counts = counts;
          CouetteResult r = steady_couette(cfg, c);
          py::dict d;
          d["fields"] = fields_dict(r.fields);
          d["left"] = couette_measurement(r.left);
          d["right"] = couette_measurement(r.right);
          d["converged"] = r.converged;
          d["sweeps"] = r.sweeps;
          return d;
        },
        py::arg("model"), py::arg("u_wall") = 0.5, py::arg("epsilon") = 0.02, py::arg("chi") = 1.0,
        py::arg("beta") = 0.5, py::arg("nx") = 48, py::arg("counts") = std::array<int, 3>{16, 16, 16});

  m.def("steady_couette_cns",
        [](const CollisionModel& c, double u_wall, double epsilon, double chi, double beta,
           int nx) {
          CnsCouetteConfig cfg;
          cfg.u_wall = u_wall;
          cfg.epsilon = epsilon;
          cfg.law = beta <= 0 ? AccommodationLaw::specular() : AccommodationLaw::power_law(chi, beta);
          cfg.nx = nx;
          CnsCouetteResult r = steady_couette_cns(cfg, c);
          py::dict d;
          d["fields"] = fields_dict(r.fields);
          d["converged"] = r.converged;
          return d;
        },
        py::arg("model"), py::arg("u_wall") = 0.3, py::arg("epsilon") = 0.05, py::arg("chi") = 1.0,
        py::arg("beta") = 0.5, py::arg("nx") = 48);
}
