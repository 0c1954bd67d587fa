#pragma once

#include <functional>
#include <string>

#include "kinslip/chapman_enskog.hpp"
#include "kinslip/collision.hpp"
#include "kinslip/lattice.hpp"

namespace kinslip {

// Orthonormal wall frame; {t, s, n} right-handed, u_w tangential in slab geometry.
struct WallFrame {
  Vec3 n{1, 0, 0};   // outward unit normal
  Vec3 t{0, 1, 0};   // tangent pair
  Vec3 s{0, 0, 1};
  Vec3 u_w{0, 0, 0};
  double theta_w = 1.0;

  void validate() const;
  // slab walls: gas on [0,1], outward normal -e1 at x=0 and +e1 at x=1
  static WallFrame slab_left(const Vec3& u_w = {0, 0, 0}, double theta_w = 1.0);
  static WallFrame slab_right(const Vec3& u_w = {0, 0, 0}, double theta_w = 1.0);
};

struct AccommodationLaw {
  enum class Kind { Specular, PowerLaw } kind = Kind::Specular;
  double chi = 1.0;
  double beta = 1.0;
  double alpha(double eps) const;  // 0 or chi eps^beta, must land in [0,1]
  static AccommodationLaw specular() { return {}; }
  static AccommodationLaw power_law(double chi, double beta) {
    return {Kind::PowerLaw, chi, beta};
  }
};

enum class Provenance { Quadrature, HalfSpaceSolve };

struct SlipCoefficients {
  double bI_u = 0, bI_theta = 0;  // first family (0 < beta < 1), both < 0
  double cI_u = 0, cI_theta = 0;  // critical family (beta = 1), both < 0
  double F_thetaw = 0;            // shear bracket
  Provenance provenance = Provenance::Quadrature;
};

// ---- half-space moment engine ------------------------------------------------
// integral over {xi.n > 0} of R(|xi|) (xi.n)^a (xi.t)^b (xi.s)^c e^{-|xi|^2/2};
// hemisphere angular moments are analytic, the radial factor is 1D quadrature.
double half_space_poly_moment(int a, int b, int c,
                              const std::function<double(double)>& radial = nullptr,
                              double table_vmax = 6.2);
// full-space variant (both hemispheres)
double full_space_poly_moment(int a, int b, int c,
                              const std::function<double(double)>& radial = nullptr,
                              double table_vmax = 6.2);

enum class HalfSpaceMomentKind { MassFlux, TangentialShearFlux, EnergyFlux };

// The named wall moments of the Taylor expansion:
//   mass-flux      -> 2 pi
//   velocity-flux  -> (2 pi)^{3/2}/2 (uhat.n)
//   energy-flux    -> pi thetahat/theta_w
double half_space_moment_mass();
double half_space_moment_velocity(const Vec3& uhat, const WallFrame& frame);
double half_space_moment_energy(double theta_hat, const WallFrame& frame);

struct ShearBracket {
  double F = 0;  // F_{theta_w} = int_0^inf r^5 e^{-r^2/2} a(theta_w, r) dr
  double check_n3 = 0, check_nt2 = 0, check_nr2 = 0;  // (pi/2)F, (pi/4)F, pi F
};
ShearBracket shear_bracket(const CollisionModel& m, double theta_w);

// Slip coefficients by quadrature:
//   bI_u     = -sqrt(2 pi) int a (xi.n)^2 (xi.t)^2 mu dxi
//   bI_theta = -(sqrt(2 pi)/2) int b (xi.n)^2 ((|xi|^2-5)/2)^2 mu dxi
std::pair<double, double> slip_coefficients_first(const CollisionModel& m, double theta_w);
std::pair<double, double> slip_coefficients_critical(const CollisionModel& m, double theta_B);
SlipCoefficients compute_slip_coefficients(const CollisionModel& m, double theta_w);

// Four solvability moments int_{xi.n<0} (xi.n) (1, xi.t, xi.s, (|xi|^2-3)/2) h sqrt(mu) dxi
// of a lattice source h.
std::array<double, 4> solvability_moments(const std::vector<double>& h, const WallFrame& frame,
                                          const VelocityLattice& lat);

// ---- boundary-condition families ----------------------------------------------
enum class BCFamilyKind { CompleteSlip, NavierSlipSubLinear, NavierSlipCritical };

std::string to_string(BCFamilyKind k);

struct BCFamily {
  BCFamilyKind kind = BCFamilyKind::CompleteSlip;
  double epsilon = 0.0;
  double chi = 0.0;
  double beta = 0.0;
  SlipCoefficients coeffs;

  // signed slip factors: [u-u_w]^tan = (slip_u/rho) [(grad u + grad u^T) n]^tan
  double slip_u(double rho) const;
  double slip_theta(double rho) const;
  bool has_kinetic_energy_offset() const { return kind == BCFamilyKind::NavierSlipCritical; }
};

BCFamily boundary_family(const AccommodationLaw& law, double eps, const SlipCoefficients& c);

// Residual of the family's boundary relations for given wall-adjacent fields:
// components (normal velocity, tangential slip relation, temperature relation).
std::array<double, 3> bc_residual(const BCFamily& fam, const FluidState& s,
                                  const FluidGradients& g, const WallFrame& frame);

// sup over incoming lattice nodes of |(gamma_- - L gamma_+) G|; zero iff the
// complete-slip conditions hold. Requires (u-u_w).n = 0 at the wall.
double specular_defect(const FluidState& s, const FluidGradients& g, const WallFrame& frame,
                       const CollisionModel& m, const VelocityLattice& lat);

}  // namespace kinslip
