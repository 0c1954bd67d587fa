#pragma once

#include <optional>

#include "kinslip/chapman_enskog.hpp"
#include "kinslip/slip_bc.hpp"

namespace kinslip {

// (rho, u, theta) profiles on the slab grid.
struct SlabFields {
  std::vector<double> x;
  std::vector<double> rho, u1, u2, u3, theta;
  double time = 0.0;
  size_t size() const { return x.size(); }
  void resize(size_t n) {
    rho.assign(n, 1.0);
    u1.assign(n, 0.0);
    u2.assign(n, 0.0);
    u3.assign(n, 0.0);
    theta.assign(n, 1.0);
  }
};

struct WallPair {
  WallFrame left = WallFrame::slab_left();
  WallFrame right = WallFrame::slab_right();
  AccommodationLaw law_left = AccommodationLaw::specular();
  AccommodationLaw law_right = AccommodationLaw::specular();
};

// Cumulative fluxes absorbed by the walls (gas losses), one entry per wall.
struct WallExchangeLedger {
  std::array<double, 2> mass{0, 0};
  std::array<Vec3, 2> momentum{Vec3{0, 0, 0}, Vec3{0, 0, 0}};
  std::array<double, 2> energy{0, 0};
};

// Maxwell reflection: incoming = (1-alpha) specular + alpha flux-matched diffuse.
// `trace` holds wall-face values on the outgoing set {(v-u_w).n > 0}; the
// incoming set is filled and the outgoing entries are preserved.
std::vector<double> maxwell_reflect(const std::vector<double>& trace, const WallFrame& wall,
                                    const AccommodationLaw& law, double eps,
                                    const VelocityLattice& lat);

// One Strang step: transport(dt/2) - implicit BGK relaxation(dt) - transport(dt/2).
// Periodic when `walls` is empty. Throws on CFL violation dt > 0.9 dx / v_max.
void step(KineticDistribution& state, double dt, double eps, const CollisionModel& model,
          const std::optional<WallPair>& walls, WallExchangeLedger* ledger = nullptr);

// Moment extraction; throws on vacuum cells (rho < 1e-12).
SlabFields moments(const KineticDistribution& state);

struct Conserved {
  double mass = 0;
  Vec3 momentum{0, 0, 0};
  double energy = 0;  // int |v|^2 F
};
Conserved conserved_totals(const KineticDistribution& state);

// discrete H = sum F log F (cells x nodes, weighted)
double h_functional(const KineticDistribution& state);

struct CouetteConfig {
  double u_wall = 0.5;       // walls move with -+ u_wall * t-hat
  double theta_left = 1.0, theta_right = 1.0;
  double epsilon = 0.02;
  AccommodationLaw law = AccommodationLaw::power_law(1.0, 0.5);
  int nx = 96;
  std::array<int, 3> lattice_counts{24, 24, 24};
  double v_max = 6.2;
  LatticeScheme scheme = LatticeScheme::UniformCartesian;
  int max_sweeps = 4000;
  double tol = 1e-9;
  double fit_lo = 0.25, fit_hi = 0.75;  // bulk window for slip extrapolation
};

struct WallMeasurement {
  double slip_t = 0;      // [u - u_w].t extrapolated from the bulk profile
  double shear_t = 0;     // [(grad u + grad u^T) n].t from the bulk profile
  double ratio = 0;       // slip/shear
  double theta_jump = 0;  // theta(wall) - theta_w
  double dtheta_n = 0;    // grad theta . n
  double rho_wall = 0;
  double u_slip_sq = 0;   // |u - u_w|^2 at the wall
};

struct CouetteResult {
  KineticDistribution state;
  SlabFields fields;
  WallMeasurement left, right;
  int sweeps = 0;
  double residual = 0;
  bool converged = false;
};

// Steady Couette via pseudo-transient implicit upwind sweeps with Anderson
// acceleration; returns the steady state and per-wall slip measurements.
CouetteResult steady_couette(const CouetteConfig& cfg, const CollisionModel& model);

}  // namespace kinslip
