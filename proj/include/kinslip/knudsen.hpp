#pragma once

#include <memory>
#include <vector>

#include "kinslip/collision.hpp"
#include "kinslip/slip_bc.hpp"

namespace kinslip {

// Half-space (Milne-type) problem  (xi.n) d_y f = L_{theta_w} f  on y > 0,
// gamma_- f = L gamma_+ f + h(xi),  f -> 0 as y -> infinity.
// Wall sits at y = 0; ordinates with xi.n < 0 move into the gas (+y).
struct HalfSpaceProblem {
  std::shared_ptr<const VelocityLattice> ordinates;
  WallFrame frame;
  CollisionModel model;
  double rho_B = 1.0;
  std::vector<double> source;  // h on the ordinate lattice (sqrt(mu) factor included)

  double first_cell_mfp = 0.02;
  double ratio = 1.08;
  double ymax_mfp = 90.0;  // >= 20 mean free paths; far tail must clear 1e-4

  int max_iterations = 20000;
  double tol = 1e-11;

  static std::shared_ptr<const VelocityLattice> default_ordinates(int n_normal = 24,
                                                                  int n_tan = 20,
                                                                  double vmax = 6.2);
};

struct LayerSolution {
  std::vector<double> y;       // cell centers (physical units)
  std::vector<double> dy;      // cell widths
  double mfp = 1.0;            // mean free path used for the grid
  std::vector<double> f;       // [cell][ordinate]
  std::vector<double> boundary_trace;           // f at the wall (edge values)
  std::array<double, 4> compatibility_residual{};  // solvability moments of h
  double decay_rate = 0.0;     // fitted, per mean free path
  bool decay_flagged = false;  // non-monotone / plateau tail
  int iterations = 0;
  double residual = 0.0;       // discrete equation residual (max over cells)

  // moment profile of f against a lattice function w(xi) sqrt(mu)
  std::vector<double> moment_profile(const VelocityLattice& lat,
                                     const std::function<double(const Vec3&)>& w) const;
  std::vector<double> norm_profile(const VelocityLattice& lat) const;
};

LayerSolution solve_half_space(const HalfSpaceProblem& p);

// least-squares exponential fit of ||f(y,.)|| over the outer half of the grid
double decay_rate(const LayerSolution& sol, bool* flagged = nullptr);

enum class SlipVariant { Shear, Heat };

// Builds the Knudsen boundary sources of the almost-specular ansatz.
//  Shear: h = sqrt(mu) [ -chi (xi.t) s / sqrt(theta_w) + (2 a/(rho sqrt(theta_w)))(xi.n)(xi.t) S ]
//  Heat:  h = sqrt(mu) [ -chi (|xi|^2/2-2) s / theta_w
//                        + (2 b/(rho sqrt(theta_w)))(xi.n)((|xi|^2-5)/2) q / sqrt(theta_w) ]
std::vector<double> knudsen_source(const HalfSpaceProblem& p, SlipVariant variant, double chi,
                                   double gradient, double jump);

struct SlipExtraction {
  double jump = 0.0;         // compatible jump (u-hat.t or theta-hat)
  double coefficient = 0.0;  // jump for unit gradient = the slip coefficient
  SlipCoefficients entry;    // provenance half-space-solve
  LayerSolution solution;    // at the compatible jump
  double plateau0 = 0.0, plateau1 = 0.0;
};

// Determines the jump for which a decaying solution exists (the problem is
// affine in the jump; two solves eliminate it, the bordered-system Schur
// complement in closed form).
SlipExtraction extract_slip(const HalfSpaceProblem& p, SlipVariant variant, double chi = 1.0,
                            double gradient = 1.0);

}  // namespace kinslip
