#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "kinslip/lattice.hpp"
#include "kinslip/numerics.hpp"

namespace kinslip {

// Global Maxwellian mu(v) = (2 pi)^{-3/2} exp(-|v|^2/2).
inline double global_maxwellian(const Vec3& v) {
  return std::pow(2.0 * kPi, -1.5) * std::exp(-0.5 * norm2(v));
}
inline double sqrt_maxwellian(const Vec3& v) {
  return std::pow(2.0 * kPi, -0.75) * std::exp(-0.25 * norm2(v));
}

// Hard-sphere collision frequency for the kernel |(v1-v).omega| with the full
// S^2 measure: nu(v) = 2 pi E|Z - v|, Z standard normal. Closed form.
double hs_collision_frequency_raw(double speed);

// nu(0) for the raw hard-sphere kernel: 4 sqrt(2 pi).
inline constexpr double kHsNuZeroRaw = 4.0 * 2.5066282746310002;

enum class CollisionKind { BgkConstantNu, BgkMatchedNu, HardSphereLinearized };

CollisionKind collision_kind_from_string(const std::string& s);
std::string to_string(CollisionKind k);

struct ChapmanEnskogTables {
  std::vector<double> r;  // radial grid, [0, v_max], 257 points
  std::vector<double> a;  // shear function a(r)
  std::vector<double> b;  // heat function b(r)
};

// Collision model: BGK relaxation variants and the Galerkin-projected
// linearized hard-sphere operator, with tabulated Chapman-Enskog functions.
struct CollisionModel {
  CollisionKind kind = CollisionKind::BgkConstantNu;
  double nu0 = 1.0;        // reference collision frequency nu(0)
  double theta_ref = 1.0;  // temperature the tables were built at
  int sonine_order = 3;    // radial trial functions per sector (hard sphere)
  double table_vmax = 6.2;

  MonotoneCubic a_interp, b_interp;
  ChapmanEnskogTables tables;
  std::vector<double> a_coeffs, b_coeffs;  // Sonine coefficients (hard sphere)
  double matched_mu1_ = 0.0;               // mu_hs(1), set for the matched-nu variant

  double a_of(double r) const { return a_interp(r); }
  double b_of(double r) const { return b_interp(r); }

  // BGK relaxation rate at local state; matched variant reproduces the
  // hard-sphere viscosity mu(theta) = mu_hs(1) sqrt(theta).
  double nu_local(double rho, double theta) const;

  static CollisionModel bgk_constant(double nu0, double theta_ref = 1.0, double vmax = 6.2);
  static CollisionModel bgk_matched(double theta_ref = 1.0, double vmax = 6.2, int hs_order = 3);
  static CollisionModel hard_sphere(double nu0 = kHsNuZeroRaw, int order = 3, double vmax = 6.2);
  static CollisionModel from_tables(CollisionKind kind, double nu0, std::vector<double> r,
                                    std::vector<double> a, std::vector<double> b);
};

// nu(v) for a model (depends on |v| only).
double collision_frequency(const Vec3& v, const CollisionModel& m);

// Chapman-Enskog scalar functions a(r), b(r) at a reference temperature, from
// the defining relations L(sqrt(mu) Ahat) = sqrt(mu) A, L(sqrt(mu) Bhat) = sqrt(mu) B.
ChapmanEnskogTables chapman_enskog_functions(const CollisionModel& m, double theta_ref);

// Viscosity / heat conductivity from the model tables:
//   mu(theta)    = (2/15) sqrt(theta) int a(r) r^6 e^{-r^2/2} dr / sqrt(2 pi)
//   kappa(theta) = (1/6)  sqrt(theta) int b(r) r^4 (r^2-5)^2 e^{-r^2/2} dr / sqrt(2 pi)
double transport_mu(const CollisionModel& m, double theta);
double transport_kappa(const CollisionModel& m, double theta);

// Five collision invariants on a lattice, orthonormalized under the discrete
// L^2_v inner product (Gram = identity to 1e-10).
class InvariantBasis {
 public:
  explicit InvariantBasis(const VelocityLattice& lat);
  const std::vector<double>& fn(int k) const { return e_[k]; }
  std::array<double, 5> coefficients(const std::vector<double>& f) const;
  std::vector<double> project(const std::vector<double>& f) const;
  void project_out(std::vector<double>& f) const;  // f <- (I-P) f
  const VelocityLattice& lattice() const { return lat_; }

 private:
  const VelocityLattice& lat_;
  std::array<std::vector<double>, 5> e_;
};

// Linearized collision operator bound to a lattice.
//  BGK:         L f = nu (f - P f)
//  hard sphere: L f = Pi L_W Pi f + (I-Pi) nu(v) (I-Pi) f, where W is the
//  Sonine x spherical-harmonic subspace and L_W the Dirichlet-form bracket
//  matrix, so conservation, symmetry and the exact kernel hold discretely.
class LinearizedOperator {
 public:
  LinearizedOperator(const VelocityLattice& lat, const CollisionModel& m, double theta_ref = 1.0);

  std::vector<double> apply(const std::vector<double>& f) const;
  const InvariantBasis& invariants() const { return inv_; }
  const VelocityLattice& lattice() const { return lat_; }
  double nu_max() const { return nu_max_; }
  double nu_at(size_t k) const { return nu_[k]; }

 private:
  const VelocityLattice& lat_;
  CollisionKind kind_;
  double nu_bgk_ = 1.0;
  InvariantBasis inv_;
  std::vector<double> nu_;                  // nu(v) per node (hard sphere)
  std::vector<std::vector<double>> wbasis_;  // W basis on nodes
  std::vector<double> gram_inv_;             // dim x dim, row-major
  std::vector<double> lw_;                   // bracket matrix, row-major
  int dim_ = 0;
  double nu_max_ = 1.0;
};

// Free-function forms of the spec operations.
std::vector<double> project_invariants(const std::vector<double>& f, const VelocityLattice& lat);
std::vector<double> apply_linearized_L(const std::vector<double>& f, const VelocityLattice& lat,
                                       const CollisionModel& m, double theta_ref = 1.0);

// Dirichlet-form bracket matrices of the raw hard-sphere operator over the
// Sonine radial bases; exposed for the tests' order-refinement checks.
struct HardSphereBrackets {
  std::vector<double> lambda_a, rhs_a;  // tensor sector, K x K row-major + K
  std::vector<double> lambda_b, rhs_b;  // vector sector (b-parameterized)
  std::vector<double> lambda_s;         // scalar sector
  int order = 0;
};
const HardSphereBrackets& hard_sphere_brackets(int order);

}  // namespace kinslip
