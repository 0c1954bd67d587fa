#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "kinslip/collision.hpp"
#include "kinslip/lattice.hpp"

namespace kinslip {

using Mat3 = std::array<std::array<double, 3>, 3>;

struct FluidState {
  double rho = 1.0;
  Vec3 u{0, 0, 0};
  double theta = 1.0;
};

struct FluidGradients {
  Mat3 grad_u{};     // (grad_u)[i][j] = d_i u_j
  Vec3 grad_theta{0, 0, 0};
};

struct RemainderWeight {
  double k = 4.0;  // w_k(v) = (|v|^2+1)^{k/2}; k >= 7/2 for the theorem-rate check
};

// M = rho (2 pi theta)^{-3/2} exp(-|v-u|^2 / 2 theta)
double local_maxwellian(const FluidState& s, const Vec3& v);

// sigma(u) = grad u + (grad u)^T - (2/3) div(u) I
Mat3 traceless_deformation(const Mat3& grad_u);

// G = -M ( (1/2) Ahat(V):sigma(u) + Bhat(V) . grad theta / sqrt(theta) ),
// V = (v-u)/sqrt(theta), Ahat = a(|V|) A(V)/(rho sqrt(theta)), likewise Bhat.
// Sets *range_warn when |V| exceeded the table range (tail held constant).
double first_order_G(const FluidState& s, const FluidGradients& g, const CollisionModel& m,
                     const Vec3& v, bool* range_warn = nullptr);

// (mu, kappa) from the model tables at temperature theta; both > 0.
std::pair<double, double> transport_coefficients(const CollisionModel& m, double theta);

// Discrete kinetic state on slab grid x velocity lattice.
struct KineticDistribution {
  std::vector<double> x;  // cell centers, uniform on [0,1]
  std::shared_ptr<const VelocityLattice> lattice;
  std::vector<double> f;  // [cell][node], row-major
  double time = 0.0;

  size_t ncell() const { return x.size(); }
  double dx() const { return x.size() > 1 ? x[1] - x[0] : 1.0; }
  double* cell(size_t j) { return f.data() + j * lattice->size(); }
  const double* cell(size_t j) const { return f.data() + j * lattice->size(); }
};

// F = M + eps G on one lattice; the discrete invariant moments of G are
// projected out so moments(F) = moments(M) exactly.
std::vector<double> reconstruct_cell(const FluidState& s, const FluidGradients& g, double eps,
                                     const CollisionModel& m, const VelocityLattice& lat);

struct ReconstructReport {
  double min_value = 0.0;     // pointwise positivity is reported, not enforced
  bool range_warning = false;
};

KineticDistribution reconstruct(const std::vector<double>& xcenters,
                                const std::vector<FluidState>& states,
                                const std::vector<FluidGradients>& grads, double eps,
                                const CollisionModel& m,
                                std::shared_ptr<const VelocityLattice> lat,
                                ReconstructReport* report = nullptr);

struct RemainderNorms {
  double l2 = 0.0;      // ||(F-M)/sqrt(mu)||_{L^2_{x,v}}
  double linf_w = 0.0;  // sup w_k |F-M|/sqrt(mu)
  std::optional<double> r_norm;  // ||(F-M-eps G)/(eps^2 sqrt(mu))||_{L^2}, eps > 0 only
};

RemainderNorms remainder_norms(const KineticDistribution& F, const std::vector<FluidState>& states,
                               const std::vector<FluidGradients>& grads, double eps,
                               const RemainderWeight& w, const CollisionModel& m,
                               bool want_r_norm = true);

}  // namespace kinslip
