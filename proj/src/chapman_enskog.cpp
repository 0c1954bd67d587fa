#include "kinslip/chapman_enskog.hpp"

#include <cmath>
#include <stdexcept>

namespace kinslip {

double local_maxwellian(const FluidState& s, const Vec3& v) {
  if (!(s.rho > 0.0) || !(s.theta > 0.0))
    throw std::invalid_argument("local_maxwellian: rho, theta must be positive");
  Vec3 c{v[0] - s.u[0], v[1] - s.u[1], v[2] - s.u[2]};
  return s.rho * std::pow(2.0 * kPi * s.theta, -1.5) * std::exp(-0.5 * norm2(c) / s.theta);
}

Mat3 traceless_deformation(const Mat3& g) {
  double div = g[0][0] + g[1][1] + g[2][2];
  Mat3 s{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s[i][j] = g[i][j] + g[j][i];
  for (int i = 0; i < 3; ++i) s[i][i] -= (2.0 / 3.0) * div;
  return s;
}

double first_order_G(const FluidState& s, const FluidGradients& g, const CollisionModel& m,
                     const Vec3& v, bool* range_warn) {
  const double sqth = std::sqrt(s.theta);
  const Vec3 V{(v[0] - s.u[0]) / sqth, (v[1] - s.u[1]) / sqth, (v[2] - s.u[2]) / sqth};
  const double r = std::sqrt(norm2(V));
  if (range_warn && r > m.table_vmax) *range_warn = true;

  const Mat3 sig = traceless_deformation(g.grad_u);
  const double V2 = norm2(V);
  double AdotSig = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double Aij = V[i] * V[j] - (i == j ? V2 / 3.0 : 0.0);
      AdotSig += Aij * sig[i][j];
    }
  double BdotT = 0.5 * (V2 - 5.0) *
                 (V[0] * g.grad_theta[0] + V[1] * g.grad_theta[1] + V[2] * g.grad_theta[2]) / sqth;
  const double M = local_maxwellian(s, v);
  const double pref = 1.0 / (s.rho * sqth);
  return -M * (0.5 * m.a_of(r) * pref * AdotSig + m.b_of(r) * pref * BdotT);
}

std::pair<double, double> transport_coefficients(const CollisionModel& m, double theta) {
  return {transport_mu(m, theta), transport_kappa(m, theta)};
}

namespace {

std::vector<double> reconstruct_cell_with(const FluidState& s, const FluidGradients& g, double eps,
                                          const CollisionModel& m, const VelocityLattice& lat,
                                          const InvariantBasis& basis) {
  const size_t n = lat.size();
  std::vector<double> F(n);
  if (eps == 0.0) {
    for (size_t k = 0; k < n; ++k) F[k] = local_maxwellian(s, lat.node(k));
    return F;
  }
  std::vector<double> gw(n);  // G / sqrt(mu)
  for (size_t k = 0; k < n; ++k)
    gw[k] = first_order_G(s, g, m, lat.node(k)) / sqrt_maxwellian(lat.node(k));
  basis.project_out(gw);  // exact discrete moment-freeness of G
  for (size_t k = 0; k < n; ++k)
    F[k] = local_maxwellian(s, lat.node(k)) + eps * gw[k] * sqrt_maxwellian(lat.node(k));
  return F;
}

}  // namespace

std::vector<double> reconstruct_cell(const FluidState& s, const FluidGradients& g, double eps,
                                     const CollisionModel& m, const VelocityLattice& lat) {
  if (eps == 0.0) {
    std::vector<double> F(lat.size());
    for (size_t k = 0; k < lat.size(); ++k) F[k] = local_maxwellian(s, lat.node(k));
    return F;
  }
  InvariantBasis basis(lat);
  return reconstruct_cell_with(s, g, eps, m, lat, basis);
}

KineticDistribution reconstruct(const std::vector<double>& xcenters,
                                const std::vector<FluidState>& states,
                                const std::vector<FluidGradients>& grads, double eps,
                                const CollisionModel& m,
                                std::shared_ptr<const VelocityLattice> lat,
                                ReconstructReport* report) {
  if (states.size() != xcenters.size() || grads.size() != xcenters.size())
    throw std::invalid_argument("reconstruct: mismatched slab arrays");
  KineticDistribution F;
  F.x = xcenters;
  F.lattice = lat;
  F.f.resize(xcenters.size() * lat->size());
  double minv = 1e300;
  bool warn = false;
  InvariantBasis basis(*lat);
  for (size_t j = 0; j < xcenters.size(); ++j) {
    for (size_t k = 0; k < lat->size(); ++k) {
      bool w = false;
      (void)first_order_G(states[j], grads[j], m, lat->node(k), &w);
      warn = warn || w;
    }
    auto cell = reconstruct_cell_with(states[j], grads[j], eps, m, *lat, basis);
    for (size_t k = 0; k < lat->size(); ++k) {
      F.cell(j)[k] = cell[k];
      minv = std::min(minv, cell[k]);
    }
  }
  if (report) {
    report->min_value = minv;
    report->range_warning = warn;
  }
  return F;
}

RemainderNorms remainder_norms(const KineticDistribution& F, const std::vector<FluidState>& states,
                               const std::vector<FluidGradients>& grads, double eps,
                               const RemainderWeight& w, const CollisionModel& m,
                               bool want_r_norm) {
  const auto& lat = *F.lattice;
  const size_t n = lat.size();
  const double dx = F.ncell() > 0 ? 1.0 / F.ncell() : 1.0;
  RemainderNorms out;
  double l2 = 0.0, rn = 0.0;
  if (want_r_norm && eps == 0.0)
    throw std::invalid_argument("remainder_norms: R-norm undefined at eps = 0");
  InvariantBasis basis(lat);
  for (size_t j = 0; j < F.ncell(); ++j) {
    auto Mcell = reconstruct_cell_with(states[j], grads[j], 0.0, m, lat, basis);
    std::vector<double> MG;
    if (want_r_norm) MG = reconstruct_cell_with(states[j], grads[j], eps, m, lat, basis);
    for (size_t k = 0; k < n; ++k) {
      const Vec3& v = lat.node(k);
      const double sq = sqrt_maxwellian(v);
      const double d = (F.cell(j)[k] - Mcell[k]) / sq;
      l2 += dx * lat.weight(k) * d * d;
      const double wk = std::pow(norm2(v) + 1.0, 0.5 * w.k);
      out.linf_w = std::max(out.linf_w, wk * std::abs(d));
      if (want_r_norm) {
        const double r = (F.cell(j)[k] - MG[k]) / (eps * eps * sq);
        rn += dx * lat.weight(k) * r * r;
      }
    }
  }
  out.l2 = std::sqrt(l2);
  if (want_r_norm) out.r_norm = std::sqrt(rn);
  return out;
}

}  // namespace kinslip
