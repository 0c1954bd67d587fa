#include "kinslip/slip_bc.hpp"

#include <cmath>
#include <stdexcept>

namespace kinslip {

namespace {

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dfact(int n) {  // (n)!! with (-1)!! = 0!! = 1
  double p = 1;
  for (int k = n; k > 1; k -= 2) p *= k;
  return p;
}

// hemisphere angular moment  int_{w.n>0} w_n^a w_t^b w_s^c dOmega
double hemisphere_moment(int a, int b, int c) {
  if (b % 2 || c % 2) return 0.0;
  // azimuthal: 2 pi (b-1)!!(c-1)!!/(b+c)!!; polar: int_0^{pi/2} cos^a sin^{b+c+1}
  double az = 2.0 * kPi * dfact(b - 1) * dfact(c - 1) / dfact(b + c);
  double po = 0.5 * std::exp(std::lgamma(0.5 * (a + 1)) + std::lgamma(0.5 * (b + c) + 1.0) -
                             std::lgamma(0.5 * (a + b + c + 3)));
  return az * po;
}

double radial_moment(int p, const std::function<double(double)>& radial, double vmax) {
  // int_0^inf R(r) r^p e^{-r^2/2} dr; tabulated radial factors clamp their own
  // argument past the table range (constant-tail convention)
  if (p > 40) throw std::invalid_argument("half-space moment: polynomial growth budget exceeded");
  auto f = [&](double r) {
    double R = radial ? radial(r) : 1.0;
    return R * std::pow(r, p) * std::exp(-0.5 * r * r);
  };
  return composite_gauss(f, 0.0, vmax, 256, 8) + composite_gauss(f, vmax, vmax + 10.0, 40, 8);
}

}  // namespace

void WallFrame::validate() const {
  auto chk = [](double x, const char* what) {
    if (std::abs(x) > 1e-12) throw std::invalid_argument(std::string("WallFrame: ") + what);
  };
  chk(norm2(n) - 1.0, "n not unit");
  chk(norm2(t) - 1.0, "t not unit");
  chk(norm2(s) - 1.0, "s not unit");
  chk(dot(n, t), "n.t != 0");
  chk(dot(n, s), "n.s != 0");
  chk(dot(t, s), "t.s != 0");
  Vec3 txs = cross(t, s);
  chk(txs[0] - n[0], "frame not right-handed");
  chk(txs[1] - n[1], "frame not right-handed");
  chk(txs[2] - n[2], "frame not right-handed");
  if (!(theta_w > 0)) throw std::invalid_argument("WallFrame: theta_w must be positive");
  if (std::abs(dot(u_w, n)) > 1e-12)
    throw std::invalid_argument("WallFrame: u_w must be tangential (u_w.n = 0)");
}

WallFrame WallFrame::slab_left(const Vec3& u_w, double theta_w) {
  WallFrame f;
  f.n = {-1, 0, 0};
  f.t = {0, 1, 0};
  f.s = {0, 0, -1};
  f.u_w = u_w;
  f.theta_w = theta_w;
  f.validate();
  return f;
}

WallFrame WallFrame::slab_right(const Vec3& u_w, double theta_w) {
  WallFrame f;
  f.n = {1, 0, 0};
  f.t = {0, 1, 0};
  f.s = {0, 0, 1};
  f.u_w = u_w;
  f.theta_w = theta_w;
  f.validate();
  return f;
}

double AccommodationLaw::alpha(double eps) const {
  if (kind == Kind::Specular) return 0.0;
  double a = chi * std::pow(eps, beta);
  if (!(a >= 0.0 && a <= 1.0))
    throw std::invalid_argument("accommodation coefficient chi eps^beta outside [0,1]");
  return a;
}

double half_space_poly_moment(int a, int b, int c, const std::function<double(double)>& radial,
                              double vmax) {
  double ang = hemisphere_moment(a, b, c);
  if (ang == 0.0) return 0.0;
  return ang * radial_moment(a + b + c + 2, radial, vmax);
}

double full_space_poly_moment(int a, int b, int c, const std::function<double(double)>& radial,
                              double vmax) {
  if (a % 2) return 0.0;
  return 2.0 * half_space_poly_moment(a, b, c, radial, vmax);
}

double half_space_moment_mass() { return half_space_poly_moment(1, 0, 0); }

double half_space_moment_velocity(const Vec3& uhat, const WallFrame& frame) {
  // tangential parts drop by parity; only (uhat.n) int (xi.n)^2 survives
  return half_space_poly_moment(2, 0, 0) * dot(uhat, frame.n);
}

double half_space_moment_energy(double theta_hat, const WallFrame& frame) {
  // int (xi.n)(|xi|^2-3)/2 e^{-|xi|^2/2} * theta_hat/theta_w
  double m = 0.5 * (half_space_poly_moment(3, 0, 0) + half_space_poly_moment(1, 2, 0) +
                    half_space_poly_moment(1, 0, 2) - 3.0 * half_space_poly_moment(1, 0, 0));
  return m * theta_hat / frame.theta_w;
}

ShearBracket shear_bracket(const CollisionModel& m, double theta_w) {
  (void)theta_w;  // tables are theta-independent for hard spheres; theta enters via the table set
  ShearBracket out;
  auto a = [&](double r) { return m.a_of(r); };
  out.F = radial_moment(5, a, m.table_vmax);
  out.check_n3 = half_space_poly_moment(3, 0, 0, a, m.table_vmax);
  out.check_nt2 = half_space_poly_moment(1, 2, 0, a, m.table_vmax);
  out.check_nr2 = out.check_n3 + out.check_nt2 + half_space_poly_moment(1, 0, 2, a, m.table_vmax);
  return out;
}

std::pair<double, double> slip_coefficients_first(const CollisionModel& m, double theta_w) {
  (void)theta_w;
  const double inv23 = std::pow(2.0 * kPi, -1.5);
  auto a = [&](double r) { return m.a_of(r); };
  auto b = [&](double r) { return m.b_of(r); };
  double bu = -kSqrt2Pi * inv23 * full_space_poly_moment(2, 2, 0, a, m.table_vmax);
  // (xi.n)^2 ((|xi|^2-5)/2)^2 = (1/4) (xi.n)^2 (|xi|^2 - 5)^2, radial expansion below
  auto bth_rad = [&](double r) { return b(r) * 0.25 * (r * r - 5.0) * (r * r - 5.0); };
  double bth = -0.5 * kSqrt2Pi * inv23 * full_space_poly_moment(2, 0, 0, bth_rad, m.table_vmax);
  return {bu, bth};
}

std::pair<double, double> slip_coefficients_critical(const CollisionModel& m, double theta_B) {
  return slip_coefficients_first(m, theta_B);
}

SlipCoefficients compute_slip_coefficients(const CollisionModel& m, double theta_w) {
  SlipCoefficients c;
  std::tie(c.bI_u, c.bI_theta) = slip_coefficients_first(m, theta_w);
  std::tie(c.cI_u, c.cI_theta) = slip_coefficients_critical(m, theta_w);
  c.F_thetaw = shear_bracket(m, theta_w).F;
  c.provenance = Provenance::Quadrature;
  return c;
}

std::array<double, 4> solvability_moments(const std::vector<double>& h, const WallFrame& frame,
                                          const VelocityLattice& lat) {
  std::array<double, 4> mom{0, 0, 0, 0};
  for (size_t k = 0; k < lat.size(); ++k) {
    const Vec3& xi = lat.node(k);
    double xin = dot(xi, frame.n);
    if (xin >= 0.0) continue;
    double w = lat.weight(k) * xin * h[k] * sqrt_maxwellian(xi);
    mom[0] += w;
    mom[1] += w * dot(xi, frame.t);
    mom[2] += w * dot(xi, frame.s);
    mom[3] += w * 0.5 * (norm2(xi) - 3.0);
  }
  return mom;
}

std::string to_string(BCFamilyKind k) {
  switch (k) {
    case BCFamilyKind::CompleteSlip: return "complete-slip";
    case BCFamilyKind::NavierSlipSubLinear: return "navier-slip-sub-linear";
    case BCFamilyKind::NavierSlipCritical: return "navier-slip-critical";
  }
  return "?";
}

double BCFamily::slip_u(double rho) const {
  switch (kind) {
    case BCFamilyKind::CompleteSlip: return 0.0;
    case BCFamilyKind::NavierSlipSubLinear:
      return std::pow(epsilon, 1.0 - beta) * coeffs.bI_u / (chi * rho);
    case BCFamilyKind::NavierSlipCritical: return coeffs.cI_u / (chi * rho);
  }
  return 0.0;
}

double BCFamily::slip_theta(double rho) const {
  switch (kind) {
    case BCFamilyKind::CompleteSlip: return 0.0;
    case BCFamilyKind::NavierSlipSubLinear:
      return std::pow(epsilon, 1.0 - beta) * coeffs.bI_theta / (chi * rho);
    case BCFamilyKind::NavierSlipCritical: return coeffs.cI_theta / (chi * rho);
  }
  return 0.0;
}

BCFamily boundary_family(const AccommodationLaw& law, double eps, const SlipCoefficients& c) {
  BCFamily fam;
  fam.epsilon = eps;
  fam.coeffs = c;
  if (law.kind == AccommodationLaw::Kind::Specular) {
    fam.kind = BCFamilyKind::CompleteSlip;
    return fam;
  }
  if (!(law.beta > 0.0))
    throw std::invalid_argument(
        "boundary_family: beta <= 0 is the alpha = O(1) regime (Aoki et al. family), "
        "not implemented here");
  (void)law.alpha(eps);  // validates chi eps^beta in [0,1]
  fam.chi = law.chi;
  fam.beta = law.beta;
  if (law.beta > 1.0)
    fam.kind = BCFamilyKind::CompleteSlip;
  else if (law.beta == 1.0)
    fam.kind = BCFamilyKind::NavierSlipCritical;
  else
    fam.kind = BCFamilyKind::NavierSlipSubLinear;
  return fam;
}

namespace {

// [(grad u + grad u^T) n]^tan and grad theta.n in the frame
void wall_gradients(const FluidGradients& g, const WallFrame& fr, double& shear_t, double& shear_s,
                    double& dtheta_n) {
  Vec3 Sn{0, 0, 0};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) Sn[i] += (g.grad_u[i][j] + g.grad_u[j][i]) * fr.n[j];
  shear_t = dot(Sn, fr.t);
  shear_s = dot(Sn, fr.s);
  dtheta_n = dot(g.grad_theta, fr.n);
}

}  // namespace

std::array<double, 3> bc_residual(const BCFamily& fam, const FluidState& s,
                                  const FluidGradients& g, const WallFrame& fr) {
  Vec3 du{s.u[0] - fr.u_w[0], s.u[1] - fr.u_w[1], s.u[2] - fr.u_w[2]};
  double shear_t, shear_s, dth;
  wall_gradients(g, fr, shear_t, shear_s, dth);
  std::array<double, 3> r;
  r[0] = dot(du, fr.n);
  if (fam.kind == BCFamilyKind::CompleteSlip) {
    r[1] = std::hypot(shear_t, shear_s);
    r[2] = dth;
    return r;
  }
  const double su = fam.slip_u(s.rho), st = fam.slip_theta(s.rho);
  double rt = dot(du, fr.t) - su * shear_t;
  double rs = dot(du, fr.s) - su * shear_s;
  r[1] = std::hypot(rt, rs);
  double dun2 = norm2(du);
  r[2] = (s.theta - fr.theta_w) - st * dth -
         (fam.has_kinetic_energy_offset() ? 0.25 * dun2 : 0.0);
  return r;
}

double specular_defect(const FluidState& s, const FluidGradients& g, const WallFrame& fr,
                       const CollisionModel& m, const VelocityLattice& lat) {
  Vec3 du{s.u[0] - fr.u_w[0], s.u[1] - fr.u_w[1], s.u[2] - fr.u_w[2]};
  if (std::abs(dot(du, fr.n)) > 1e-10)
    throw std::invalid_argument("specular_defect: requires (u-u_w).n = 0 at the wall");
  double sup = 0.0;
  for (size_t k = 0; k < lat.size(); ++k) {
    const Vec3& v = lat.node(k);
    double vn = dot({v[0] - fr.u_w[0], v[1] - fr.u_w[1], v[2] - fr.u_w[2]}, fr.n);
    if (vn >= 0.0) continue;  // incoming set only
    Vec3 rv{v[0] - 2.0 * vn * fr.n[0], v[1] - 2.0 * vn * fr.n[1], v[2] - 2.0 * vn * fr.n[2]};
    double d = first_order_G(s, g, m, v) - first_order_G(s, g, m, rv);
    sup = std::max(sup, std::abs(d));
  }
  return sup;
}

}  // namespace kinslip
