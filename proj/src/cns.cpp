#include "kinslip/cns.hpp"

#include <cmath>
#include <stdexcept>

namespace kinslip {

namespace {

inline double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// Thomas solve, arrays are modified.
void thomas(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c,
            std::vector<double>& d) {
  const size_t n = b.size();
  for (size_t i = 1; i < n; ++i) {
    double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  d[n - 1] /= b[n - 1];
  for (size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

// Cyclic tridiagonal (Sherman-Morrison); corner couplings acorn = A(0,n-1), ccorn = A(n-1,0).
void cyclic_thomas(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                   std::vector<double> d, double acorn, double ccorn, std::vector<double>& out) {
  const size_t n = b.size();
  const double gamma = -b[0];
  b[0] -= gamma;
  b[n - 1] -= acorn * ccorn / gamma;
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = ccorn;
  auto b1 = b;
  auto a1 = a;
  auto c1 = c;
  thomas(a1, b1, c1, d);
  thomas(a, b, c, u);
  double fact = (d[0] + acorn * d[n - 1] / gamma) / (1.0 + u[0] + acorn * u[n - 1] / gamma);
  out.resize(n);
  for (size_t i = 0; i < n; ++i) out[i] = d[i] - fact * u[i];
}

struct GhostAffine {
  double A = 0, B = 0;  // ghost = A + B * boundary_cell
};

// (g+c)/2 - wall - offset = slip (g-c)/dx
GhostAffine slip_ghost(double slip, double wall_value, double offset, double dx) {
  double den = 0.5 - slip / dx;
  return {(wall_value + offset) / den, -(0.5 + slip / dx) / den};
}

struct Cons {
  double rho, m1, m2, m3, E;
};

inline Cons to_cons(double rho, double u1, double u2, double u3, double th) {
  double q2 = u1 * u1 + u2 * u2 + u3 * u3;
  return {rho, rho * u1, rho * u2, rho * u3, 0.5 * rho * q2 + 1.5 * rho * th};
}

inline void from_cons(const Cons& U, double& rho, double& u1, double& u2, double& u3, double& th) {
  rho = U.rho;
  u1 = U.m1 / U.rho;
  u2 = U.m2 / U.rho;
  u3 = U.m3 / U.rho;
  th = (U.E - 0.5 * (U.m1 * U.m1 + U.m2 * U.m2 + U.m3 * U.m3) / U.rho) / (1.5 * U.rho);
}

}  // namespace

GhostState apply_bc(const SlabFields& f, const BCFamily& fam, const WallFrame& frame, bool left,
                    double dx) {
  if (fam.kind != BCFamilyKind::CompleteSlip) {
    if (fam.slip_u(1.0) > 0.0 || fam.slip_theta(1.0) > 0.0)
      throw std::invalid_argument("apply_bc: slip factors must carry the negative-coefficient sign");
  }
  const size_t j = left ? 0 : f.size() - 1;
  GhostState g;
  g.rho = f.rho[j];
  g.u1 = -f.u1[j];  // u.n = 0 at the wall exactly

  const double uw2 = frame.u_w[1], uw3 = frame.u_w[2];
  if (fam.kind == BCFamilyKind::CompleteSlip) {
    g.u2 = f.u2[j];
    g.u3 = f.u3[j];
    g.theta = f.theta[j];
  } else {
    const double su = fam.slip_u(f.rho[j]);
    auto g2 = slip_ghost(su, uw2, 0.0, dx);
    auto g3 = slip_ghost(su, uw3, 0.0, dx);
    g.u2 = g2.A + g2.B * f.u2[j];
    g.u3 = g3.A + g3.B * f.u3[j];
    double w2 = 0.5 * (g.u2 + f.u2[j]) - uw2, w3 = 0.5 * (g.u3 + f.u3[j]) - uw3;
    double offset = fam.has_kinetic_energy_offset() ? 0.25 * (w2 * w2 + w3 * w3) : 0.0;
    auto gt = slip_ghost(fam.slip_theta(f.rho[j]), frame.theta_w, offset, dx);
    g.theta = gt.A + gt.B * f.theta[j];
  }
  g.wall_u2 = 0.5 * (g.u2 + f.u2[j]);
  g.wall_u3 = 0.5 * (g.u3 + f.u3[j]);
  g.wall_theta = 0.5 * (g.theta + f.theta[j]);
  if (f.size() > 1) {
    const size_t j2 = left ? 1 : f.size() - 2;
    g.wall_pressure = 1.5 * f.rho[j] * f.theta[j] - 0.5 * f.rho[j2] * f.theta[j2];
  } else {
    g.wall_pressure = f.rho[j] * f.theta[j];
  }
  return g;
}

EnergyDiagnostics energy_monitor(const std::vector<SlabFields>& hist, double eps) {
  if (hist.size() < 2) throw std::invalid_argument("energy_monitor: need >= 2 snapshots");
  EnergyDiagnostics d;
  for (size_t m = 0; m < hist.size(); ++m) {
    const auto& f = hist[m];
    const size_t n = f.size();
    const double dx = 1.0 / n;
    d.t.push_back(f.time);
    double dev = 0, grad = 0, hess = 0;
    auto acc = [&](const std::vector<double>& v, double ref) {
      for (size_t j = 0; j < n; ++j) dev += (v[j] - ref) * (v[j] - ref) * dx;
      for (size_t j = 1; j + 1 < n; ++j) {
        double gx = (v[j + 1] - v[j - 1]) / (2 * dx);
        double hx = (v[j + 1] - 2 * v[j] + v[j - 1]) / (dx * dx);
        grad += gx * gx * dx;
        hess += hx * hx * dx;
      }
    };
    acc(f.rho, 1.0);
    acc(f.u1, 0.0);
    acc(f.u2, 0.0);
    acc(f.u3, 0.0);
    acc(f.theta, 1.0);
    d.dev.push_back(std::sqrt(dev));
    d.grad.push_back(std::sqrt(grad));
    d.eps_hess.push_back(eps * std::sqrt(hess));
    if (m > 0) {
      const auto& p = hist[m - 1];
      double dt = f.time - p.time, s = 0;
      auto accd = [&](const std::vector<double>& a, const std::vector<double>& b) {
        for (size_t j = 0; j < n; ++j) s += (a[j] - b[j]) * (a[j] - b[j]) * dx;
      };
      accd(f.rho, p.rho);
      accd(f.u1, p.u1);
      accd(f.u2, p.u2);
      accd(f.u3, p.u3);
      accd(f.theta, p.theta);
      d.dev_dt.push_back(std::sqrt(s) / std::max(dt, 1e-300));
    }
  }
  return d;
}

bool EnergyDiagnostics::bounded(double mult) const {
  auto chk = [mult](const std::vector<double>& v) {
    if (v.empty()) return true;
    double ref = std::max(v.front(), 1e-14);
    for (double x : v)
      if (x > mult * ref) return false;
    return true;
  };
  return chk(dev) && chk(grad) && chk(eps_hess);
}

CnsSolver::CnsSolver(SlabFields init, CnsConfig cfg, CollisionModel model)
    : f_(std::move(init)), cfg_(std::move(cfg)), model_(std::move(model)) {
  dx_ = 1.0 / f_.size();
  // tables are theta-independent, so mu(theta) = mu(1) sqrt(theta) exactly
  mu1_ = transport_mu(model_, 1.0);
  kappa1_ = transport_kappa(model_, 1.0);
  for (size_t j = 0; j < f_.size(); ++j)
    if (!(f_.rho[j] > 0) || !(f_.theta[j] > 0))
      throw std::invalid_argument("CnsSolver: rho, theta must be positive");
  if (!cfg_.periodic) {
    (void)apply_bc(f_, cfg_.bc_left, cfg_.wall_left, true, dx_);
    (void)apply_bc(f_, cfg_.bc_right, cfg_.wall_right, false, dx_);
  }
}

double CnsSolver::advective_dt() const {
  double lmax = 1e-14;
  for (size_t j = 0; j < f_.size(); ++j)
    lmax = std::max(lmax, std::abs(f_.u1[j]) + std::sqrt(5.0 * f_.theta[j] / 3.0));
  return cfg_.cfl * dx_ / lmax;
}

bool CnsSolver::positive() const {
  for (size_t j = 0; j < f_.size(); ++j)
    if (!(f_.rho[j] > 0) || !(f_.theta[j] > 0)) return false;
  return true;
}

Conserved CnsSolver::totals() const {
  Conserved c;
  const double dx = dx_;
  for (size_t j = 0; j < f_.size(); ++j) {
    Cons U = to_cons(f_.rho[j], f_.u1[j], f_.u2[j], f_.u3[j], f_.theta[j]);
    c.mass += dx * U.rho;
    c.momentum[0] += dx * U.m1;
    c.momentum[1] += dx * U.m2;
    c.momentum[2] += dx * U.m3;
    c.energy += dx * 2.0 * U.E;  // kinetic convention: int |v|^2 F = 2 E
  }
  return c;
}

namespace {

// one conservative forward-Euler advection stage
void advect_stage(const SlabFields& in, SlabFields& out, double sdt, double dx,
                  const CnsConfig& cfg) {
  const size_t n = in.size();
  auto pad = [&](const std::vector<double>& v, double glv, double grv) {
    std::vector<double> o(n + 2);
    o[0] = glv;
    o[n + 1] = grv;
    std::copy(v.begin(), v.end(), o.begin() + 1);
    return o;
  };
  std::vector<double> rho, u1, u2, u3, th;
  GhostState gl{}, gr{};
  if (cfg.periodic) {
    rho = pad(in.rho, in.rho[n - 1], in.rho[0]);
    u1 = pad(in.u1, in.u1[n - 1], in.u1[0]);
    u2 = pad(in.u2, in.u2[n - 1], in.u2[0]);
    u3 = pad(in.u3, in.u3[n - 1], in.u3[0]);
    th = pad(in.theta, in.theta[n - 1], in.theta[0]);
  } else {
    gl = apply_bc(in, cfg.bc_left, cfg.wall_left, true, dx);
    gr = apply_bc(in, cfg.bc_right, cfg.wall_right, false, dx);
    rho = pad(in.rho, gl.rho, gr.rho);
    u1 = pad(in.u1, gl.u1, gr.u1);
    u2 = pad(in.u2, gl.u2, gr.u2);
    u3 = pad(in.u3, gl.u3, gr.u3);
    th = pad(in.theta, gl.theta, gr.theta);
  }
  // padded index c corresponds to physical cell (c-1+n) mod n; periodic
  // slopes wrap so the seam faces see a single reconstruction per cell
  auto slope_at = [&](const std::vector<double>& v, size_t c) {
    if (cfg.periodic) {
      auto wrap = [&](long q) { return v[1 + ((q - 1 + (long)n) % (long)n)]; };
      long q = (long)c;
      return minmod(wrap(q) - wrap(q - 1), wrap(q + 1) - wrap(q));
    }
    if (c == 0 || c == n + 1) return 0.0;
    return minmod(v[c] - v[c - 1], v[c + 1] - v[c]);
  };

  std::vector<std::array<double, 5>> flux(n + 1);
  for (size_t i = 0; i <= n; ++i) {
    if (cfg.periodic && i == n) {
      flux[n] = flux[0];  // seam faces are one face
      continue;
    }
    if (!cfg.periodic && (i == 0 || i == n)) {
      const GhostState& g = (i == 0) ? gl : gr;
      flux[i] = {0.0, g.wall_pressure, 0.0, 0.0, 0.0};
      continue;
    }
    const size_t cl = i, cr = i + 1;  // padded indices around face i
    auto prim = [&](size_t c, double h, double& r, double& v1, double& v2, double& v3, double& t) {
      r = std::max(rho[c] + h * slope_at(rho, c), 1e-12);
      v1 = u1[c] + h * slope_at(u1, c);
      v2 = u2[c] + h * slope_at(u2, c);
      v3 = u3[c] + h * slope_at(u3, c);
      t = std::max(th[c] + h * slope_at(th, c), 1e-12);
    };
    double rL, u1L, u2L, u3L, tL, rR, u1R, u2R, u3R, tR;
    prim(cl, +0.5, rL, u1L, u2L, u3L, tL);
    prim(cr, -0.5, rR, u1R, u2R, u3R, tR);
    const Cons UL = to_cons(rL, u1L, u2L, u3L, tL), UR = to_cons(rR, u1R, u2R, u3R, tR);
    const double pL = rL * tL, pR = rR * tR;
    const double lam = std::max(std::abs(u1L) + std::sqrt(5.0 * tL / 3.0),
                                std::abs(u1R) + std::sqrt(5.0 * tR / 3.0));
    auto phys = [](const Cons& U, double u1v, double p) {
      return std::array<double, 5>{U.rho * u1v, U.m1 * u1v + p, U.m2 * u1v, U.m3 * u1v,
                                   (U.E + p) * u1v};
    };
    const auto FL = phys(UL, u1L, pL), FR = phys(UR, u1R, pR);
    flux[i] = {0.5 * (FL[0] + FR[0]) - 0.5 * lam * (UR.rho - UL.rho),
               0.5 * (FL[1] + FR[1]) - 0.5 * lam * (UR.m1 - UL.m1),
               0.5 * (FL[2] + FR[2]) - 0.5 * lam * (UR.m2 - UL.m2),
               0.5 * (FL[3] + FR[3]) - 0.5 * lam * (UR.m3 - UL.m3),
               0.5 * (FL[4] + FR[4]) - 0.5 * lam * (UR.E - UL.E)};
  }

  out = in;
  const double r = sdt / dx;
  for (size_t j = 0; j < n; ++j) {
    Cons U = to_cons(in.rho[j], in.u1[j], in.u2[j], in.u3[j], in.theta[j]);
    U.rho -= r * (flux[j + 1][0] - flux[j][0]);
    U.m1 -= r * (flux[j + 1][1] - flux[j][1]);
    U.m2 -= r * (flux[j + 1][2] - flux[j][2]);
    U.m3 -= r * (flux[j + 1][3] - flux[j][3]);
    U.E -= r * (flux[j + 1][4] - flux[j][4]);
    from_cons(U, out.rho[j], out.u1[j], out.u2[j], out.u3[j], out.theta[j]);
  }
}

}  // namespace

void CnsSolver::advect(double dt) {
  const size_t n = f_.size();
  SlabFields s1, s2;
  advect_stage(f_, s1, dt, dx_, cfg_);
  advect_stage(s1, s2, dt, dx_, cfg_);
  for (size_t j = 0; j < n; ++j) {  // Heun average in conservative variables
    Cons U0 = to_cons(f_.rho[j], f_.u1[j], f_.u2[j], f_.u3[j], f_.theta[j]);
    Cons U2 = to_cons(s2.rho[j], s2.u1[j], s2.u2[j], s2.u3[j], s2.theta[j]);
    Cons U{0.5 * (U0.rho + U2.rho), 0.5 * (U0.m1 + U2.m1), 0.5 * (U0.m2 + U2.m2),
           0.5 * (U0.m3 + U2.m3), 0.5 * (U0.E + U2.E)};
    from_cons(U, f_.rho[j], f_.u1[j], f_.u2[j], f_.u3[j], f_.theta[j]);
  }
}

CnsSolver::FaceFluxes CnsSolver::viscous_fluxes() const {
  const size_t n = f_.size();
  FaceFluxes F;
  F.mom1.assign(n + 1, 0.0);
  F.mom2.assign(n + 1, 0.0);
  F.mom3.assign(n + 1, 0.0);
  F.energy.assign(n + 1, 0.0);
  GhostState gl{}, gr{};
  if (!cfg_.periodic) {
    gl = apply_bc(f_, cfg_.bc_left, cfg_.wall_left, true, dx_);
    gr = apply_bc(f_, cfg_.bc_right, cfg_.wall_right, false, dx_);
  }
  auto at = [&](long j, const std::vector<double>& v, double glv, double grv) -> double {
    if (cfg_.periodic) return v[((j % (long)n) + n) % n];
    if (j < 0) return glv;
    if (j >= (long)n) return grv;
    return v[j];
  };
  for (size_t i = 0; i <= n; ++i) {
    const long jl = (long)i - 1, jr = (long)i;
    const double thL = at(jl, f_.theta, gl.theta, gr.theta),
                 thR = at(jr, f_.theta, gl.theta, gr.theta);
    const double thf = 0.5 * (thL + thR);
    const double mu = mu1_ * std::sqrt(thf), ka = kappa1_ * std::sqrt(thf);
    const double du1 = (at(jr, f_.u1, gl.u1, gr.u1) - at(jl, f_.u1, gl.u1, gr.u1)) / dx_;
    const double du2 = (at(jr, f_.u2, gl.u2, gr.u2) - at(jl, f_.u2, gl.u2, gr.u2)) / dx_;
    const double du3 = (at(jr, f_.u3, gl.u3, gr.u3) - at(jl, f_.u3, gl.u3, gr.u3)) / dx_;
    const double dth = (thR - thL) / dx_;
    const double u1f = 0.5 * (at(jl, f_.u1, gl.u1, gr.u1) + at(jr, f_.u1, gl.u1, gr.u1));
    const double u2f = 0.5 * (at(jl, f_.u2, gl.u2, gr.u2) + at(jr, f_.u2, gl.u2, gr.u2));
    const double u3f = 0.5 * (at(jl, f_.u3, gl.u3, gr.u3) + at(jr, f_.u3, gl.u3, gr.u3));
    F.mom1[i] = cfg_.epsilon * (4.0 / 3.0) * mu * du1;
    F.mom2[i] = cfg_.epsilon * mu * du2;
    F.mom3[i] = cfg_.epsilon * mu * du3;
    F.energy[i] = F.mom1[i] * u1f + F.mom2[i] * u2f + F.mom3[i] * u3f + cfg_.epsilon * ka * dth;
  }
  return F;
}

void CnsSolver::diffuse(double dt) {
  const size_t n = f_.size();
  const double eps = cfg_.epsilon;

  // face viscosities at the current temperature
  std::vector<double> muf(n + 1), kaf(n + 1);
  GhostState gl{}, gr{};
  if (!cfg_.periodic) {
    gl = apply_bc(f_, cfg_.bc_left, cfg_.wall_left, true, dx_);
    gr = apply_bc(f_, cfg_.bc_right, cfg_.wall_right, false, dx_);
  }
  auto th_at = [&](long j) -> double {
    if (cfg_.periodic) return f_.theta[((j % (long)n) + n) % n];
    if (j < 0) return gl.theta;
    if (j >= (long)n) return gr.theta;
    return f_.theta[j];
  };
  for (size_t i = 0; i <= n; ++i) {
    double thf = 0.5 * (th_at((long)i - 1) + th_at((long)i));
    muf[i] = mu1_ * std::sqrt(thf);
    kaf[i] = kappa1_ * std::sqrt(thf);
  }

  // implicit flux-form diffusion solve: d/dt (w u) = [K_{i+1} (u_{i+1}-u_i) - K_i (u_i-u_{i-1})]/1
  // with affine ghost closure (ghost = A + B u_bnd) at wall faces.
  auto solve_diffusion = [&](std::vector<double> u, const std::vector<double>& w,
                             const std::vector<double>& Kface, const std::vector<double>& rhs_src,
                             GhostAffine gal, GhostAffine gar) {
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    for (size_t j = 0; j < n; ++j) {
      b[j] = w[j] / dt;
      d[j] = w[j] * u[j] / dt + rhs_src[j];
    }
    double acorn = 0, ccorn = 0;
    for (size_t i = 1; i < n; ++i) {
      b[i - 1] += Kface[i];
      b[i] += Kface[i];
      c[i - 1] -= Kface[i];
      a[i] -= Kface[i];
    }
    if (cfg_.periodic) {
      const double K = Kface[0];
      b[0] += K;
      b[n - 1] += K;
      acorn = -K;  // A(0, n-1)
      ccorn = -K;  // A(n-1, 0)
      std::vector<double> out;
      cyclic_thomas(a, b, c, d, acorn, ccorn, out);
      return out;
    }
    // wall faces: left flux = K dx^2-scaled (u_0 - ghost) -> b += K(1-B), d += K A
    b[0] += Kface[0] * (1.0 - gal.B);
    d[0] += Kface[0] * gal.A;
    b[n - 1] += Kface[n] * (1.0 - gar.B);
    d[n - 1] += Kface[n] * gar.A;
    thomas(a, b, c, d);
    return d;
  };

  const SlabFields before = f_;
  std::vector<double> zero(n, 0.0);

  auto ghost_u = [&](const BCFamily& fam, const WallFrame& fr, size_t j, int comp) {
    if (fam.kind == BCFamilyKind::CompleteSlip) return GhostAffine{0.0, 1.0};
    double uwc = comp == 2 ? fr.u_w[1] : fr.u_w[2];
    return slip_ghost(fam.slip_u(f_.rho[j]), uwc, 0.0, dx_);
  };
  std::vector<double> K1(n + 1), K2f(n + 1), Kth(n + 1);
  for (size_t i = 0; i <= n; ++i) {
    K1[i] = eps * (4.0 / 3.0) * muf[i] / (dx_ * dx_);
    K2f[i] = eps * muf[i] / (dx_ * dx_);
    Kth[i] = eps * kaf[i] / (dx_ * dx_);
  }
  f_.u1 = solve_diffusion(f_.u1, f_.rho, K1, zero, GhostAffine{0.0, -1.0}, GhostAffine{0.0, -1.0});
  f_.u2 = solve_diffusion(f_.u2, f_.rho, K2f, zero, ghost_u(cfg_.bc_left, cfg_.wall_left, 0, 2),
                          ghost_u(cfg_.bc_right, cfg_.wall_right, n - 1, 2));
  f_.u3 = solve_diffusion(f_.u3, f_.rho, K2f, zero, ghost_u(cfg_.bc_left, cfg_.wall_left, 0, 3),
                          ghost_u(cfg_.bc_right, cfg_.wall_right, n - 1, 3));

  // theta: implicit heat solve used to build the conservative energy flux
  std::vector<double> heat(n, 0.0);
  if (cfg_.viscous_heating) {
    for (size_t j = 0; j < n; ++j) {
      double du1 = 0, du2 = 0, du3 = 0;
      if (j > 0 && j + 1 < n) {
        du1 = (f_.u1[j + 1] - f_.u1[j - 1]) / (2 * dx_);
        du2 = (f_.u2[j + 1] - f_.u2[j - 1]) / (2 * dx_);
        du3 = (f_.u3[j + 1] - f_.u3[j - 1]) / (2 * dx_);
      }
      double mu = mu1_ * std::sqrt(f_.theta[j]);
      heat[j] =
          0.5 * eps * mu * ((8.0 / 3.0) * du1 * du1 + 2.0 * du2 * du2 + 2.0 * du3 * du3);
    }
  }
  auto ghost_th = [&](const BCFamily& fam, const WallFrame& fr, size_t j, const GhostState& g) {
    if (fam.kind == BCFamilyKind::CompleteSlip) return GhostAffine{0.0, 1.0};
    double w2 = g.wall_u2 - fr.u_w[1], w3 = g.wall_u3 - fr.u_w[2];
    double offset = fam.has_kinetic_energy_offset() ? 0.25 * (w2 * w2 + w3 * w3) : 0.0;
    return slip_ghost(fam.slip_theta(f_.rho[j]), fr.theta_w, offset, dx_);
  };
  std::vector<double> w32(n);
  for (size_t j = 0; j < n; ++j) w32[j] = 1.5 * f_.rho[j];
  std::vector<double> thstar =
      solve_diffusion(f_.theta, w32, Kth, heat, ghost_th(cfg_.bc_left, cfg_.wall_left, 0, gl),
                      ghost_th(cfg_.bc_right, cfg_.wall_right, n - 1, gr));

  // conservative energy update from the new-level fluxes
  if (cfg_.viscous_heating) {
    std::vector<double> Phi(n + 1, 0.0);
    GhostState gl2{}, gr2{};
    SlabFields fstar = f_;
    fstar.theta = thstar;
    if (!cfg_.periodic) {
      gl2 = apply_bc(fstar, cfg_.bc_left, cfg_.wall_left, true, dx_);
      gr2 = apply_bc(fstar, cfg_.bc_right, cfg_.wall_right, false, dx_);
    }
    auto at = [&](long j, const std::vector<double>& v, double glv, double grv) -> double {
      if (cfg_.periodic) return v[((j % (long)n) + n) % n];
      if (j < 0) return glv;
      if (j >= (long)n) return grv;
      return v[j];
    };
    for (size_t i = 0; i <= n; ++i) {
      double du1 = (at(i, f_.u1, gl2.u1, gr2.u1) - at((long)i - 1, f_.u1, gl2.u1, gr2.u1)) / dx_;
      double du2 = (at(i, f_.u2, gl2.u2, gr2.u2) - at((long)i - 1, f_.u2, gl2.u2, gr2.u2)) / dx_;
      double du3 = (at(i, f_.u3, gl2.u3, gr2.u3) - at((long)i - 1, f_.u3, gl2.u3, gr2.u3)) / dx_;
      double dth = (at(i, thstar, gl2.theta, gr2.theta) -
                    at((long)i - 1, thstar, gl2.theta, gr2.theta)) / dx_;
      double u1f = 0.5 * (at((long)i - 1, f_.u1, gl2.u1, gr2.u1) + at(i, f_.u1, gl2.u1, gr2.u1));
      double u2f = 0.5 * (at((long)i - 1, f_.u2, gl2.u2, gr2.u2) + at(i, f_.u2, gl2.u2, gr2.u2));
      double u3f = 0.5 * (at((long)i - 1, f_.u3, gl2.u3, gr2.u3) + at(i, f_.u3, gl2.u3, gr2.u3));
      Phi[i] = eps * muf[i] * ((4.0 / 3.0) * du1 * u1f + du2 * u2f + du3 * u3f) +
               eps * kaf[i] * dth;
    }
    for (size_t j = 0; j < n; ++j) {
      Cons U = to_cons(before.rho[j], before.u1[j], before.u2[j], before.u3[j], before.theta[j]);
      // momentum already updated implicitly; rebuild E from flux form
      U.m1 = f_.rho[j] * f_.u1[j];
      U.m2 = f_.rho[j] * f_.u2[j];
      U.m3 = f_.rho[j] * f_.u3[j];
      U.E += dt / dx_ * (Phi[j + 1] - Phi[j]);
      from_cons(U, f_.rho[j], f_.u1[j], f_.u2[j], f_.u3[j], f_.theta[j]);
    }
  } else {
    f_.theta = thstar;  // linearized-study option: heating dropped, non-conservative
  }
}

void CnsSolver::step(double dt) {
  const SlabFields saved = f_;
  for (int attempt = 0; attempt <= cfg_.positivity_retries; ++attempt) {
    const double sub = dt / (1 << attempt);
    const int nsub = 1 << attempt;
    bool ok = true;
    for (int s = 0; s < nsub && ok; ++s) {
      diffuse(0.5 * sub);
      advect(sub);
      diffuse(0.5 * sub);
      ok = positive();
    }
    if (ok) {
      f_.time = saved.time + dt;
      return;
    }
    f_ = saved;
    if (attempt == cfg_.positivity_retries)
      throw std::runtime_error("cns_step: positivity loss persists after retries");
  }
}

void CnsSolver::advance_to(double t) {
  while (f_.time < t - 1e-13) {
    double dt = std::min(advective_dt(), t - f_.time);
    step(dt);
  }
}

CnsCouetteResult steady_couette_cns(const CnsCouetteConfig& cfg, const CollisionModel& model) {
  CnsConfig c;
  c.nx = cfg.nx;
  c.epsilon = cfg.epsilon;
  c.wall_left = WallFrame::slab_left({0, -cfg.u_wall, 0}, cfg.theta_left);
  c.wall_right = WallFrame::slab_right({0, cfg.u_wall, 0}, cfg.theta_right);
  SlipCoefficients sc = compute_slip_coefficients(model, cfg.theta_left);
  c.bc_left = boundary_family(cfg.law, cfg.epsilon, sc);
  c.bc_right = boundary_family(cfg.law, cfg.epsilon, sc);

  SlabFields f;
  f.x.resize(cfg.nx);
  for (int j = 0; j < cfg.nx; ++j) f.x[j] = (j + 0.5) / cfg.nx;
  f.resize(cfg.nx);
  std::fill(f.theta.begin(), f.theta.end(), 0.5 * (cfg.theta_left + cfg.theta_right));
  CnsSolver solver(std::move(f), c, model);

  CnsCouetteResult out;
  double tprev = 0;
  SlabFields prev = solver.fields();
  for (int it = 0; it < 200000; ++it) {
    double dt = solver.advective_dt();
    solver.step(dt);
    if (solver.fields().time >= cfg.t_max) break;
    if ((it + 1) % 50 == 0) {
      const auto& cur = solver.fields();
      double change = 0;
      for (size_t j = 0; j < cur.size(); ++j) {
        change = std::max(change, std::abs(cur.u2[j] - prev.u2[j]));
        change = std::max(change, std::abs(cur.theta[j] - prev.theta[j]));
        change = std::max(change, std::abs(cur.rho[j] - prev.rho[j]));
      }
      out.residual = change / std::max(cur.time - tprev, 1e-300);
      if (out.residual < cfg.tol) {
        out.converged = true;
        break;
      }
      prev = cur;
      tprev = cur.time;
    }
  }
  out.fields = solver.fields();
  return out;
}

}  // namespace kinslip
