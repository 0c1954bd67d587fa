#include "kinslip/collision.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace kinslip {

double hs_collision_frequency_raw(double s) {
  if (s < 1e-12) return kHsNuZeroRaw;
  return 2.0 * kPi *
         (std::sqrt(2.0 / kPi) * std::exp(-0.5 * s * s) + (s + 1.0 / s) * std::erf(s / std::sqrt(2.0)));
}

CollisionKind collision_kind_from_string(const std::string& s) {
  if (s == "bgk-constant-nu") return CollisionKind::BgkConstantNu;
  if (s == "bgk-matched-nu") return CollisionKind::BgkMatchedNu;
  if (s == "hard-sphere-linearized") return CollisionKind::HardSphereLinearized;
  throw std::invalid_argument("unknown collision model kind: " + s);
}

std::string to_string(CollisionKind k) {
  switch (k) {
    case CollisionKind::BgkConstantNu: return "bgk-constant-nu";
    case CollisionKind::BgkMatchedNu: return "bgk-matched-nu";
    case CollisionKind::HardSphereLinearized: return "hard-sphere-linearized";
  }
  return "?";
}

namespace {

constexpr int kTablePoints = 257;

void attach_tables(CollisionModel& m, ChapmanEnskogTables t) {
  m.tables = std::move(t);
  m.a_interp = MonotoneCubic(m.tables.r, m.tables.a);
  m.b_interp = MonotoneCubic(m.tables.r, m.tables.b);
}

std::vector<double> solve_spd(const std::vector<double>& mat, const std::vector<double>& rhs, int n) {
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    b(i) = rhs[i];
    for (int j = 0; j < n; ++j) A(i, j) = mat[i * n + j];
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("chapman_enskog_functions: Galerkin system not SPD");
  Eigen::VectorXd x = ldlt.solve(b);
  double cond_proxy = A.norm() * ldlt.solve(Eigen::MatrixXd::Identity(n, n)).norm();
  if (!x.allFinite() || cond_proxy > 1e14)
    throw std::runtime_error("chapman_enskog_functions: Galerkin system singular, cond~" +
                             std::to_string(cond_proxy));
  return std::vector<double>(x.data(), x.data() + n);
}

double hs_mu1_at_order(int order) {
  const auto& br = hard_sphere_brackets(order);
  auto c = solve_spd(br.lambda_a, br.rhs_a, order);
  // mu(1) = (1/10) E[(A:A) a(r)] = (1/10) sum_k c_k rhs_a[k]
  double mu = 0;
  for (int k = 0; k < order; ++k) mu += c[k] * br.rhs_a[k];
  return mu / 10.0;
}

}  // namespace

double CollisionModel::nu_local(double rho, double theta) const {
  switch (kind) {
    case CollisionKind::BgkConstantNu: return nu0;
    case CollisionKind::BgkMatchedNu: return rho * theta / (matched_mu1_ * std::sqrt(theta));
    case CollisionKind::HardSphereLinearized:
      throw std::invalid_argument("nu_local: hard-sphere model has no single relaxation rate");
  }
  return nu0;
}

CollisionModel CollisionModel::bgk_constant(double nu0, double theta_ref, double vmax) {
  CollisionModel m;
  m.kind = CollisionKind::BgkConstantNu;
  m.nu0 = nu0;
  m.theta_ref = theta_ref;
  m.table_vmax = vmax;
  attach_tables(m, chapman_enskog_functions(m, theta_ref));
  return m;
}

CollisionModel CollisionModel::bgk_matched(double theta_ref, double vmax, int hs_order) {
  CollisionModel m;
  m.kind = CollisionKind::BgkMatchedNu;
  m.theta_ref = theta_ref;
  m.sonine_order = hs_order;
  m.table_vmax = vmax;
  m.matched_mu1_ = hs_mu1_at_order(hs_order);
  m.nu0 = m.nu_local(1.0, theta_ref);
  attach_tables(m, chapman_enskog_functions(m, theta_ref));
  return m;
}

CollisionModel CollisionModel::hard_sphere(double nu0, int order, double vmax) {
  CollisionModel m;
  m.kind = CollisionKind::HardSphereLinearized;
  m.nu0 = nu0;
  m.sonine_order = order;
  m.table_vmax = vmax;
  const auto& br = hard_sphere_brackets(order);
  m.a_coeffs = solve_spd(br.lambda_a, br.rhs_a, order);
  m.b_coeffs = solve_spd(br.lambda_b, br.rhs_b, order);
  attach_tables(m, chapman_enskog_functions(m, 1.0));
  return m;
}

CollisionModel CollisionModel::from_tables(CollisionKind kind, double nu0, std::vector<double> r,
                                           std::vector<double> a, std::vector<double> b) {
  CollisionModel m;
  m.kind = kind;
  m.nu0 = nu0;
  m.table_vmax = r.back();
  ChapmanEnskogTables t{std::move(r), std::move(a), std::move(b)};
  attach_tables(m, std::move(t));
  return m;
}

double collision_frequency(const Vec3& v, const CollisionModel& m) {
  switch (m.kind) {
    case CollisionKind::BgkConstantNu:
    case CollisionKind::BgkMatchedNu: return m.nu0;
    case CollisionKind::HardSphereLinearized:
      return (m.nu0 / kHsNuZeroRaw) * hs_collision_frequency_raw(std::sqrt(norm2(v)));
  }
  return m.nu0;
}

ChapmanEnskogTables chapman_enskog_functions(const CollisionModel& m, double theta_ref) {
  ChapmanEnskogTables t;
  t.r.resize(kTablePoints);
  t.a.resize(kTablePoints);
  t.b.resize(kTablePoints);
  for (int i = 0; i < kTablePoints; ++i) t.r[i] = m.table_vmax * i / (kTablePoints - 1.0);

  switch (m.kind) {
    case CollisionKind::BgkConstantNu: {
      // L = nu0 (I-P): Ahat = A/nu0, scaled to a(theta,r) = sqrt(theta)/nu0
      double val = std::sqrt(theta_ref) / m.nu0;
      std::fill(t.a.begin(), t.a.end(), val);
      std::fill(t.b.begin(), t.b.end(), val);
      break;
    }
    case CollisionKind::BgkMatchedNu: {
      // nu(rho,theta) = rho theta / mu_hs(theta) gives a = b = mu_hs(1), theta-free
      double val = m.matched_mu1_;
      std::fill(t.a.begin(), t.a.end(), val);
      std::fill(t.b.begin(), t.b.end(), val);
      break;
    }
    case CollisionKind::HardSphereLinearized: {
      // theta-independent for hard spheres; nu0 rescales the operator linearly
      const auto& br = hard_sphere_brackets(m.sonine_order);
      auto c = m.a_coeffs.empty() ? solve_spd(br.lambda_a, br.rhs_a, m.sonine_order) : m.a_coeffs;
      auto d = m.b_coeffs.empty() ? solve_spd(br.lambda_b, br.rhs_b, m.sonine_order) : m.b_coeffs;
      const double inv_scale = kHsNuZeroRaw / m.nu0;
      for (int i = 0; i < kTablePoints; ++i) {
        double x = 0.5 * t.r[i] * t.r[i], av = 0, bv = 0;
        for (int k = 0; k < m.sonine_order; ++k) {
          av += c[k] * genlaguerre(2.5, k, x);
          bv += d[k] * genlaguerre(1.5, k, x);
        }
        t.a[i] = av * inv_scale;
        t.b[i] = bv * inv_scale;
      }
      break;
    }
  }
  return t;
}

double transport_mu(const CollisionModel& m, double theta) {
  double core = composite_gauss(
      [&](double r) { return m.a_of(r) * std::pow(r, 6) * std::exp(-0.5 * r * r); }, 0.0,
      m.table_vmax, kTablePoints - 1, 8);
  double tail = composite_gauss(
      [&](double r) { return m.a_of(m.table_vmax) * std::pow(r, 6) * std::exp(-0.5 * r * r); },
      m.table_vmax, m.table_vmax + 8.0, 32, 8);
  return (2.0 / 15.0) * std::sqrt(theta) * (core + tail) / kSqrt2Pi;
}

double transport_kappa(const CollisionModel& m, double theta) {
  auto f = [&](double r, double b) { return b * std::pow(r, 4) * (r * r - 5.0) * (r * r - 5.0) * std::exp(-0.5 * r * r); };
  double core = composite_gauss([&](double r) { return f(r, m.b_of(r)); }, 0.0, m.table_vmax,
                                kTablePoints - 1, 8);
  double tail = composite_gauss([&](double r) { return f(r, m.b_of(m.table_vmax)); }, m.table_vmax,
                                m.table_vmax + 8.0, 32, 8);
  return (1.0 / 6.0) * std::sqrt(theta) * (core + tail) / kSqrt2Pi;
}

InvariantBasis::InvariantBasis(const VelocityLattice& lat) : lat_(lat) {
  const size_t n = lat.size();
  for (auto& e : e_) e.resize(n);
  for (size_t k = 0; k < n; ++k) {
    const Vec3& v = lat.node(k);
    double s = sqrt_maxwellian(v);
    e_[0][k] = s;
    e_[1][k] = v[0] * s;
    e_[2][k] = v[1] * s;
    e_[3][k] = v[2] * s;
    e_[4][k] = 0.5 * (norm2(v) - 3.0) * s;
  }
  // modified Gram-Schmidt under the lattice inner product
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < i; ++j) {
      double c = lat.inner(e_[i], e_[j]);
      for (size_t k = 0; k < n; ++k) e_[i][k] -= c * e_[j][k];
    }
    double nrm = std::sqrt(lat.inner(e_[i], e_[i]));
    for (size_t k = 0; k < n; ++k) e_[i][k] /= nrm;
  }
}

std::array<double, 5> InvariantBasis::coefficients(const std::vector<double>& f) const {
  std::array<double, 5> c;
  for (int i = 0; i < 5; ++i) c[i] = lat_.inner(f, e_[i]);
  return c;
}

std::vector<double> InvariantBasis::project(const std::vector<double>& f) const {
  auto c = coefficients(f);
  std::vector<double> out(f.size(), 0.0);
  for (int i = 0; i < 5; ++i)
    for (size_t k = 0; k < out.size(); ++k) out[k] += c[i] * e_[i][k];
  return out;
}

void InvariantBasis::project_out(std::vector<double>& f) const {
  auto c = coefficients(f);
  for (int i = 0; i < 5; ++i)
    for (size_t k = 0; k < f.size(); ++k) f[k] -= c[i] * e_[i][k];
}

LinearizedOperator::LinearizedOperator(const VelocityLattice& lat, const CollisionModel& m,
                                       double theta_ref)
    : lat_(lat), kind_(m.kind), inv_(lat) {
  const size_t n = lat.size();
  if (kind_ != CollisionKind::HardSphereLinearized) {
    nu_bgk_ = m.nu_local(1.0, theta_ref);
    nu_max_ = nu_bgk_;
    return;
  }

  const double scale = m.nu0 / kHsNuZeroRaw;
  nu_.resize(n);
  nu_max_ = 0;
  for (size_t k = 0; k < n; ++k) {
    nu_[k] = scale * hs_collision_frequency_raw(std::sqrt(norm2(lat.node(k))));
    nu_max_ = std::max(nu_max_, nu_[k]);
  }

  // W = invariants + tensor/vector/scalar Sonine blocks
  const int K = m.sonine_order;
  const auto& br = hard_sphere_brackets(K);
  dim_ = 5 + 5 * K + 3 * K + K;
  wbasis_.assign(dim_, std::vector<double>(n));
  std::vector<double> lambda(dim_ * dim_, 0.0);

  for (int i = 0; i < 5; ++i) wbasis_[i] = inv_.fn(i);
  int idx = 5;
  auto tens_comp = [](const Vec3& v, int c) {
    switch (c) {
      case 0: return v[0] * v[1];
      case 1: return v[0] * v[2];
      case 2: return v[1] * v[2];
      case 3: return 0.5 * (v[0] * v[0] - v[1] * v[1]);
      default: return (v[0] * v[0] + v[1] * v[1] - 2.0 * v[2] * v[2]) / std::sqrt(12.0);
    }
  };
  // per-component radial brackets: tensor = lambda_a/10, vector = lambda_b/3
  for (int c = 0; c < 5; ++c)
    for (int k = 0; k < K; ++k, ++idx) {
      for (size_t p = 0; p < n; ++p) {
        const Vec3& v = lat.node(p);
        wbasis_[idx][p] = tens_comp(v, c) * genlaguerre(2.5, k, 0.5 * norm2(v)) * sqrt_maxwellian(v);
      }
      for (int l = 0; l < K; ++l)
        lambda[idx * dim_ + (5 + c * K + l)] = scale * br.lambda_a[k * K + l] / 10.0;
    }
  const int voff = 5 + 5 * K;
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < K; ++k, ++idx) {
      for (size_t p = 0; p < n; ++p) {
        const Vec3& v = lat.node(p);
        double x = 0.5 * norm2(v);
        wbasis_[idx][p] = v[c] * (x - 2.5) * genlaguerre(1.5, k, x) * sqrt_maxwellian(v);
      }
      for (int l = 0; l < K; ++l)
        lambda[idx * dim_ + (voff + c * K + l)] = scale * br.lambda_b[k * K + l] / 3.0;
    }
  const int soff = voff + 3 * K;
  for (int k = 0; k < K; ++k, ++idx) {
    for (size_t p = 0; p < n; ++p) {
      const Vec3& v = lat.node(p);
      wbasis_[idx][p] = genlaguerre(0.5, k + 2, 0.5 * norm2(v)) * sqrt_maxwellian(v);
    }
    for (int l = 0; l < K; ++l) lambda[idx * dim_ + (soff + l)] = scale * br.lambda_s[k * K + l];
  }

  Eigen::MatrixXd G(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j <= i; ++j) G(i, j) = G(j, i) = lat.inner(wbasis_[i], wbasis_[j]);
  Eigen::MatrixXd Ginv = G.ldlt().solve(Eigen::MatrixXd::Identity(dim_, dim_));
  Eigen::MatrixXd L(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) L(i, j) = lambda[i * dim_ + j];
  L = 0.5 * (L + L.transpose());
  Eigen::MatrixXd C = Ginv * L * Ginv;  // coefficient map for Pi L_W Pi

  gram_inv_.assign(dim_ * dim_, 0.0);
  lw_.assign(dim_ * dim_, 0.0);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) {
      gram_inv_[i * dim_ + j] = Ginv(i, j);
      lw_[i * dim_ + j] = C(i, j);
    }
}

std::vector<double> LinearizedOperator::apply(const std::vector<double>& f) const {
  const size_t n = lat_.size();
  if (kind_ != CollisionKind::HardSphereLinearized) {
    auto pf = inv_.project(f);
    std::vector<double> out(n);
    for (size_t k = 0; k < n; ++k) out[k] = nu_bgk_ * (f[k] - pf[k]);
    return out;
  }
  // p_b = <psi_b, f>
  std::vector<double> p(dim_);
  for (int b = 0; b < dim_; ++b) p[b] = lat_.inner(wbasis_[b], f);
  // projected part: psi . (C p)
  std::vector<double> cp(dim_, 0.0);
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b) cp[a] += lw_[a * dim_ + b] * p[b];
  // complement: (I-Pi) nu (I-Pi) f
  std::vector<double> gp(dim_, 0.0);
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b) gp[a] += gram_inv_[a * dim_ + b] * p[b];
  std::vector<double> fperp(n);
  for (size_t k = 0; k < n; ++k) {
    double s = 0;
    for (int a = 0; a < dim_; ++a) s += gp[a] * wbasis_[a][k];
    fperp[k] = f[k] - s;
  }
  for (size_t k = 0; k < n; ++k) fperp[k] *= nu_[k];
  std::vector<double> q(dim_);
  for (int b = 0; b < dim_; ++b) q[b] = lat_.inner(wbasis_[b], fperp);
  std::vector<double> gq(dim_, 0.0);
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b) gq[a] += gram_inv_[a * dim_ + b] * q[b];
  std::vector<double> out(n);
  for (size_t k = 0; k < n; ++k) {
    double proj = 0, projq = 0;
    for (int a = 0; a < dim_; ++a) {
      proj += cp[a] * wbasis_[a][k];
      projq += gq[a] * wbasis_[a][k];
    }
    out[k] = proj + fperp[k] - projq;
  }
  return out;
}

std::vector<double> project_invariants(const std::vector<double>& f, const VelocityLattice& lat) {
  return InvariantBasis(lat).project(f);
}

std::vector<double> apply_linearized_L(const std::vector<double>& f, const VelocityLattice& lat,
                                       const CollisionModel& m, double theta_ref) {
  return LinearizedOperator(lat, m, theta_ref).apply(f);
}

}  // namespace kinslip
