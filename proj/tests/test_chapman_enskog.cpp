#include <doctest.h>

#include <cmath>
#include <random>

#include "kinslip/chapman_enskog.hpp"

using namespace kinslip;

namespace {

FluidGradients random_grads(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g;
  FluidGradients out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out.grad_u[i][j] = scale * g(rng);
    out.grad_theta[i] = scale * g(rng);
  }
  return out;
}

}  // namespace

TEST_CASE("local maxwellian: reduction to mu, lattice moments, scaling identity") {
  FluidState ref{1.0, {0, 0, 0}, 1.0};
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int i = 0; i < 16; ++i) {
    Vec3 v{g(rng), g(rng), g(rng)};
    CHECK(local_maxwellian(ref, v) == doctest::Approx(global_maxwellian(v)).epsilon(1e-14));
  }

  // Gauss-Hermite tensor rule: the (2, (0.3,0,0), 1.5) Maxwellian has tails the
  // truncated uniform lattice cannot hold to 1e-6
  VelocityLattice lat(LatticeScheme::GaussHermiteTensor, {24, 24, 24}, 0.0);
  FluidState s{2.0, {0.3, 0, 0}, 1.5};
  double m0 = 0, m1 = 0, e2 = 0;
  for (size_t k = 0; k < lat.size(); ++k) {
    double M = local_maxwellian(s, lat.node(k));
    m0 += lat.weight(k) * M;
    m1 += lat.weight(k) * M * lat.node(k)[0];
    e2 += lat.weight(k) * M * norm2(lat.node(k));
  }
  CHECK(m0 == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(m1 == doctest::Approx(0.6).epsilon(1e-6));
  CHECK(e2 == doctest::Approx(2.0 * 0.09 + 3.0 * 2.0 * 1.5).epsilon(1e-6));  // rho|u|^2+3 rho theta

  // M_{(rho,u,theta)}(v) = rho theta^{-3/2} mu((v-u)/sqrt(theta))
  for (int i = 0; i < 16; ++i) {
    Vec3 v{g(rng), g(rng), g(rng)};
    Vec3 V{(v[0] - s.u[0]) / std::sqrt(s.theta), (v[1] - s.u[1]) / std::sqrt(s.theta),
           (v[2] - s.u[2]) / std::sqrt(s.theta)};
    CHECK(local_maxwellian(s, v) ==
          doctest::Approx(s.rho * std::pow(s.theta, -1.5) * global_maxwellian(V)).epsilon(1e-13));
  }
  CHECK_THROWS(local_maxwellian(FluidState{-1.0, {0, 0, 0}, 1.0}, {0, 0, 0}));
}

TEST_CASE("traceless deformation: dilation and rotation killed, shear symmetrized") {
  Mat3 dil{};
  for (int i = 0; i < 3; ++i) dil[i][i] = 0.7;
  Mat3 s = traceless_deformation(dil);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::abs(s[i][j]) < 1e-14);

  Mat3 rot{};
  rot[0][1] = 0.4;
  rot[1][0] = -0.4;
  rot[0][2] = -1.1;
  rot[2][0] = 1.1;
  s = traceless_deformation(rot);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::abs(s[i][j]) < 1e-14);

  Mat3 shear{};
  shear[0][2] = 0.9;  // only entry (1,3)
  s = traceless_deformation(shear);
  CHECK(s[0][2] == doctest::Approx(0.9));
  CHECK(s[2][0] == doctest::Approx(0.9));
  double off = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (!((i == 0 && j == 2) || (i == 2 && j == 0))) off = std::max(off, std::abs(s[i][j]));
  CHECK(off < 1e-14);
  CHECK(std::abs(s[0][0] + s[1][1] + s[2][2]) < 1e-12);

  // sigma is linear in grad u
  std::mt19937_64 rng(5);
  auto g1 = random_grads(rng, 1.0).grad_u, g2 = random_grads(rng, 1.0).grad_u;
  Mat3 comb{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) comb[i][j] = 2.0 * g1[i][j] - 0.5 * g2[i][j];
  Mat3 sc = traceless_deformation(comb), s1 = traceless_deformation(g1),
       s2 = traceless_deformation(g2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(sc[i][j] == doctest::Approx(2.0 * s1[i][j] - 0.5 * s2[i][j]).epsilon(1e-12));
}

TEST_CASE("first-order G: zero gradients, invariant moments, heat-gradient parity") {
  auto lat = VelocityLattice::make_default();
  CollisionModel m = CollisionModel::bgk_constant(1.0);
  FluidState s{1.3, {0.2, -0.1, 0.05}, 1.2};
  FluidGradients zero{};
  for (size_t k = 0; k < lat.size(); k += 517)
    CHECK(first_order_G(s, zero, m, lat.node(k)) == 0.0);

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    FluidState st{0.85 + 0.5 * (trial % 5) / 4.0, {0.05 * (trial % 3), -0.05, 0.02},
                  0.9 + 0.002 * (trial % 70)};
    FluidGradients gr = random_grads(rng, 0.7);
    double mom[5] = {0, 0, 0, 0, 0}, scale = 0;
    for (size_t k = 0; k < lat.size(); ++k) {
      double G = first_order_G(st, gr, m, lat.node(k));
      const Vec3& v = lat.node(k);
      mom[0] += lat.weight(k) * G;
      mom[1] += lat.weight(k) * G * v[0];
      mom[2] += lat.weight(k) * G * v[1];
      mom[3] += lat.weight(k) * G * v[2];
      mom[4] += lat.weight(k) * G * norm2(v);
      scale += lat.weight(k) * std::abs(G) * (1.0 + norm2(v));
    }
    for (int i = 0; i < 5; ++i) CHECK(std::abs(mom[i]) < 1e-6 * std::max(scale, 1e-30));
  }

  // pure heat gradient: G odd in the V-component along grad theta
  FluidState st{1.0, {0, 0, 0}, 1.0};
  FluidGradients heat{};
  heat.grad_theta = {0.8, 0, 0};
  for (double vx : {0.4, 1.3, 2.2}) {
    double gp = first_order_G(st, heat, m, {vx, 0.3, -0.2});
    double gm = first_order_G(st, heat, m, {-vx, 0.3, -0.2});
    CHECK(gp == doctest::Approx(-gm).epsilon(1e-12));
  }
}

TEST_CASE("transport coefficients: constant-table closed forms") {
  // oracle values: int_0^inf r^6 e^{-r^2/2} dr = (15/2) sqrt(2 pi) gives mu = a0 sqrt(theta);
  // kappa from the defining integral (theta/3) int B.Bhat M dv = (5/2) b0 sqrt(theta)
  // (the paper's radial display for kappa mis-states the weight; see the BGK
  //  closed form kappa = (5/2) rho theta / nu)
  const double nu0 = 2.0;
  CollisionModel m = CollisionModel::bgk_constant(nu0);  // a = b = 1/nu0
  for (double th : {0.5, 1.0, 1.7}) {
    auto [mu, kappa] = transport_coefficients(m, th);
    CHECK(mu == doctest::Approx(std::sqrt(th) / nu0).epsilon(1e-9));
    CHECK(kappa == doctest::Approx(2.5 * std::sqrt(th) / nu0).epsilon(1e-9));
    CHECK(mu > 0.0);
    CHECK(kappa > 0.0);
  }
  // scaling law mu(theta)/mu(1) = sqrt(theta) for theta-independent tables
  auto [mu1, k1] = transport_coefficients(m, 1.0);
  auto [mu2, k2] = transport_coefficients(m, 2.0);
  CHECK(mu2 / mu1 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK(k2 / k1 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));

  // BGK Prandtl-type ratio: 5 mu / (2 kappa) = 1
  CHECK(5.0 * mu1 / (2.0 * k1) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("reconstruct: eps = 0 gives M; moments match M; positivity scan") {
  auto lat = std::make_shared<VelocityLattice>(VelocityLattice::make_default());
  CollisionModel m = CollisionModel::bgk_constant(1.0);
  std::mt19937_64 rng(29);

  std::vector<double> x{0.25, 0.75};
  std::vector<FluidState> states{{1.1, {0.05, 0.2, 0}, 0.95}, {0.9, {0, -0.1, 0.02}, 1.05}};
  std::vector<FluidGradients> grads{random_grads(rng, 0.4), random_grads(rng, 0.4)};

  auto F0 = reconstruct(x, states, grads, 0.0, m, lat);
  for (size_t j = 0; j < 2; ++j)
    for (size_t k = 0; k < lat->size(); k += 997)
      CHECK(F0.cell(j)[k] == doctest::Approx(local_maxwellian(states[j], lat->node(k))).epsilon(1e-14));

  // the positivity scan uses moderate fixed gradients (reported diagnostic)
  std::vector<FluidGradients> mild(2);
  mild[0].grad_u[0][1] = 0.3;
  mild[0].grad_theta = {0.2, 0, 0};
  mild[1].grad_u[0][2] = -0.25;
  mild[1].grad_theta = {0.1, 0.1, 0};
  ReconstructReport rep;
  auto F = reconstruct(x, states, mild, 0.01, m, lat, &rep);
  for (size_t j = 0; j < 2; ++j) {
    double m0 = 0, m1 = 0, m2 = 0, m3 = 0, e2 = 0, M0 = 0, M1 = 0, M2 = 0, M3 = 0, E2 = 0;
    for (size_t k = 0; k < lat->size(); ++k) {
      const Vec3& v = lat->node(k);
      double w = lat->weight(k);
      double Mv = local_maxwellian(states[j], v);
      m0 += w * F.cell(j)[k];
      m1 += w * F.cell(j)[k] * v[0];
      m2 += w * F.cell(j)[k] * v[1];
      m3 += w * F.cell(j)[k] * v[2];
      e2 += w * F.cell(j)[k] * norm2(v);
      M0 += w * Mv;
      M1 += w * Mv * v[0];
      M2 += w * Mv * v[1];
      M3 += w * Mv * v[2];
      E2 += w * Mv * norm2(v);
    }
    CHECK(m0 == doctest::Approx(M0).epsilon(1e-12));
    CHECK(m1 == doctest::Approx(M1).epsilon(5e-12));
    CHECK(m2 == doctest::Approx(M2).epsilon(5e-12));
    CHECK(m3 == doctest::Approx(M3).epsilon(5e-12));
    CHECK(e2 == doctest::Approx(E2).epsilon(1e-12));
  }
  CHECK(rep.min_value >= 0.0);  // eps = 0.01, moderate gradients
}

TEST_CASE("remainder norms: trivial cases and eps^2 scaling of a constructed perturbation") {
  auto lat = std::make_shared<VelocityLattice>(
      VelocityLattice(LatticeScheme::UniformCartesian, {16, 16, 16}, 6.2));
  CollisionModel m = CollisionModel::bgk_constant(1.0);
  std::mt19937_64 rng(31);
  std::vector<double> x{0.5};
  std::vector<FluidState> states{{1.0, {0.1, -0.2, 0}, 1.1}};
  std::vector<FluidGradients> grads{random_grads(rng, 0.5)};
  RemainderWeight wk{4.0};

  auto M = reconstruct(x, states, grads, 0.0, m, lat);
  auto n0 = remainder_norms(M, states, grads, 0.1, wk, m, true);
  CHECK(n0.l2 < 1e-14);
  CHECK(n0.linf_w < 1e-11);

  auto FG = reconstruct(x, states, grads, 0.05, m, lat);
  auto n1 = remainder_norms(FG, states, grads, 0.05, wk, m, true);
  CHECK(n1.r_norm.has_value());
  CHECK(*n1.r_norm < 1e-10);

  // F = M + eps^2 sqrt(mu) g: L2 norm scales as eps^2
  std::vector<double> g(lat->size());
  for (size_t k = 0; k < lat->size(); ++k)
    g[k] = (1.0 + 0.2 * lat->node(k)[1]) * sqrt_maxwellian(lat->node(k));
  double norms[2];
  int idx = 0;
  for (double eps : {0.1, 0.05}) {
    auto F = M;
    for (size_t k = 0; k < lat->size(); ++k) F.cell(0)[k] += eps * eps * g[k];
    norms[idx++] = remainder_norms(F, states, grads, eps, wk, m, false).l2;
  }
  CHECK(norms[0] / norms[1] == doctest::Approx(4.0).epsilon(1e-10));

  CHECK_THROWS(remainder_norms(M, states, grads, 0.0, wk, m, true));

  // weight exponent below the theorem threshold is the caller's problem; the
  // struct just records it
  CHECK(RemainderWeight{}.k >= 3.5);
}
