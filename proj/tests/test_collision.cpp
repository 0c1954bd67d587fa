#include <doctest.h>

#include <cmath>
#include <random>

#include "kinslip/collision.hpp"
#include "kinslip/numerics.hpp"

using namespace kinslip;

namespace {

// independent 5D quadrature of nu(v) = int int |(v1-v).w| mu(v1) dw dv1
// (test-only oracle, not the closed form used by the library); the spherical
// grid is centered at v so |v1 - v| is smooth over every panel
double nu_quadrature_oracle(const Vec3& v) {
  GaussLegendre glr(48), glc(24);
  std::vector<double> rr, rw;
  glr.mapped(0.0, 16.0, rr, rw);
  const int nphi = 32;
  double total = 0;
  for (size_t ir = 0; ir < rr.size(); ++ir)
    for (size_t ic = 0; ic < glc.x.size(); ++ic) {
      double ct = glc.x[ic], st = std::sqrt(1 - ct * ct);
      for (int ip = 0; ip < nphi; ++ip) {
        double ph = 2 * kPi * ip / nphi;
        Vec3 v1{v[0] + rr[ir] * st * std::cos(ph), v[1] + rr[ir] * st * std::sin(ph),
                v[2] + rr[ir] * ct};
        // int_{S^2} |g.w| dw = 2 pi |g|, |g| = rr here
        total += rw[ir] * glc.w[ic] * (2 * kPi / nphi) * rr[ir] * rr[ir] *
                 global_maxwellian(v1) * 2.0 * kPi * rr[ir];
      }
    }
  return total;
}

std::vector<double> random_lattice_fn(const VelocityLattice& lat, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::vector<double> f(lat.size());
  for (size_t k = 0; k < lat.size(); ++k) {
    const Vec3& v = lat.node(k);
    f[k] = (gauss(rng) + 0.3 * v[0] * v[1] + 0.1 * std::sin(v[2])) * sqrt_maxwellian(v);
  }
  return f;
}

}  // namespace

TEST_CASE("global maxwellian: value at zero and radial symmetry") {
  CHECK(global_maxwellian({0, 0, 0}) == doctest::Approx(std::pow(2 * kPi, -1.5)).epsilon(1e-14));
  CHECK(global_maxwellian({0, 0, 0}) == doctest::Approx(0.0634936359342).epsilon(1e-10));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (int i = 0; i < 32; ++i) {
    Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
    Vec3 mv{-v[0], -v[1], -v[2]};
    CHECK(global_maxwellian(v) == doctest::Approx(global_maxwellian(mv)).epsilon(1e-14));
  }
}

TEST_CASE("collision frequency: bgk constant and the hard-sphere quadrature oracle") {
  CollisionModel bgk = CollisionModel::bgk_constant(1.0);
  CHECK(collision_frequency({0.3, -1.2, 2.0}, bgk) == 1.0);
  CHECK(collision_frequency({0, 0, 0}, bgk) == 1.0);

  CollisionModel hs = CollisionModel::hard_sphere();  // raw kernel normalization
  for (const Vec3& v : {Vec3{0, 0, 0}, Vec3{0.7, 0, 0}, Vec3{0.3, -1.0, 0.8}, Vec3{0, 2.5, 0}}) {
    double oracle = nu_quadrature_oracle(v);
    CHECK(collision_frequency(v, hs) == doctest::Approx(oracle).epsilon(2e-8));
  }
  CHECK(collision_frequency({0, 0, 0}, hs) == doctest::Approx(kHsNuZeroRaw).epsilon(1e-12));
}

TEST_CASE("collision frequency: hard-sphere growth bounds at unit normalization") {
  CollisionModel hs = CollisionModel::hard_sphere(1.0);  // nu(0) normalized to 1
  for (double s : {0.0, 0.3, 1.0, 2.5, 4.0, 6.2}) {
    double ratio = collision_frequency({s, 0, 0}, hs) / (1.0 + s);
    CHECK(ratio > 0.1);
    CHECK(ratio < 10.0);
  }
}

TEST_CASE("invariant basis: Gram = identity within 1e-10") {
  auto lat = VelocityLattice::make_default();
  InvariantBasis basis(lat);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK(std::abs(lat.inner(basis.fn(i), basis.fn(j)) - (i == j ? 1.0 : 0.0)) < 1e-10);
}

TEST_CASE("project_invariants: kernel elements, odd moments, idempotence") {
  auto lat = VelocityLattice::make_default();
  const size_t n = lat.size();
  std::vector<double> sq(n), vxy(n);
  for (size_t k = 0; k < n; ++k) {
    sq[k] = sqrt_maxwellian(lat.node(k));
    vxy[k] = lat.node(k)[0] * lat.node(k)[1] * sq[k];
  }
  auto psq = project_invariants(sq, lat);
  double err = 0, scale = 0;
  for (size_t k = 0; k < n; ++k) {
    err = std::max(err, std::abs(psq[k] - sq[k]));
    scale = std::max(scale, std::abs(sq[k]));
  }
  CHECK(err < 1e-10 * scale);

  auto pv = project_invariants(vxy, lat);
  CHECK(std::sqrt(lat.inner(pv, pv)) < 1e-8);

  std::mt19937_64 rng(11);
  auto f = random_lattice_fn(lat, rng);
  auto pf = project_invariants(f, lat);
  auto ppf = project_invariants(pf, lat);
  double d = 0;
  for (size_t k = 0; k < n; ++k) d = std::max(d, std::abs(ppf[k] - pf[k]));
  CHECK(d < 1e-12);
}

TEST_CASE("linearized operator: kernel, conservation, symmetry, coercivity") {
  VelocityLattice lat(LatticeScheme::UniformCartesian, {16, 16, 16}, 6.2);
  std::mt19937_64 rng(23);
  for (auto kind : {CollisionKind::BgkConstantNu, CollisionKind::HardSphereLinearized}) {
    CollisionModel m = (kind == CollisionKind::BgkConstantNu)
                           ? CollisionModel::bgk_constant(1.3)
                           : CollisionModel::hard_sphere(kHsNuZeroRaw, 2);
    LinearizedOperator L(lat, m);
    const auto& inv = L.invariants();
    const size_t n = lat.size();

    // kernel: all five invariants are annihilated
    for (int i = 0; i < 5; ++i) {
      auto out = L.apply(inv.fn(i));
      CHECK(std::sqrt(lat.inner(out, out)) < 1e-8);
    }
    // conservation and symmetry on random functions
    auto f = random_lattice_fn(lat, rng);
    auto g = random_lattice_fn(lat, rng);
    auto Lf = L.apply(f);
    auto Lg = L.apply(g);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(lat.inner(Lf, inv.fn(i))) < 1e-8);
    CHECK(lat.inner(Lf, g) == doctest::Approx(lat.inner(f, Lg)).epsilon(1e-8));
    // coercivity witness: <Lf,f> >= c ||(I-P)f||^2 with measured c > 0
    auto fp = f;
    inv.project_out(fp);
    double c_measured = lat.inner(Lf, f) / lat.inner(fp, fp);
    CHECK(c_measured > 0.0);
    MESSAGE("coercivity witness c = ", c_measured, " for ", to_string(kind));
    // equality case: Pf = f
    auto pf = inv.project(f);
    auto Lpf = L.apply(pf);
    CHECK(std::sqrt(lat.inner(Lpf, Lpf)) < 1e-8);
  }
}

TEST_CASE("bgk operator action: nu0 (I-P), eigenfunction v1 v2 sqrt(mu)") {
  VelocityLattice lat(LatticeScheme::UniformCartesian, {16, 16, 16}, 6.2);
  const double nu0 = 2.7;
  CollisionModel m = CollisionModel::bgk_constant(nu0);
  const size_t n = lat.size();
  std::vector<double> f(n), kern(n);
  for (size_t k = 0; k < n; ++k) {
    const Vec3& v = lat.node(k);
    f[k] = v[0] * v[1] * sqrt_maxwellian(v);
    kern[k] = v[1] * sqrt_maxwellian(v);
  }
  auto Lf = apply_linearized_L(f, lat, m);
  for (size_t k = 0; k < n; ++k) CHECK(Lf[k] == doctest::Approx(nu0 * f[k]).epsilon(1e-7));
  auto Lk = apply_linearized_L(kern, lat, m);
  CHECK(std::sqrt(lat.inner(Lk, Lk)) < 1e-9);
}

TEST_CASE("chapman-enskog functions: BGK closed form a = b = sqrt(theta)/nu0") {
  const double nu0 = 1.7;
  CollisionModel m = CollisionModel::bgk_constant(nu0);
  for (double r : {0.0, 1.3, 4.9}) {
    CHECK(m.a_of(r) == doctest::Approx(1.0 / nu0).epsilon(1e-12));
    CHECK(m.b_of(r) == doctest::Approx(1.0 / nu0).epsilon(1e-12));
  }
  auto t2 = chapman_enskog_functions(m, 2.25);
  CHECK(t2.a[17] == doctest::Approx(1.5 / nu0).epsilon(1e-12));
}

TEST_CASE("chapman-enskog defining relation residual (BGK)") {
  VelocityLattice lat(LatticeScheme::UniformCartesian, {16, 16, 16}, 6.2);
  CollisionModel m = CollisionModel::bgk_constant(1.0);
  const size_t n = lat.size();
  // h_A = a(|v|) A12(v) sqrt(mu); L h_A should equal A12 sqrt(mu)
  std::vector<double> h(n), target(n);
  for (size_t k = 0; k < n; ++k) {
    const Vec3& v = lat.node(k);
    double a12 = v[0] * v[1];
    target[k] = a12 * sqrt_maxwellian(v);
    h[k] = m.a_of(std::sqrt(norm2(v))) * target[k];
  }
  auto Lh = apply_linearized_L(h, lat, m);
  double err2 = 0;
  for (size_t k = 0; k < n; ++k) err2 += lat.weight(k) * (Lh[k] - target[k]) * (Lh[k] - target[k]);
  CHECK(std::sqrt(err2) < 1e-6);
}

TEST_CASE("hard-sphere brackets: classical first-Sonine anchors") {
  // frozen independent values: mu1 = 5/(32 sqrt(pi)), kappa1 = 75/(128 sqrt(pi)),
  // cross-checked against a direct collision-form quadrature before the build
  const auto& br1 = hard_sphere_brackets(1);
  double mu1 = (br1.rhs_a[0] / br1.lambda_a[0]) * br1.rhs_a[0] / 10.0;
  double kap1 = (br1.rhs_b[0] / br1.lambda_b[0]) * br1.rhs_b[0] / 3.0;
  CHECK(mu1 == doctest::Approx(5.0 / (32.0 * std::sqrt(kPi))).epsilon(2e-4));
  CHECK(kap1 == doctest::Approx(75.0 / (128.0 * std::sqrt(kPi))).epsilon(2e-4));
}

TEST_CASE("hard-sphere tables: positivity, theta-independence, refinement stability") {
  CollisionModel hs3 = CollisionModel::hard_sphere(kHsNuZeroRaw, 3);
  for (size_t i = 0; i < hs3.tables.r.size(); ++i) {
    CHECK(hs3.tables.a[i] > 0.0);
    CHECK(hs3.tables.b[i] > 0.0);
  }
  auto t1 = chapman_enskog_functions(hs3, 1.0);
  auto t2 = chapman_enskog_functions(hs3, 1.9);  // hard-sphere tables ignore theta
  for (size_t i = 0; i < t1.r.size(); i += 32) CHECK(t1.a[i] == t2.a[i]);

  // Prandtl-type ratio 5 mu/(2 kappa): order-3 solve is the oracle for order-1
  CollisionModel hs1 = CollisionModel::hard_sphere(kHsNuZeroRaw, 1);
  double pr1 = 5.0 * transport_mu(hs1, 1.0) / (2.0 * transport_kappa(hs1, 1.0));
  double pr3 = 5.0 * transport_mu(hs3, 1.0) / (2.0 * transport_kappa(hs3, 1.0));
  CHECK(std::abs(pr1 - pr3) / pr3 < 0.03);
  CHECK(pr3 == doctest::Approx(2.0 / 3.0).epsilon(0.02));

  // positivity of the defining integrals (A:Ahat and B.Bhat against M)
  CHECK(transport_mu(hs3, 1.0) > 0.0);
  CHECK(transport_kappa(hs3, 1.0) > 0.0);
}

TEST_CASE("hard-sphere defining-relation residual through the lattice operator") {
  VelocityLattice lat(LatticeScheme::UniformCartesian, {16, 16, 16}, 6.2);
  CollisionModel m = CollisionModel::hard_sphere(kHsNuZeroRaw, 3);
  const size_t n = lat.size();
  std::vector<double> h(n), target(n);
  for (size_t k = 0; k < n; ++k) {
    const Vec3& v = lat.node(k);
    double a12 = v[0] * v[1];
    target[k] = a12 * sqrt_maxwellian(v);
    h[k] = m.a_of(std::sqrt(norm2(v))) * target[k];
  }
  auto Lh = apply_linearized_L(h, lat, m);
  double err2 = 0, ref2 = 0;
  for (size_t k = 0; k < n; ++k) {
    err2 += lat.weight(k) * (Lh[k] - target[k]) * (Lh[k] - target[k]);
    ref2 += lat.weight(k) * target[k] * target[k];
  }
  CHECK(std::sqrt(err2 / ref2) < 1e-3);
}

TEST_CASE("unknown model kind strings are configuration errors") {
  CHECK_THROWS(collision_kind_from_string("bgk-quadratic"));
  CHECK_THROWS(lattice_scheme_from_string("spherical"));
}
