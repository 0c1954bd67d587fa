#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "kinslip/collision.hpp"

namespace kinslip {

namespace {

// Radial trial profiles, as functions of x = r^2/2.
//  tensor: A_ij * La(5/2,k,x)
//  vector: V_i * (r^2-5)/2 * La(3/2,k,x)   (parameterized through b(r) directly)
//  scalar: La(1/2,k+2,x)
struct SectorEval {
  int K;
  // phi-tilde values for one velocity, all sectors; tensor entries packed as the
  // 3x3 contraction partners are handled by the caller.
  void radial(double x, std::vector<double>& A, std::vector<double>& B, std::vector<double>& S) const {
    for (int k = 0; k < K; ++k) {
      A[k] = genlaguerre(2.5, k, x);
      B[k] = genlaguerre(1.5, k, x) * (x - 2.5);  // (r^2-5)/2
      S[k] = genlaguerre(0.5, k + 2, x);
    }
  }
};

struct V4 {
  double x, y, z;
};
inline V4 operator-(const V4& a, const V4& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline V4 operator+(const V4& a, const V4& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline V4 scale(const V4& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
inline double sq(const V4& a) { return a.x * a.x + a.y * a.y + a.z * a.z; }

// Accumulates, for one velocity w with sign s, the contributions
//   tensor: s * A_ij(w) * RA_k   (full 3x3, traceless)
//   vector: s * w_i * RB_k
//   scalar: s * RS_k
struct DeltaAcc {
  int K;
  std::vector<double> tens;  // K * 6 entries: (xx, yy, zz, xy, xz, yz)
  std::vector<double> vec;   // K * 3
  std::vector<double> sca;   // K
  std::vector<double> RA, RB, RS;
  explicit DeltaAcc(int k) : K(k), tens(6 * k), vec(3 * k), sca(k), RA(k), RB(k), RS(k) {}
  void reset() {
    std::fill(tens.begin(), tens.end(), 0.0);
    std::fill(vec.begin(), vec.end(), 0.0);
    std::fill(sca.begin(), sca.end(), 0.0);
  }
  void add(const V4& w, double s, const SectorEval& se) {
    const double r2 = sq(w);
    se.radial(0.5 * r2, RA, RB, RS);
    const double axx = w.x * w.x - r2 / 3.0, ayy = w.y * w.y - r2 / 3.0, azz = w.z * w.z - r2 / 3.0;
    const double axy = w.x * w.y, axz = w.x * w.z, ayz = w.y * w.z;
    for (int k = 0; k < K; ++k) {
      const double ra = s * RA[k];
      double* t = &tens[6 * k];
      t[0] += ra * axx;
      t[1] += ra * ayy;
      t[2] += ra * azz;
      t[3] += ra * axy;
      t[4] += ra * axz;
      t[5] += ra * ayz;
      const double rb = s * RB[k];
      vec[3 * k + 0] += rb * w.x;
      vec[3 * k + 1] += rb * w.y;
      vec[3 * k + 2] += rb * w.z;
      sca[k] += s * RS[k];
    }
  }
};

inline double contract_tens(const double* a, const double* b) {
  // full A:B for symmetric traceless tensors stored (xx,yy,zz,xy,xz,yz)
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + 2.0 * (a[3] * b[3] + a[4] * b[4] + a[5] * b[5]);
}

HardSphereBrackets compute_brackets(int K) {
  HardSphereBrackets out;
  out.order = K;
  out.lambda_a.assign(K * K, 0.0);
  out.lambda_b.assign(K * K, 0.0);
  out.lambda_s.assign(K * K, 0.0);

  const int nG = 2 * K + 4;
  const int nGr = 32;
  const int nCt = 2 * K + 10;
  const int nPhi = 8 * K + 16;
  const double gmax = 15.0;

  GaussHermite gh(nG);
  GaussLegendre glr(nGr), glc(nCt);
  std::vector<double> gx, gw;
  glr.mapped(0.0, gmax, gx, gw);
  std::vector<double> ct, ctw;
  glc.mapped(0.0, 1.0, ct, ctw);  // half sphere, doubled below

  SectorEval se{K};
  DeltaAcc base(K), full(K);

  // omega nodes (upper half), phi uniform
  std::vector<V4> om;
  std::vector<double> omw;
  for (int ic = 0; ic < nCt; ++ic) {
    double c = ct[ic], st = std::sqrt(1.0 - c * c);
    for (int ip = 0; ip < nPhi; ++ip) {
      double ph = 2.0 * kPi * ip / nPhi;
      om.push_back({st * std::cos(ph), st * std::sin(ph), c});
      omw.push_back(ctw[ic] * (2.0 * kPi / nPhi) * 2.0);  // x2: omega -> -omega symmetry
    }
  }

  const size_t nW = om.size();
  std::vector<double> ta(6 * K), tb(3 * K), ts(K);

  for (int ig = 0; ig < nGr; ++ig) {
    const double g = gx[ig];
    const double wgt_g = gw[ig] * g * g * std::exp(-g * g / 4.0);
    const V4 gvec{0.0, 0.0, g};
    for (int i = 0; i < nG; ++i)
      for (int j = 0; j < nG; ++j)
        for (int k = 0; k < nG; ++k) {
          const V4 G{gh.x[i], gh.x[j], gh.x[k]};
          const double wG = gh.w[i] * gh.w[j] * gh.w[k];
          const V4 v = G - scale(gvec, 0.5), v1 = G + scale(gvec, 0.5);
          base.reset();
          base.add(v, 1.0, se);
          base.add(v1, 1.0, se);
          for (size_t iw = 0; iw < nW; ++iw) {
            const double gdw = g * om[iw].z;
            const V4 gp = gvec - scale(om[iw], 2.0 * gdw);
            const V4 vp = G - scale(gp, 0.5), v1p = G + scale(gp, 0.5);
            full = base;
            full.add(vp, -1.0, se);
            full.add(v1p, -1.0, se);
            const double w = wgt_g * wG * omw[iw] * std::abs(gdw);
            for (int a = 0; a < K; ++a)
              for (int b = a; b < K; ++b) {
                out.lambda_a[a * K + b] += w * contract_tens(&full.tens[6 * a], &full.tens[6 * b]);
                out.lambda_b[a * K + b] +=
                    w * (full.vec[3 * a] * full.vec[3 * b] + full.vec[3 * a + 1] * full.vec[3 * b + 1] +
                         full.vec[3 * a + 2] * full.vec[3 * b + 2]);
                out.lambda_s[a * K + b] += w * full.sca[a] * full.sca[b];
              }
          }
        }
  }

  const double pref = 0.25 * std::pow(2.0 * kPi, -3.0) * 4.0 * kPi;
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) {
      if (b < a) {
        out.lambda_a[a * K + b] = out.lambda_a[b * K + a];
        out.lambda_b[a * K + b] = out.lambda_b[b * K + a];
        out.lambda_s[a * K + b] = out.lambda_s[b * K + a];
      } else {
        out.lambda_a[a * K + b] *= pref;
        out.lambda_b[a * K + b] *= pref;
        out.lambda_s[a * K + b] *= pref;
      }
    }

  // Right-hand sides of the defining relations (full contractions):
  //   rhs_a[l] = E[(A:A) La(5/2,l)] = (2/3) E[r^4 La(5/2,l,r^2/2)]
  //   rhs_b[l] = E[r^2 ((r^2-5)/2)^2 La(3/2,l,r^2/2)]
  out.rhs_a.assign(K, 0.0);
  out.rhs_b.assign(K, 0.0);
  auto emom = [](const std::function<double(double)>& f) {
    return composite_gauss(
        [&](double r) {
          return f(r) * r * r * std::exp(-0.5 * r * r) * std::sqrt(2.0 / kPi);
        },
        0.0, 18.0, 72, 12);
  };
  for (int l = 0; l < K; ++l) {
    out.rhs_a[l] = emom([&](double r) { return (2.0 / 3.0) * std::pow(r, 4) * genlaguerre(2.5, l, 0.5 * r * r); });
    out.rhs_b[l] = emom([&](double r) {
      double q = 0.5 * (r * r - 5.0);
      return r * r * q * q * genlaguerre(1.5, l, 0.5 * r * r);
    });
  }
  return out;
}

}  // namespace

const HardSphereBrackets& hard_sphere_brackets(int order) {
  static std::mutex mtx;
  static std::map<int, HardSphereBrackets> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_brackets(order)).first;
  return it->second;
}

}  // namespace kinslip
