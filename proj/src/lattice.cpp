#include "kinslip/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace kinslip {

LatticeScheme lattice_scheme_from_string(const std::string& s) {
  if (s == "uniform-cartesian") return LatticeScheme::UniformCartesian;
  if (s == "gauss-hermite-tensor") return LatticeScheme::GaussHermiteTensor;
  if (s == "half-range-gauss") return LatticeScheme::HalfRangeGauss;
  throw std::invalid_argument("unknown lattice scheme: " + s);
}

std::string to_string(LatticeScheme s) {
  switch (s) {
    case LatticeScheme::UniformCartesian: return "uniform-cartesian";
    case LatticeScheme::GaussHermiteTensor: return "gauss-hermite-tensor";
    case LatticeScheme::HalfRangeGauss: return "half-range-gauss";
  }
  return "?";
}

namespace {

// Per-axis nodes/weights; must come out mirror-symmetric with no zero node.
void axis_rule(LatticeScheme scheme, int n, double v_max, std::vector<double>& x,
               std::vector<double>& w) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("lattice: per-axis count must be even, >=2");
  x.resize(n);
  w.resize(n);
  switch (scheme) {
    case LatticeScheme::UniformCartesian: {
      // node-centered trapezoid on [-v_max, v_max]; positive half built first
      // and mirrored so v -> -v is exact in floating point
      double h = 2.0 * v_max / (n - 1);
      for (int i = 0; i < n / 2; ++i) {
        double xi = v_max - i * h;
        x[n - 1 - i] = xi;
        x[i] = -xi;
        w[i] = w[n - 1 - i] = (i == 0) ? 0.5 * h : h;
      }
      break;
    }
    case LatticeScheme::GaussHermiteTensor: {
      // weight e^{-t^2} absorbed: v = sqrt(2) t, integrates f(v) e^{-v^2/2}-type
      GaussHermite gh(n);
      for (int i = 0; i < n; ++i) {
        x[i] = std::sqrt(2.0) * gh.x[i];
        w[i] = std::sqrt(2.0) * gh.w[i] * std::exp(gh.x[i] * gh.x[i]);
      }
      // enforce exact mirror pairing against roundoff
      for (int i = 0; i < n / 2; ++i) {
        x[i] = -x[n - 1 - i];
        w[i] = w[n - 1 - i];
      }
      break;
    }
    case LatticeScheme::HalfRangeGauss: {
      // Gauss-Legendre on (0, v_max], mirrored; half-range sums are themselves
      // full Gauss rules, which is what the Knudsen ordinates need.
      GaussLegendre gl(n / 2);
      std::vector<double> xp, wp;
      gl.mapped(0.0, v_max, xp, wp);
      for (int i = 0; i < n / 2; ++i) {
        x[n / 2 + i] = xp[i];
        w[n / 2 + i] = wp[i];
        x[n / 2 - 1 - i] = -xp[i];
        w[n / 2 - 1 - i] = wp[i];
      }
      break;
    }
  }
  // sort nodes ascending, weights kept aligned
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return x[a] < x[b]; });
  std::vector<double> xs(n), ws(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = x[idx[i]];
    ws[i] = w[idx[i]];
  }
  x = std::move(xs);
  w = std::move(ws);
}

}  // namespace

VelocityLattice::VelocityLattice(LatticeScheme scheme, std::array<int, 3> counts, double v_max)
    : scheme_(scheme), counts_(counts), v_max_(v_max) {
  std::array<std::vector<double>, 3> ax, aw;
  for (int d = 0; d < 3; ++d) {
    axis_rule(scheme, counts[d], v_max, ax[d], aw[d]);
    axis_nodes_[d] = ax[d];
    axis_weights_[d] = aw[d];
  }

  const size_t n = static_cast<size_t>(counts[0]) * counts[1] * counts[2];
  nodes_.reserve(n);
  weights_.reserve(n);
  for (int i = 0; i < counts[0]; ++i)
    for (int j = 0; j < counts[1]; ++j)
      for (int k = 0; k < counts[2]; ++k) {
        nodes_.push_back({ax[0][i], ax[1][j], ax[2][k]});
        weights_.push_back(aw[0][i] * aw[1][j] * aw[2][k]);
      }

  // mirror index tables, exact because per-axis rules are symmetric lists
  auto flat = [&](int i, int j, int k) {
    return (static_cast<size_t>(i) * counts[1] + j) * counts[2] + k;
  };
  for (int d = 0; d < 3; ++d) mirror_[d].resize(n);
  for (int i = 0; i < counts[0]; ++i)
    for (int j = 0; j < counts[1]; ++j)
      for (int k = 0; k < counts[2]; ++k) {
        size_t id = flat(i, j, k);
        mirror_[0][id] = flat(counts[0] - 1 - i, j, k);
        mirror_[1][id] = flat(i, counts[1] - 1 - j, k);
        mirror_[2][id] = flat(i, j, counts[2] - 1 - k);
      }
}

}  // namespace kinslip
