#pragma once

#include <array>
#include <string>
#include <vector>

#include "kinslip/numerics.hpp"

namespace kinslip {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm2(const Vec3& a) { return dot(a, a); }

enum class LatticeScheme { UniformCartesian, GaussHermiteTensor, HalfRangeGauss };

LatticeScheme lattice_scheme_from_string(const std::string& s);
std::string to_string(LatticeScheme s);

// Truncated 3D velocity lattice, mirror-symmetric per axis so that specular
// reflection and sign(v.n) splits are exact node permutations.
class VelocityLattice {
 public:
  VelocityLattice(LatticeScheme scheme, std::array<int, 3> counts, double v_max);

  static VelocityLattice make_default() {
    return VelocityLattice(LatticeScheme::UniformCartesian, {24, 24, 24}, 6.2);
  }

  size_t size() const { return nodes_.size(); }
  const std::vector<Vec3>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const Vec3& node(size_t k) const { return nodes_[k]; }
  double weight(size_t k) const { return weights_[k]; }
  double v_max() const { return v_max_; }
  LatticeScheme scheme() const { return scheme_; }
  const std::array<int, 3>& counts() const { return counts_; }

  // Index of the node with component `axis` negated. Exact by construction.
  size_t mirror(size_t k, int axis) const { return mirror_[axis][k]; }

  // per-axis 1D rules; node(i,j,k) = (ax0[i], ax1[j], ax2[k]), lexicographic
  const std::vector<double>& axis_nodes(int d) const { return axis_nodes_[d]; }
  const std::vector<double>& axis_weights(int d) const { return axis_weights_[d]; }

  // quadrature of a lattice function
  double integrate(const std::vector<double>& f) const {
    double s = 0;
    for (size_t k = 0; k < f.size(); ++k) s += weights_[k] * f[k];
    return s;
  }

  double inner(const std::vector<double>& f, const std::vector<double>& g) const {
    double s = 0;
    for (size_t k = 0; k < f.size(); ++k) s += weights_[k] * f[k] * g[k];
    return s;
  }

 private:
  LatticeScheme scheme_;
  std::array<int, 3> counts_;
  double v_max_;
  std::vector<Vec3> nodes_;
  std::vector<double> weights_;
  std::array<std::vector<size_t>, 3> mirror_;
  std::array<std::vector<double>, 3> axis_nodes_, axis_weights_;
};

}  // namespace kinslip
