#pragma once

#include <Eigen/Dense>
#include <vector>

namespace kinslip {

// Anderson mixing (type II) for fixed points x -> G(x), with the usual
// safeguards for nearly-neutral maps: rank-thresholded least squares, a cap
// on the extrapolation coefficients, and damping.
class AndersonMixer {
 public:
  AndersonMixer(Eigen::Index dim, int depth, double damping = 1.0, double gamma_cap = 1e4)
      : dim_(dim), depth_(depth), damping_(damping), gamma_cap_(gamma_cap) {}

  Eigen::VectorXd next(const Eigen::VectorXd& x, const Eigen::VectorXd& gx) {
    Eigen::VectorXd r = gx - x;
    if (have_prev_) {
      dX_.push_back(x - x_prev_);
      dR_.push_back(r - r_prev_);
      if (static_cast<int>(dX_.size()) > depth_) {
        dX_.erase(dX_.begin());
        dR_.erase(dR_.begin());
      }
    }
    x_prev_ = x;
    r_prev_ = r;
    have_prev_ = true;
    if (dX_.empty()) return gx;
    const int m = static_cast<int>(dX_.size());
    Eigen::MatrixXd R(dim_, m), X(dim_, m);
    for (int i = 0; i < m; ++i) {
      R.col(i) = dR_[i];
      X.col(i) = dX_[i];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(R);
    qr.setThreshold(1e-10);
    Eigen::VectorXd gamma = qr.solve(r);
    const double gmax = gamma.cwiseAbs().maxCoeff();
    if (gmax > gamma_cap_) gamma *= gamma_cap_ / gmax;
    return gx - damping_ * ((X + R) * gamma);
  }

  void reset() {
    dX_.clear();
    dR_.clear();
    have_prev_ = false;
  }

 private:
  Eigen::Index dim_;
  int depth_;
  double damping_;
  double gamma_cap_;
  bool have_prev_ = false;
  Eigen::VectorXd x_prev_, r_prev_;
  std::vector<Eigen::VectorXd> dX_, dR_;
};

}  // namespace kinslip
