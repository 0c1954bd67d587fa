#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace kinslip {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2Pi = 2.5066282746310002;  // sqrt(2*pi)

// Gauss-Legendre nodes/weights on [-1,1], Newton on Legendre recurrence.
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n) : x(n), w(n) {
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double xi = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double p0 = 0, p1 = 0;
      for (int it = 0; it < 100; ++it) {
        p0 = 1.0;
        p1 = xi;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
        double dx = p1 / dp;
        xi -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      x[i] = -xi;
      x[n - 1 - i] = xi;
      w[i] = w[n - 1 - i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
    }
  }
  // mapped to [a,b]
  void mapped(double a, double b, std::vector<double>& xn, std::vector<double>& wn) const {
    const int n = static_cast<int>(x.size());
    xn.resize(n);
    wn.resize(n);
    for (int i = 0; i < n; ++i) {
      xn[i] = 0.5 * (b - a) * (x[i] + 1.0) + a;
      wn[i] = 0.5 * (b - a) * w[i];
    }
  }
};

// Gauss-Hermite (weight e^{-x^2}), Golub-Welsch via symmetric tridiagonal QL-free
// Newton iteration on Hermite recurrence.
struct GaussHermite {
  std::vector<double> x, w;
  explicit GaussHermite(int n) : x(n), w(n) {
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    double z = 0;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      if (i == 0)
        z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
      else if (i == 1)
        z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
      else if (i == 2)
        z = 1.86 * z - 0.86 * x[0];
      else if (i == 3)
        z = 1.91 * z - 0.91 * x[1];
      else
        z = 2.0 * z - x[i - 2];
      double pp = 0;
      for (int it = 0; it < 100; ++it) {
        double p1 = pim4, p2 = 0.0;
        for (int j = 0; j < n; ++j) {
          double p3 = p2;
          p2 = p1;
          p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
        }
        pp = std::sqrt(2.0 * n) * p2;
        double dz = p1 / pp;
        z -= dz;
        if (std::abs(dz) < 1e-15) break;
      }
      x[i] = z;
      x[n - 1 - i] = -z;
      w[i] = w[n - 1 - i] = 2.0 / (pp * pp);
    }
  }
};

// Generalized Laguerre L_k^{(alpha)}(x) by three-term recurrence.
inline double genlaguerre(double alpha, int k, double x) {
  if (k == 0) return 1.0;
  double lm = 1.0, l = 1.0 + alpha - x;
  for (int n = 1; n < k; ++n) {
    double ln = ((2 * n + 1 + alpha - x) * l - (n + alpha) * lm) / (n + 1);
    lm = l;
    l = ln;
  }
  return l;
}

// Monotone cubic (Fritsch-Carlson) interpolant on a sorted grid.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: bad table");
    m_.assign(n, 0.0);
    std::vector<double> d(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    m_[0] = d[0];
    m_[n - 1] = d[n - 2];
    for (size_t i = 1; i + 1 < n; ++i)
      m_[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
    for (size_t i = 0; i + 1 < n; ++i) {
      if (d[i] == 0.0) {
        m_[i] = m_[i + 1] = 0.0;
        continue;
      }
      double a = m_[i] / d[i], b = m_[i + 1] / d[i];
      double s = a * a + b * b;
      if (s > 9.0) {
        double t = 3.0 / std::sqrt(s);
        m_[i] = t * a * d[i];
        m_[i + 1] = t * b * d[i];
      }
    }
  }

  double xmin() const { return x_.front(); }
  double xmax() const { return x_.back(); }

  // Held constant beyond the table range.
  double operator()(double xq) const {
    if (xq <= x_.front()) return y_.front();
    if (xq >= x_.back()) return y_.back();
    size_t lo = 0, hi = x_.size() - 1;
    while (hi - lo > 1) {
      size_t mid = (lo + hi) / 2;
      (x_[mid] <= xq ? lo : hi) = mid;
    }
    double h = x_[lo + 1] - x_[lo], t = (xq - x_[lo]) / h;
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * y_[lo] + h10 * h * m_[lo] + h01 * y_[lo + 1] + h11 * h * m_[lo + 1];
  }

 private:
  std::vector<double> x_, y_;
  std::vector<double> m_;
};

// Composite Gauss quadrature of f over [a,b] split into nseg panels (per-panel npt).
inline double composite_gauss(const std::function<double(double)>& f, double a, double b, int nseg,
                              int npt = 12) {
  static thread_local std::vector<std::pair<int, GaussLegendre>> cache;
  const GaussLegendre* gl = nullptr;
  for (auto& c : cache)
    if (c.first == npt) gl = &c.second;
  if (!gl) {
    cache.emplace_back(npt, GaussLegendre(npt));
    gl = &cache.back().second;
  }
  double s = 0.0, h = (b - a) / nseg;
  for (int k = 0; k < nseg; ++k) {
    double x0 = a + k * h;
    for (int i = 0; i < npt; ++i) {
      double xi = x0 + 0.5 * h * (gl->x[i] + 1.0);
      s += 0.5 * h * gl->w[i] * f(xi);
    }
  }
  return s;
}

// Least-squares line fit y ~ a + b x; returns {a, b}.
inline std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-300) return {sy / n, 0.0};
  return {(sy * sxx - sx * sxy) / det, (n * sxy - sx * sy) / det};
}

}  // namespace kinslip
