#include "capeuler/chebyshev.hpp"

#include <cmath>
#include <stdexcept>

namespace capeuler {
namespace chebyshev {

Eigen::VectorXd lobatto01(int m) {
  if (m < 1) throw std::invalid_argument("lobatto01: need m >= 1");
  Eigen::VectorXd x(m + 1);
  for (int j = 0; j <= m; ++j) x[j] = 0.5 * (1.0 + std::cos(M_PI * j / m));
  return x;
}

Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd w(n);
  // log-scaled product to avoid under/overflow for larger n
  for (int j = 0; j < n; ++j) {
    double logsum = 0.0;
    int sign = 1;
    for (int m = 0; m < n; ++m) {
      if (m == j) continue;
      double d = x[j] - x[m];
      if (d < 0) sign = -sign;
      logsum += std::log(std::abs(d));
    }
    w[j] = sign * std::exp(-logsum);
  }
  // normalize scale (weights only matter up to a common factor)
  w /= w.cwiseAbs().maxCoeff();
  return w;
}

Eigen::MatrixXd differentiation_matrix(const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd w = barycentric_weights(x);
  Eigen::MatrixXd D(n, n);
  for (int i = 0; i < n; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      D(i, j) = (w[j] / w[i]) / (x[i] - x[j]);
      rowsum += D(i, j);
    }
    D(i, i) = -rowsum;
  }
  return D;
}

Eigen::VectorXd quadrature_weights01(const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  // Chebyshev-basis Vandermonde on [0,1]; columns indexed by node
  Eigen::MatrixXd V(n, n);
  Eigen::VectorXd t = 2.0 * x.array() - 1.0;
  for (int j = 0; j < n; ++j) {
    double tm2 = 1.0, tm1 = t[j];
    V(0, j) = 1.0;
    if (n > 1) V(1, j) = tm1;
    for (int m = 2; m < n; ++m) {
      double tm = 2.0 * t[j] * tm1 - tm2;
      V(m, j) = tm;
      tm2 = tm1;
      tm1 = tm;
    }
  }
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
  mu[0] = 1.0;
  for (int m = 2; m < n; m += 2) mu[m] = 1.0 / (1.0 - m * m);
  return V.partialPivLu().solve(mu);
}

double barycentric_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                        const Eigen::VectorXd& values, double xq) {
  const int n = static_cast<int>(x.size());
  double num = 0.0, den = 0.0;
  for (int j = 0; j < n; ++j) {
    double d = xq - x[j];
    if (std::abs(d) < 1e-14) return values[j];
    double c = w[j] / d;
    num += c * values[j];
    den += c;
  }
  return num / den;
}

} // namespace chebyshev
} // namespace capeuler
