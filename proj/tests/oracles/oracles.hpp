#pragma once

// Independent oracles used by the test suites. Everything here is computed
// without touching the spectral solver path it checks.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

// curvature of the ellipse x = a cos t, y = b sin t at parameter t
inline double ellipse_curvature(double a, double b, double t) {
  double s = std::sin(t), c = std::cos(t);
  double den = std::pow(a * a * s * s + b * b * c * c, 1.5);
  return a * b / den;
}

// ellipse parameter t of the polar angle theta (tan t = (a/b) tan theta)
inline double ellipse_param_of_theta(double a, double b, double theta) {
  return std::atan2(a * std::sin(theta), b * std::cos(theta));
}

// adaptive Simpson quadrature
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-13, int depth = 30) {
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole,
          int d) -> double {
    double mid = 0.5 * (lo + hi);
    double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    double flm = f(lm), frm = f(rm);
    double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (d <= 0 || std::abs(left + right - whole) < 15.0 * tol)
      return left + right + (left + right - whole) / 15.0;
    return rec(lo, mid, flo, flm, fmid, left, d - 1) +
           rec(mid, hi, fmid, frm, fhi, right, d - 1);
  };
  double mid = 0.5 * (a + b);
  double fa = f(a), fm = f(mid), fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return rec(a, b, fa, fm, fb, whole, depth);
}

// two-point radial BVP (q u')' / q = g(q) on [r1, r2], u(r1) = u(r2) = 0,
// i.e. the radially symmetric Poisson problem, solved by second-order FD
// with Richardson extrapolation. Returns u at query radius r.
inline double radial_poisson_bvp(const std::function<double(double)>& g, double r1,
                                 double r2, double r) {
  auto solve_on = [&](int n, double rq) {
    // unknowns u_1..u_{n-1} interior on uniform grid
    double h = (r2 - r1) / n;
    std::vector<double> a(n - 1), b(n - 1), c(n - 1), d(n - 1);
    for (int i = 1; i < n; ++i) {
      double qi = r1 + i * h;
      // (q u')' = q g  ->  [q_{i+1/2}(u_{i+1}-u_i) - q_{i-1/2}(u_i - u_{i-1})]/h^2
      double qp = qi + 0.5 * h, qm = qi - 0.5 * h;
      a[i - 1] = qm / (h * h);
      b[i - 1] = -(qp + qm) / (h * h);
      c[i - 1] = qp / (h * h);
      d[i - 1] = qi * g(qi);
    }
    // Thomas solve
    for (int i = 1; i < n - 1; ++i) {
      double m = a[i] / b[i - 1];
      b[i] -= m * c[i - 1];
      d[i] -= m * d[i - 1];
    }
    std::vector<double> u(n + 1, 0.0);
    u[n - 1] = d[n - 2] / b[n - 2];
    for (int i = n - 3; i >= 0; --i) u[i + 1] = (d[i] - c[i] * u[i + 2]) / b[i];
    // linear interpolation at rq
    double t = (rq - r1) / h;
    int i0 = std::max(0, std::min(n - 1, static_cast<int>(t)));
    double frac = t - i0;
    return (1.0 - frac) * u[i0] + frac * u[i0 + 1];
  };
  double c1 = solve_on(2000, r);
  double c2 = solve_on(4000, r);
  return (4.0 * c2 - c1) / 3.0; // h^2 Richardson
}

// centered finite-difference second derivative in arclength along a closed
// curve given as point samples; used against the spectral surface Laplacian
inline double arclength_fd_laplacian(const std::function<double(double)>& f_of_t,
                                     const std::function<double(double)>& speed_of_t,
                                     double t, double dt = 1e-4) {
  // d2f/ds2 = (1/w) d/dt( (1/w) df/dt )  evaluated with centered differences
  auto dfds = [&](double tt) {
    return (f_of_t(tt + dt) - f_of_t(tt - dt)) / (2.0 * dt) / speed_of_t(tt);
  };
  return (dfds(t + dt) - dfds(t - dt)) / (2.0 * dt) / speed_of_t(t);
}

} // namespace oracles
