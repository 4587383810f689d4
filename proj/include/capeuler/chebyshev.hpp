#pragma once

#include <Eigen/Dense>

// Chebyshev collocation pieces: node families on [0,1], barycentric
// interpolation, differentiation matrices and quadrature weights.

namespace capeuler {
namespace chebyshev {

// Gauss-Lobatto points on [0,1], m+1 nodes ordered x[0]=1 ... x[m]=0
Eigen::VectorXd lobatto01(int m);

// barycentric weights of an arbitrary node set
Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& x);

// first-derivative collocation matrix on nodes x
Eigen::MatrixXd differentiation_matrix(const Eigen::VectorXd& x);

// weights integrating exactly polynomials of degree < n over [0,1]
Eigen::VectorXd quadrature_weights01(const Eigen::VectorXd& x);

// evaluate the interpolant of (x, values) at xq
double barycentric_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                        const Eigen::VectorXd& values, double xq);

} // namespace chebyshev
} // namespace capeuler
