#pragma once

#include <Eigen/Dense>
#include <complex>

// Periodic spectral machinery on uniform theta grids of power-of-two size.
// Spectra use the coefficient convention f(theta) = sum_k c_k exp(i k theta)
// with modes stored in FFT order [0, 1, ..., N/2-1, -N/2, ..., -1].

namespace capeuler {

using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

namespace fourier {

bool is_power_of_two(int n);

// signed wavenumber of spectrum slot i (FFT order)
int wavenumber(int i, int n);

// uniform grid theta_j = 2 pi j / n
Vec theta_grid(int n);

// grid values -> coefficients (forward DFT scaled by 1/N)
CVec to_spectrum(const Vec& grid);
CVec to_spectrum_c(const CVec& grid);

// coefficients -> grid values (real part)
Vec to_grid(const CVec& spectrum);
CVec to_grid_c(const CVec& spectrum);

// d^order/dtheta^order on grid values; odd orders zero the Nyquist mode
Vec derivative(const Vec& grid, int order = 1);
CVec derivative_spectrum(const CVec& spectrum, int order);

// zero all modes with |k| > kmax
CVec truncated(const CVec& spectrum, int kmax);

// 2/3-rule dealiasing of grid values
Vec dealias(const Vec& grid);

// evaluate the trigonometric interpolant at arbitrary theta
// (Nyquist slot treated as a pure cosine)
double eval(const CVec& spectrum, double theta);

// fraction of spectral mass (sum |c_k|^2, k != 0) carried by |k| >= n/3
double high_mode_mass_fraction(const CVec& spectrum);

// random real band-limited grid function: modes 1..kmax with unit-scale
// coefficients drawn from U(-1,1), zero mean
Vec random_band_limited(int n, int kmax, unsigned seed);

// batched row transforms used by the solver hot loops (no per-row heap churn)
void derivative_rows(const Mat& grid, Mat& out, int order = 1);
void spectrum_rows(const Mat& grid, CMat& out);
void grid_rows(const CMat& spectrum, Mat& out);

} // namespace fourier
} // namespace capeuler
