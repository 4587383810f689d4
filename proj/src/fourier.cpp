#include "capeuler/fourier.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>
#include <vector>

namespace capeuler {
namespace fourier {

namespace {

// Precomputed radix-2 tables per transform size.
struct Tables {
  std::vector<int> bitrev;
  std::vector<Complex> twiddle; // forward twiddles e^{-2 pi i j / n}, j < n/2
};

const Tables& tables_for(int n) {
  thread_local int last_n = 0;
  thread_local const Tables* last = nullptr;
  if (n == last_n) return *last;
  static std::map<int, Tables> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) {
    last_n = n;
    last = &it->second;
    return it->second;
  }
  Tables t;
  t.bitrev.resize(n);
  int logn = 0;
  while ((1 << logn) < n) ++logn;
  for (int i = 0; i < n; ++i) {
    int r = 0;
    for (int b = 0; b < logn; ++b)
      if (i & (1 << b)) r |= 1 << (logn - 1 - b);
    t.bitrev[i] = r;
  }
  t.twiddle.resize(n / 2);
  for (int j = 0; j < n / 2; ++j) {
    double ang = -2.0 * M_PI * j / n;
    t.twiddle[j] = Complex(std::cos(ang), std::sin(ang));
  }
  const Tables& ref = cache.emplace(n, std::move(t)).first->second;
  last_n = n;
  last = &ref;
  return ref;
}

// in-place radix-2 DIT; sign=-1 forward, +1 inverse (no normalization)
void fft_inplace(Complex* a, int n, int sign) {
  const Tables& t = tables_for(n);
  for (int i = 0; i < n; ++i) {
    int j = t.bitrev[i];
    if (j > i) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    int half = len >> 1;
    int stride = n / len;
    for (int base = 0; base < n; base += len) {
      for (int j = 0; j < half; ++j) {
        Complex w = t.twiddle[j * stride];
        if (sign > 0) w = std::conj(w);
        Complex u = a[base + j];
        Complex v = a[base + j + half] * w;
        a[base + j] = u + v;
        a[base + j + half] = u - v;
      }
    }
  }
}

} // namespace

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int wavenumber(int i, int n) { return i < n / 2 ? i : i - n; }

Vec theta_grid(int n) {
  Vec th(n);
  for (int j = 0; j < n; ++j) th[j] = 2.0 * M_PI * j / n;
  return th;
}

CVec to_spectrum_c(const CVec& grid) {
  const int n = static_cast<int>(grid.size());
  if (!is_power_of_two(n)) throw std::invalid_argument("fourier: size must be a power of two");
  CVec a = grid;
  fft_inplace(a.data(), n, -1);
  a /= static_cast<double>(n);
  return a;
}

CVec to_spectrum(const Vec& grid) {
  CVec g = grid.cast<Complex>();
  return to_spectrum_c(g);
}

CVec to_grid_c(const CVec& spectrum) {
  const int n = static_cast<int>(spectrum.size());
  if (!is_power_of_two(n)) throw std::invalid_argument("fourier: size must be a power of two");
  CVec a = spectrum;
  fft_inplace(a.data(), n, +1);
  return a;
}

Vec to_grid(const CVec& spectrum) {
  CVec a = to_grid_c(spectrum);
  return a.real();
}

namespace {

inline Complex ik_power(int k, int order) {
  switch (order) {
    case 1: return Complex(0.0, k);
    case 2: return Complex(-double(k) * k, 0.0);
    default: return std::pow(Complex(0.0, k), order);
  }
}

} // namespace

CVec derivative_spectrum(const CVec& spectrum, int order) {
  const int n = static_cast<int>(spectrum.size());
  CVec out(n);
  for (int i = 0; i < n; ++i) out[i] = spectrum[i] * ik_power(wavenumber(i, n), order);
  if (order % 2 == 1) out[n / 2] = 0.0; // unmatched Nyquist mode
  return out;
}

Vec derivative(const Vec& grid, int order) {
  return to_grid(derivative_spectrum(to_spectrum(grid), order));
}

CVec truncated(const CVec& spectrum, int kmax) {
  const int n = static_cast<int>(spectrum.size());
  CVec out = spectrum;
  for (int i = 0; i < n; ++i)
    if (std::abs(wavenumber(i, n)) > kmax) out[i] = 0.0;
  return out;
}

Vec dealias(const Vec& grid) {
  const int n = static_cast<int>(grid.size());
  return to_grid(truncated(to_spectrum(grid), n / 3));
}

double eval(const CVec& spectrum, double theta) {
  const int n = static_cast<int>(spectrum.size());
  Complex acc = spectrum[0];
  for (int i = 1; i < n; ++i) {
    int k = wavenumber(i, n);
    if (i == n / 2) {
      acc += spectrum[i] * std::cos(0.5 * n * theta);
    } else {
      acc += spectrum[i] * std::exp(Complex(0.0, k * theta));
    }
  }
  return acc.real();
}

double high_mode_mass_fraction(const CVec& spectrum) {
  const int n = static_cast<int>(spectrum.size());
  double total = 0.0, high = 0.0;
  for (int i = 1; i < n; ++i) {
    int k = std::abs(wavenumber(i, n));
    double m = std::norm(spectrum[i]);
    total += m;
    if (3 * k >= n) high += m;
  }
  if (total <= 0.0) return 0.0;
  return high / total;
}

namespace {

std::vector<Complex>& scratch(int n) {
  thread_local std::vector<Complex> buf;
  if (static_cast<int>(buf.size()) < n) buf.resize(n);
  return buf;
}

} // namespace

void derivative_rows(const Mat& grid, Mat& out, int order) {
  const int rows = static_cast<int>(grid.rows());
  const int n = static_cast<int>(grid.cols());
  if (!is_power_of_two(n)) throw std::invalid_argument("fourier: size must be a power of two");
  out.resize(rows, n);
  auto& buf = scratch(n);
  const double inv_n = 1.0 / n;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < n; ++j) buf[j] = Complex(grid(i, j), 0.0);
    fft_inplace(buf.data(), n, -1);
    for (int j = 0; j < n; ++j) buf[j] *= ik_power(wavenumber(j, n), order);
    if (order % 2 == 1) buf[n / 2] = 0.0;
    fft_inplace(buf.data(), n, +1);
    for (int j = 0; j < n; ++j) out(i, j) = buf[j].real() * inv_n;
  }
}

void spectrum_rows(const Mat& grid, CMat& out) {
  const int rows = static_cast<int>(grid.rows());
  const int n = static_cast<int>(grid.cols());
  out.resize(rows, n);
  auto& buf = scratch(n);
  const double inv_n = 1.0 / n;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < n; ++j) buf[j] = Complex(grid(i, j), 0.0);
    fft_inplace(buf.data(), n, -1);
    for (int j = 0; j < n; ++j) out(i, j) = buf[j] * inv_n;
  }
}

void grid_rows(const CMat& spectrum, Mat& out) {
  const int rows = static_cast<int>(spectrum.rows());
  const int n = static_cast<int>(spectrum.cols());
  out.resize(rows, n);
  auto& buf = scratch(n);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < n; ++j) buf[j] = spectrum(i, j);
    fft_inplace(buf.data(), n, +1);
    for (int j = 0; j < n; ++j) out(i, j) = buf[j].real();
  }
}

Vec random_band_limited(int n, int kmax, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  CVec spec = CVec::Zero(n);
  for (int k = 1; k <= kmax && k < n / 2; ++k) {
    Complex c(uni(rng), uni(rng));
    spec[k] = 0.5 * c;
    spec[n - k] = std::conj(spec[k]);
  }
  return to_grid(spec);
}

} // namespace fourier
} // namespace capeuler
