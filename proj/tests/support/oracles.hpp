#pragma once

// Slow, obviously-correct reference implementations. Nothing here shares
// code with the library under test.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using C = std::complex<double>;
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// X[k] = sum_n x[n] exp(-j 2 pi k n / N), O(N^2), angles reduced exactly.
inline std::vector<C> brute_dft(const std::vector<C>& x) {
  const std::size_t n = x.size();
  std::vector<C> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    C acc{};
    for (std::size_t m = 0; m < n; ++m) {
      const std::size_t r = (k * m) % n;
      acc += x[m] * std::polar(1.0, -kTwoPi * static_cast<double>(r) / static_cast<double>(n));
    }
    out[k] = acc;
  }
  return out;
}

// x[i] minus the mean of x over the centered window of length w, truncated
// at the stream edges. before = (w - 1) / 2, after = w - 1 - before.
template <typename T>
std::vector<T> naive_dc_removed(const std::vector<T>& x, std::size_t w) {
  const long n = static_cast<long>(x.size());
  const long before = static_cast<long>((w - 1) / 2);
  const long after = static_cast<long>(w) - 1 - before;
  std::vector<T> out(x.size());
  for (long i = 0; i < n; ++i) {
    std::complex<double> sum{};
    long count = 0;
    for (long k = i - before; k <= i + after; ++k) {
      if (k < 0 || k >= n) continue;
      sum += std::complex<double>(x[k]);
      ++count;
    }
    out[i] = T(std::complex<double>(x[i]) - sum / static_cast<double>(count));
  }
  return out;
}

inline double hann(double offset, double span) {
  if (std::abs(offset) >= span / 2) return 0.0;
  const double c = std::cos(kTwoPi * offset / (2.0 * span));
  return c * c;  // 0.5 (1 + cos(2 pi u / L)) == cos^2(pi u / L)
}

// S(tau, f) = sum_i H(t_i) w(t_i - tau) exp(-j 2 pi f t_i), one term at a time.
inline C direct_stft_cell(const std::vector<double>& t, const std::vector<C>& h, double tau,
                          double f, double span, bool normalize) {
  C acc{};
  double wsum = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double w = hann(t[i] - tau, span);
    if (w == 0.0) continue;
    acc += h[i] * w * std::exp(C(0.0, -kTwoPi * f * t[i]));
    wsum += w;
  }
  return normalize && wsum > 0.0 ? acc / wsum : acc;
}

// Magnitude of the plate field from the closed form, parameters spelled out.
inline C plate_field(double e0, double a, double b, double fc, double r) {
  const double c = 299792458.0;
  const double beta = kTwoPi * fc / c;
  return C(0.0, -1.0) * e0 * (a * b * beta / kTwoPi) * std::exp(C(0.0, -beta * r)) / r;
}

inline double max_abs_diff(const std::vector<C>& a, const std::vector<C>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const std::vector<C>& a) {
  double m = 0.0;
  for (const auto& v : a) m = std::max(m, std::abs(v));
  return m;
}

inline std::vector<C> random_complex(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<C> v(n);
  for (auto& z : v) {
    const double re = g(rng);
    z = C(re, g(rng));
  }
  return v;
}

}  // namespace oracle
