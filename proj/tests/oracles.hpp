#pragma once

// Test-only reference computations. Nothing here calls into the FFT or
// factorization code paths it is used to check.

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "widom/series.hpp"

namespace oracle {

using widom::Complex;
using widom::LaurentMatrixSeries;
using widom::Matrix;

inline double pi() { return std::numbers::pi; }

/// Fourier coefficient of a scalar function by the O(M) trapezoid sum.
inline Complex fourier_coefficient(const std::function<Complex(double)>& g, int k, int m) {
  Complex s = 0.0;
  for (int j = 0; j < m; ++j) {
    const double th = 2.0 * pi() * j / m;
    s += g(th) * std::polar(1.0, -k * th);
  }
  return s / static_cast<double>(m);
}

/// Scalar symbol value by direct summation.
inline Complex scalar_value(const LaurentMatrixSeries& a, double theta) {
  Complex s = 0.0;
  for (const auto& [k, blk] : a.coeffs()) s += blk(0, 0) * std::polar(1.0, k * theta);
  return s;
}

inline LaurentMatrixSeries random_symbol(std::mt19937_64& rng, widom::Index n, int lo, int hi,
                                         double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  LaurentMatrixSeries::CoeffMap coeffs;
  for (int k = lo; k <= hi; ++k) {
    Matrix blk(n, n);
    for (widom::Index i = 0; i < n; ++i)
      for (widom::Index j = 0; j < n; ++j) blk(i, j) = Complex(g(rng), g(rng));
    coeffs.emplace(k, blk);
  }
  return LaurentMatrixSeries(n, std::move(coeffs));
}

inline double max_coeff_diff(const LaurentMatrixSeries& a, const LaurentMatrixSeries& b) {
  double d = 0.0;
  const int lo = std::min(a.min_offset(), b.min_offset());
  const int hi = std::max(a.max_offset(), b.max_offset());
  for (int k = lo; k <= hi; ++k) d = std::max(d, widom::max_entry_norm(a.coeff(k) - b.coeff(k)));
  return d;
}

/// det T_n for a(t) = (1 - rho/t)(1 - rho t): (1 - rho^{2(n+2)}) / (1 - rho^2),
/// from the three-term recurrence D_n = (1+rho^2) D_{n-1} - rho^2 D_{n-2}.
inline double rational_fixture_det(double rho, int n) {
  return (1.0 - std::pow(rho, 2.0 * (n + 2))) / (1.0 - rho * rho);
}

inline double rational_fixture_det_by_recurrence(double rho, int n) {
  const double diag = 1.0 + rho * rho;
  double prev = 1.0;  // D_{-1}
  double cur = diag;  // D_0
  for (int i = 1; i <= n; ++i) {
    const double next = diag * cur - rho * rho * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// sum_{d=-n}^{n} (n+1-|d|) tr(a_d a_{-d}) = tr T_n(a)^2.
inline Complex trace_of_square(const LaurentMatrixSeries& a, int n) {
  Complex s = 0.0;
  for (int d = -n; d <= n; ++d) s += double(n + 1 - std::abs(d)) * (a.coeff(d) * a.coeff(-d)).trace();
  return s;
}

/// Scalar strong Szego constant exp(sum_k k (log a)_k (log a)_{-k}) with the
/// log coefficients taken by a plain trapezoid sum of the continuous log.
inline Complex strong_szego_series(const LaurentMatrixSeries& a, int m, int kmax) {
  std::vector<Complex> logs(m);
  double prev_arg = std::arg(scalar_value(a, 0.0));
  double offset = 0.0;
  for (int j = 0; j < m; ++j) {
    const Complex v = scalar_value(a, 2.0 * pi() * j / m);
    double arg = std::arg(v);
    while (arg + offset - prev_arg > pi()) offset -= 2 * pi();
    while (arg + offset - prev_arg < -pi()) offset += 2 * pi();
    prev_arg = arg + offset;
    logs[j] = Complex(std::log(std::abs(v)), prev_arg);
  }
  auto coeff = [&](int k) {
    Complex s = 0.0;
    for (int j = 0; j < m; ++j) s += logs[j] * std::polar(1.0, -2.0 * pi() * k * j / m);
    return s / static_cast<double>(m);
  };
  Complex s = 0.0;
  for (int k = 1; k <= kmax; ++k) s += double(k) * coeff(k) * coeff(-k);
  return std::exp(s);
}

}  // namespace oracle
