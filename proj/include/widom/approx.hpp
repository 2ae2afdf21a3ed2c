#pragma once

// Moduli of smoothness, Hölder-Zygmund seminorms and near-best uniform
// Laurent polynomial approximation on the unit circle.

#include <vector>

#include "widom/decay_fit.hpp"
#include "widom/series.hpp"

namespace widom {

inline constexpr int kModulusGrid = 4096;
inline constexpr int kModulusSteps = 512;

/// Order 1: sup_{x, 0<h<=s} |g(x+h) - g(x)|; order 2: sup |g(x+h) - 2g(x) + g(x-h)|.
/// Entrywise max for block symbols. h runs over s*i/512, i = 1..512, and x over
/// a grid of at least 4096 points.
double modulus_of_smoothness(const LaurentMatrixSeries& g, int order, double s);

/// sup over s = pi 2^{-i}, i = 0..12, of omega_2(g, s) / s^delta.
double zygmund_seminorm(const LaurentMatrixSeries& g, double delta);

/// r-th derivative in theta: coefficients multiplied by (ik)^r.
LaurentMatrixSeries theta_derivative(const LaurentMatrixSeries& g, int r);

struct Approximation {
  LaurentMatrixSeries poly;
  /// sup-norm error on the dense check grid.
  double error = 0.0;
  /// "partial-sum" or "vallee-poussin".
  const char* method = "";
};

/// Sup-norm distance on a grid of at least 4096 points.
double sup_distance(const LaurentMatrixSeries& f, const LaurentMatrixSeries& p);

/// Best of the Fourier partial sum S_n and the de la Vallée Poussin mean
/// V_m = (1/m) sum_{k=m}^{2m-1} S_k with m = floor((n+1)/2); both lie in P^n.
Approximation near_best_laurent_approx(const LaurentMatrixSeries& f, int n);

struct SmoothnessReport {
  double gamma_estimate = 0.0;
  std::vector<FitPoint> per_n_errors;
  /// [g^{(r)}]_{gamma - r} with r = ceil(gamma) - 1.
  double seminorm_estimate = 0.0;
  DecayFit fit;
  /// max_n error(n) n^gamma: the empirical Jackson constant for the requested gamma.
  double jackson_constant = 0.0;
  /// error(n) <= jackson_constant * n^{-gamma} holds by construction; this is
  /// the ratio of the largest to the smallest error(n) n^gamma, which stays
  /// bounded when the rate is at least gamma.
  double bound_spread = 0.0;
};

/// Errors of near_best_laurent_approx over n_grid, fitted in log-log with the
/// first point dropped. A trailing point at the floor (< 1e-14) is dropped;
/// an earlier one raises FitDegenerate.
SmoothnessReport jackson_decay_check(const LaurentMatrixSeries& f, double gamma, const std::vector<int>& n_grid);

}  // namespace widom
