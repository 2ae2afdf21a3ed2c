#include "widom/approx.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "widom/error.hpp"
#include "widom/fourier.hpp"
#include "widom/parallel.hpp"

namespace widom {
namespace {

constexpr double kErrorFloor = 1e-14;

int check_grid(const LaurentMatrixSeries& f) {
  return std::max(kModulusGrid, next_pow2(2L * f.max_abs_offset() + 2));
}

// Coefficients multiplied by w(k).
template <class W>
LaurentMatrixSeries modulated(const LaurentMatrixSeries& g, W&& w) {
  LaurentMatrixSeries::CoeffMap out;
  for (const auto& [k, blk] : g.coeffs()) out.emplace(k, blk * w(k));
  return LaurentMatrixSeries(g.block_size(), std::move(out));
}

double sup_on_grid(const LaurentMatrixSeries& g, int m) {
  double s = 0.0;
  for (const Matrix& v : sample(g, m).samples) s = std::max(s, max_entry_norm(v));
  return s;
}

// Partial sums S_k for k = lo..hi averaged: coefficient k gets weight
// (number of S_j containing it) / count.
LaurentMatrixSeries vallee_poussin(const LaurentMatrixSeries& f, int m) {
  LaurentMatrixSeries::CoeffMap out;
  for (const auto& [k, blk] : f.coeffs()) {
    const int a = std::abs(k);
    if (a > 2 * m - 1) continue;
    const double w = a <= m ? 1.0 : static_cast<double>(2 * m - a) / m;
    out.emplace(k, blk * w);
  }
  return LaurentMatrixSeries(f.block_size(), std::move(out));
}

}  // namespace

double modulus_of_smoothness(const LaurentMatrixSeries& g, int order, double s) {
  require(order == 1 || order == 2, "modulus order must be 1 or 2");
  require(s > 0.0 && s <= std::numbers::pi + 1e-15, "s must lie in (0, pi]");
  const int m = check_grid(g);
  const Index bs = g.block_size();
  std::vector<double> sups(kModulusSteps);
  parallel_for(kModulusSteps, [&](std::size_t i) {
    const double h = s * static_cast<double>(i + 1) / kModulusSteps;
    std::vector<Complex> bins(m), work;
    double sup = 0.0;
    for (Index r = 0; r < bs; ++r) {
      for (Index c = 0; c < bs; ++c) {
        std::fill(bins.begin(), bins.end(), Complex(0.0));
        for (const auto& [k, blk] : g.coeffs()) {
          const Complex w = order == 1 ? std::polar(1.0, k * h) - 1.0 : Complex(2.0 * std::cos(k * h) - 2.0);
          bins[fourier::offset_bin(k, m)] += blk(r, c) * w;
        }
        fourier::bins_to_samples_inplace(bins, work);
        for (const Complex& v : bins) sup = std::max(sup, std::abs(v));
      }
    }
    sups[i] = sup;
  });
  return *std::max_element(sups.begin(), sups.end());
}

double zygmund_seminorm(const LaurentMatrixSeries& g, double delta) {
  require(delta > 0.0 && delta <= 1.0, "delta must lie in (0, 1]");
  double best = 0.0;
  for (int i = 0; i <= 12; ++i) {
    const double s = std::numbers::pi * std::ldexp(1.0, -i);
    best = std::max(best, modulus_of_smoothness(g, 2, s) / std::pow(s, delta));
  }
  return best;
}

LaurentMatrixSeries theta_derivative(const LaurentMatrixSeries& g, int r) {
  require(r >= 0, "derivative order must be nonnegative");
  return modulated(g, [r](int k) { return std::pow(Complex(0.0, k), r); });
}

double sup_distance(const LaurentMatrixSeries& f, const LaurentMatrixSeries& p) {
  const int m = std::max(check_grid(f), check_grid(p));
  return sup_on_grid(f - p, m);
}

Approximation near_best_laurent_approx(const LaurentMatrixSeries& f, int n) {
  require(n >= 1, "degree must be at least 1");
  Approximation partial{f.truncated(-n, n), 0.0, "partial-sum"};
  partial.error = sup_distance(f, partial.poly);
  const int m = (n + 1) / 2;
  Approximation vp{vallee_poussin(f, m), 0.0, "vallee-poussin"};
  vp.error = sup_distance(f, vp.poly);
  return vp.error < partial.error ? vp : partial;
}

SmoothnessReport jackson_decay_check(const LaurentMatrixSeries& f, double gamma, const std::vector<int>& n_grid) {
  require(gamma > 0.0, "gamma must be positive");
  require(n_grid.size() >= 4, "n grid needs at least 4 points");
  require(std::is_sorted(n_grid.begin(), n_grid.end()) && n_grid.front() >= 1, "n grid must be increasing");
  require(n_grid.back() >= 8 * n_grid.front(), "n grid must span a factor of 8");

  SmoothnessReport rep;
  rep.per_n_errors.resize(n_grid.size());
  parallel_for(n_grid.size(), [&](std::size_t i) {
    rep.per_n_errors[i] = {static_cast<double>(n_grid[i]), near_best_laurent_approx(f, n_grid[i]).error};
  });

  std::vector<FitPoint> usable;
  for (std::size_t i = 0; i < rep.per_n_errors.size(); ++i) {
    const FitPoint& p = rep.per_n_errors[i];
    if (p.magnitude >= kErrorFloor) {
      usable.push_back(p);
      continue;
    }
    if (i + 1 != rep.per_n_errors.size()) {
      std::ostringstream msg;
      msg << "approximation error reached the floor at n = " << p.n << " before the grid ends";
      fail(ErrorKind::FitDegenerate, msg.str());
    }
  }
  FitOptions opts;
  opts.floor = kErrorFloor;
  opts.drop_first = true;
  opts.min_points = 3;
  rep.fit = fit_decay(usable, opts);
  rep.gamma_estimate = -rep.fit.slope;

  double lo = INFINITY;
  for (const FitPoint& p : usable) {
    const double scaled = p.magnitude * std::pow(p.n, gamma);
    rep.jackson_constant = std::max(rep.jackson_constant, scaled);
    lo = std::min(lo, scaled);
  }
  rep.bound_spread = rep.jackson_constant / lo;

  const int r = std::max(0, static_cast<int>(std::ceil(gamma)) - 1);
  rep.seminorm_estimate = zygmund_seminorm(theta_derivative(f, r), gamma - r);
  return rep;
}

}  // namespace widom
