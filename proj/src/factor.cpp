#include "widom/factor.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numbers>
#include <sstream>

#include "widom/error.hpp"
#include "widom/fourier.hpp"
#include "widom/parallel.hpp"
#include "widom/toeplitz.hpp"

namespace widom {
namespace {

constexpr double kMaxSectionCondition = 1e10;
constexpr double kProductTailTolerance = 1e-12;

LaurentMatrixSeries plus_part(const LaurentMatrixSeries& a) { return a.truncated(0, INT_MAX); }
LaurentMatrixSeries minus_part(const LaurentMatrixSeries& a) { return a.truncated(INT_MIN, 0); }

// Largest block outside [lo, hi].
double outside_mass(const LaurentMatrixSeries& a, int lo, int hi) {
  double m = 0.0;
  for (const auto& [k, blk] : a.coeffs())
    if (k < lo || k > hi) m = std::max(m, max_entry_norm(blk));
  return m;
}

int support_width(const LaurentMatrixSeries& a) { return a.max_abs_offset(); }

// Keeps offsets in [-K, K] for the smallest K whose discarded max-entry mass
// is below tol relative to the largest block, with K <= cap.
LaurentMatrixSeries cut_tail(const LaurentMatrixSeries& a, double tol, int cap) {
  double peak = 0.0;
  for (const auto& [k, blk] : a.coeffs()) peak = std::max(peak, max_entry_norm(blk));
  if (peak == 0.0) return a.truncated(0, 0);
  const int width = a.max_abs_offset();
  std::vector<double> ring(width + 2, 0.0);
  for (const auto& [k, blk] : a.coeffs()) ring[std::abs(k)] += max_entry_norm(blk);
  int keep = width;
  double tail = 0.0;
  while (keep > 0 && tail + ring[keep] <= tol * peak) tail += ring[keep--];
  keep = std::min(keep, cap);
  return a.truncated(-keep, keep);
}

// x * y through samples on a grid that holds the full product support.
LaurentMatrixSeries grid_product(const LaurentMatrixSeries& x, const LaurentMatrixSeries& y, int cap) {
  const int lo = x.min_offset() + y.min_offset();
  const int hi = x.max_offset() + y.max_offset();
  const int m = next_pow2(std::max<long>(256, 2L * std::max(std::abs(lo), std::abs(hi)) + 2));
  const SymbolGrid sx = sample(x, m);
  const SymbolGrid sy = sample(y, m);
  std::vector<Matrix> prod(m);
  for (int j = 0; j < m; ++j) prod[j] = sx.samples[j] * sy.samples[j];
  const std::vector<Matrix> bins = fourier::samples_to_bins(prod);
  LaurentMatrixSeries::CoeffMap coeffs;
  for (int k = lo; k <= hi; ++k) coeffs.emplace(k, bins[fourier::offset_bin(k, m)]);
  return cut_tail(LaurentMatrixSeries(x.block_size(), std::move(coeffs)), kProductTailTolerance, cap);
}

double sup_difference(const SymbolGrid& x, const SymbolGrid& y, const SymbolGrid& target) {
  double r = 0.0;
  for (int j = 0; j < target.size(); ++j)
    r = std::max(r, max_entry_norm(x.samples[j] * y.samples[j] - target.samples[j]));
  return r;
}

double min_singular_value(const SymbolGrid& g) {
  double s = INFINITY;
  for (const Matrix& m : g.samples) {
    if (m.rows() == 1) {
      s = std::min(s, std::abs(m(0, 0)));
    } else {
      Eigen::JacobiSVD<Matrix> svd(m);
      s = std::min(s, svd.singularValues().minCoeff());
    }
  }
  return s;
}

int check_grid_for(std::initializer_list<const LaurentMatrixSeries*> series) {
  int width = 0;
  for (const auto* s : series) width = std::max(width, support_width(*s));
  return default_grid_size(width);
}

void fill_residuals(const LaurentMatrixSeries& a, WHFactors& w) {
  const int m = std::max(a.grid_size(), check_grid_for({&a, &w.u_minus, &w.u_plus, &w.v_plus, &w.v_minus}));
  const SymbolGrid sa = sample(a, m);
  const SymbolGrid um = sample(w.u_minus, m), up = sample(w.u_plus, m);
  const SymbolGrid vp = sample(w.v_plus, m), vm = sample(w.v_minus, m);
  w.residuals.product_residual_right = sup_difference(um, up, sa);
  w.residuals.product_residual_left = sup_difference(vp, vm, sa);
  w.residuals.inverse_margin = std::min({min_singular_value(um), min_singular_value(up),
                                         min_singular_value(vp), min_singular_value(vm)});
  w.residuals.check_grid = m;
}

// ---- scalar log splitting ---------------------------------------------------

std::vector<Matrix> unwrapped_log(const LaurentMatrixSeries& a, int m) {
  const SymbolGrid g = sample(a, m);
  std::vector<Matrix> out(m);
  double prev = 0.0;
  double shift = 0.0;
  for (int j = 0; j < m; ++j) {
    const Complex z = g.samples[j](0, 0);
    if (z == Complex(0.0)) fail(ErrorKind::SingularSymbol, "symbol vanishes on the grid");
    const double ph = std::arg(z);
    if (j > 0) shift -= 2.0 * std::numbers::pi * std::round((ph - prev) / (2.0 * std::numbers::pi));
    prev = ph;
    out[j] = Matrix::Constant(1, 1, Complex(std::log(std::abs(z)), ph + shift));
  }
  return out;
}

fourier::AdaptiveOptions scalar_options(int min_grid, int cutoff) {
  fourier::AdaptiveOptions opts;
  opts.min_grid = min_grid;
  opts.max_cutoff = cutoff;
  return opts;
}

// exp(sign * h) with h one-sided; returns the series and its wrong-side mass.
std::pair<LaurentMatrixSeries, double> exp_series(const LaurentMatrixSeries& h, double sign, bool plus,
                                                  int cutoff) {
  auto sampler = [&](int m) {
    SymbolGrid s = sample(h, m);
    for (Matrix& v : s.samples) v(0, 0) = std::exp(sign * v(0, 0));
    return std::move(s.samples);
  };
  auto res = fourier::adaptive_series(1, sampler, scalar_options(default_grid_size(support_width(h)), cutoff));
  const LaurentMatrixSeries& e = res.series;
  if (plus) return {plus_part(e), outside_mass(e, 0, INT_MAX)};
  return {minus_part(e), outside_mass(e, INT_MIN, 0)};
}

// ---- block finite sections --------------------------------------------------

struct RightPass {
  LaurentMatrixSeries minus, plus, minus_inv, plus_inv;
  double leakage = 0.0;
};

RightPass right_pass(const LaurentMatrixSeries& a, int m) {
  const Index bs = a.block_size();
  const Matrix t = toeplitz_section(a, m).dense;
  Eigen::PartialPivLU<Matrix> lu(t);
  const double rc = lu.rcond();
  if (!(rc * kMaxSectionCondition > 1.0)) {
    std::ostringstream msg;
    msg << "T_" << m << " has condition estimate " << (rc > 0 ? 1.0 / rc : INFINITY);
    fail(ErrorKind::IllConditionedSection, msg.str());
  }
  Matrix rhs = Matrix::Zero(t.rows(), bs);
  rhs.topRows(bs).setIdentity();
  const Matrix x = lu.solve(rhs);

  RightPass out;
  LaurentMatrixSeries::CoeffMap plus_inv;
  for (int j = 0; j <= m; ++j) plus_inv.emplace(j, x.middleRows(j * bs, bs));
  out.plus_inv = LaurentMatrixSeries(bs, std::move(plus_inv));

  const int cap = 4 * m;
  const LaurentMatrixSeries plus = pointwise_inverse(out.plus_inv).series;
  out.plus = plus.truncated(0, cap);
  double leak = outside_mass(plus, 0, INT_MAX);

  // Rows 0..m of a * X reproduce the first block column of the identity, so
  // the 0-offset block of u_- is I by construction.
  const LaurentMatrixSeries minus = multiply(a, out.plus_inv);
  out.minus = minus.truncated(-cap, 0);
  leak = std::max(leak, outside_mass(minus, INT_MIN, 0));

  const LaurentMatrixSeries minus_inv = pointwise_inverse(out.minus).series;
  out.minus_inv = minus_inv.truncated(-cap, 0);
  leak = std::max(leak, outside_mass(minus_inv, INT_MIN, 0));
  out.leakage = leak;
  return out;
}

WHFactors block_attempt(const LaurentMatrixSeries& a, int m) {
  const RightPass right = right_pass(a, m);
  const RightPass left = right_pass(pointwise_inverse(a).series, m);  // a^{-1} = f_- f_+
  WHFactors w;
  w.method = "finite-section";
  w.u_minus = right.minus;
  w.u_plus = right.plus;
  w.u_minus_inv = right.minus_inv;
  w.u_plus_inv = right.plus_inv;
  w.v_plus = left.plus_inv;
  w.v_minus = left.minus_inv;
  w.v_plus_inv = left.plus;
  w.v_minus_inv = left.minus;
  w.residuals.leakage = std::max(right.leakage, left.leakage);
  w.residuals.section = m;
  fill_residuals(a, w);
  return w;
}

LaurentMatrixSeries normalized_plus(const LaurentMatrixSeries& p, bool left_multiply) {
  const Matrix inv0 = p.coeff(0).inverse();
  LaurentMatrixSeries::CoeffMap out;
  for (const auto& [k, blk] : p.coeffs()) out.emplace(k, left_multiply ? Matrix(inv0 * blk) : Matrix(blk * inv0));
  return LaurentMatrixSeries(p.block_size(), std::move(out));
}

double wiener_distance(const LaurentMatrixSeries& x, const LaurentMatrixSeries& y) {
  return (x - y).wiener_norm();
}

}  // namespace

WHFactors scalar_canonical_wh(const LaurentMatrixSeries& a, int cutoff) {
  require(a.block_size() == 1, "scalar factorization needs a 1x1 symbol");
  require(cutoff >= 0, "cutoff must be nonnegative");
  const int wind = winding_number(a);
  if (wind != 0) {
    std::ostringstream msg;
    msg << "winding number " << wind << " (canonical factorization needs 0)";
    fail(ErrorKind::NonZeroWinding, msg.str());
  }
  auto log_sampler = [&](int m) { return unwrapped_log(a, m); };
  const auto g = fourier::adaptive_series(1, log_sampler, scalar_options(a.grid_size(), cutoff)).series;
  const LaurentMatrixSeries g_plus = g.truncated(0, INT_MAX);
  const LaurentMatrixSeries g_minus = g.truncated(INT_MIN, -1);

  WHFactors w;
  w.method = "log-splitting";
  double leak = 0.0;
  auto take = [&](std::pair<LaurentMatrixSeries, double> r) {
    leak = std::max(leak, r.second);
    return std::move(r.first);
  };
  w.u_plus = take(exp_series(g_plus, 1.0, true, cutoff));
  w.u_plus_inv = take(exp_series(g_plus, -1.0, true, cutoff));
  w.u_minus = take(exp_series(g_minus, 1.0, false, cutoff));
  w.u_minus_inv = take(exp_series(g_minus, -1.0, false, cutoff));
  // Scalars commute: the left factorization is the right one read backwards.
  w.v_plus = w.u_plus;
  w.v_minus = w.u_minus;
  w.v_plus_inv = w.u_plus_inv;
  w.v_minus_inv = w.u_minus_inv;
  w.residuals.leakage = leak;
  fill_residuals(a, w);
  return w;
}

WHFactors block_canonical_wh(const LaurentMatrixSeries& a, int m, double tolerance) {
  require(m >= 1, "section size must be positive");
  const int wind = winding_number(a);
  if (wind != 0) {
    std::ostringstream msg;
    msg << "winding number of det a is " << wind << "; some partial index is nonzero";
    fail(ErrorKind::NonCanonical, msg.str());
  }
  WHFactors w;
  for (int attempt = 0; attempt < 2; ++attempt, m *= 2) {
    w = block_attempt(a, m);
    const auto& r = w.residuals;
    if (std::max({r.product_residual_right, r.product_residual_left, r.leakage}) <= tolerance) return w;
  }
  std::ostringstream msg;
  msg << "factorization did not verify at m = " << w.residuals.section << ": right residual "
      << w.residuals.product_residual_right << ", left residual " << w.residuals.product_residual_left
      << ", leakage " << w.residuals.leakage << " (nonzero partial indices?)";
  fail(ErrorKind::NonCanonical, msg.str());
}

WHFactors canonical_wh(const LaurentMatrixSeries& a, int m) {
  if (a.block_size() == 1) return scalar_canonical_wh(a);
  return block_canonical_wh(a, m);
}

BC b_c_from_factors(const WHFactors& w, int cap) {
  if (cap <= 0) {
    const int width = std::max({support_width(w.u_plus_inv), support_width(w.u_minus_inv),
                                support_width(w.v_plus), support_width(w.v_minus)});
    cap = 4 * std::max(width, 1);
  }
  return {grid_product(w.v_minus, w.u_plus_inv, cap), grid_product(w.u_minus_inv, w.v_plus, cap)};
}

SweepResult factorization_sweep(const LaurentMatrixSeries& a, const ContourSpec& contour, int m) {
  require(contour.size() > 0, "empty contour");
  const std::size_t count = contour.nodes.size();
  SweepResult out;
  out.factors.resize(count);
  std::vector<double> conds(count);
  parallel_for(count, [&](std::size_t j) {
    const Complex lambda = contour.nodes[j];
    const LaurentMatrixSeries s = shifted(a, lambda);
    const double cond = std::max(section_condition(toeplitz_section(s, m).dense),
                                 section_condition(toeplitz_section(reverse(s), m).dense));
    std::ostringstream where;
    where << "node " << j << " (lambda = " << lambda << ")";
    if (!(cond <= kMaxSectionCondition)) {
      fail(ErrorKind::SpectrumTooClose, where.str() + ": section condition estimate " + std::to_string(cond));
    }
    conds[j] = cond;
    try {
      out.factors[j] = canonical_wh(s, m);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NonZeroWinding || e.kind() == ErrorKind::NonCanonical ||
          e.kind() == ErrorKind::IllConditionedSection || e.kind() == ErrorKind::SingularSymbol) {
        fail(ErrorKind::SpectrumTooClose, where.str() + ": " + e.what());
      }
      throw;
    }
  });

  for (std::size_t j = 0; j < count; ++j) {
    const auto& r = out.factors[j].residuals;
    out.max_product_residual =
        std::max({out.max_product_residual, r.product_residual_right, r.product_residual_left});
    out.max_section_condition = std::max(out.max_section_condition, conds[j]);
  }
  // Adjacent nodes around the closed curve, in node order.
  for (std::size_t j = 0; j < count && count > 1; ++j) {
    const std::size_t k = (j + 1) % count;
    const WHFactors& x = out.factors[j];
    const WHFactors& y = out.factors[k];
    const double d = std::max({wiener_distance(normalized_plus(x.u_plus, true), normalized_plus(y.u_plus, true)),
                               wiener_distance(x.u_minus, y.u_minus),
                               wiener_distance(normalized_plus(x.v_plus, false), normalized_plus(y.v_plus, false)),
                               wiener_distance(x.v_minus, y.v_minus)});
    const double spacing = std::abs(contour.nodes[k] - contour.nodes[j]);
    out.continuity = std::max(out.continuity, d);
    if (spacing > 0.0) out.continuity_constant = std::max(out.continuity_constant, d / spacing);
  }
  return out;
}

}  // namespace widom
