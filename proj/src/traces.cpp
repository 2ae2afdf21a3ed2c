#include "widom/traces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "widom/error.hpp"
#include "widom/factor.hpp"
#include "widom/fourier.hpp"
#include "widom/parallel.hpp"
#include "widom/toeplitz.hpp"

namespace widom {
namespace {

constexpr int kInteriorGrid = 24;
constexpr int kMaxGrid = 1 << 20;
constexpr int kMaxHankelBlocks = 4096;
constexpr double kEfTolerance = 1e-9;
constexpr double kResidualFloor = 1e-13;
// Relative size of the top-band coefficients of (a-λ)^{-1} and log(a-λ).
constexpr double kSeriesAlias = 1e-15;
constexpr double kMinRcond = 1e-12;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex trace_f_of(const Matrix& s, const ScalarFunction& f) {
  if (s.rows() == 1) return f(s(0, 0));
  Eigen::ComplexEigenSolver<Matrix> es(s, false);
  if (es.info() != Eigen::Success) fail(ErrorKind::EigFailure, "eigensolver failed on a symbol sample");
  Complex t = 0.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) t += f(es.eigenvalues()[i]);
  return t;
}

Complex mean_trace_f(const LaurentMatrixSeries& a, const ScalarFunction& f, int m) {
  const SymbolGrid g = sample(a, m);
  Complex s = 0.0;
  for (const Matrix& v : g.samples) s += trace_f_of(v, f);
  return s / static_cast<double>(m);
}

int winding_about(const std::vector<Complex>& values, Complex lambda) {
  double total = 0.0;
  Complex prev = values.back() - lambda;
  for (const Complex& v : values) {
    const Complex cur = v - lambda;
    total += std::arg(cur / prev);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

std::string node_label(std::size_t j, Complex lambda) {
  std::ostringstream s;
  s << "node " << j << " (lambda = " << lambda << ")";
  return s.str();
}

// d/dλ log E(a - λ) for scalar a from the strong Szegő series.
Complex szego_series_derivative(const LaurentMatrixSeries& a, Complex lambda, std::size_t node) {
  int m = std::max(256, static_cast<int>(next_pow2(8L * a.max_abs_offset() + 8)));
  for (;; m *= 2) {
    const SymbolGrid g = sample(a, m);
    std::vector<Matrix> y(m, Matrix(1, 1)), l(m, Matrix(1, 1));
    double shift = 0.0;
    double prev = 0.0;
    for (int j = 0; j < m; ++j) {
      const Complex s = g.samples[j](0, 0) - lambda;
      if (s == Complex(0.0)) fail(ErrorKind::SpectrumTooClose, node_label(node, lambda) + ": a - lambda vanishes");
      const double ph = std::arg(s);
      if (j > 0) shift -= kTwoPi * std::round((ph - prev) / kTwoPi);
      prev = ph;
      y[j](0, 0) = 1.0 / s;
      l[j](0, 0) = Complex(std::log(std::abs(s)), ph + shift);
    }
    // Closing the loop: the continued phase must return to its start.
    const double end_jump = std::arg(g.samples[0](0, 0) - lambda) - (prev + shift);
    if (std::abs(end_jump) > std::numbers::pi) {
      fail(ErrorKind::SpectrumTooClose, node_label(node, lambda) + ": a - lambda winds around 0");
    }
    const std::vector<Matrix> yb = fourier::samples_to_bins(y);
    const std::vector<Matrix> lb = fourier::samples_to_bins(l);
    double scale = 0.0, top = 0.0;
    for (int b = 0; b < m; ++b) {
      const double v = std::max(std::abs(yb[b](0, 0)), std::abs(lb[b](0, 0)));
      scale = std::max(scale, v);
      if (std::abs(fourier::bin_offset(b, m)) >= 3 * m / 8) top = std::max(top, v);
    }
    if (top > kSeriesAlias * scale && m < kMaxGrid) continue;
    Complex d = 0.0;
    for (int k = 1; k < m / 2; ++k) {
      d -= static_cast<double>(k) * (yb[k](0, 0) * lb[m - k](0, 0) + lb[k](0, 0) * yb[m - k](0, 0));
    }
    return d;
  }
}

// tr(M^{-1} M') on the m-block section.
Complex hankel_derivative(const LaurentMatrixSeries& a, Complex lambda, int m, std::size_t node) {
  const LaurentMatrixSeries y = pointwise_inverse(shifted(a, lambda)).series;
  const LaurentMatrixSeries y2 = multiply(y, y);
  const Matrix ha = hankel_section(a, m).dense;
  const Matrix mm = Matrix::Identity(ha.rows(), ha.cols()) - ha * hankel_section(reverse(y), m).dense;
  const Matrix dm = -ha * hankel_section(reverse(y2), m).dense;
  const Eigen::PartialPivLU<Matrix> lu(mm);
  const double rcond = lu.rcond();
  if (!(rcond > kMinRcond)) {
    std::ostringstream msg;
    msg << node_label(node, lambda) << ": I - H(a)H(y~) section is numerically singular (rcond " << rcond << ")";
    fail(ErrorKind::SpectrumTooClose, msg.str());
  }
  return lu.solve(dm).trace();
}

Complex contour_sum(const ContourSpec& contour, const ScalarFunction& f, const std::vector<Complex>& derivs) {
  Complex s = 0.0;
  for (std::size_t j = 0; j < derivs.size(); ++j) s += contour.weights[j] * f(contour.nodes[j]) * derivs[j];
  return s / Complex(0.0, kTwoPi);
}

}  // namespace

std::vector<Complex> SpectrumEstimate::all_points() const {
  std::vector<Complex> out = cloud;
  out.insert(out.end(), interior.begin(), interior.end());
  return out;
}

SpectrumEstimate estimate_spectrum(const LaurentMatrixSeries& a, int m) {
  require(m >= 64, "spectrum section must be at least 64");
  SpectrumEstimate s;
  s.section = m;
  for (const LaurentMatrixSeries& x : {a, reverse(a)}) {
    const Eigen::VectorXcd ev = section_eigenvalues(toeplitz_section(x, m).dense);
    s.cloud.insert(s.cloud.end(), ev.data(), ev.data() + ev.size());
  }
  const SymbolGrid g = sample(a);
  for (const Matrix& v : g.samples) {
    if (v.rows() == 1) {
      s.cloud.push_back(v(0, 0));
      continue;
    }
    Eigen::ComplexEigenSolver<Matrix> es(v, false);
    if (es.info() != Eigen::Success) fail(ErrorKind::EigFailure, "eigensolver failed on a symbol sample");
    s.cloud.insert(s.cloud.end(), es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  }
  for (const Complex& z : s.cloud) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail(ErrorKind::EigFailure, "non-finite eigenvalue");
  }
  s.re_min = s.re_max = s.cloud.front().real();
  s.im_min = s.im_max = s.cloud.front().imag();
  for (const Complex& z : s.cloud) {
    s.re_min = std::min(s.re_min, z.real());
    s.re_max = std::max(s.re_max, z.real());
    s.im_min = std::min(s.im_min, z.imag());
    s.im_max = std::max(s.im_max, z.imag());
  }

  if (a.block_size() == 1) {
    std::vector<Complex> values(g.samples.size());
    for (std::size_t j = 0; j < values.size(); ++j) values[j] = g.samples[j](0, 0);
    for (int i = 0; i < kInteriorGrid; ++i) {
      for (int k = 0; k < kInteriorGrid; ++k) {
        const Complex lambda(s.re_min + (s.re_max - s.re_min) * (i + 0.5) / kInteriorGrid,
                             s.im_min + (s.im_max - s.im_min) * (k + 0.5) / kInteriorGrid);
        if (winding_about(values, lambda) != 0) s.interior.push_back(lambda);
      }
    }
  }
  return s;
}

ContourSpec build_contour(const SpectrumEstimate& s, double margin, int nodes) {
  require(margin > 0.0, "contour margin must be positive");
  require(nodes >= 64 && (nodes & (nodes - 1)) == 0, "contour node count must be a power of two >= 64");
  const std::vector<Complex> pts = s.all_points();
  require(!pts.empty(), "empty spectrum estimate");

  // Single-linkage clusters at distance 4 * margin.
  std::vector<char> seen(pts.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const Complex z = pts[stack.back()];
    stack.pop_back();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!seen[i] && std::abs(pts[i] - z) <= 4.0 * margin) {
        seen[i] = 1;
        ++reached;
        stack.push_back(i);
      }
    }
  }
  if (reached != pts.size()) {
    std::ostringstream msg;
    msg << "spectrum estimate splits into separated clusters (gap > 4 * margin = " << 4.0 * margin
        << "); a single circle would enclose a gap";
    fail(ErrorKind::ContourTooTight, msg.str());
  }

  Complex center = 0.0;
  for (const Complex& z : pts) center += z;
  center /= static_cast<double>(pts.size());
  double reach = 0.0;
  for (const Complex& z : pts) reach = std::max(reach, std::abs(z - center));

  ContourSpec c = circle_contour(center, reach + margin, nodes);
  c.clearance = INFINITY;
  for (const Complex& z : pts) c.clearance = std::min(c.clearance, std::abs(c.radius - std::abs(z - center)));
  if (!(c.clearance >= 0.5 * margin)) {
    std::ostringstream msg;
    msg << "contour clearance " << c.clearance << " is below margin / 2";
    fail(ErrorKind::ContourTooTight, msg.str());
  }
  return c;
}

Complex G_f(const LaurentMatrixSeries& a, const ScalarFunction& f) {
  const long w = a.max_abs_offset();
  if (const auto d = f.polynomial_degree()) {
    // tr f(a) is a trig polynomial of degree d * w: the trapezoid rule is exact.
    return mean_trace_f(a, f, static_cast<int>(next_pow2(std::max(16L, 2L * *d * w + 2))));
  }
  int m = static_cast<int>(next_pow2(std::max(256L, 4 * w + 4)));
  Complex prev = mean_trace_f(a, f, m);
  for (m *= 2; m <= kMaxGrid; m *= 2) {
    const Complex next = mean_trace_f(a, f, m);
    if (std::abs(next - prev) <= 1e-14 * std::max(1.0, std::abs(next))) return next;
    prev = next;
  }
  fail(ErrorKind::NoConvergence, "G_f quadrature did not settle on 2^20 points");
}

Complex E_f(const LaurentMatrixSeries& a, const ScalarFunction& f, const ContourSpec& contour,
            const EfOptions& options) {
  require(contour.size() > 0, "empty contour");
  if (!f.analytic_on_disk(contour.center, contour.radius)) {
    std::ostringstream msg;
    msg << f.name() << " is not analytic on the disk |lambda - " << contour.center << "| <= " << contour.radius;
    fail(ErrorKind::FNotAnalyticAtSample, msg.str());
  }
  EfMethod method = options.method;
  if (method == EfMethod::Automatic) method = a.block_size() == 1 ? EfMethod::SzegoSeries : EfMethod::Hankel;
  // The series path checks winding(a - λ) = 0 at every node itself, which for
  // scalar symbols is exactly invertibility of T(a - λ).
  if (options.check_sweep && method == EfMethod::Hankel) factorization_sweep(a, contour, options.sweep_m);

  const int w = std::max(0, a.max_offset());
  if (w == 0) return 0.0;  // H(a) = 0, M ≡ I
  const std::size_t count = contour.nodes.size();
  std::vector<Complex> derivs(count);

  if (method == EfMethod::SzegoSeries) {
    require(a.block_size() == 1, "the Szego series path needs a scalar symbol");
    parallel_for(count, [&](std::size_t j) { derivs[j] = szego_series_derivative(a, contour.nodes[j], j); });
    return contour_sum(contour, f, derivs);
  }

  // Rows of H(a) past the bandwidth vanish, so m = w is exact.
  int m = options.hankel_m <= 0 ? w : std::min(options.hankel_m, w);
  std::optional<Complex> prev;
  for (;;) {
    parallel_for(count, [&](std::size_t j) { derivs[j] = hankel_derivative(a, contour.nodes[j], m, j); });
    const Complex value = contour_sum(contour, f, derivs);
    if (m == w || (prev && std::abs(value - *prev) < kEfTolerance)) return value;
    prev = value;
    if (2 * m > kMaxHankelBlocks) {
      fail(ErrorKind::NoConvergence, "E_f did not stabilize up to 4096 Hankel blocks");
    }
    m = std::min(2 * m, w);
  }
}

Complex trace_f_asymptotic(const LaurentMatrixSeries& a, int n, const ScalarFunction& f,
                           const ContourSpec& contour) {
  require(n >= 0, "n must be nonnegative");
  return static_cast<double>(n + 1) * G_f(a, f) + E_f(a, f, contour);
}

TraceScan trace_scan(const LaurentMatrixSeries& a, const ScalarFunction& f, const std::vector<int>& n_grid,
                     const ContourSpec& contour, const EfOptions& options) {
  TraceScan out;
  out.g_f = G_f(a, f);
  out.e_f = E_f(a, f, contour, options);
  out.rows.resize(n_grid.size());
  parallel_for(n_grid.size(), [&](std::size_t i) {
    TraceRow& r = out.rows[i];
    r.n = n_grid[i];
    r.direct = trace_f_direct(a, r.n, f);
    r.asymptotic = static_cast<double>(r.n + 1) * out.g_f + out.e_f;
    r.residual_abs = std::abs(r.direct - r.asymptotic);
  });
  return out;
}

DecayFit trace_remainder_fit(const TraceScan& scan, std::optional<double> gamma) {
  std::vector<FitPoint> pts;
  bool any = false;
  for (const TraceRow& r : scan.rows) {
    pts.push_back({static_cast<double>(r.n), r.residual_abs});
    any = any || r.residual_abs >= kResidualFloor;
  }
  if (!any) {
    fail(ErrorKind::FitDegenerate, "exact regime: every trace residual is below 1e-13");
  }
  FitOptions opts;
  opts.floor = kResidualFloor;
  DecayFit fit = fit_decay(pts, opts);
  if (gamma) apply_target(fit, -(2.0 * *gamma - 1.0) + 0.3);
  return fit;
}

DecayFit main_theorem_scan(const LaurentMatrixSeries& a, const ScalarFunction& f, const std::vector<int>& n_grid,
                           const ContourSpec& contour) {
  require(n_grid.size() >= 4, "n grid needs at least 4 points");
  require(std::is_sorted(n_grid.begin(), n_grid.end()) && n_grid.front() >= 4, "n grid must be increasing, >= 4");
  require(n_grid.back() >= 8 * n_grid.front(), "n grid must span a factor of 8");
  return trace_remainder_fit(trace_scan(a, f, n_grid, contour), a.smoothness());
}

}  // namespace widom
