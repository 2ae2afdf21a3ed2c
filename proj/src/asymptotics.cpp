#include "widom/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "widom/error.hpp"
#include "widom/parallel.hpp"
#include "widom/toeplitz.hpp"

namespace widom {
namespace {

constexpr int kMaxHankelBlocks = 4096;
constexpr double kSzegoTolerance = 1e-10;
constexpr int kMaxDenseCorrection = 1024;

Complex sample_det(const Matrix& s) { return s.rows() == 1 ? s(0, 0) : s.determinant(); }

// Mean of a branch-continuous log det a over an m-point grid.
Complex mean_log_det(const LaurentMatrixSeries& a, int m) {
  const SymbolGrid g = sample(a, m);
  Complex sum = 0.0;
  double prev = 0.0;
  double shift = 0.0;
  for (int j = 0; j < m; ++j) {
    const Complex d = sample_det(g.samples[j]);
    if (d == Complex(0.0)) fail(ErrorKind::SingularSymbol, "det a vanishes on the grid");
    const double ph = std::arg(d);
    if (j > 0) shift -= 2.0 * std::numbers::pi * std::round((ph - prev) / (2.0 * std::numbers::pi));
    prev = ph;
    sum += Complex(std::log(std::abs(d)), ph + shift);
  }
  return sum / static_cast<double>(m);
}

Complex hankel_log_det(const LaurentMatrixSeries& a, const LaurentMatrixSeries& inv_reversed, int m) {
  const Matrix h = hankel_section(a, m).dense * hankel_section(inv_reversed, m).dense;
  const Matrix id = Matrix::Identity(h.rows(), h.cols());
  return log_det_lu(id - h, "I - H(a)H((a^-1)~) section");
}

Complex wrapped(Complex z) { return {z.real(), wrap_phase(z.imag())}; }

}  // namespace

Complex log_geometric_mean_G(const LaurentMatrixSeries& a) {
  const int wind = winding_number(a);
  if (wind != 0) {
    std::ostringstream msg;
    msg << "winding number of det a is " << wind;
    fail(ErrorKind::NonZeroWinding, msg.str());
  }
  int m = a.grid_size();
  Complex prev = mean_log_det(a, m);
  for (m *= 2; m <= (1 << 20); m *= 2) {
    const Complex next = mean_log_det(a, m);
    if (std::abs(next - prev) <= 1e-14 * std::max(1.0, std::abs(next))) return next;
    prev = next;
  }
  return prev;
}

Complex geometric_mean_G(const LaurentMatrixSeries& a) { return std::exp(log_geometric_mean_G(a)); }

SzegoConstant szego_constant(const LaurentMatrixSeries& a, int m) {
  const int bandwidth = std::max(0, a.max_offset());
  SzegoConstant out;
  if (bandwidth == 0) {  // H(a) = 0
    out.log_value = 0.0;
    out.value = 1.0;
    out.exact = true;
    return out;
  }
  const LaurentMatrixSeries inv_reversed = reverse(pointwise_inverse(a).series);
  std::optional<Complex> prev;
  for (int mm = m > 0 ? m : 16;; mm *= 2) {
    if (mm >= bandwidth) {
      // Rows of H(a) beyond the bandwidth vanish, so this section is exact.
      out.hankel_m = bandwidth;
      out.log_value = hankel_log_det(a, inv_reversed, bandwidth);
      out.exact = true;
      break;
    }
    if (mm > kMaxHankelBlocks) {
      std::ostringstream msg;
      msg << "Hankel section did not stabilize up to " << kMaxHankelBlocks << " blocks";
      fail(ErrorKind::NoConvergence, msg.str());
    }
    const Complex v = hankel_log_det(a, inv_reversed, mm);
    if (prev && std::abs(std::exp(v) - std::exp(*prev)) < kSzegoTolerance) {
      out.hankel_m = mm;
      out.log_value = v;
      break;
    }
    prev = v;
  }
  out.value = std::exp(out.log_value);
  return out;
}

Complex szego_constant_E(const LaurentMatrixSeries& a, int m) { return szego_constant(a, m).value; }

Complex ExpansionModel::correction_sum(int n) const {
  if (prefix.empty() || n <= 0) return 0.0;
  return prefix[std::min<std::size_t>(n, prefix.size() - 1)];
}

Complex ExpansionModel::predicted(int n) const {
  return static_cast<double>(n + 1) * log_G + correction_sum(n) + log_E_tilde;
}

ExpansionModel expansion_model(const LaurentMatrixSeries& a, int p, const WHFactors& w) {
  require(p >= 1, "order p must be at least 1");
  ExpansionModel model;
  model.p = p;
  model.log_G = log_geometric_mean_G(a);
  model.log_E = szego_constant(a).log_value;
  model.log_E_tilde = model.log_E;
  if (p == 1) return model;

  model.bc = b_c_from_factors(w);
  const LaurentMatrixSeries& b = model.bc.b;
  const LaurentMatrixSeries& c = model.bc.c;
  const Index bs = a.block_size();
  // G_{l,k} involves b_i, c_{-i} with i > l only.
  const int support = std::max({0, b.max_offset(), -c.min_offset()});
  model.support = support;
  model.prefix.assign(support + 1, 0.0);
  if (support == 0) return model;

  // G_{l,0} = sum_{i>l} c_{-i} b_i by suffix sums.
  std::vector<Matrix> g0(support + 1, Matrix::Zero(bs, bs));
  for (int l = support - 1; l >= 0; --l) g0[l] = g0[l + 1] + c.coeff(-(l + 1)) * b.coeff(l + 1);

  Matrix k_full;
  if (p >= 3) {
    if (support * bs > kMaxDenseCorrection) {
      std::ostringstream msg;
      msg << "order p = " << p << " needs the Hankel product on " << support
          << " blocks; the limit is " << kMaxDenseCorrection / bs << " (use p <= 2)";
      fail(ErrorKind::InvalidArgument, msg.str());
    }
    // Indices 1..support of Q_0 H(b) H(c~) Q_0.
    k_full = hankel_block(b, 1, support, 0, support) * hankel_block(reverse(c), 0, support, 1, support);
  }

  std::vector<Complex> tr_h(support + 1, 0.0);
  parallel_for(static_cast<std::size_t>(support), [&](std::size_t idx) {
    const int l = static_cast<int>(idx) + 1;
    std::vector<Matrix> g(p - 1, Matrix::Zero(bs, bs));
    g[0] = g0[l];
    if (p >= 3 && l < support) {
      const int count = support - l;
      Matrix col(count * bs, bs);
      Matrix row(bs, count * bs);
      for (int i = 0; i < count; ++i) {
        col.middleRows(i * bs, bs) = b.coeff(l + 1 + i);
        row.middleCols(i * bs, bs) = c.coeff(-(l + 1 + i));
      }
      const auto sub = k_full.bottomRightCorner(count * bs, count * bs);
      Matrix v = col;
      for (int k = 1; k <= p - 2; ++k) {
        v = sub * v;
        g[k] = row * v;
      }
    }
    Matrix h = Matrix::Zero(bs, bs);
    for (int j = 1; j <= p - 1; ++j) {
      Matrix inner = Matrix::Zero(bs, bs);
      for (int k = 0; k <= p - j - 1; ++k) inner += g[k];
      Matrix power = inner;
      for (int e = 1; e < j; ++e) power = power * inner;
      h += power / static_cast<double>(j);
    }
    tr_h[l] = h.trace();
  });
  for (int l = 1; l <= support; ++l) model.prefix[l] = model.prefix[l - 1] + tr_h[l];
  model.log_E_tilde = model.log_E - model.prefix[support];
  return model;
}

ExpansionReport bs_expansion(const LaurentMatrixSeries& a, int n, const ExpansionModel& model) {
  require(n >= 1, "n must be at least 1");
  ExpansionReport r;
  r.n = n;
  r.p = model.p;
  r.log_G_term = static_cast<double>(n + 1) * model.log_G;
  r.correction_sum = model.correction_sum(n);
  r.log_E_constant = model.log_E_tilde;
  r.predicted = r.log_G_term + r.correction_sum + r.log_E_constant;
  r.direct = log_det_direct(a, n);
  r.residual = wrapped(r.direct - r.predicted);
  return r;
}

ExpansionReport bs_expansion(const LaurentMatrixSeries& a, int n, int p, const WHFactors& w) {
  return bs_expansion(a, n, expansion_model(a, p, w));
}

std::vector<ExpansionReport> expansion_scan(const LaurentMatrixSeries& a, const std::vector<int>& n_grid,
                                            const ExpansionModel& model) {
  std::vector<ExpansionReport> out(n_grid.size());
  parallel_for(n_grid.size(), [&](std::size_t i) { out[i] = bs_expansion(a, n_grid[i], model); });
  return out;
}

DecayFit remainder_fit(const std::vector<ExpansionReport>& reports, std::optional<double> gamma) {
  std::vector<FitPoint> pts;
  for (const auto& r : reports) pts.push_back({static_cast<double>(r.n), std::abs(r.residual)});
  DecayFit fit = fit_decay(pts);
  if (gamma && !reports.empty()) apply_target(fit, -(2.0 * *gamma * reports.front().p - 1.0) + 0.3);
  return fit;
}

DecayFit remainder_scan(const LaurentMatrixSeries& a, const std::vector<int>& n_grid, int p, const WHFactors& w) {
  require(n_grid.size() >= 4, "n grid needs at least 4 points");
  require(std::is_sorted(n_grid.begin(), n_grid.end()) && n_grid.front() >= 4, "n grid must be increasing, >= 4");
  require(n_grid.back() >= 8 * n_grid.front(), "n grid must span a factor of 8");
  return remainder_fit(expansion_scan(a, n_grid, expansion_model(a, p, w)), a.smoothness());
}

}  // namespace widom
