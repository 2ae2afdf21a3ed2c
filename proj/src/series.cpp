#include "widom/series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "widom/error.hpp"
#include "widom/fourier.hpp"

namespace widom {

double max_entry_norm(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

int next_pow2(long value) {
  long p = 1;
  while (p < value) p <<= 1;
  return static_cast<int>(p);
}

int default_grid_size(int max_offset) {
  return next_pow2(std::max<long>(256, 8L * max_offset));
}

LaurentMatrixSeries::LaurentMatrixSeries(Index block_size)
    : LaurentMatrixSeries(block_size, {}) {}

LaurentMatrixSeries::LaurentMatrixSeries(Index block_size, CoeffMap coeffs,
                                         std::optional<double> smoothness)
    : n_(block_size), coeffs_(std::move(coeffs)), smoothness_(smoothness),
      zero_(Matrix::Zero(block_size, block_size)) {
  require(block_size > 0, "block size must be positive");
  for (const auto& [k, blk] : coeffs_) {
    if (blk.rows() != n_ || blk.cols() != n_) {
      std::ostringstream msg;
      msg << "coefficient at offset " << k << " is " << blk.rows() << "x" << blk.cols()
          << ", expected " << n_ << "x" << n_;
      fail(ErrorKind::BlockSizeMismatch, msg.str());
    }
    if (!blk.allFinite()) fail(ErrorKind::InvalidArgument, "non-finite coefficient");
  }
  grid_size_ = default_grid_size(max_abs_offset());
}

LaurentMatrixSeries LaurentMatrixSeries::scalar(const std::map<int, Complex>& coeffs) {
  CoeffMap blocks;
  for (const auto& [k, v] : coeffs) blocks.emplace(k, Matrix::Constant(1, 1, v));
  return LaurentMatrixSeries(1, std::move(blocks));
}

LaurentMatrixSeries LaurentMatrixSeries::constant(const Matrix& block) {
  require(block.rows() == block.cols(), "constant symbol needs a square block");
  return LaurentMatrixSeries(block.rows(), {{0, block}});
}

LaurentMatrixSeries LaurentMatrixSeries::identity(Index block_size) {
  return constant(Matrix::Identity(block_size, block_size));
}

const Matrix& LaurentMatrixSeries::coeff(int k) const {
  const auto it = coeffs_.find(k);
  return it == coeffs_.end() ? zero_ : it->second;
}

bool LaurentMatrixSeries::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const auto& kv) { return max_entry_norm(kv.second) == 0.0; });
}

int LaurentMatrixSeries::min_offset() const {
  return coeffs_.empty() ? 0 : coeffs_.begin()->first;
}

int LaurentMatrixSeries::max_offset() const {
  return coeffs_.empty() ? 0 : coeffs_.rbegin()->first;
}

int LaurentMatrixSeries::max_abs_offset() const {
  return std::max(std::abs(min_offset()), std::abs(max_offset()));
}

LaurentMatrixSeries LaurentMatrixSeries::with_grid_size(int grid_size) const {
  require(grid_size == next_pow2(grid_size), "grid size must be a power of two");
  require(grid_size > 2 * max_abs_offset(), "grid size must exceed twice the support");
  LaurentMatrixSeries out = *this;
  out.grid_size_ = grid_size;
  return out;
}

LaurentMatrixSeries LaurentMatrixSeries::with_smoothness(std::optional<double> gamma) const {
  LaurentMatrixSeries out = *this;
  out.smoothness_ = gamma;
  return out;
}

LaurentMatrixSeries LaurentMatrixSeries::truncated(int lo, int hi) const {
  CoeffMap kept;
  for (auto it = coeffs_.lower_bound(lo); it != coeffs_.end() && it->first <= hi; ++it) {
    kept.emplace(*it);
  }
  return LaurentMatrixSeries(n_, std::move(kept), smoothness_);
}

LaurentMatrixSeries LaurentMatrixSeries::pruned(double tol) const {
  CoeffMap kept;
  for (const auto& kv : coeffs_) {
    if (max_entry_norm(kv.second) > tol) kept.emplace(kv);
  }
  return LaurentMatrixSeries(n_, std::move(kept), smoothness_);
}

double LaurentMatrixSeries::wiener_norm() const {
  double s = 0.0;
  for (const auto& kv : coeffs_) s += max_entry_norm(kv.second);
  return s;
}

LaurentMatrixSeries operator+(const LaurentMatrixSeries& a, const LaurentMatrixSeries& b) {
  if (a.block_size() != b.block_size()) fail(ErrorKind::BlockSizeMismatch, "sum of symbols");
  LaurentMatrixSeries::CoeffMap out = a.coeffs();
  for (const auto& [k, blk] : b.coeffs()) {
    auto [it, inserted] = out.emplace(k, blk);
    if (!inserted) it->second += blk;
  }
  return LaurentMatrixSeries(a.block_size(), std::move(out));
}

LaurentMatrixSeries operator-(const LaurentMatrixSeries& a, const LaurentMatrixSeries& b) {
  return a + Complex(-1.0) * b;
}

LaurentMatrixSeries operator*(Complex s, const LaurentMatrixSeries& a) {
  LaurentMatrixSeries::CoeffMap out;
  for (const auto& [k, blk] : a.coeffs()) out.emplace(k, s * blk);
  return LaurentMatrixSeries(a.block_size(), std::move(out), a.smoothness());
}

LaurentMatrixSeries shifted(const LaurentMatrixSeries& a, Complex lambda) {
  LaurentMatrixSeries::CoeffMap out = a.coeffs();
  const Matrix shift = -lambda * Matrix::Identity(a.block_size(), a.block_size());
  auto [it, inserted] = out.emplace(0, shift);
  if (!inserted) it->second += shift;
  return LaurentMatrixSeries(a.block_size(), std::move(out), a.smoothness());
}

double SymbolGrid::theta(int j, int m) {
  return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
}

SymbolGrid sample(const LaurentMatrixSeries& a, int grid_size) {
  require(grid_size > 0 && grid_size == next_pow2(grid_size),
          "grid size must be a power of two");
  const Index n = a.block_size();
  std::vector<Matrix> bins(grid_size, Matrix::Zero(n, n));
  // Folding offsets modulo M keeps the samples exact for any support.
  for (const auto& [k, blk] : a.coeffs()) bins[fourier::offset_bin(k, grid_size)] += blk;
  return SymbolGrid{n, fourier::bins_to_samples(bins)};
}

SymbolGrid sample(const LaurentMatrixSeries& a) { return sample(a, a.grid_size()); }

TransformResult coefficients_from_samples(const SymbolGrid& grid, int cutoff) {
  const int m = grid.size();
  require(m > 0 && m == next_pow2(m), "grid size must be a power of two");
  require(cutoff >= 0, "cutoff must be nonnegative");
  if (2 * cutoff + 2 > m) {
    std::ostringstream msg;
    msg << "cutoff " << cutoff << " needs at least " << 2 * cutoff + 2 << " samples, have " << m;
    fail(ErrorKind::CutoffTooLarge, msg.str());
  }
  const std::vector<Matrix> bins = fourier::samples_to_bins(grid.samples);
  LaurentMatrixSeries::CoeffMap coeffs;
  double tail = 0.0;
  for (int b = 0; b < m; ++b) {
    const int k = fourier::bin_offset(b, m);
    if (std::abs(k) <= cutoff) {
      if (max_entry_norm(bins[b]) > 0.0) coeffs.emplace(k, bins[b]);
    } else {
      tail += bins[b].squaredNorm();
    }
  }
  return {LaurentMatrixSeries(grid.block_size, std::move(coeffs)), tail};
}

Matrix evaluate(const LaurentMatrixSeries& a, double theta) {
  Matrix out = Matrix::Zero(a.block_size(), a.block_size());
  for (const auto& [k, blk] : a.coeffs()) out += std::polar(1.0, k * theta) * blk;
  return out;
}

LaurentMatrixSeries reverse(const LaurentMatrixSeries& a) {
  LaurentMatrixSeries::CoeffMap out;
  for (const auto& [k, blk] : a.coeffs()) out.emplace(-k, blk);
  return LaurentMatrixSeries(a.block_size(), std::move(out), a.smoothness());
}

LaurentMatrixSeries multiply(const LaurentMatrixSeries& a, const LaurentMatrixSeries& b) {
  if (a.block_size() != b.block_size()) {
    fail(ErrorKind::BlockSizeMismatch, "product of symbols with different block sizes");
  }
  const Index n = a.block_size();
  if (a.coeffs().empty() || b.coeffs().empty()) return LaurentMatrixSeries(n);
  const int lo = a.min_offset() + b.min_offset();
  const int hi = a.max_offset() + b.max_offset();
  std::vector<Matrix> acc(hi - lo + 1, Matrix::Zero(n, n));
  for (const auto& [ka, blk_a] : a.coeffs()) {
    for (const auto& [kb, blk_b] : b.coeffs()) acc[ka + kb - lo].noalias() += blk_a * blk_b;
  }
  LaurentMatrixSeries::CoeffMap out;
  for (int i = 0; i < static_cast<int>(acc.size()); ++i) {
    if (max_entry_norm(acc[i]) > 0.0) out.emplace(lo + i, std::move(acc[i]));
  }
  return LaurentMatrixSeries(n, std::move(out));
}

namespace {

struct InverseSamples {
  std::vector<Matrix> inverse;
  double margin = 0.0;
};

InverseSamples invert_samples(const SymbolGrid& grid) {
  InverseSamples out;
  out.inverse.reserve(grid.size());
  out.margin = std::numeric_limits<double>::infinity();
  int worst = 0;
  for (int j = 0; j < grid.size(); ++j) {
    const Matrix& s = grid.samples[j];
    double smin = 0.0;
    if (s.rows() == 1) {
      smin = std::abs(s(0, 0));
    } else {
      Eigen::JacobiSVD<Matrix> svd(s);
      smin = svd.singularValues().minCoeff();
    }
    if (smin < out.margin) {
      out.margin = smin;
      worst = j;
    }
    if (smin > 1e-10) out.inverse.push_back(s.rows() == 1 ? Matrix(s.cwiseInverse()) : Matrix(s.inverse()));
  }
  if (out.margin <= 1e-10) {
    std::ostringstream msg;
    msg << "symbol is numerically singular at grid node " << worst << " of " << grid.size()
        << " (theta = " << SymbolGrid::theta(worst, grid.size())
        << ", smallest singular value " << out.margin << ")";
    fail(ErrorKind::SingularSymbol, msg.str());
  }
  return out;
}

double product_residual(const SymbolGrid& grid, const LaurentMatrixSeries& inv, int m) {
  const SymbolGrid inv_grid = sample(inv, m);
  const Matrix eye = Matrix::Identity(grid.block_size, grid.block_size);
  double worst = 0.0;
  for (int j = 0; j < m; ++j) {
    worst = std::max(worst, max_entry_norm(grid.samples[j] * inv_grid.samples[j] - eye));
  }
  return worst;
}

}  // namespace

InverseResult pointwise_inverse(const LaurentMatrixSeries& a, int cutoff) {
  require(cutoff >= 0, "cutoff must be nonnegative");
  const int m = std::max(a.grid_size(), default_grid_size(cutoff));
  const SymbolGrid grid = sample(a, m);
  InverseSamples inv = invert_samples(grid);
  TransformResult tr = coefficients_from_samples(SymbolGrid{a.block_size(), std::move(inv.inverse)}, cutoff);
  InverseResult out{std::move(tr.series), 0.0, inv.margin, m};
  out.residual = product_residual(grid, out.series, m);
  return out;
}

InverseResult pointwise_inverse(const LaurentMatrixSeries& a) {
  double margin = 0.0;
  fourier::AdaptiveOptions opts;
  opts.min_grid = a.grid_size();
  auto sampler = [&](int m) {
    InverseSamples inv = invert_samples(sample(a, m));
    margin = inv.margin;
    return std::move(inv.inverse);
  };
  fourier::AdaptiveResult res = fourier::adaptive_series(a.block_size(), sampler, opts);
  const int m = std::max(res.grid_size, default_grid_size(res.cutoff));
  InverseResult out{std::move(res.series), 0.0, margin, res.grid_size};
  out.residual = product_residual(sample(a, m), out.series, m);
  return out;
}

std::vector<double> fixture_phases(int levels, std::uint64_t seed) {
  std::vector<double> phases(levels + 1, 0.0);
  if (seed == 0) return phases;
  std::mt19937_64 rng(seed);
  for (double& p : phases) {
    // Top 53 bits -> [0, 1); avoids implementation-defined distributions.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    p = 2.0 * std::numbers::pi * u;
  }
  return phases;
}

LaurentMatrixSeries zygmund_test_symbol(double gamma, int levels,
                                        const std::vector<double>& phases) {
  require(gamma > 0.0, "gamma must be positive");
  require(levels >= 1, "levels must be at least 1");
  require(static_cast<int>(phases.size()) == levels + 1, "need one phase per level");
  std::map<int, Complex> coeffs;
  double shift = 2.0;
  for (int j = 0; j <= levels; ++j) {
    const double amp = std::pow(2.0, -gamma * j);
    const int k = 1 << j;
    coeffs[k] += 0.5 * amp * std::polar(1.0, phases[j]);
    coeffs[-k] += 0.5 * amp * std::polar(1.0, -phases[j]);
    shift += amp;
  }
  coeffs[0] += shift;
  return LaurentMatrixSeries::scalar(coeffs).with_smoothness(gamma);
}

LaurentMatrixSeries zygmund_test_symbol(double gamma, int levels, std::uint64_t seed) {
  return zygmund_test_symbol(gamma, levels, fixture_phases(levels, seed));
}

double krein_norm(const LaurentMatrixSeries& a) {
  double s = 0.0;
  for (const auto& [k, blk] : a.coeffs()) {
    const double v = max_entry_norm(blk);
    s += v * v * (std::abs(k) + 1);
  }
  return s;
}

int winding_number(const SymbolGrid& grid) {
  const int m = grid.size();
  require(m > 0, "empty grid");
  std::vector<Complex> dets(m);
  double scale = 0.0;
  for (int j = 0; j < m; ++j) {
    dets[j] = grid.block_size == 1 ? grid.samples[j](0, 0) : grid.samples[j].determinant();
    scale = std::max(scale, std::abs(dets[j]));
  }
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    if (!(std::abs(dets[j]) > 1e-14 * scale) || scale == 0.0) {
      std::ostringstream msg;
      msg << "det a vanishes at grid node " << j << " (theta = " << SymbolGrid::theta(j, m) << ")";
      fail(ErrorKind::SingularSymbol, msg.str());
    }
  }
  for (int j = 0; j < m; ++j) {
    const double step = std::arg(dets[(j + 1) % m] / dets[j]);
    if (std::abs(step) >= std::numbers::pi / 2) {
      std::ostringstream msg;
      msg << "phase of det a jumps by " << step << " between nodes " << j << " and "
          << (j + 1) % m << " of " << m;
      fail(ErrorKind::GridTooCoarse, msg.str());
    }
    total += step;
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

int winding_number(const LaurentMatrixSeries& a) { return winding_number(sample(a)); }

}  // namespace widom
