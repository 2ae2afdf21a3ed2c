#include "widom/fourier.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

#include "widom/error.hpp"

namespace widom::fourier {
namespace {

enum class Direction { Forward, Backward };

// kissfft keeps twiddles per size inside the object; one per thread.
Eigen::FFT<double>& plan_cache() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  return fft;
}

std::vector<Matrix> transform(const std::vector<Matrix>& in, Direction dir) {
  const int m = static_cast<int>(in.size());
  require(m > 0, "transform of an empty grid");
  const Index rows = in.front().rows();
  const Index cols = in.front().cols();

  Eigen::FFT<double>& fft = plan_cache();
  std::vector<Complex> src(m);
  std::vector<Complex> dst(m);
  std::vector<Matrix> out(m, Matrix::Zero(rows, cols));
  const double scale = dir == Direction::Forward ? 1.0 / m : 1.0;

  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      for (int j = 0; j < m; ++j) src[j] = in[j](r, c);
      if (dir == Direction::Forward) {
        fft.fwd(dst, src);
      } else {
        fft.inv(dst, src);
      }
      for (int j = 0; j < m; ++j) out[j](r, c) = dst[j] * scale;
    }
  }
  return out;
}

}  // namespace

void bins_to_samples_inplace(std::vector<Complex>& bins, std::vector<Complex>& work) {
  work.resize(bins.size());
  plan_cache().inv(work, bins);
  bins.swap(work);
}

std::vector<Matrix> samples_to_bins(const std::vector<Matrix>& samples) {
  return transform(samples, Direction::Forward);
}

std::vector<Matrix> bins_to_samples(const std::vector<Matrix>& bins) {
  return transform(bins, Direction::Backward);
}

AdaptiveResult adaptive_series(Index block_size,
                               const std::function<std::vector<Matrix>(int)>& sampler,
                               const AdaptiveOptions& options) {
  int m = next_pow2(std::max(options.min_grid, 16));
  for (;;) {
    const std::vector<Matrix> bins = samples_to_bins(sampler(m));

    std::vector<double> mag(m);  // indexed by offset + m/2
    double scale = 0.0;
    for (int b = 0; b < m; ++b) {
      const double v = max_entry_norm(bins[b]);
      mag[bin_offset(b, m) + m / 2] = v;
      scale = std::max(scale, v);
    }
    if (scale == 0.0) {
      return {LaurentMatrixSeries(block_size), m, 0, 0.0, 0.0};
    }

    double alias = 0.0;
    // Offsets run over [-m/2, m/2): the top band is k in [3m/8, m/2) on the
    // positive side and down to -m/2 on the negative side.
    for (int k = 3 * m / 8; k <= m / 2; ++k) {
      if (k < m / 2) alias = std::max(alias, mag[m / 2 + k]);
      alias = std::max(alias, mag[m / 2 - k]);
    }
    alias /= scale;
    if (alias > options.alias_tolerance && m < options.max_grid) {
      m *= 2;
      continue;
    }

    // Cutoff: smallest K whose two-sided tail mass is below tolerance.
    const int top = m / 2 - 1;
    const int cap = options.max_cutoff > 0 ? std::min(options.max_cutoff, top) : top;
    double tail = mag[0];  // offset -m/2 is never kept
    int cutoff = top;
    for (int k = top; k >= 0; --k) {
      const double shell = mag[m / 2 + k] + (k > 0 ? mag[m / 2 - k] : 0.0);
      if (tail + shell > options.tail_tolerance * scale) {
        cutoff = k;
        break;
      }
      tail += shell;
      cutoff = k - 1;
    }
    cutoff = std::max(cutoff, 0);
    if (cutoff > cap) {
      for (int k = cap + 1; k <= cutoff; ++k) tail += mag[m / 2 + k] + mag[m / 2 - k];
      cutoff = cap;
    }

    LaurentMatrixSeries::CoeffMap coeffs;
    for (int k = -cutoff; k <= cutoff; ++k) {
      const Matrix& blk = bins[offset_bin(k, m)];
      if (max_entry_norm(blk) > 0.0) coeffs.emplace(k, blk);
    }
    return {LaurentMatrixSeries(block_size, std::move(coeffs)), m, cutoff, tail, alias};
  }
}

}  // namespace widom::fourier
