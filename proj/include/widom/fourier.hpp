#pragma once

// Transforms between uniform circle samples and Laurent coefficients.

#include <functional>
#include <vector>

#include "widom/series.hpp"

namespace widom::fourier {

/// Offset represented by DFT bin `bin` of an M-point transform, in [-M/2, M/2).
inline int bin_offset(int bin, int m) { return bin < m / 2 ? bin : bin - m; }
inline int offset_bin(int offset, int m) { return ((offset % m) + m) % m; }

/// c[b] = (1/M) sum_j x_j exp(-2 pi i j b / M), entrywise over blocks.
std::vector<Matrix> samples_to_bins(const std::vector<Matrix>& samples);

/// x_j = sum_b c[b] exp(2 pi i j b / M), entrywise over blocks.
std::vector<Matrix> bins_to_samples(const std::vector<Matrix>& bins);

/// Scalar unscaled inverse transform; `work` is scratch space.
void bins_to_samples_inplace(std::vector<Complex>& bins, std::vector<Complex>& work);

struct AdaptiveOptions {
  int min_grid = 256;
  int max_grid = 1 << 17;
  /// Relative size of the coefficients allowed near the Nyquist band.
  double alias_tolerance = 1e-15;
  /// Relative discarded coefficient mass allowed by the chosen cutoff.
  double tail_tolerance = 1e-14;
  /// Upper bound on the returned cutoff; <= 0 means M/2 - 1.
  int max_cutoff = 0;
};

struct AdaptiveResult {
  LaurentMatrixSeries series;
  int grid_size = 0;
  int cutoff = 0;
  /// Max-entry mass of the discarded coefficients.
  double tail_mass = 0.0;
  /// Largest coefficient seen in the top eighth of the band, relative.
  double alias_level = 0.0;
};

/// Samples a function on successively finer grids until its coefficients have
/// decayed near the Nyquist band, then truncates where the tail is negligible.
AdaptiveResult adaptive_series(Index block_size,
                               const std::function<std::vector<Matrix>(int)>& sampler,
                               const AdaptiveOptions& options = {});

}  // namespace widom::fourier
