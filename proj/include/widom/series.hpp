#pragma once

// Matrix-valued functions on the unit circle, stored by their finitely
// supported Fourier coefficients.

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace widom {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Maximum entry magnitude; the matrix norm used throughout.
double max_entry_norm(const Matrix& m);

int next_pow2(long value);

/// Smallest power of two >= max(256, 8 * max_offset).
int default_grid_size(int max_offset);

class LaurentMatrixSeries {
 public:
  using CoeffMap = std::map<int, Matrix>;

  explicit LaurentMatrixSeries(Index block_size = 1);
  LaurentMatrixSeries(Index block_size, CoeffMap coeffs,
                      std::optional<double> smoothness = std::nullopt);

  static LaurentMatrixSeries scalar(const std::map<int, Complex>& coeffs);
  static LaurentMatrixSeries constant(const Matrix& block);
  static LaurentMatrixSeries identity(Index block_size);

  Index block_size() const noexcept { return n_; }
  const CoeffMap& coeffs() const noexcept { return coeffs_; }

  /// Block at offset k; the zero block when k is not stored.
  const Matrix& coeff(int k) const;
  Complex scalar_coeff(int k) const { return coeff(k)(0, 0); }

  bool is_zero() const;
  int min_offset() const;
  int max_offset() const;
  int max_abs_offset() const;

  /// Power-of-two sample count used when this symbol is put on a grid.
  int grid_size() const noexcept { return grid_size_; }
  LaurentMatrixSeries with_grid_size(int grid_size) const;

  std::optional<double> smoothness() const noexcept { return smoothness_; }
  LaurentMatrixSeries with_smoothness(std::optional<double> gamma) const;

  /// Keeps offsets in [lo, hi].
  LaurentMatrixSeries truncated(int lo, int hi) const;
  /// Drops blocks whose max-entry norm is <= tol.
  LaurentMatrixSeries pruned(double tol) const;

  /// Sum over offsets of the max-entry norm; bounds the sup norm on the circle.
  double wiener_norm() const;

 private:
  Index n_;
  CoeffMap coeffs_;
  std::optional<double> smoothness_;
  int grid_size_;
  Matrix zero_;
};

LaurentMatrixSeries operator+(const LaurentMatrixSeries& a, const LaurentMatrixSeries& b);
LaurentMatrixSeries operator-(const LaurentMatrixSeries& a, const LaurentMatrixSeries& b);
LaurentMatrixSeries operator*(Complex s, const LaurentMatrixSeries& a);

/// a - lambda * I.
LaurentMatrixSeries shifted(const LaurentMatrixSeries& a, Complex lambda);

/// Samples a(t_j) at t_j = exp(2 pi i j / M).
struct SymbolGrid {
  Index block_size = 1;
  std::vector<Matrix> samples;

  int size() const noexcept { return static_cast<int>(samples.size()); }
  static double theta(int j, int m);
};

SymbolGrid sample(const LaurentMatrixSeries& a, int grid_size);
SymbolGrid sample(const LaurentMatrixSeries& a);

struct TransformResult {
  LaurentMatrixSeries series;
  /// Sum of squared Frobenius norms of the discarded coefficient blocks.
  double tail_energy = 0.0;
};

TransformResult coefficients_from_samples(const SymbolGrid& grid, int cutoff);

Matrix evaluate(const LaurentMatrixSeries& a, double theta);

/// ã(t) = a(1/t).
LaurentMatrixSeries reverse(const LaurentMatrixSeries& a);

LaurentMatrixSeries multiply(const LaurentMatrixSeries& a, const LaurentMatrixSeries& b);

struct InverseResult {
  LaurentMatrixSeries series;
  /// sup_j ||a(t_j) * result(t_j) - I|| on the transform grid.
  double residual = 0.0;
  /// Smallest singular value of a(t_j) over the grid.
  double margin = 0.0;
  int grid_size = 0;
};

InverseResult pointwise_inverse(const LaurentMatrixSeries& a, int cutoff);

/// Inverse with the cutoff chosen where the discarded coefficient mass drops
/// below `tail_tolerance` relative to the largest coefficient.
InverseResult pointwise_inverse(const LaurentMatrixSeries& a);

/// Scalar lacunary fixture sum_{j=0}^{J} 2^{-gamma j} cos(2^j theta + phi_j),
/// shifted by 2 + sum_j 2^{-gamma j} so it is positive on the circle.
LaurentMatrixSeries zygmund_test_symbol(double gamma, int levels,
                                        const std::vector<double>& phases);
LaurentMatrixSeries zygmund_test_symbol(double gamma, int levels, std::uint64_t seed);

/// Phases for the fixture; seed 0 gives all-zero phases.
std::vector<double> fixture_phases(int levels, std::uint64_t seed);

double krein_norm(const LaurentMatrixSeries& a);

/// Winding number of theta -> det a(e^{i theta}) on the symbol's grid.
int winding_number(const LaurentMatrixSeries& a);
int winding_number(const SymbolGrid& grid);

}  // namespace widom
