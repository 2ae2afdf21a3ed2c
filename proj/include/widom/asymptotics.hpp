#pragma once

// Szegő-Widom constants and the higher-order expansion of log det T_n(a).

#include <vector>

#include "widom/decay_fit.hpp"
#include "widom/factor.hpp"
#include "widom/series.hpp"

namespace widom {

/// (1/2pi) \int log det a(e^{i theta}) d theta with a branch-continuous log,
/// trapezoid rule refined until two grids agree to 1e-14.
/// Throws NonZeroWinding / SingularSymbol.
Complex log_geometric_mean_G(const LaurentMatrixSeries& a);
Complex geometric_mean_G(const LaurentMatrixSeries& a);

struct SzegoConstant {
  Complex log_value = 0.0;
  Complex value = 0.0;
  /// Hankel section (blocks) where the determinant was taken.
  int hankel_m = 0;
  /// True when m covers the positive bandwidth of a (the section is then exact).
  bool exact = false;
};

/// E(a) = det T(a)T(a^{-1}) = det(I - H(a) H((a^{-1})~)) on an m-block section.
/// m <= 0 starts from 16; the section doubles until two values agree to 1e-10
/// and stops early once m reaches the positive bandwidth of a.
/// Throws NoConvergence past 4096 blocks.
SzegoConstant szego_constant(const LaurentMatrixSeries& a, int m = 0);
Complex szego_constant_E(const LaurentMatrixSeries& a, int m = 0);

/// Everything in the order-p expansion that does not depend on n.
struct ExpansionModel {
  int p = 1;
  Complex log_G = 0.0;
  Complex log_E = 0.0;
  /// log Ẽ = log E - sum_{l>=1} tr H_l.
  Complex log_E_tilde = 0.0;
  /// prefix[n] = sum_{l=1}^{n} tr H_l for n = 0..support; constant afterwards.
  std::vector<Complex> prefix;
  /// Offsets of b and c beyond which every G_{l,k} vanishes.
  int support = 0;
  BC bc;

  Complex correction_sum(int n) const;
  Complex predicted(int n) const;
};

/// H_l = sum_{j=1}^{p-1} (1/j) (sum_{k=0}^{p-j-1} G_{l,k}(b,c))^j for every l
/// with a nonzero term. Throws InvalidArgument for p >= 3 when the Hankel
/// product over the support would exceed 1024 x 1024.
ExpansionModel expansion_model(const LaurentMatrixSeries& a, int p, const WHFactors& w);

struct ExpansionReport {
  int n = 0;
  int p = 1;
  Complex log_G_term = 0.0;
  Complex correction_sum = 0.0;
  Complex log_E_constant = 0.0;
  Complex predicted = 0.0;
  Complex direct = 0.0;
  /// direct - predicted, imaginary part reduced to (-pi, pi].
  Complex residual = 0.0;
};

ExpansionReport bs_expansion(const LaurentMatrixSeries& a, int n, const ExpansionModel& model);
ExpansionReport bs_expansion(const LaurentMatrixSeries& a, int n, int p, const WHFactors& w);

/// Reports for every n in the grid (computed concurrently, returned in grid order).
std::vector<ExpansionReport> expansion_scan(const LaurentMatrixSeries& a, const std::vector<int>& n_grid,
                                            const ExpansionModel& model);

/// Log-log fit of |residual| over n_grid; target slope -(2 gamma p - 1) + 0.3
/// when the symbol carries a smoothness tag.
DecayFit remainder_fit(const std::vector<ExpansionReport>& reports, std::optional<double> gamma);
DecayFit remainder_scan(const LaurentMatrixSeries& a, const std::vector<int>& n_grid, int p, const WHFactors& w);

}  // namespace widom
