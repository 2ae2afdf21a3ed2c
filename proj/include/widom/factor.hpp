#pragma once

// Canonical Wiener-Hopf factorizations a = u_- u_+ (right) and a = v_+ v_-
// (left). Normalization: u_-(inf) = I for the right pass and f_-(inf) = I for
// the left pass, where a^{-1} = f_- f_+ and v_± = f_±^{-1}.

#include <string>
#include <vector>

#include "widom/contour.hpp"
#include "widom/series.hpp"

namespace widom {

struct FactorResiduals {
  /// sup over the check grid of max-entry |u_- u_+ - a|.
  double product_residual_right = 0.0;
  /// sup over the check grid of max-entry |v_+ v_- - a|.
  double product_residual_left = 0.0;
  /// Largest wrong-side coefficient removed when enforcing one-sided support.
  double leakage = 0.0;
  /// Smallest singular value of the factor samples (the factors stay invertible).
  double inverse_margin = 0.0;
  /// Finite section size (blocks - 1) used; 0 for the scalar log-splitting path.
  int section = 0;
  int check_grid = 0;
};

struct WHFactors {
  LaurentMatrixSeries u_minus, u_plus, v_plus, v_minus;
  /// Inverses, one-sided as well; needed for b and c.
  LaurentMatrixSeries u_minus_inv, u_plus_inv, v_plus_inv, v_minus_inv;
  std::string normalization = "u_-(inf)=I; f_-(inf)=I with v_pm = f_pm^-1";
  std::string method;
  FactorResiduals residuals;
};

inline constexpr double kFactorTolerance = 1e-8;

/// Scalar path: log a split into offsets < 0 and >= 0, exponentiated.
/// `cutoff` caps the kept offsets of every series (0: adaptive).
/// Throws NonZeroWinding / SingularSymbol.
WHFactors scalar_canonical_wh(const LaurentMatrixSeries& a, int cutoff = 0);

/// Finite section method on T_m(a) for the right factors and on T_m(a^{-1})
/// for the left ones. Retries once with 2m; throws NonCanonical if the
/// residuals or the leakage still exceed `tolerance`, IllConditionedSection
/// if the section condition estimate exceeds 1e10.
WHFactors block_canonical_wh(const LaurentMatrixSeries& a, int m = 256,
                             double tolerance = kFactorTolerance);

/// Scalar symbols go through scalar_canonical_wh, others through the block path.
WHFactors canonical_wh(const LaurentMatrixSeries& a, int m = 256);

struct BC {
  LaurentMatrixSeries b;  ///< v_- u_+^{-1}
  LaurentMatrixSeries c;  ///< u_-^{-1} v_+
};

/// Products formed on a grid fine enough to avoid aliasing; coefficients kept
/// until the relative tail mass drops below 1e-12, at most `cap` offsets on
/// each side (0: four times the widest factor support).
BC b_c_from_factors(const WHFactors& w, int cap = 0);

struct SweepResult {
  std::vector<WHFactors> factors;
  /// Largest Wiener-norm change of the normalized factors between adjacent nodes.
  double continuity = 0.0;
  /// continuity divided by the node spacing.
  double continuity_constant = 0.0;
  double max_product_residual = 0.0;
  double max_section_condition = 0.0;
};

/// Factors of a - lambda at every contour node. Throws SpectrumTooClose when
/// T_m(a - lambda) or T_m(ã - lambda) has condition estimate above 1e10.
SweepResult factorization_sweep(const LaurentMatrixSeries& a, const ContourSpec& contour, int m = 64);

}  // namespace widom
