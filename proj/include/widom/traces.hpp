#pragma once

// Trace functionals tr f(T_n(a)) ~ (n+1) G_f(a) + E_f(a) and their remainder.

#include <vector>

#include "widom/contour.hpp"
#include "widom/decay_fit.hpp"
#include "widom/scalar_function.hpp"
#include "widom/series.hpp"

namespace widom {

/// Heuristic point cloud around sp T(a) ∪ sp T(ã).
struct SpectrumEstimate {
  /// Eigenvalues of T_m(a), T_m(ã) and of every sample a(t_j).
  std::vector<Complex> cloud;
  /// Scalar symbols only: grid points λ with winding(a - λ) != 0.
  std::vector<Complex> interior;
  int section = 0;
  double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0;

  /// cloud followed by interior.
  std::vector<Complex> all_points() const;
};

/// m >= 64. Throws EigFailure.
SpectrumEstimate estimate_spectrum(const LaurentMatrixSeries& a, int m = 128);

/// Circle around the centroid of the estimate with radius max distance +
/// margin. `nodes` must be a power of two >= 64. Throws ContourTooTight when
/// the clearance check fails or the points split into clusters more than
/// 4 * margin apart.
ContourSpec build_contour(const SpectrumEstimate& s, double margin, int nodes = 128);

/// (1/2pi) \int tr f(a(e^{i theta})) d theta. Exact grid for polynomial f,
/// otherwise refined until two grids agree to 1e-14.
Complex G_f(const LaurentMatrixSeries& a, const ScalarFunction& f);

enum class EfMethod {
  /// Szegő series for scalar symbols, Hankel determinant otherwise.
  Automatic,
  /// tr(M^{-1} M') with M(λ) = I - H(a) H(((a-λ)^{-1})~).
  Hankel,
  /// d/dλ sum_k k (log(a-λ))_k (log(a-λ))_{-k}; scalar symbols only.
  SzegoSeries,
};

struct EfOptions {
  EfMethod method = EfMethod::Automatic;
  /// Hankel section in blocks; <= 0 uses the positive bandwidth of a, where
  /// the section is exact. Smaller values double until E_f moves < 1e-9.
  int hankel_m = 0;
  /// Run factorization_sweep over the contour first (the invertibility check).
  /// The Szegő series path replaces it by a per-node winding test.
  bool check_sweep = true;
  int sweep_m = 64;
};

/// (1/2pi i) \oint f(λ) d/dλ log det T(a-λ)T((a-λ)^{-1}) dλ.
/// Throws SpectrumTooClose, NoConvergence, FNotAnalyticAtSample.
Complex E_f(const LaurentMatrixSeries& a, const ScalarFunction& f, const ContourSpec& contour,
            const EfOptions& options = {});

/// (n+1) G_f + E_f.
Complex trace_f_asymptotic(const LaurentMatrixSeries& a, int n, const ScalarFunction& f,
                           const ContourSpec& contour);

struct TraceRow {
  int n = 0;
  Complex direct = 0.0;
  Complex asymptotic = 0.0;
  double residual_abs = 0.0;
};

struct TraceScan {
  Complex g_f = 0.0;
  Complex e_f = 0.0;
  std::vector<TraceRow> rows;
};

/// Direct and asymptotic traces for every n (computed concurrently).
TraceScan trace_scan(const LaurentMatrixSeries& a, const ScalarFunction& f, const std::vector<int>& n_grid,
                     const ContourSpec& contour, const EfOptions& options = {});

/// Fit of |direct - asymptotic| over the rows. Target slope -(2 gamma - 1) + 0.3
/// when gamma is given. Throws FitDegenerate ("exact regime" when every
/// residual sits below the floor).
DecayFit trace_remainder_fit(const TraceScan& scan, std::optional<double> gamma);

/// n_grid as for remainder_scan; gamma comes from the symbol's smoothness tag.
DecayFit main_theorem_scan(const LaurentMatrixSeries& a, const ScalarFunction& f, const std::vector<int>& n_grid,
                           const ContourSpec& contour);

}  // namespace widom
