#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace widom {

struct FitPoint {
  double n = 0.0;
  double magnitude = 0.0;
};

/// Least-squares line through (log n, log magnitude).
struct DecayFit {
  /// Points that entered the fit, in input order.
  std::vector<FitPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_stderr = 0.0;
  /// Residuals drop faster than any power of n over the grid.
  bool superpolynomial = false;
  /// Filled when a target rate is known: slope <= target_slope.
  std::optional<double> target_slope;
  std::optional<bool> within_band;
};

struct FitOptions {
  /// Magnitudes below this are treated as exact zeros and excluded.
  double floor = 1e-13;
  std::size_t min_points = 4;
  /// Skip the first usable point (transient regime).
  bool drop_first = false;
};

/// Throws FitDegenerate when fewer than `min_points` usable points remain.
DecayFit fit_decay(std::span<const FitPoint> points, const FitOptions& options = {});

/// Attaches a target-band verdict to a fit.
void apply_target(DecayFit& fit, double target_slope);

}  // namespace widom
