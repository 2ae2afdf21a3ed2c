#pragma once

// Closed quadrature contours in the spectral parameter.

#include <vector>

#include "widom/series.hpp"

namespace widom {

/// Trapezoid rule on a circle: sum_j weights[j] g(nodes[j]) ~ \oint g(lambda) dlambda.
struct ContourSpec {
  Complex center = 0.0;
  double radius = 1.0;
  std::vector<Complex> nodes;
  std::vector<Complex> weights;
  /// Distance from the curve to the spectrum cloud it was built around.
  double clearance = 0.0;

  int size() const noexcept { return static_cast<int>(nodes.size()); }
};

/// Circle with `count` equispaced nodes, starting at center + radius.
ContourSpec circle_contour(Complex center, double radius, int count);

}  // namespace widom
