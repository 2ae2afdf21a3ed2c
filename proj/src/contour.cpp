#include "widom/contour.hpp"

#include <numbers>

#include "widom/error.hpp"

namespace widom {

ContourSpec circle_contour(Complex center, double radius, int count) {
  require(radius > 0.0, "contour radius must be positive");
  require(count >= 4, "contour needs at least 4 nodes");
  ContourSpec c;
  c.center = center;
  c.radius = radius;
  c.nodes.resize(count);
  c.weights.resize(count);
  const double step = 2.0 * std::numbers::pi / count;
  for (int j = 0; j < count; ++j) {
    const Complex e = std::polar(1.0, step * j);
    c.nodes[j] = center + radius * e;
    c.weights[j] = Complex(0.0, step) * radius * e;  // d lambda = i r e^{i theta} d theta
  }
  return c;
}

}  // namespace widom
