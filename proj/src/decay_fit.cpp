#include "widom/decay_fit.hpp"

#include <cmath>
#include <sstream>

#include "widom/error.hpp"

namespace widom {
namespace {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_stderr = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  Line line;
  line.slope = sxy / sxx;
  line.intercept = my - line.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (line.intercept + line.slope * x[i]);
    sse += r * r;
  }
  line.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  line.slope_stderr = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  return line;
}

}  // namespace

DecayFit fit_decay(std::span<const FitPoint> points, const FitOptions& options) {
  DecayFit fit;
  for (const FitPoint& p : points) {
    if (!(p.n > 0.0)) fail(ErrorKind::InvalidArgument, "fit abscissae must be positive");
    if (std::isfinite(p.magnitude) && p.magnitude >= options.floor) fit.points.push_back(p);
  }
  if (options.drop_first && !fit.points.empty()) fit.points.erase(fit.points.begin());
  if (fit.points.size() < std::max<std::size_t>(options.min_points, 2)) {
    std::ostringstream msg;
    msg << "only " << fit.points.size() << " of " << points.size()
        << " points lie above the floor " << options.floor << "; need " << options.min_points;
    fail(ErrorKind::FitDegenerate, msg.str());
  }

  std::vector<double> logn, linn, logm;
  for (const FitPoint& p : fit.points) {
    logn.push_back(std::log(p.n));
    linn.push_back(p.n);
    logm.push_back(std::log(p.magnitude));
  }
  if (logn.front() == logn.back()) fail(ErrorKind::FitDegenerate, "fit abscissae are all equal");
  const Line loglog = least_squares(logn, logm);
  fit.slope = loglog.slope;
  fit.intercept = loglog.intercept;
  fit.r_squared = loglog.r_squared;
  fit.slope_stderr = loglog.slope_stderr;

  // Geometric decay is a straight line in (n, log magnitude).
  const Line semilog = least_squares(linn, logm);
  fit.superpolynomial = fit.slope < -4.0 ||
                        (semilog.slope < 0.0 && semilog.r_squared > 0.99 &&
                         semilog.r_squared > loglog.r_squared);
  return fit;
}

void apply_target(DecayFit& fit, double target_slope) {
  fit.target_slope = target_slope;
  fit.within_band = fit.slope <= target_slope;
}

}  // namespace widom
