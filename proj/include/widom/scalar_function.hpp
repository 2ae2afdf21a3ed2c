#pragma once

// Named analytic functions f applied to spectra: tr f(T_n(a)), G_f, E_f.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "widom/series.hpp"

namespace widom {

class ScalarFunction {
 public:
  enum class Kind { Polynomial, Exp, Log, Rational };

  /// sum_i coeffs[i] z^i.
  static ScalarFunction polynomial(std::vector<Complex> coeffs);
  static ScalarFunction exponential();
  /// Principal branch, cut along (-inf, 0].
  static ScalarFunction logarithm();
  static ScalarFunction rational(std::vector<Complex> numerator, std::vector<Complex> denominator);

  /// square | exp | log | poly:c0,c1,... | rational:p0,p1,...;q0,q1,...
  /// Coefficients may be written re or re+imj / re-imj.
  static ScalarFunction parse(std::string_view spec);

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

  /// Throws FNotAnalyticAtSample outside the analyticity domain.
  Complex operator()(Complex z) const;
  bool analytic_at(Complex z) const;
  /// True when f is analytic on a neighbourhood of the closed disk.
  bool analytic_on_disk(Complex center, double radius) const;

  std::optional<int> polynomial_degree() const;
  const std::vector<Complex>& numerator() const noexcept { return num_; }
  const std::vector<Complex>& denominator() const noexcept { return den_; }

 private:
  ScalarFunction(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  Kind kind_;
  std::string name_;
  std::vector<Complex> num_;
  std::vector<Complex> den_;
  std::vector<Complex> poles_;
};

}  // namespace widom
