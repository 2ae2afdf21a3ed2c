#include "widom/scalar_function.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/Polynomials>

#include "widom/error.hpp"

namespace widom {
namespace {

Complex horner(const std::vector<Complex>& c, Complex z) {
  Complex s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * z + *it;
  return s;
}

double horner_abs(const std::vector<Complex>& c, double r) {
  double s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * r + std::abs(*it);
  return s;
}

void trim(std::vector<Complex>& c) {
  while (c.size() > 1 && c.back() == Complex(0.0)) c.pop_back();
}

double parse_real(std::string_view s, std::string_view spec) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    fail(ErrorKind::ConfigInvalid, "bad number '" + std::string(s) + "' in f spec '" +
                                       std::string(spec) + "'");
  }
  return v;
}

// "1.5", "-2", "1+2j", "0.5-1e-3j", "3j"
Complex parse_complex(std::string_view s, std::string_view spec) {
  if (s.empty()) fail(ErrorKind::ConfigInvalid, "empty coefficient in f spec '" + std::string(spec) + "'");
  if (s.back() != 'j' && s.back() != 'i') return parse_real(s, spec);
  s.remove_suffix(1);
  // Split at the last sign that is not an exponent sign or the leading sign.
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      const std::string_view im = s.substr(i);
      return {parse_real(s.substr(0, i), spec),
              parse_real(im.front() == '+' ? im.substr(1) : im, spec)};
    }
  }
  return {0.0, parse_real(s, spec)};
}

std::vector<Complex> parse_list(std::string_view s, std::string_view spec) {
  std::vector<Complex> out;
  while (!s.empty()) {
    const std::size_t comma = s.find(',');
    out.push_back(parse_complex(s.substr(0, comma), spec));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  if (out.empty()) fail(ErrorKind::ConfigInvalid, "no coefficients in f spec '" + std::string(spec) + "'");
  return out;
}

std::vector<Complex> roots(const std::vector<Complex>& c) {
  if (c.size() < 2) return {};
  Eigen::VectorXcd coeffs(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) coeffs[i] = c[i];
  Eigen::PolynomialSolver<Complex, Eigen::Dynamic> solver(coeffs);
  const auto& r = solver.roots();
  return {r.data(), r.data() + r.size()};
}

}  // namespace

ScalarFunction ScalarFunction::polynomial(std::vector<Complex> coeffs) {
  require(!coeffs.empty(), "polynomial needs at least one coefficient");
  trim(coeffs);
  std::ostringstream name;
  name << "poly:";
  for (std::size_t i = 0; i < coeffs.size(); ++i) name << (i ? "," : "") << coeffs[i].real();
  ScalarFunction f(Kind::Polynomial, name.str());
  f.num_ = std::move(coeffs);
  return f;
}

ScalarFunction ScalarFunction::exponential() { return {Kind::Exp, "exp"}; }

ScalarFunction ScalarFunction::logarithm() { return {Kind::Log, "log"}; }

ScalarFunction ScalarFunction::rational(std::vector<Complex> numerator,
                                        std::vector<Complex> denominator) {
  require(!numerator.empty() && !denominator.empty(), "rational function needs coefficients");
  trim(numerator);
  trim(denominator);
  require(denominator.back() != Complex(0.0), "denominator must be nonzero");
  ScalarFunction f(Kind::Rational, "rational");
  f.num_ = std::move(numerator);
  f.den_ = std::move(denominator);
  f.poles_ = roots(f.den_);
  return f;
}

ScalarFunction ScalarFunction::parse(std::string_view spec) {
  if (spec == "square") return polynomial({0.0, 0.0, 1.0});
  if (spec == "identity") return polynomial({0.0, 1.0});
  if (spec == "one") return polynomial({1.0});
  if (spec == "exp") return exponential();
  if (spec == "log") return logarithm();
  if (spec.starts_with("poly:")) return polynomial(parse_list(spec.substr(5), spec));
  if (spec.starts_with("rational:")) {
    const std::string_view body = spec.substr(9);
    const std::size_t semi = body.find(';');
    if (semi == std::string_view::npos) {
      fail(ErrorKind::ConfigInvalid, "rational f spec needs 'num;den': " + std::string(spec));
    }
    return rational(parse_list(body.substr(0, semi), spec), parse_list(body.substr(semi + 1), spec));
  }
  fail(ErrorKind::ConfigInvalid, "unknown function spec '" + std::string(spec) +
                                     "' (expected square|exp|log|poly:...|rational:...;...)");
}

bool ScalarFunction::analytic_at(Complex z) const {
  switch (kind_) {
    case Kind::Polynomial:
    case Kind::Exp:
      return std::isfinite(z.real()) && std::isfinite(z.imag());
    case Kind::Log:
      return !(z.imag() == 0.0 && z.real() <= 0.0);
    case Kind::Rational:
      return std::abs(horner(den_, z)) > 1e-14 * horner_abs(den_, std::abs(z));
  }
  return false;
}

bool ScalarFunction::analytic_on_disk(Complex center, double radius) const {
  switch (kind_) {
    case Kind::Polynomial:
    case Kind::Exp:
      return true;
    case Kind::Log: {
      // Disk must miss the cut (-inf, 0].
      if (std::abs(center.imag()) > radius) return true;
      const double half = std::sqrt(radius * radius - center.imag() * center.imag());
      return center.real() - half > 0.0;
    }
    case Kind::Rational:
      for (const Complex& p : poles_)
        if (std::abs(p - center) <= radius) return false;
      return true;
  }
  return false;
}

Complex ScalarFunction::operator()(Complex z) const {
  if (!analytic_at(z)) {
    std::ostringstream msg;
    msg << name_ << " is not analytic at " << z;
    fail(ErrorKind::FNotAnalyticAtSample, msg.str());
  }
  switch (kind_) {
    case Kind::Polynomial: return horner(num_, z);
    case Kind::Exp: return std::exp(z);
    case Kind::Log: return std::log(z);
    case Kind::Rational: return horner(num_, z) / horner(den_, z);
  }
  return 0.0;
}

std::optional<int> ScalarFunction::polynomial_degree() const {
  if (kind_ != Kind::Polynomial) return std::nullopt;
  return static_cast<int>(num_.size()) - 1;
}

}  // namespace widom
