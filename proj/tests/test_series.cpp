#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "widom/error.hpp"
#include "widom/series.hpp"

using namespace widom;

namespace {

// a(t) = 1.25 - 0.5 t - 0.5 / t = (1 - 0.5/t)(1 - 0.5 t)
LaurentMatrixSeries fixture() { return LaurentMatrixSeries::scalar({{-1, -0.5}, {0, 1.25}, {1, -0.5}}); }

}  // namespace

TEST_CASE("coefficients_from_samples") {
  SUBCASE("constant function") {
    SymbolGrid g{1, std::vector<Matrix>(16, Matrix::Constant(1, 1, 1.0))};
    auto r = coefficients_from_samples(g, 3);
    CHECK(std::abs(r.series.scalar_coeff(0) - 1.0) < 1e-15);
    for (int k = -3; k <= 3; ++k)
      if (k != 0) CHECK(std::abs(r.series.scalar_coeff(k)) < 1e-15);
    CHECK(r.tail_energy < 1e-28);
  }
  SUBCASE("fixture at M = 16, K = 2") {
    SymbolGrid g{1, {}};
    for (int j = 0; j < 16; ++j) {
      g.samples.push_back(Matrix::Constant(1, 1, oracle::scalar_value(fixture(), SymbolGrid::theta(j, 16))));
    }
    auto r = coefficients_from_samples(g, 2);
    CHECK(std::abs(r.series.scalar_coeff(0) - 1.25) < 1e-14);
    CHECK(std::abs(r.series.scalar_coeff(1) + 0.5) < 1e-14);
    CHECK(std::abs(r.series.scalar_coeff(-1) + 0.5) < 1e-14);
    CHECK(std::abs(r.series.scalar_coeff(2)) < 1e-14);
    CHECK(std::abs(r.series.scalar_coeff(-2)) < 1e-14);
  }
  SUBCASE("support outside the cutoff lands in the tail") {
    auto a = LaurentMatrixSeries::scalar({{3, 1.0}});
    auto r = coefficients_from_samples(sample(a, 16), 2);
    for (int k = -2; k <= 2; ++k) CHECK(std::abs(r.series.scalar_coeff(k)) < 1e-15);
    CHECK(r.tail_energy == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("cutoff too large") {
    auto g = sample(fixture(), 16);
    CHECK_NOTHROW(coefficients_from_samples(g, 7));
    try {
      coefficients_from_samples(g, 8);
      FAIL("expected CutoffTooLarge");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::CutoffTooLarge);
    }
  }
}

TEST_CASE("sample/transform round trip on random block symbols") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 1 + trial % 3;
    const int lo = -static_cast<int>(rng() % 20);
    const int hi = static_cast<int>(rng() % 20);
    auto a = oracle::random_symbol(rng, n, lo, hi);
    auto g = sample(a);
    CHECK(g.size() == a.grid_size());
    CHECK(g.size() > 2 * a.max_abs_offset());
    auto back = coefficients_from_samples(g, a.max_abs_offset()).series;
    double scale = 0.0;
    for (const auto& kv : a.coeffs()) scale = std::max(scale, max_entry_norm(kv.second));
    CHECK(oracle::max_coeff_diff(a, back) <= 1e-12 * scale);
  }
}

TEST_CASE("default grid size") {
  CHECK(default_grid_size(0) == 256);
  CHECK(default_grid_size(32) == 256);
  CHECK(default_grid_size(33) == 512);
  CHECK(default_grid_size(256) == 2048);
  CHECK(fixture().grid_size() == 256);
}

TEST_CASE("evaluate") {
  CHECK(std::abs(evaluate(fixture(), 0.0)(0, 0) - 0.25) < 1e-15);
  CHECK(std::abs(evaluate(fixture(), oracle::pi())(0, 0) - 2.25) < 1e-15);
  auto id = LaurentMatrixSeries::identity(3);
  CHECK((evaluate(id, 0.7) - Matrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("reverse") {
  auto a = LaurentMatrixSeries::scalar({{0, 1.0}, {1, 0.3}});
  auto r = reverse(a);
  CHECK(r.scalar_coeff(-1) == Complex(0.3));
  CHECK(r.scalar_coeff(0) == Complex(1.0));
  CHECK(r.scalar_coeff(1) == Complex(0.0));
  CHECK(oracle::max_coeff_diff(reverse(fixture()), fixture()) == 0.0);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 5; ++i) {
    auto s = oracle::random_symbol(rng, 2, -4, 6);
    CHECK(oracle::max_coeff_diff(reverse(reverse(s)), s) == 0.0);
  }
}

TEST_CASE("pointwise_inverse") {
  SUBCASE("constant") {
    auto r = pointwise_inverse(LaurentMatrixSeries::scalar({{0, 2.0}}), 4);
    CHECK(std::abs(r.series.scalar_coeff(0) - 0.5) < 1e-15);
    CHECK(r.residual < 1e-15);
  }
  SUBCASE("geometric series") {
    auto a = LaurentMatrixSeries::scalar({{0, 1.0}, {1, -0.5}});
    auto r = pointwise_inverse(a, 40);
    for (int k = 0; k <= 40; ++k) CHECK(std::abs(r.series.scalar_coeff(k) - std::pow(0.5, k)) < 1e-10);
    for (int k = -40; k < 0; ++k) CHECK(std::abs(r.series.scalar_coeff(k)) < 1e-10);
    CHECK(r.margin == doctest::Approx(0.5));
  }
  SUBCASE("monomial") {
    auto r = pointwise_inverse(LaurentMatrixSeries::scalar({{1, 1.0}}), 3);
    CHECK(std::abs(r.series.scalar_coeff(-1) - 1.0) < 1e-14);
    for (int k = -3; k <= 3; ++k)
      if (k != -1) CHECK(std::abs(r.series.scalar_coeff(k)) < 1e-14);
  }
  SUBCASE("singular symbol reports the worst node") {
    // 1 - t vanishes at theta = 0.
    auto a = LaurentMatrixSeries::scalar({{0, 1.0}, {1, -1.0}});
    try {
      pointwise_inverse(a, 8);
      FAIL("expected SingularSymbol");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SingularSymbol);
      CHECK(std::string(e.what()).find("node 0") != std::string::npos);
    }
  }
  SUBCASE("adaptive cutoff keeps the residual small") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 6; ++trial) {
      // Diagonally dominant: margin bounded away from zero.
      auto a = oracle::random_symbol(rng, 2, -3, 3, 0.1) +
               LaurentMatrixSeries::constant(3.0 * Matrix::Identity(2, 2));
      auto r = pointwise_inverse(a);
      CHECK(r.margin > 1e-10);
      CHECK(r.residual <= 1e-8);
    }
    auto tight = LaurentMatrixSeries::scalar({{0, 1.0}, {1, -0.9}});
    CHECK(pointwise_inverse(tight).residual <= 1e-8);
  }
}

TEST_CASE("multiply") {
  auto left = LaurentMatrixSeries::scalar({{0, 1.0}, {1, -0.5}});
  auto right = LaurentMatrixSeries::scalar({{0, 1.0}, {-1, -0.5}});
  CHECK(oracle::max_coeff_diff(multiply(left, right), fixture()) < 1e-16);
  CHECK(oracle::max_coeff_diff(multiply(fixture(), LaurentMatrixSeries::identity(1)), fixture()) == 0.0);
  auto t = LaurentMatrixSeries::scalar({{1, 1.0}});
  auto tinv = LaurentMatrixSeries::scalar({{-1, 1.0}});
  CHECK(oracle::max_coeff_diff(multiply(t, tinv), LaurentMatrixSeries::identity(1)) == 0.0);

  CHECK_THROWS_AS(multiply(LaurentMatrixSeries::identity(2), fixture()), Error);

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = oracle::random_symbol(rng, 2, -2, 3);
    auto b = oracle::random_symbol(rng, 2, -1, 2);
    auto c = oracle::random_symbol(rng, 2, -3, 1);
    CHECK(oracle::max_coeff_diff(multiply(multiply(a, b), c), multiply(a, multiply(b, c))) <= 1e-13);
    CHECK(oracle::max_coeff_diff(multiply(LaurentMatrixSeries::identity(2), a), a) <= 1e-13);
  }
}

TEST_CASE("zygmund_test_symbol") {
  SUBCASE("gamma = 1, J = 2, zero phases") {
    auto f = zygmund_test_symbol(1.0, 2, std::vector<double>(3, 0.0));
    CHECK(std::abs(f.scalar_coeff(0) - 3.75) < 1e-15);
    CHECK(std::abs(f.scalar_coeff(1) - 0.5) < 1e-15);
    CHECK(std::abs(f.scalar_coeff(-1) - 0.5) < 1e-15);
    CHECK(std::abs(f.scalar_coeff(2) - 0.25) < 1e-15);
    CHECK(std::abs(f.scalar_coeff(-2) - 0.25) < 1e-15);
    CHECK(std::abs(f.scalar_coeff(4) - 0.125) < 1e-15);
    CHECK(std::abs(f.scalar_coeff(-4) - 0.125) < 1e-15);
    CHECK(f.smoothness() == 1.0);
  }
  SUBCASE("lacunary support and winding zero") {
    for (std::uint64_t seed : {1u, 7u, 99u}) {
      auto f = zygmund_test_symbol(0.75, 6, seed);
      for (const auto& [k, blk] : f.coeffs()) {
        const int ak = std::abs(k);
        CHECK((ak == 0 || (ak & (ak - 1)) == 0));
      }
      CHECK(f.max_abs_offset() == 64);
      CHECK(winding_number(f) == 0);
      // Lacunary coefficients are 2^{-gamma j}/2 in magnitude.
      CHECK(std::abs(f.scalar_coeff(8)) == doctest::Approx(0.5 * std::pow(2.0, -0.75 * 3)));
    }
  }
  SUBCASE("gamma scales the coefficients") {
    auto f1 = zygmund_test_symbol(1.0, 1, 0);
    auto f2 = zygmund_test_symbol(2.0, 1, 0);
    CHECK(std::abs(f1.scalar_coeff(2)) == doctest::Approx(0.5 * 0.5));
    CHECK(std::abs(f2.scalar_coeff(2)) == doctest::Approx(0.5 * 0.25));
  }
  SUBCASE("deterministic phases") {
    CHECK(fixture_phases(5, 42) == fixture_phases(5, 42));
    CHECK(fixture_phases(5, 42) != fixture_phases(5, 43));
  }
}

TEST_CASE("krein_norm") {
  CHECK(krein_norm(LaurentMatrixSeries::identity(2)) == 1.0);
  CHECK(krein_norm(fixture()) == doctest::Approx(2.5625));
  CHECK(krein_norm(LaurentMatrixSeries(3)) == 0.0);
}

TEST_CASE("winding_number") {
  CHECK(winding_number(LaurentMatrixSeries::scalar({{1, 1.0}})) == 1);
  CHECK(winding_number(fixture()) == 0);
  CHECK(winding_number(LaurentMatrixSeries::scalar({{-2, 1.0}})) == -2);

  SUBCASE("positive scaling does not change it") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 5; ++i) {
      auto a = oracle::random_symbol(rng, 1, -3, 3);
      int w = 0;
      try {
        w = winding_number(a);
      } catch (const Error&) {
        continue;
      }
      CHECK(winding_number(Complex(3.7) * a) == w);
      CHECK(winding_number(Complex(0.01) * a) == w);
    }
  }
  SUBCASE("block determinant") {
    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = 1.0;
    auto a = LaurentMatrixSeries(2, {{0, diag}, {1, Matrix::Identity(2, 2) - diag}});
    CHECK(winding_number(a) == 1);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(winding_number(LaurentMatrixSeries::scalar({{0, 1.0}, {1, -1.0}})), Error);
    // t^100 on a 256-point grid jumps by 100 * 2pi/256 > pi/2 per step.
    try {
      winding_number(sample(LaurentMatrixSeries::scalar({{100, 1.0}}), 256));
      FAIL("expected GridTooCoarse");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::GridTooCoarse);
    }
  }
}
