#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "widom/error.hpp"
#include "widom/toeplitz.hpp"

using namespace widom;

namespace {

constexpr double kRho = 0.5;

LaurentMatrixSeries fixture() { return LaurentMatrixSeries::scalar({{-1, -0.5}, {0, 1.25}, {1, -0.5}}); }

// b = (1 - rho/t)/(1 - rho t): b_j = rho^j (1 - rho^2) for j >= 0, b_{-1} = -rho.
LaurentMatrixSeries rational_b(int terms = 90) {
  std::map<int, Complex> c{{-1, -kRho}};
  for (int j = 0; j <= terms; ++j) c[j] = std::pow(kRho, j) * (1.0 - kRho * kRho);
  return LaurentMatrixSeries::scalar(c);
}

// Closed form of G_{l,k} for the rational pair (b, c = b~): the Hankel
// product restricted to indices > l is rank one.
double rational_g(int ell, int k) {
  const double q = 1.0 - kRho * kRho;
  const double s = std::pow(kRho, 2 * ell + 2) / q;
  return std::pow(q, k + 2) * std::pow(s, k + 1) * std::pow(kRho, 2 * k);
}

}  // namespace

TEST_CASE("toeplitz_section") {
  auto one = toeplitz_section(LaurentMatrixSeries::identity(1), 3);
  CHECK(one.dense.rows() == 4);
  CHECK((one.dense - Matrix::Identity(4, 4)).norm() == 0.0);

  auto t = toeplitz_section(fixture(), 1).dense;
  Matrix expected(2, 2);
  expected << 1.25, -0.5, -0.5, 1.25;
  CHECK((t - expected).norm() == 0.0);

  Matrix a(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  auto blk = toeplitz_section(LaurentMatrixSeries::constant(a), 1);
  CHECK((blk.block(0, 0) - a).norm() == 0.0);
  CHECK((blk.block(1, 1) - a).norm() == 0.0);
  CHECK(blk.block(0, 1).norm() == 0.0);
  CHECK(blk.block(1, 0).norm() == 0.0);

  SUBCASE("block (j,k) holds a_{j-k}") {
    std::mt19937_64 rng(2);
    auto s = oracle::random_symbol(rng, 2, -3, 4);
    auto sec = toeplitz_section(s, 6);
    for (int j = 0; j <= 6; ++j)
      for (int k = 0; k <= 6; ++k) CHECK((sec.block(j, k) - s.coeff(j - k)).norm() == 0.0);
  }
  SUBCASE("Hermitian coefficients give a Hermitian section") {
    std::mt19937_64 rng(4);
    auto s = oracle::random_symbol(rng, 2, 0, 5);
    LaurentMatrixSeries::CoeffMap herm;
    for (const auto& [k, blk] : s.coeffs()) {
      if (k == 0) {
        herm.emplace(0, blk + blk.adjoint());
      } else {
        herm.emplace(k, blk);
        herm.emplace(-k, blk.adjoint());
      }
    }
    auto sec = toeplitz_section(LaurentMatrixSeries(2, herm), 9).dense;
    CHECK((sec - sec.adjoint()).norm() < 1e-15);
  }
}

TEST_CASE("hankel_section") {
  auto h = hankel_section(fixture(), 2).dense;
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = -0.5;
  CHECK((h - expected).norm() == 0.0);

  auto neg = LaurentMatrixSeries::scalar({{-3, 1.0}, {-1, 2.0}, {0, 5.0}});
  CHECK(hankel_section(neg, 4).dense.norm() == 0.0);

  auto t2 = hankel_section(LaurentMatrixSeries::scalar({{2, 1.0}}), 3).dense;
  CHECK(t2(0, 1) == Complex(1.0));
  CHECK(t2(1, 0) == Complex(1.0));
  CHECK(t2.cwiseAbs().sum() == doctest::Approx(2.0));

  SUBCASE("offset blocks agree with the full section") {
    std::mt19937_64 rng(9);
    auto s = oracle::random_symbol(rng, 2, -2, 9);
    Matrix full = hankel_section(s, 8).dense;
    Matrix part = hankel_block(s, 3, 4, 1, 5);
    CHECK((part - full.block(3 * 2, 1 * 2, 4 * 2, 5 * 2)).norm() == 0.0);
  }
}

TEST_CASE("section-level identity T(a)T(a^-1) + H(a)H((a^-1)~) = I") {
  std::map<int, Complex> inv;
  for (int k = -80; k <= 80; ++k) inv[k] = std::pow(kRho, std::abs(k)) / (1.0 - kRho * kRho);
  const auto ainv = LaurentMatrixSeries::scalar(inv);
  const int m = 30;
  Matrix tt = (toeplitz_section(fixture(), m).dense * toeplitz_section(ainv, m).dense).topLeftCorner(m, m);
  Matrix hh = (hankel_section(fixture(), m).dense * hankel_section(reverse(ainv), m).dense);
  CHECK((Matrix::Identity(m, m) - tt - hh).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("correction_term") {
  SUBCASE("b = c = 1 gives zero") {
    const auto one = LaurentMatrixSeries::identity(2);
    for (int ell : {0, 1, 5})
      for (int k : {0, 1, 3}) CHECK(correction_term(one, one, ell, k).value.norm() == 0.0);
  }
  SUBCASE("rational fixture closed form") {
    const auto b = rational_b();
    const auto c = reverse(b);
    auto g10 = correction_term(b, c, 1, 0);
    CHECK(std::abs(g10.value(0, 0) - 0.046875) < 1e-14);
    CHECK(g10.truncation == 33);
    for (int ell : {1, 2, 4})
      for (int k : {0, 1, 2, 3}) {
        auto g = correction_term(b, c, ell, k);
        CHECK(std::abs(g.value(0, 0) - rational_g(ell, k)) < 1e-14);
      }
  }
  SUBCASE("value is stable under enlarging the truncation") {
    const auto b = rational_b();
    const auto c = reverse(b);
    auto g1 = correction_term(b, c, 3, 2, 48);
    auto g2 = correction_term(b, c, 3, 2, 96);
    CHECK(g1.truncation_error_bound < 1e-10);
    CHECK((g1.value - g2.value).norm() < 1e-14);
  }
  SUBCASE("submultiplicative bound for k = 5") {
    std::mt19937_64 rng(21);
    LaurentMatrixSeries::CoeffMap bm, cm;
    std::normal_distribution<double> g;
    for (int j = -30; j <= 30; ++j) {
      Matrix x(2, 2), y(2, 2);
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s) {
          x(r, s) = Complex(g(rng), g(rng)) * std::pow(0.4, std::abs(j));
          y(r, s) = Complex(g(rng), g(rng)) * std::pow(0.4, std::abs(j));
        }
      bm.emplace(j, x);
      cm.emplace(j, y);
    }
    const LaurentMatrixSeries b(2, bm), c(2, cm);
    const int ell = 2, m = ell + 9;
    auto term = correction_term(b, c, ell, 5, m);
    Matrix row(2, 2 * (m - ell)), col(2 * (m - ell), 2);
    for (int i = 0; i < m - ell; ++i) {
      row.block(0, 2 * i, 2, 2) = c.coeff(-(ell + 1 + i));
      col.block(2 * i, 0, 2, 2) = b.coeff(ell + 1 + i);
    }
    const Matrix inner = hankel_block(b, ell + 1, m - ell, 0, m) * hankel_block(reverse(c), 0, m, ell + 1, m - ell);
    const double bound = row.norm() * col.norm() * std::pow(inner.norm(), 5);
    CHECK(term.value.norm() <= bound * (1 + 1e-12));
    CHECK(term.truncation_error_bound >= 0.0);
  }
  SUBCASE("errors") {
    const auto b = rational_b();
    CHECK_THROWS_AS(correction_term(b, reverse(b), 4, 0, 12), Error);
    try {
      correction_term(b, reverse(b), 1, 0, 10);
      FAIL("expected TruncationTooSmall");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::TruncationTooSmall);
    }
    CHECK_THROWS_AS(correction_term(b, LaurentMatrixSeries::identity(2), 1, 0), Error);
  }
}

TEST_CASE("log_det_direct") {
  CHECK(std::abs(log_det_direct(fixture(), 0) - std::log(1.25)) < 1e-15);
  CHECK(std::abs(log_det_direct(fixture(), 1) - std::log(1.3125)) < 1e-15);
  CHECK(std::abs(log_det_direct(LaurentMatrixSeries::identity(2), 7)) < 1e-15);

  SUBCASE("closed form agrees with the recurrence") {
    for (int n : {0, 1, 2, 5, 17, 64})
      CHECK(oracle::rational_fixture_det(kRho, n) ==
            doctest::Approx(oracle::rational_fixture_det_by_recurrence(kRho, n)).epsilon(1e-14));
  }
  SUBCASE("negative determinant keeps the principal branch") {
    auto neg = LaurentMatrixSeries::scalar({{0, -2.0}});
    auto v = log_det_direct(neg, 2);  // det = -8
    CHECK(std::abs(v - std::log(Complex(-8.0))) < 1e-14);
  }
  SUBCASE("singular section") {
    auto zero = LaurentMatrixSeries::scalar({{1, 1.0}});  // T_n(t) is nilpotent
    try {
      log_det_direct(zero, 4);
      FAIL("expected NumericallySingularSection");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NumericallySingularSection);
    }
  }
  SUBCASE("scan continues the branch") {
    // a = -1.1 + 0.5 t: det T_n = (-1.1)^{n+1}, phase advances by pi each step.
    auto a = LaurentMatrixSeries::scalar({{0, Complex(-1.1, 1e-3)}, {1, 0.5}});
    std::vector<int> ns{0, 1, 2, 3, 4, 5};
    auto scan = log_det_scan(a, ns);
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const Complex expected = double(ns[i] + 1) * std::log(Complex(-1.1, 1e-3));
      CHECK(std::abs(scan[i] - expected) < 1e-12);
    }
  }
}

TEST_CASE("trace_f_direct") {
  const auto id = ScalarFunction::polynomial({0.0, 1.0});
  const auto sq = ScalarFunction::parse("square");
  const auto one = ScalarFunction::polynomial({1.0});

  CHECK(std::abs(trace_f_direct(fixture(), 5, id) - 6.0 * 1.25) < 1e-12);
  CHECK(std::abs(trace_f_direct(fixture(), 1, sq) - 3.625) < 1e-13);
  CHECK(std::abs(trace_f_direct(fixture(), 1, sq) - oracle::trace_of_square(fixture(), 1)) < 1e-13);
  CHECK(std::abs(trace_f_direct(LaurentMatrixSeries::identity(3), 4, one) - 15.0) < 1e-13);

  SUBCASE("square matches the convolution-trace identity on random band-limited symbols") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 8; ++trial) {
      const Index n = 1 + trial % 2;
      auto a = oracle::random_symbol(rng, n, -3, 2);
      for (int sec : {1, 4, 12}) {
        const Complex direct = trace_f_direct(a, sec, sq);
        const Complex exact = oracle::trace_of_square(a, sec);
        CHECK(std::abs(direct - exact) <= 1e-10 * std::max(1.0, std::abs(exact)));
      }
      Complex tr0 = a.coeff(0).trace();
      CHECK(std::abs(trace_f_direct(a, 6, id) - 7.0 * tr0) <= 1e-10 * std::max(1.0, std::abs(tr0)));
    }
  }
}

TEST_CASE("truncation_norms") {
  const auto one = LaurentMatrixSeries::identity(1);
  auto z = truncation_norms(one, one, 3);
  CHECK(z.q_t_b_p0 == 0.0);
  CHECK(z.q_h_b == 0.0);
  CHECK(z.p0_t_c_q == 0.0);
  CHECK(z.h_ct_q == 0.0);

  const auto b = rational_b();
  const auto c = reverse(b);
  auto n4 = truncation_norms(b, c, 4);
  const double expected = 0.75 * std::sqrt(std::pow(0.5, 10) / 0.75);
  CHECK(n4.q_t_b_p0 == doctest::Approx(expected).epsilon(1e-12));
  CHECK(n4.q_t_b_p0 == doctest::Approx(0.02706).epsilon(1e-3));
  // c = b~ makes the two sides mirror images.
  CHECK(n4.p0_t_c_q == doctest::Approx(n4.q_t_b_p0).epsilon(1e-12));
  CHECK(n4.h_ct_q == doctest::Approx(n4.q_h_b).epsilon(1e-12));

  for (int n : {2, 4, 8, 16}) {
    auto lo = truncation_norms(b, c, n);
    auto hi = truncation_norms(b, c, 2 * n);
    CHECK(hi.q_t_b_p0 <= lo.q_t_b_p0);
    CHECK(hi.q_h_b <= lo.q_h_b);
    CHECK(hi.p0_t_c_q <= lo.p0_t_c_q);
    CHECK(hi.h_ct_q <= lo.h_ct_q);
  }

  SUBCASE("large sections match a dense eigensolve") {
    // Over 512 rows and columns, so the matrix-free path is taken.
    auto top = [](const Matrix& h) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(h.adjoint() * h), Eigen::EigenvaluesOnly);
      return std::sqrt(es.eigenvalues().maxCoeff());
    };
    std::mt19937_64 rng(5);
    for (widom::Index bs : {1, 2}) {
      const int m = bs == 1 ? 600 : 300;
      auto rb = oracle::random_symbol(rng, bs, 0, m + 50, 0.1);
      auto rc = oracle::random_symbol(rng, bs, -(m + 50), 0, 0.1);
      const auto big = truncation_norms(rb, rc, 3, m);
      CHECK(big.q_h_b == doctest::Approx(top(hankel_block(rb, 4, m - 3, 0, m + 1))).epsilon(1e-9));
      CHECK(big.h_ct_q == doctest::Approx(top(hankel_block(reverse(rc), 0, m + 1, 4, m - 3))).epsilon(1e-9));
    }
  }
}
