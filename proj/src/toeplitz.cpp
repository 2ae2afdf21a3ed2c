#include "widom/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "widom/error.hpp"
#include "widom/parallel.hpp"

namespace widom {
namespace {

constexpr double kSingularSectionCondition = 1e12;

// Block column [a_{begin}, a_{begin+step}, ...] with `count` blocks stacked.
Matrix stacked_coeffs(const LaurentMatrixSeries& a, int begin, int step, int count) {
  const Index n = a.block_size();
  Matrix out = Matrix::Zero(count * n, n);
  for (int i = 0; i < count; ++i) out.block(i * n, 0, n, n) = a.coeff(begin + i * step);
  return out;
}

// Frobenius mass of blocks a_{sign * j} for j > m.
double tail_frobenius(const LaurentMatrixSeries& a, int m, int sign) {
  double s = 0.0;
  for (const auto& [k, blk] : a.coeffs())
    if (sign * k > m) s += blk.squaredNorm();
  return std::sqrt(s);
}

// Hilbert-Schmidt mass of rows > ell of H(x) (entries x_s, s = i + r + 1),
// split into the part inside rows <= m, columns < m and the part outside.
struct HankelMass {
  double inside = 0.0;
  double outside = 0.0;
};

HankelMass hankel_mass(const LaurentMatrixSeries& x, int ell, int m) {
  HankelMass hm;
  for (const auto& [s, blk] : x.coeffs()) {
    if (s <= ell + 1) continue;
    const long all = s - 1 - ell;
    const long lo = std::max(ell + 1, s - m);
    const long hi = std::min(m, s - 1);
    const long in = std::max(0L, hi - lo + 1);
    hm.inside += static_cast<double>(in) * blk.squaredNorm();
    hm.outside += static_cast<double>(all - in) * blk.squaredNorm();
  }
  hm.inside = std::sqrt(hm.inside);
  hm.outside = std::sqrt(hm.outside);
  return hm;
}

double spectral_norm(const Matrix& x) {
  if (x.size() == 0) return 0.0;
  const Index small = std::min(x.rows(), x.cols());
  if (small <= 512) {
    const Matrix gram = x.rows() <= x.cols() ? Matrix(x * x.adjoint()) : Matrix(x.adjoint() * x);
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }
  Eigen::BDCSVD<Matrix> svd(x);
  return svd.singularValues()(0);
}

// Block Hankel operator x -> y, y_i = sum_j a_{s0+i+j} x_j, applied by FFT
// convolution so large sections never materialize.
class HankelOperator {
 public:
  HankelOperator(const LaurentMatrixSeries& a, int s0, int rows, int cols)
      : n_(a.block_size()), rows_(rows), cols_(cols) {
    int size = 1;
    while (size < 2 * (rows + cols)) size *= 2;
    size_ = size;
    fft_.SetFlag(Eigen::FFT<double>::Unscaled);
    const int len = rows + cols - 1;
    forward_.resize(n_ * n_);
    adjoint_.resize(n_ * n_);
    std::vector<Complex> g(size_), h(size_);
    for (Index p = 0; p < n_; ++p) {
      for (Index q = 0; q < n_; ++q) {
        std::fill(g.begin(), g.end(), Complex(0.0));
        std::fill(h.begin(), h.end(), Complex(0.0));
        for (int k = 0; k < len; ++k) {
          const Matrix& blk = a.coeff(s0 + k);
          g[k] = blk(p, q);
          h[k] = std::conj(blk(q, p));
        }
        fft_.fwd(forward_[p * n_ + q], g);
        fft_.fwd(adjoint_[p * n_ + q], h);
      }
    }
  }

  /// Vectors are block-major: entry q of block j sits at j * n + q.
  std::vector<Complex> apply(const std::vector<Complex>& x) const { return run(forward_, x, cols_, rows_); }
  std::vector<Complex> apply_adjoint(const std::vector<Complex>& y) const { return run(adjoint_, y, rows_, cols_); }

  Index input_size() const { return cols_ * n_; }

 private:
  // out_i = sum_j g_{i+j} in_j: the linear convolution of g with reversed input,
  // read from index i + in_count - 1.
  std::vector<Complex> run(const std::vector<std::vector<Complex>>& spectra, const std::vector<Complex>& in,
                           int in_count, int out_count) const {
    std::vector<Complex> out(static_cast<std::size_t>(out_count) * n_, Complex(0.0));
    std::vector<Complex> buf(size_), spec, acc(size_), time;
    for (Index q = 0; q < n_; ++q) {
      std::fill(buf.begin(), buf.end(), Complex(0.0));
      for (int j = 0; j < in_count; ++j) buf[in_count - 1 - j] = in[j * n_ + q];
      fft_.fwd(spec, buf);
      for (Index p = 0; p < n_; ++p) {
        const auto& g = spectra[p * n_ + q];
        for (int k = 0; k < size_; ++k) acc[k] = g[k] * spec[k];
        fft_.inv(time, acc);
        for (int i = 0; i < out_count; ++i) out[i * n_ + p] += time[i + in_count - 1] / double(size_);
      }
    }
    return out;
  }

  Index n_;
  int rows_, cols_, size_ = 0;
  mutable Eigen::FFT<double> fft_;
  std::vector<std::vector<Complex>> forward_, adjoint_;
};

double vector_norm(const std::vector<Complex>& v) {
  double s = 0.0;
  for (const Complex& z : v) s += std::norm(z);
  return std::sqrt(s);
}

// Largest singular value of a large Hankel section by power iteration on H^*H
// from a fixed pseudo-random start.
double hankel_spectral_norm(const LaurentMatrixSeries& a, int s0, int rows, int cols) {
  const HankelOperator op(a, s0, rows, cols);
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> g;
  std::vector<Complex> v(op.input_size());
  for (Complex& z : v) z = Complex(g(rng), g(rng));
  double nv = vector_norm(v);
  double sigma = 0.0;
  for (int it = 0; it < 5000; ++it) {
    for (Complex& z : v) z /= nv;
    const auto w = op.apply(v);
    const double next = vector_norm(w);
    if (next == 0.0) return 0.0;
    const bool done = it > 0 && std::abs(next - sigma) <= 1e-13 * next;
    sigma = next;
    if (done) break;
    v = op.apply_adjoint(w);
    nv = vector_norm(v);
  }
  return sigma;
}

// ||hankel_block(a, row_begin, rows, col_begin, cols)||_2, dense when small.
double hankel_norm(const LaurentMatrixSeries& a, int row_begin, int rows, int col_begin, int cols) {
  if (rows == 0 || cols == 0) return 0.0;
  if (std::min(rows, cols) * a.block_size() <= 512) {
    return spectral_norm(hankel_block(a, row_begin, rows, col_begin, cols));
  }
  return hankel_spectral_norm(a, row_begin + col_begin + 1, rows, cols);
}

}  // namespace

BlockMatrix toeplitz_section(const LaurentMatrixSeries& a, int n) {
  require(n >= 0, "section order must be nonnegative");
  const Index bs = a.block_size();
  const Index size = n + 1;
  BlockMatrix out{size, size, bs, Matrix::Zero(size * bs, size * bs)};
  for (const auto& [k, blk] : a.coeffs()) {
    if (std::abs(k) > n) continue;
    // Block (j, j - k).
    for (Index j = std::max(0, k); j < size && j - k < size; ++j) {
      out.dense.block(j * bs, (j - k) * bs, bs, bs) = blk;
    }
  }
  return out;
}

Matrix hankel_block(const LaurentMatrixSeries& a, int row_begin, int rows, int col_begin, int cols) {
  require(rows >= 0 && cols >= 0 && row_begin >= 0 && col_begin >= 0, "bad Hankel block range");
  const Index bs = a.block_size();
  Matrix out = Matrix::Zero(rows * bs, cols * bs);
  for (const auto& [s, blk] : a.coeffs()) {
    // Entries with i + j + 1 = s, i in rows, j in cols.
    const int first = s - 1 - (col_begin + cols - 1);
    const int i_lo = std::max(row_begin, first);
    const int i_hi = std::min(row_begin + rows - 1, s - 1 - col_begin);
    for (int i = i_lo; i <= i_hi; ++i) {
      const int j = s - 1 - i;
      out.block((i - row_begin) * bs, (j - col_begin) * bs, bs, bs) = blk;
    }
  }
  return out;
}

BlockMatrix hankel_section(const LaurentMatrixSeries& a, int m) {
  require(m > 0, "Hankel section size must be positive");
  return BlockMatrix{m, m, a.block_size(), hankel_block(a, 0, m, 0, m)};
}

int default_correction_truncation(int ell) { return std::max(4 * ell, ell + 32); }

CorrectionTerm correction_term(const LaurentMatrixSeries& b, const LaurentMatrixSeries& c,
                               int ell, int k, int m) {
  if (b.block_size() != c.block_size()) {
    fail(ErrorKind::BlockSizeMismatch, "correction term needs b and c of equal block size");
  }
  require(ell >= 0 && k >= 0, "ell and k must be nonnegative");
  if (m <= ell + 8) {
    std::ostringstream msg;
    msg << "truncation m = " << m << " must exceed ell + 8 = " << ell + 8;
    fail(ErrorKind::InvalidArgument, msg.str());
  }
  const int count = m - ell;
  const Matrix column = stacked_coeffs(b, ell + 1, 1, count);  // b_{l+1..m}
  const Index bs = b.block_size();
  Matrix row_blocks(bs, count * bs);  // c_{-(l+1)..-m}
  for (int i = 0; i < count; ++i) row_blocks.block(0, i * bs, bs, bs) = c.coeff(-(ell + 1 + i));

  Matrix inner;
  if (k > 0) {
    const Matrix hb = hankel_block(b, ell + 1, count, 0, m);
    const Matrix hc = hankel_block(reverse(c), 0, m, ell + 1, count);
    inner = hb * hc;
  }
  Matrix v = column;
  for (int i = 0; i < k; ++i) v = inner * v;

  CorrectionTerm term{ell, k, row_blocks * v, m, 0.0};

  const double row_norm = row_blocks.norm();
  const double col_norm = column.norm();
  const double row_tail = tail_frobenius(c, m, -1);
  const double col_tail = tail_frobenius(b, m, +1);
  double inner_norm = 0.0;
  double inner_tail = 0.0;
  if (k > 0) {
    inner_norm = inner.norm();
    const HankelMass hb = hankel_mass(b, ell, m);
    const HankelMass hc = hankel_mass(reverse(c), ell, m);
    inner_tail = hb.outside * (hc.inside + hc.outside) + hb.inside * hc.outside;
  }
  term.truncation_error_bound =
      std::max(0.0, (row_norm + row_tail) * std::pow(inner_norm + inner_tail, k) * (col_norm + col_tail) -
                        row_norm * std::pow(inner_norm, k) * col_norm);
  if (term.truncation_error_bound > 1e-8) {
    std::ostringstream msg;
    msg << "G_{" << ell << "," << k << "} truncated at m = " << m << " has tail bound "
        << term.truncation_error_bound;
    fail(ErrorKind::TruncationTooSmall, msg.str());
  }
  return term;
}

CorrectionTerm correction_term(const LaurentMatrixSeries& b, const LaurentMatrixSeries& c,
                               int ell, int k) {
  return correction_term(b, c, ell, k, default_correction_truncation(ell));
}

double section_condition(const Matrix& section) {
  Eigen::PartialPivLU<Matrix> lu(section);
  const double rc = lu.rcond();
  return rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
}

Complex log_det_lu(const Matrix& m, const std::string& what) {
  Eigen::PartialPivLU<Matrix> lu(m);
  const double rc = lu.rcond();
  if (!(rc > 1.0 / kSingularSectionCondition)) {
    std::ostringstream msg;
    msg << what << " has condition estimate " << (rc > 0.0 ? 1.0 / rc : INFINITY);
    fail(ErrorKind::NumericallySingularSection, msg.str());
  }
  const Matrix& lu_mat = lu.matrixLU();
  double re = 0.0;
  double im = 0.0;
  for (Index i = 0; i < lu_mat.rows(); ++i) {
    const Complex p = lu_mat(i, i);
    re += std::log(std::abs(p));
    im += std::arg(p);
  }
  if (lu.permutationP().determinant() < 0) im += std::numbers::pi;
  return {re, wrap_phase(im)};
}

Complex log_det_direct(const LaurentMatrixSeries& a, int n) {
  return log_det_lu(toeplitz_section(a, n).dense, "T_" + std::to_string(n) + "(a)");
}

double wrap_phase(double x) {
  const double two_pi = 2.0 * std::numbers::pi;
  x = std::remainder(x, two_pi);  // in [-pi, pi]
  if (x <= -std::numbers::pi) x += two_pi;
  return x;
}

std::vector<Complex> log_det_scan(const LaurentMatrixSeries& a, const std::vector<int>& ns) {
  std::vector<Complex> out(ns.size());
  parallel_for(ns.size(), [&](std::size_t i) { out[i] = log_det_direct(a, ns[i]); });
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double shift = std::round((out[i - 1].imag() - out[i].imag()) / two_pi);
    out[i] += Complex(0.0, shift * two_pi);
  }
  return out;
}

Eigen::VectorXcd section_eigenvalues(const Matrix& section) {
  const double scale = max_entry_norm(section);
  const bool hermitian = max_entry_norm(section - section.adjoint()) <= 1e-14 * scale;
  if (hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(section, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) fail(ErrorKind::EigFailure, "Hermitian eigensolver failed");
    return es.eigenvalues().cast<Complex>();
  }
  Eigen::ComplexEigenSolver<Matrix> es(section, false);
  if (es.info() != Eigen::Success) fail(ErrorKind::EigFailure, "complex eigensolver failed");
  return es.eigenvalues();
}

Complex trace_f_direct(const LaurentMatrixSeries& a, int n, const ScalarFunction& f) {
  const Eigen::VectorXcd ev = section_eigenvalues(toeplitz_section(a, n).dense);
  Complex s = 0.0;
  for (Index i = 0; i < ev.size(); ++i) s += f(ev[i]);
  return s;
}

TruncationNorms truncation_norms(const LaurentMatrixSeries& b, const LaurentMatrixSeries& c,
                                 int n, int m) {
  if (b.block_size() != c.block_size()) fail(ErrorKind::BlockSizeMismatch, "truncation norms");
  require(n >= 0, "n must be nonnegative");
  if (m <= 0) m = std::max({4 * n, b.max_offset(), -c.min_offset(), n + 1});
  require(m > n, "truncation m must exceed n");
  const int count = m - n;
  const LaurentMatrixSeries ct = reverse(c);
  TruncationNorms out;
  out.q_t_b_p0 = spectral_norm(stacked_coeffs(b, n + 1, 1, count));
  out.q_h_b = hankel_norm(b, n + 1, count, 0, m + 1);
  Matrix row(b.block_size(), count * b.block_size());
  for (int i = 0; i < count; ++i) {
    row.block(0, i * b.block_size(), b.block_size(), b.block_size()) = c.coeff(-(n + 1 + i));
  }
  out.p0_t_c_q = spectral_norm(row);
  out.h_ct_q = hankel_norm(ct, 0, m + 1, n + 1, count);
  return out;
}

}  // namespace widom
