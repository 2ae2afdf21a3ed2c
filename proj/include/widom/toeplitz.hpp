#pragma once

// Finite sections of block Toeplitz and Hankel operators, the correction
// matrices G_{l,k}(b, c), and dense reference computations of log det T_n(a)
// and tr f(T_n(a)).

#include <string>
#include <vector>

#include "widom/scalar_function.hpp"
#include "widom/series.hpp"

namespace widom {

/// Dense matrix partitioned into block_size x block_size blocks.
struct BlockMatrix {
  Index block_rows = 0;
  Index block_cols = 0;
  Index block_size = 1;
  Matrix dense;

  Matrix block(Index i, Index j) const {
    return dense.block(i * block_size, j * block_size, block_size, block_size);
  }
};

/// T_n(a) = [a_{j-k}]_{j,k=0}^{n}.
BlockMatrix toeplitz_section(const LaurentMatrixSeries& a, int n);

/// m x m section of H(a): block (j, k) = a_{j+k+1}. Pass reverse(a) for H(ã).
BlockMatrix hankel_section(const LaurentMatrixSeries& a, int m);

/// Rows [row_begin, row_begin + rows) and columns [col_begin, col_begin + cols)
/// of H(a) as a dense matrix.
Matrix hankel_block(const LaurentMatrixSeries& a, int row_begin, int rows, int col_begin, int cols);

struct CorrectionTerm {
  int ell = 0;
  int k = 0;
  Matrix value;
  int truncation = 0;
  double truncation_error_bound = 0.0;
};

/// Default truncation max(4 ell, ell + 32).
int default_correction_truncation(int ell);

/// G_{l,k}(b,c) = P_0 T(c) Q_l (Q_l H(b) H(c~) Q_l)^k Q_l T(b) P_0 on indices
/// l+1..m. Throws TruncationTooSmall when the tail bound exceeds 1e-8.
CorrectionTerm correction_term(const LaurentMatrixSeries& b, const LaurentMatrixSeries& c,
                               int ell, int k, int m);
CorrectionTerm correction_term(const LaurentMatrixSeries& b, const LaurentMatrixSeries& c,
                               int ell, int k);

/// Reduces a phase to (-pi, pi].
double wrap_phase(double x);

/// Principal-branch log det of a dense matrix from pivoted LU. Throws
/// NumericallySingularSection (naming `what`) when the condition estimate
/// exceeds 1e12.
Complex log_det_lu(const Matrix& m, const std::string& what);

/// Principal-branch log det T_n(a) from pivoted LU; imaginary part in (-pi, pi].
Complex log_det_direct(const LaurentMatrixSeries& a, int n);

/// log det T_n(a) for increasing n, with the imaginary part continued so that
/// consecutive values differ as little as possible.
std::vector<Complex> log_det_scan(const LaurentMatrixSeries& a, const std::vector<int>& ns);

/// Eigenvalues of the dense section (Hermitian solver when applicable).
Eigen::VectorXcd section_eigenvalues(const Matrix& section);

/// sum_i f(lambda_i) over the eigenvalues of T_n(a).
Complex trace_f_direct(const LaurentMatrixSeries& a, int n, const ScalarFunction& f);

struct TruncationNorms {
  double q_t_b_p0 = 0.0;   ///< ||Q_n T(b) P_0||
  double q_h_b = 0.0;      ///< ||Q_n H(b)||
  double p0_t_c_q = 0.0;   ///< ||P_0 T(c) Q_n||
  double h_ct_q = 0.0;     ///< ||H(c~) Q_n||
};

/// Spectral norms of the four truncations on indices up to m (default: the
/// larger of 4n and the support of b and c).
TruncationNorms truncation_norms(const LaurentMatrixSeries& b, const LaurentMatrixSeries& c,
                                 int n, int m = 0);

/// 2-norm condition estimate of a dense section, from the LU reciprocal estimate.
double section_condition(const Matrix& section);

}  // namespace widom
