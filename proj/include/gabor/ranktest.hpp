#pragma once

// Rank decisions for P matrices: singular values for the floating matrices,
// exact rank over Q by fraction-free elimination for certified verdicts.

#include "gabor/pmatrix.hpp"
#include "gabor/rational.hpp"

#include <complex>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

extern "C" void openblas_set_num_threads(int) __attribute__((weak));

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace gabor {

inline constexpr double kDefaultRankTol = 1e-8;

struct SingularProfile {
  std::vector<double> values;  // nonincreasing, length min(rows, cols)

  double largest() const { return values.empty() ? 0.0 : values.front(); }
  double smallest() const { return values.empty() ? 0.0 : values.back(); }

  /// sigma_min / sigma_max; 0 for the zero matrix.
  double margin() const {
    double top = largest();
    return top > 0.0 ? smallest() / top : 0.0;
  }
};

namespace detail {

/// OpenBLAS runs its own thread pool; the matrices here are tiny and scans
/// parallelise one level up, so it is pinned to one thread when present.
inline void pin_blas_threads() {
  static const bool once = [] {
    if (openblas_set_num_threads) openblas_set_num_threads(1);
    return true;
  }();
  (void)once;
}

}  // namespace detail

/// All singular values, values-only LAPACK zgesvd (Householder
/// bidiagonalization + implicit QR).
inline SingularProfile singular_values(const ComplexMatrix &m) {
  SingularProfile prof;
  if (m.size() == 0) return prof;
  detail::pin_blas_threads();
  ComplexMatrix work = m;  // zgesvd overwrites its input
  const auto rows = static_cast<lapack_int>(work.rows());
  const auto cols = static_cast<lapack_int>(work.cols());
  const auto n = std::min(rows, cols);
  prof.values.resize(static_cast<std::size_t>(n));
  std::vector<double> superb(static_cast<std::size_t>(std::max<lapack_int>(n, 1)));
  lapack_int info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'N', 'N', rows, cols,
                                   reinterpret_cast<lapack_complex_double *>(work.data()), rows, prof.values.data(),
                                   nullptr, 1, nullptr, 1, superb.data());
  if (info != 0) throw std::runtime_error("singular_values: zgesvd failed, info = " + std::to_string(info));
  return prof;
}

inline SingularProfile singular_values(const PMatrix &m) {
  if (m.entries.rows() > m.entries.cols())
    throw std::invalid_argument("singular_values: expected p <= q");
  return singular_values(m.entries);
}

/// Number of singular values above rel_tol * sigma_max.
inline int numeric_rank(const SingularProfile &prof, double rel_tol = kDefaultRankTol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("numeric_rank: rel_tol must lie in (0, 1)");
  double top = prof.largest();
  if (top <= 0.0) return 0;
  return static_cast<int>(std::count_if(prof.values.begin(), prof.values.end(),
                                        [&](double s) { return s > rel_tol * top; }));
}

namespace detail {

/// Each row multiplied by the lcm of its denominators; rank is unchanged.
inline std::vector<std::vector<BigInt>> integer_rows(const RationalMatrix &m) {
  std::vector<std::vector<BigInt>> a(m.rows, std::vector<BigInt>(m.cols));
  for (std::size_t i = 0; i < m.rows; ++i) {
    BigInt scale = 1;
    for (std::size_t j = 0; j < m.cols; ++j) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), m(i, j).mpq().get_den_mpz_t());
    for (std::size_t j = 0; j < m.cols; ++j) a[i][j] = m(i, j).mpq().get_num() * (scale / m(i, j).mpq().get_den());
  }
  return a;
}

}  // namespace detail

/// Exact rank over Q.  Bareiss fraction-free elimination with full pivoting:
/// the pivot is the largest-magnitude remaining entry, ties broken by the
/// smallest (row, col).  Every division in the update is exact.
inline int exact_rank(const RationalMatrix &m) {
  auto a = detail::integer_rows(m);
  const std::size_t rows = m.rows, cols = m.cols;
  std::vector<std::size_t> col_of(cols);
  for (std::size_t j = 0; j < cols; ++j) col_of[j] = j;

  BigInt prev = 1;
  std::size_t rank = 0;
  for (std::size_t k = 0; k < std::min(rows, cols); ++k) {
    std::size_t pr = rows, pc = cols;
    BigInt best = 0;
    for (std::size_t i = k; i < rows; ++i)
      for (std::size_t j = k; j < cols; ++j) {
        const BigInt &v = a[i][col_of[j]];
        if (v == 0) continue;
        int c = mpz_cmpabs(v.get_mpz_t(), best.get_mpz_t());
        // Scan order is row-major, so strict > keeps the smallest (row, col) on ties.
        if (c > 0) {
          best = v;
          pr = i;
          pc = j;
        }
      }
    if (pr == rows) break;
    std::swap(a[k], a[pr]);
    std::swap(col_of[k], col_of[pc]);

    const BigInt &pivot = a[k][col_of[k]];
    for (std::size_t i = k + 1; i < rows; ++i) {
      const BigInt lead = a[i][col_of[k]];
      for (std::size_t j = k + 1; j < cols; ++j) {
        BigInt &target = a[i][col_of[j]];
        target = pivot * target - lead * a[k][col_of[j]];
        mpz_divexact(target.get_mpz_t(), target.get_mpz_t(), prev.get_mpz_t());
      }
      a[i][col_of[k]] = 0;
    }
    prev = pivot;
    ++rank;
  }
  return static_cast<int>(rank);
}

inline int exact_rank(const ExactPMatrix &m) { return exact_rank(m.entries); }

}  // namespace gabor
