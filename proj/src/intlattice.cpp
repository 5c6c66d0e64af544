#include "torusnf/intlattice.hpp"

#include <gmpxx.h>

namespace torusnf {

namespace {

using ZMat = std::vector<std::vector<mpz_class>>;

ZMat to_zmat(const std::vector<VecI>& rows, int d) {
  ZMat m(rows.size(), std::vector<mpz_class>(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) throw std::invalid_argument("dimension mismatch");
    for (int j = 0; j < d; ++j) m[i][j] = rows[i][j];
  }
  return m;
}

std::vector<VecI> from_zmat(const ZMat& m, int d) {
  std::vector<VecI> rows;
  for (const auto& r : m) {
    VecI v(d);
    for (int j = 0; j < d; ++j) {
      if (!r[j].fits_sint_p()) throw std::overflow_error("lattice entry exceeds int range");
      v[j] = static_cast<int>(r[j].get_si());
    }
    rows.push_back(std::move(v));
  }
  return rows;
}

bool row_zero(const std::vector<mpz_class>& r) {
  for (const auto& x : r)
    if (x != 0) return false;
  return true;
}

}  // namespace

std::vector<VecI> row_hnf(const std::vector<VecI>& in_rows, int d) {
  ZMat m = to_zmat(in_rows, d);
  const int nrows = static_cast<int>(m.size());
  int pivot = 0;
  for (int col = 0; col < d && pivot < nrows; ++col) {
    // Euclid over the entries of this column at or below the pivot row.
    while (true) {
      int best = -1;
      for (int i = pivot; i < nrows; ++i)
        if (m[i][col] != 0 &&
            (best < 0 || abs(m[i][col]) < abs(m[best][col])))
          best = i;
      if (best < 0) break;
      std::swap(m[pivot], m[best]);
      bool reduced = true;
      for (int i = pivot + 1; i < nrows; ++i) {
        if (m[i][col] == 0) continue;
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), m[i][col].get_mpz_t(), m[pivot][col].get_mpz_t());
        for (int j = 0; j < d; ++j) m[i][j] -= q * m[pivot][j];
        if (m[i][col] != 0) reduced = false;
      }
      if (reduced) break;
    }
    if (pivot >= nrows || m[pivot][col] == 0) continue;
    if (m[pivot][col] < 0)
      for (int j = 0; j < d; ++j) m[pivot][j] = -m[pivot][j];
    for (int i = 0; i < pivot; ++i) {
      if (m[i][col] == 0) continue;
      mpz_class q;
      mpz_fdiv_q(q.get_mpz_t(), m[i][col].get_mpz_t(), m[pivot][col].get_mpz_t());
      for (int j = 0; j < d; ++j) m[i][j] -= q * m[pivot][j];
    }
    ++pivot;
  }
  m.resize(pivot);
  return from_zmat(m, d);
}

std::vector<VecI> integer_kernel(const std::vector<VecI>& a_rows, int d) {
  ZMat a = to_zmat(a_rows, d);
  const int k = static_cast<int>(a.size());
  // Column echelon with a tracked unimodular column transform u (d x d).
  ZMat u(d, std::vector<mpz_class>(d, 0));
  for (int i = 0; i < d; ++i) u[i][i] = 1;

  auto col_swap = [&](int c1, int c2) {
    for (int i = 0; i < k; ++i) std::swap(a[i][c1], a[i][c2]);
    for (int i = 0; i < d; ++i) std::swap(u[i][c1], u[i][c2]);
  };
  auto col_axpy = [&](int dst, int src, const mpz_class& q) {  // col_dst -= q col_src
    for (int i = 0; i < k; ++i) a[i][dst] -= q * a[i][src];
    for (int i = 0; i < d; ++i) u[i][dst] -= q * u[i][src];
  };

  int pivot_col = 0;
  for (int row = 0; row < k && pivot_col < d; ++row) {
    while (true) {
      int best = -1;
      for (int c = pivot_col; c < d; ++c)
        if (a[row][c] != 0 && (best < 0 || abs(a[row][c]) < abs(a[row][best])))
          best = c;
      if (best < 0) break;
      if (best != pivot_col) col_swap(pivot_col, best);
      bool reduced = true;
      for (int c = pivot_col + 1; c < d; ++c) {
        if (a[row][c] == 0) continue;
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), a[row][c].get_mpz_t(), a[row][pivot_col].get_mpz_t());
        col_axpy(c, pivot_col, q);
        if (a[row][c] != 0) reduced = false;
      }
      if (reduced) break;
    }
    if (pivot_col < d && a[row][pivot_col] != 0) ++pivot_col;
  }

  ZMat kernel;
  for (int c = pivot_col; c < d; ++c) {
    std::vector<mpz_class> r(d);
    for (int i = 0; i < d; ++i) r[i] = u[i][c];
    kernel.push_back(std::move(r));
  }
  return from_zmat(kernel, d);
}

std::vector<VecI> saturate_lattice(const std::vector<VecI>& rows, int d) {
  std::vector<VecI> nonzero;
  for (const auto& r : rows)
    if (!r.isZero()) nonzero.push_back(r);
  if (nonzero.empty()) return {};
  const std::vector<VecI> perp = integer_kernel(nonzero, d);
  if (perp.empty()) {
    // Full rank: the saturation is all of Z^d.
    std::vector<VecI> id;
    for (int i = 0; i < d; ++i) {
      VecI e = VecI::Zero(d);
      e[i] = 1;
      id.push_back(std::move(e));
    }
    return id;
  }
  return row_hnf(integer_kernel(perp, d), d);
}

}  // namespace torusnf
