#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "derham/rational.hpp"

namespace derham {

using RatMatrix = std::vector<std::vector<Rational>>;

/// Row-reduce in place (full pivoting by first nonzero column), returning the
/// rank. Exact arithmetic, deterministic pivot order.
inline int row_reduce(RatMatrix& a) {
  if (a.empty()) return 0;
  const int rows = static_cast<int>(a.size());
  const int cols = static_cast<int>(a[0].size());
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r)
      if (!is_zero(a[r][col])) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(a[rank], a[pivot]);
    Rational inv = a[rank][col];
    for (int c = col; c < cols; ++c) a[rank][c] /= inv;
    for (int r = 0; r < rows; ++r) {
      if (r == rank || is_zero(a[r][col])) continue;
      Rational f = a[r][col];
      for (int c = col; c < cols; ++c) a[r][c] -= f * a[rank][c];
    }
    ++rank;
  }
  return rank;
}

inline int matrix_rank(RatMatrix a) { return row_reduce(a); }

/// Unique solution of a square nonsingular system.
inline std::vector<Rational> solve_square(RatMatrix a, std::vector<Rational> b) {
  const int n = static_cast<int>(a.size());
  for (int i = 0; i < n; ++i) a[i].push_back(b[i]);
  int rank = row_reduce(a);
  if (rank != n) throw std::domain_error("solve_square: singular system");
  std::vector<Rational> x(n);
  // After full reduction each row has a single leading 1.
  for (int r = 0; r < n; ++r) {
    int lead = -1;
    for (int c = 0; c < n; ++c)
      if (!is_zero(a[r][c])) {
        lead = c;
        break;
      }
    if (lead < 0) throw std::domain_error("solve_square: inconsistent system");
    x[lead] = a[r][n];
  }
  return x;
}

/// Basis of the nullspace of a (rows x cols) matrix, as column vectors.
inline std::vector<std::vector<Rational>> nullspace(RatMatrix a) {
  if (a.empty()) return {};
  const int cols = static_cast<int>(a[0].size());
  row_reduce(a);
  std::vector<int> lead_of_col(cols, -1);
  int r = 0;
  for (int c = 0; c < cols && r < static_cast<int>(a.size()); ++c)
    if (!is_zero(a[r][c])) lead_of_col[c] = r++;
  std::vector<std::vector<Rational>> basis;
  for (int free_col = 0; free_col < cols; ++free_col) {
    if (lead_of_col[free_col] >= 0) continue;
    std::vector<Rational> v(cols, 0);
    v[free_col] = 1;
    for (int c = 0; c < cols; ++c)
      if (lead_of_col[c] >= 0) v[c] = -a[lead_of_col[c]][free_col];
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Does b lie in the column span of a?
inline bool in_column_span(const RatMatrix& a, const std::vector<Rational>& b) {
  if (a.empty()) {
    for (const auto& v : b)
      if (!is_zero(v)) return false;
    return true;
  }
  RatMatrix cols_t;  // transpose: rows = columns of a
  const int rows = static_cast<int>(a.size());
  const int cols = static_cast<int>(a[0].size());
  for (int c = 0; c < cols; ++c) {
    std::vector<Rational> row(rows);
    for (int r = 0; r < rows; ++r) row[r] = a[r][c];
    cols_t.push_back(std::move(row));
  }
  int base = matrix_rank(cols_t);
  cols_t.push_back(b);
  return matrix_rank(cols_t) == base;
}

}  // namespace derham
