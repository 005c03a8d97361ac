#pragma once

#include <compare>
#include <cstdint>
#include <vector>

namespace derham {

/// Strictly increasing tuple of axis labels in 1..n, indexing a basis
/// q-covector dx_I. The empty tuple is the degree-0 index.
class MultiIndex {
 public:
  MultiIndex() = default;
  MultiIndex(std::vector<int> entries, int n);

  int degree() const { return static_cast<int>(entries_.size()); }
  int ambient() const { return n_; }
  const std::vector<int>& entries() const { return entries_; }
  bool contains(int axis) const;

  /// Complementary increasing index (axes of 1..n not in this one).
  MultiIndex complement() const;

  /// Sign of the permutation (this, complement) relative to (1..n).
  int complement_sign() const;

  /// Index with `axis` inserted, and the sign (-1)^position of moving the
  /// new factor into place. Returns {index, 0} when axis already present.
  std::pair<MultiIndex, int> insert(int axis) const;

  /// Index with `axis` removed, and the sign of pulling that factor to the
  /// front. Returns {index, 0} when axis absent.
  std::pair<MultiIndex, int> remove(int axis) const;

  /// Concatenation sign for dx_this ^ dx_other: 0 if they share an axis,
  /// else the shuffle sign to the merged increasing index.
  std::pair<MultiIndex, int> merge(const MultiIndex& other) const;

  auto operator<=>(const MultiIndex&) const = default;

  /// All increasing q-indices over 1..n, lexicographic.
  static std::vector<MultiIndex> all(int n, int q);

 private:
  std::vector<int> entries_;
  int n_ = 0;
};

}  // namespace derham
