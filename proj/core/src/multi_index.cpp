#include "derham/multi_index.hpp"

#include <algorithm>
#include <stdexcept>

namespace derham {

MultiIndex::MultiIndex(std::vector<int> entries, int n) : entries_(std::move(entries)), n_(n) {
  if (n < 0) throw std::invalid_argument("MultiIndex: negative dimension");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i] < 1 || entries_[i] > n) throw std::invalid_argument("MultiIndex: axis out of 1..n");
    if (i > 0 && entries_[i] <= entries_[i - 1])
      throw std::invalid_argument("MultiIndex: entries must be strictly increasing");
  }
}

bool MultiIndex::contains(int axis) const {
  return std::binary_search(entries_.begin(), entries_.end(), axis);
}

MultiIndex MultiIndex::complement() const {
  std::vector<int> rest;
  rest.reserve(n_ - degree());
  for (int a = 1; a <= n_; ++a)
    if (!contains(a)) rest.push_back(a);
  return MultiIndex(std::move(rest), n_);
}

int MultiIndex::complement_sign() const {
  // Sign of the permutation (I, I^c) of (1..n): count inversions.
  std::vector<int> perm = entries_;
  for (int a = 1; a <= n_; ++a)
    if (!contains(a)) perm.push_back(a);
  int inversions = 0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

std::pair<MultiIndex, int> MultiIndex::insert(int axis) const {
  if (contains(axis)) return {MultiIndex{}, 0};
  std::vector<int> out = entries_;
  auto pos = std::lower_bound(out.begin(), out.end(), axis);
  int shifts = static_cast<int>(pos - out.begin());
  out.insert(pos, axis);
  return {MultiIndex(std::move(out), n_), shifts % 2 == 0 ? 1 : -1};
}

std::pair<MultiIndex, int> MultiIndex::remove(int axis) const {
  if (!contains(axis)) return {MultiIndex{}, 0};
  std::vector<int> out = entries_;
  auto pos = std::lower_bound(out.begin(), out.end(), axis);
  int shifts = static_cast<int>(pos - out.begin());
  out.erase(pos);
  return {MultiIndex(std::move(out), n_), shifts % 2 == 0 ? 1 : -1};
}

std::pair<MultiIndex, int> MultiIndex::merge(const MultiIndex& other) const {
  // dx_I ^ dx_J = sign(sort) dx_{I u J}; the sign is the inversion parity
  // of the concatenation, zero if an axis repeats.
  std::vector<int> concat = entries_;
  concat.insert(concat.end(), other.entries().begin(), other.entries().end());
  int inversions = 0;
  for (std::size_t i = 0; i < concat.size(); ++i)
    for (std::size_t j = i + 1; j < concat.size(); ++j) {
      if (concat[i] == concat[j]) return {MultiIndex{}, 0};
      if (concat[i] > concat[j]) ++inversions;
    }
  std::sort(concat.begin(), concat.end());
  return {MultiIndex(std::move(concat), n_), inversions % 2 == 0 ? 1 : -1};
}

std::vector<MultiIndex> MultiIndex::all(int n, int q) {
  std::vector<MultiIndex> out;
  if (q < 0 || q > n) return out;
  std::vector<int> idx(q);
  for (int i = 0; i < q; ++i) idx[i] = i + 1;
  while (true) {
    out.emplace_back(idx, n);
    int i = q - 1;
    while (i >= 0 && idx[i] == n - (q - 1 - i)) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < q; ++j) idx[j] = idx[j - 1] + 1;
  }
  if (q == 0) out.resize(1);
  return out;
}

}  // namespace derham
