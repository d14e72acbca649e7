#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "tesa/error.hpp"

namespace tesa {

/// Sparse vector with strictly increasing indices, no stored zeros and a
/// cached Euclidean norm. Every reduction runs in ascending index order, so
/// results are bitwise reproducible and dot products are exactly symmetric.
template <typename Scalar>
class SparseVector {
 public:
  using Storage = Eigen::SparseVector<Scalar>;
  using Index = Eigen::Index;

  SparseVector() = default;
  explicit SparseVector(Index dim) : storage_(dim) {}

  /// Builds from (index, value) pairs that must be strictly increasing.
  /// Zero values are skipped.
  static SparseVector from_entries(Index dim, const std::vector<std::pair<Index, Scalar>>& entries) {
    SparseVector v(dim);
    v.storage_.reserve(static_cast<Index>(entries.size()));
    Index previous = -1;
    for (const auto& [i, value] : entries) {
      if (i < 0 || i >= dim) throw DataError("sparse vector index out of range");
      if (i <= previous) throw DataError("sparse vector indices must be strictly increasing");
      previous = i;
      if (value != Scalar(0)) v.storage_.insertBack(i) = value;
    }
    v.update_norm();
    return v;
  }

  static SparseVector from_dense(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& dense) {
    SparseVector v(dense.size());
    for (Index i = 0; i < dense.size(); ++i) {
      if (dense[i] != Scalar(0)) v.storage_.insertBack(i) = dense[i];
    }
    v.update_norm();
    return v;
  }

  Index size() const noexcept { return storage_.size(); }
  Index nonZeros() const noexcept { return storage_.nonZeros(); }
  bool isZero() const noexcept { return storage_.nonZeros() == 0; }
  Scalar norm() const noexcept { return norm_; }

  /// k-th stored entry, 0 <= k < nonZeros().
  Index index(Index k) const { return storage_.innerIndexPtr()[k]; }
  Scalar value(Index k) const { return storage_.valuePtr()[k]; }

  /// Component at dimension i (0 when not stored).
  Scalar coeff(Index i) const { return storage_.coeff(i); }

  std::vector<std::pair<Index, Scalar>> entries() const {
    std::vector<std::pair<Index, Scalar>> out;
    out.reserve(static_cast<std::size_t>(nonZeros()));
    for (Index k = 0; k < nonZeros(); ++k) out.emplace_back(index(k), value(k));
    return out;
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> toDense() const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(size());
    for (Index k = 0; k < nonZeros(); ++k) out[index(k)] = value(k);
    return out;
  }

  const Storage& storage() const noexcept { return storage_; }

  /// Same dimension, indices, values and norm, compared bitwise.
  friend bool operator==(const SparseVector& a, const SparseVector& b) {
    if (a.size() != b.size() || a.nonZeros() != b.nonZeros() || a.norm_ != b.norm_) return false;
    for (Index k = 0; k < a.nonZeros(); ++k) {
      if (a.index(k) != b.index(k) || a.value(k) != b.value(k)) return false;
    }
    return true;
  }

 private:
  void update_norm() {
    Scalar sum = 0;
    for (Index k = 0; k < nonZeros(); ++k) sum += value(k) * value(k);
    norm_ = std::sqrt(sum);
  }

  Storage storage_;
  Scalar norm_ = 0;
};

using SparseVectorXd = SparseVector<double>;

template <typename Scalar>
Scalar dot(const SparseVector<Scalar>& u, const SparseVector<Scalar>& v) {
  Scalar sum = 0;
  Eigen::Index i = 0, j = 0;
  while (i < u.nonZeros() && j < v.nonZeros()) {
    const auto a = u.index(i), b = v.index(j);
    if (a == b) {
      sum += u.value(i) * v.value(j);
      ++i;
      ++j;
    } else if (a < b) {
      ++i;
    } else {
      ++j;
    }
  }
  return sum;
}

/// <u,v> / (|u| |v|), 0 when either norm is 0.
template <typename Scalar>
Scalar cosine(const SparseVector<Scalar>& u, const SparseVector<Scalar>& v) {
  if (u.norm() == Scalar(0) || v.norm() == Scalar(0)) return Scalar(0);
  return dot(u, v) / (u.norm() * v.norm());
}

template <typename S>
SparseVector<S> operator*(S alpha, const SparseVector<S>& v) {
  std::vector<std::pair<Eigen::Index, S>> entries;
  entries.reserve(static_cast<std::size_t>(v.nonZeros()));
  for (Eigen::Index k = 0; k < v.nonZeros(); ++k) entries.emplace_back(v.index(k), alpha * v.value(k));
  return SparseVector<S>::from_entries(v.size(), entries);
}

/// v / |v|; the zero vector is returned unchanged.
template <typename Scalar>
SparseVector<Scalar> normalized(const SparseVector<Scalar>& v) {
  if (v.norm() == Scalar(0)) return v;
  std::vector<std::pair<Eigen::Index, Scalar>> entries;
  entries.reserve(static_cast<std::size_t>(v.nonZeros()));
  for (Eigen::Index k = 0; k < v.nonZeros(); ++k) entries.emplace_back(v.index(k), v.value(k) / v.norm());
  return SparseVector<Scalar>::from_entries(v.size(), entries);
}

/// Accumulates weighted sparse vectors into a dense scratch buffer and
/// emits the sum in ascending index order.
template <typename Scalar>
class SparseAccumulator {
 public:
  explicit SparseAccumulator(Eigen::Index dim) : dense_(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(dim)), seen_(dim, 0) {}

  void add(Scalar weight, const SparseVector<Scalar>& v) {
    for (Eigen::Index k = 0; k < v.nonZeros(); ++k) add(v.index(k), weight * v.value(k));
  }

  void add(Eigen::Index i, Scalar value) {
    if (!seen_[static_cast<std::size_t>(i)]) {
      seen_[static_cast<std::size_t>(i)] = 1;
      touched_.push_back(i);
    }
    dense_[i] += value;
  }

  SparseVector<Scalar> finish() {
    std::sort(touched_.begin(), touched_.end());
    std::vector<std::pair<Eigen::Index, Scalar>> entries;
    entries.reserve(touched_.size());
    for (const auto i : touched_) {
      entries.emplace_back(i, dense_[i]);
      dense_[i] = 0;
      seen_[static_cast<std::size_t>(i)] = 0;
    }
    touched_.clear();
    return SparseVector<Scalar>::from_entries(dense_.size(), entries);
  }

 private:
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dense_;
  std::vector<std::uint8_t> seen_;
  std::vector<Eigen::Index> touched_;
};

}  // namespace tesa
