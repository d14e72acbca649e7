#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tesa/arborification.hpp"
#include "tesa/vectors.hpp"

namespace tesa {

/// Coefficients lambda_1..lambda_k weighting the categorical tfidf of the
/// 1st..k-th ancestor category; implicitly zero beyond k.
class LambdaSchedule {
 public:
  LambdaSchedule() = default;
  /// Throws ConfigError on a negative or non-finite entry.
  explicit LambdaSchedule(std::vector<double> weights);

  /// Comma-separated decimals, e.g. "1.5,0,0.5,0.25,0.125". An empty or
  /// blank string is the all-zero schedule.
  static LambdaSchedule parse(std::string_view text);

  std::size_t size() const noexcept { return weights_.size(); }
  /// lambda_i, 1-based; 0 beyond the stored length.
  double operator()(std::size_t i) const { return i >= 1 && i <= weights_.size() ? weights_[i - 1] : 0.0; }
  std::span<const double> weights() const noexcept { return weights_; }

  bool is_zero() const;
  /// Non-increasing schedules are expected; violating ones are still valid.
  bool is_non_increasing() const;

  std::string to_string() const;

  bool operator==(const LambdaSchedule&) const = default;

 private:
  std::vector<double> weights_;
};

/// Whether pages lacking the word still receive their ancestors'
/// reinforcement in a reinforced concept vector.
enum class SupportMode { inclusive, exclusive };

/// Ancestor categories of every page in the spanning tree, nearest first,
/// as category indices of the model's descendant index.
class AncestorTable {
 public:
  AncestorTable() = default;
  /// Throws DataError if a page of the model is missing from the tree or a
  /// tree ancestor is not a known category.
  AncestorTable(const EsaModel& model, const SpanningTree& tree);

  std::span<const CategoryIndex> ancestors(PageIndex p) const { return paths_.at(p); }
  std::size_t num_pages() const noexcept { return paths_.size(); }

 private:
  std::vector<std::vector<CategoryIndex>> paths_;
};

/// base + sum_i lambda_i * ancestor_tfidf[i - 1]; entries beyond the
/// schedule are ignored.
double reinforce(double base, std::span<const double> ancestor_tfidf, const LambdaSchedule& lambda);

/// t_p(w) + sum_{i>=1} lambda_i * t_{pi^i(p)}(w); the sum stops at the root.
double reinforced_tfidf(const EsaModel& model, const AncestorTable& ancestors, PageIndex p, TermId w,
                        const LambdaSchedule& lambda);

/// Reinforced concept vector; component p is reinforced_tfidf(p, w). In
/// exclusive mode only pages containing w are considered.
SparseVectorXd reinforced_concept_vector(const EsaModel& model, const AncestorTable& ancestors, TermId w,
                                         const LambdaSchedule& lambda,
                                         SupportMode mode = SupportMode::inclusive);

/// Cosine of reinforced concept vectors. Throws DataError when either is
/// zero.
double reinforced_relatedness(const EsaModel& model, const AncestorTable& ancestors, TermId w1, TermId w2,
                              const LambdaSchedule& lambda, SupportMode mode = SupportMode::inclusive);

SupportMode parse_support_mode(std::string_view text);
std::string_view to_string(SupportMode mode);

}  // namespace tesa
