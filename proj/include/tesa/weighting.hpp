#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tesa/corpus.hpp"
#include "tesa/textproc.hpp"

namespace tesa {

/// Dimension of page-space: position of the page in id-lexicographic order.
using PageIndex = std::uint32_t;
using CategoryIndex = std::uint32_t;

/// (1 + ln freq) * ln(n / df); zero when freq is zero. Every tfidf variant
/// in the library goes through this one expression so that equal integer
/// inputs give bit-identical weights.
inline double tfidf_weight(std::uint64_t freq, std::uint64_t df, std::uint64_t n) {
  if (freq == 0) return 0.0;
  return (1.0 + std::log(static_cast<double>(freq))) *
         std::log(static_cast<double>(n) / static_cast<double>(df));
}

/// One (dimension, frequency) pair of a posting or forward list.
struct Posting {
  std::uint32_t index;
  std::uint32_t freq;

  bool operator==(const Posting&) const = default;
};

/// Sparse term frequencies f_p(w) stored both per page (forward lists,
/// ascending term) and per term (postings, ascending page).
class TermStats {
 public:
  TermStats() = default;
  /// `page_terms[p]` holds (term, f_p(term)) with f >= 1, ascending term.
  TermStats(std::size_t num_terms, std::vector<std::vector<Posting>> page_terms);

  std::size_t num_pages() const noexcept { return forward_offsets_.empty() ? 0 : forward_offsets_.size() - 1; }
  std::size_t num_terms() const noexcept { return df_.size(); }

  std::span<const Posting> page_terms(PageIndex p) const;
  /// Pages containing `w`, ascending page index; `index` is the page.
  std::span<const Posting> postings(TermId w) const;
  std::uint32_t df(TermId w) const { return df_.at(w); }
  std::uint32_t frequency(PageIndex p, TermId w) const;

  bool operator==(const TermStats&) const = default;

 private:
  std::vector<std::size_t> forward_offsets_;
  std::vector<Posting> forward_;
  std::vector<std::size_t> inverted_offsets_;
  std::vector<Posting> inverted_;
  std::vector<std::uint32_t> df_;
};

/// Counts normalized tokens of every page against `vocab`. Tokens missing
/// from the vocabulary are ignored.
TermStats compute_term_stats(std::span<const std::vector<std::string>> page_tokens, const Vocabulary& vocab);
TermStats compute_term_stats(const Corpus& corpus, const Vocabulary& vocab, const PipelineConfig& cfg);

/// Standard tfidf t_p(w); 0 when w is not on p.
double tfidf(PageIndex p, TermId w, const TermStats& stats);

/// F(c) for every category: pages in c or in any category that reaches c
/// through subcategory relations. Built on whatever graph the corpus holds;
/// reachability uses a visited set, so cycles are tolerated.
class DescendantIndex {
 public:
  DescendantIndex() = default;
  static DescendantIndex build(const Corpus& corpus);
  /// Rebuilds the index from stored F(c) lists (ids sorted, lists ascending).
  DescendantIndex(std::vector<std::string> category_ids, std::vector<std::vector<PageIndex>> pages,
                  std::size_t num_pages);

  std::size_t size() const noexcept { return ids_.size(); }
  std::span<const std::string> ids() const noexcept { return ids_; }
  const std::string& id(CategoryIndex c) const { return ids_.at(c); }
  std::optional<CategoryIndex> find(std::string_view id) const;
  /// Throws DataError for an unknown id.
  CategoryIndex at(std::string_view id) const;

  /// F(c), ascending page index.
  std::span<const PageIndex> pages(CategoryIndex c) const { return pages_.at(c); }
  /// Categories whose F contains `p`, ascending.
  std::span<const CategoryIndex> containing(PageIndex p) const { return containing_.at(p); }

  bool operator==(const DescendantIndex&) const = default;

 private:
  void index_containing(std::size_t num_pages);

  std::vector<std::string> ids_;
  std::vector<std::vector<PageIndex>> pages_;
  std::vector<std::vector<CategoryIndex>> containing_;
};

/// F(c) by category id; throws DataError for an unknown id.
std::vector<std::string> descendant_pages(std::string_view category, const Corpus& corpus);

/// Categorical tfidf t_c(w) = (1 + ln sum_{p in F(c)} f_p(w)) *
/// ln(#W / (1 + #{p outside F(c) : w in p})), defined as 0 when w does not
/// occur in F(c). Throws DataError when F(c) is empty.
double categorical_tfidf(CategoryIndex c, TermId w, const TermStats& stats, const DescendantIndex& desc);

/// t_c(w) for every term occurring in F(c), ascending term; zeros omitted.
std::vector<std::pair<TermId, double>> categorical_profile(CategoryIndex c, const TermStats& stats,
                                                           const DescendantIndex& desc);

/// t_c(w) for every category whose F(c) contains w, ascending category;
/// zeros omitted.
std::vector<std::pair<CategoryIndex, double>> categorical_column(TermId w, const TermStats& stats,
                                                                 const DescendantIndex& desc);

}  // namespace tesa
