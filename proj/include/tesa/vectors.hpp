#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tesa/corpus.hpp"
#include "tesa/sparse_vector.hpp"
#include "tesa/textproc.hpp"
#include "tesa/weighting.hpp"

namespace tesa {

/// Everything needed to answer standard ESA queries over a filtered corpus.
struct EsaModel {
  PipelineConfig pipeline;
  std::vector<std::string> page_ids;  // page-space dimension -> page id
  Vocabulary vocab;
  TermStats stats;
  DescendantIndex descendants;

  std::size_t num_pages() const noexcept { return page_ids.size(); }
  /// Throws DataError naming the page.
  PageIndex page_index(std::string_view id) const;
  /// Throws DataError naming the word.
  TermId term_id(std::string_view term) const;
};

/// Normalizes, builds the vocabulary, counts terms and computes F(c) on the
/// corpus graph as given.
EsaModel build_esa_model(const Corpus& corpus, const PipelineConfig& cfg);

/// Concept vector of w: component p is t_p(w).
SparseVectorXd concept_vector(const EsaModel& model, TermId w);

/// mu(w, w'): cosine of concept vectors. Throws DataError when either
/// concept vector is zero.
double esa_relatedness(const EsaModel& model, TermId w1, TermId w2);

/// Concept vectors of every vocabulary term, indexed by TermId.
std::vector<SparseVectorXd> concept_vectors(const EsaModel& model);

/// normalize(sum_{w in p} t_p(w) * concept(w)). Throws DataError when the
/// sum is zero (empty page, or every word on every page).
SparseVectorXd page_vector(const EsaModel& model, PageIndex p);
/// Same, reading concept vectors from a precomputed table.
SparseVectorXd page_vector(const EsaModel& model, PageIndex p, std::span<const SparseVectorXd> concepts);

/// normalize(sum_{w in F(c)} t_c(w) * concept(w)). Throws DataError when
/// F(c) is empty or the sum is zero.
SparseVectorXd category_vector(const EsaModel& model, CategoryIndex c);
SparseVectorXd category_vector(const EsaModel& model, CategoryIndex c, std::span<const SparseVectorXd> concepts);

/// One line per vector: `term dim:weight ...`, weights with 9 significant
/// digits.
void write_vectors_text(std::ostream& out, const EsaModel& model, std::span<const TermId> terms);

/// printf("%#.9g"): 9 significant digits, trailing zeros kept.
std::string format_weight(double value);

}  // namespace tesa
