#include "tesa/vectors.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "tesa/error.hpp"

namespace tesa {

PageIndex EsaModel::page_index(std::string_view id) const {
  const auto it = std::lower_bound(page_ids.begin(), page_ids.end(), id);
  if (it == page_ids.end() || *it != id) throw DataError("unknown page '" + std::string(id) + "'");
  return static_cast<PageIndex>(it - page_ids.begin());
}

TermId EsaModel::term_id(std::string_view term) const {
  if (const auto id = vocab.find(term)) return *id;
  throw DataError("unknown word '" + std::string(term) + "'");
}

EsaModel build_esa_model(const Corpus& corpus, const PipelineConfig& cfg) {
  EsaModel model;
  model.pipeline = cfg;
  model.page_ids.reserve(corpus.pages.size());
  for (const auto& [id, page] : corpus.pages) model.page_ids.push_back(id);
  const auto tokens = normalize_pages(corpus, cfg);
  model.vocab = build_vocabulary(tokens);
  model.stats = compute_term_stats(tokens, model.vocab);
  model.descendants = DescendantIndex::build(corpus);
  return model;
}

SparseVectorXd concept_vector(const EsaModel& model, TermId w) {
  if (w >= model.vocab.size()) throw DataError("unknown term id " + std::to_string(w));
  const auto& stats = model.stats;
  std::vector<std::pair<Eigen::Index, double>> entries;
  for (const auto& posting : stats.postings(w)) {
    entries.emplace_back(posting.index, tfidf_weight(posting.freq, stats.df(w), stats.num_pages()));
  }
  return SparseVectorXd::from_entries(static_cast<Eigen::Index>(model.num_pages()), entries);
}

double esa_relatedness(const EsaModel& model, TermId w1, TermId w2) {
  const auto u = concept_vector(model, w1);
  const auto v = concept_vector(model, w2);
  for (const auto& [vec, w] : {std::pair{&u, w1}, std::pair{&v, w2}}) {
    if (vec->isZero()) throw DataError("word '" + model.vocab.term(w) + "' has empty concept vector");
  }
  return cosine(u, v);
}

namespace {

template <typename ConceptFn>
SparseVectorXd page_vector_impl(const EsaModel& model, PageIndex p, ConceptFn&& concept_of) {
  const auto& stats = model.stats;
  SparseAccumulator<double> acc(static_cast<Eigen::Index>(model.num_pages()));
  for (const auto& t : stats.page_terms(p)) {
    const double weight = tfidf_weight(t.freq, stats.df(t.index), stats.num_pages());
    if (weight != 0.0) acc.add(weight, concept_of(t.index));
  }
  auto sum = acc.finish();
  if (sum.isZero()) throw DataError("page '" + model.page_ids.at(p) + "' has a zero page vector");
  return normalized(sum);
}

template <typename ConceptFn>
SparseVectorXd category_vector_impl(const EsaModel& model, CategoryIndex c, ConceptFn&& concept_of) {
  SparseAccumulator<double> acc(static_cast<Eigen::Index>(model.num_pages()));
  for (const auto& [w, weight] : categorical_profile(c, model.stats, model.descendants)) {
    acc.add(weight, concept_of(w));
  }
  auto sum = acc.finish();
  if (sum.isZero()) throw DataError("degenerate category vector for '" + model.descendants.id(c) + "'");
  return normalized(sum);
}

}  // namespace

std::vector<SparseVectorXd> concept_vectors(const EsaModel& model) {
  std::vector<SparseVectorXd> out;
  out.reserve(model.vocab.size());
  for (TermId w = 0; w < model.vocab.size(); ++w) out.push_back(concept_vector(model, w));
  return out;
}

SparseVectorXd page_vector(const EsaModel& model, PageIndex p) {
  return page_vector_impl(model, p, [&](TermId w) { return concept_vector(model, w); });
}

SparseVectorXd page_vector(const EsaModel& model, PageIndex p, std::span<const SparseVectorXd> concepts) {
  return page_vector_impl(model, p, [&](TermId w) -> const SparseVectorXd& { return concepts[w]; });
}

SparseVectorXd category_vector(const EsaModel& model, CategoryIndex c) {
  return category_vector_impl(model, c, [&](TermId w) { return concept_vector(model, w); });
}

SparseVectorXd category_vector(const EsaModel& model, CategoryIndex c, std::span<const SparseVectorXd> concepts) {
  return category_vector_impl(model, c, [&](TermId w) -> const SparseVectorXd& { return concepts[w]; });
}

std::string format_weight(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.9g", value);
  return buf;
}

void write_vectors_text(std::ostream& out, const EsaModel& model, std::span<const TermId> terms) {
  for (const auto w : terms) {
    const auto v = concept_vector(model, w);
    out << model.vocab.term(w);
    for (Eigen::Index k = 0; k < v.nonZeros(); ++k) out << ' ' << v.index(k) << ':' << format_weight(v.value(k));
    out << '\n';
  }
}

}  // namespace tesa
