#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tesa/arborification.hpp"
#include "tesa/corpus.hpp"
#include "tesa/reinforcement.hpp"
#include "tesa/vectors.hpp"

namespace tesa {

/// Term frequencies over the evaluation corpus. Terms are normalized
/// strings, so words absent from the encyclopedia vocabulary are counted
/// too; df is over evaluation documents, not encyclopedia pages.
class EvalStats {
 public:
  EvalStats(const EvalCorpus& corpus, const PipelineConfig& cfg);

  std::size_t num_documents() const noexcept { return doc_terms_.size(); }
  /// (term, f_d(term)) in term order.
  const std::map<std::string, std::uint32_t>& terms(std::size_t doc) const { return doc_terms_.at(doc); }
  std::uint32_t frequency(std::size_t doc, const std::string& term) const;
  std::uint32_t df(const std::string& term) const;

 private:
  std::vector<std::map<std::string, std::uint32_t>> doc_terms_;
  std::map<std::string, std::uint32_t> df_;
};

/// (1 + ln f_d(w)) * ln(#C / df(w)); 0 when w is not in d.
double eval_tfidf(const EvalStats& stats, std::size_t doc, const std::string& term);

/// Builds evaluation document vectors in page-space, caching one
/// (reinforced) concept vector per term.
class DocumentEmbedder {
 public:
  /// Reinforced concept vectors (the lambda = 0 schedule included).
  DocumentEmbedder(const EsaModel& model, const AncestorTable& ancestors, LambdaSchedule lambda,
                   SupportMode mode = SupportMode::inclusive);
  /// Standard ESA concept vectors.
  explicit DocumentEmbedder(const EsaModel& model);

  /// normalize(sum_{w in d} t_d(w) * concept_lambda(w)), skipping words
  /// outside the vocabulary. A document without usable words yields the
  /// zero vector.
  SparseVectorXd document_vector(const EvalStats& stats, std::size_t doc);

  const LambdaSchedule& lambda() const noexcept { return lambda_; }

 private:
  const SparseVectorXd& concept_of(TermId w);

  const EsaModel& model_;
  const AncestorTable* ancestors_ = nullptr;
  LambdaSchedule lambda_;
  SupportMode mode_;
  std::map<TermId, SparseVectorXd> cache_;
};

struct EmbeddedCorpus {
  std::vector<SparseVectorXd> vectors;
  std::vector<std::size_t> labels;  // 0-based, into `classes`
  std::vector<std::string> classes;
  std::size_t zero_vectors = 0;
};

EmbeddedCorpus embed_eval_corpus(const EsaModel& model, const AncestorTable& ancestors, const EvalCorpus& corpus,
                                 const LambdaSchedule& lambda, SupportMode mode = SupportMode::inclusive);
/// Standard ESA document vectors.
EmbeddedCorpus embed_eval_corpus(const EsaModel& model, const EvalCorpus& corpus);

/// Nearest-centroid classifier under cosine. Centroids are unit-norm sums
/// of training vectors, or zero for a class without nonzero training data.
struct ClassifierModel {
  std::vector<std::string> classes;
  std::vector<SparseVectorXd> centroids;

  static ClassifierModel train(std::span<const SparseVectorXd> vectors, std::span<const std::size_t> labels,
                               std::span<const std::string> classes);
  /// Class with the highest cosine; ties (and zero vectors) go to the
  /// alphabetically first class.
  std::size_t predict(const SparseVectorXd& v) const;
};

struct CrossValidationReport {
  double precision = 0.0;
  std::vector<double> per_fold;
  LambdaSchedule lambda;
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  std::size_t zero_vectors = 0;
};

/// Stratified k-fold: each class's documents are shuffled with `seed` and
/// dealt round-robin into folds. Precision is the mean of per-fold accuracy.
/// Throws ConfigError when folds < 2 and DataError when a class has fewer
/// documents than folds.
CrossValidationReport cross_validate(const EmbeddedCorpus& data, std::size_t folds, std::uint64_t seed);

CrossValidationReport cross_validate(const EsaModel& model, const AncestorTable& ancestors, const EvalCorpus& corpus,
                                     const LambdaSchedule& lambda, std::size_t folds, std::uint64_t seed,
                                     SupportMode mode = SupportMode::inclusive);

/// `{precision, per_fold[], lambda[], folds, seed}` as compact JSON.
std::string report_json(const CrossValidationReport& report);
std::string report_json(std::span<const CrossValidationReport> reports);

/// `<label+1> <dim+1>:<weight> ...` per document, dims ascending, weights
/// printed with "%#.9g".
void write_sparse_features(std::ostream& out, const EmbeddedCorpus& data);

struct SparseFeatureRow {
  std::size_t label;  // 1-based, as written
  std::vector<std::pair<Eigen::Index, double>> features;  // 0-based dims
};
std::vector<SparseFeatureRow> read_sparse_features(std::istream& in);

struct DegreeDistribution {
  std::map<std::size_t, std::size_t> in_histogram;   // degree -> number of categories
  std::map<std::size_t, std::size_t> out_histogram;
  std::optional<double> alpha_in;
  std::optional<double> alpha_out;
};

/// Degree histograms over category nodes and power-law exponents.
DegreeDistribution degree_distribution(const WeightedDigraph& g);

/// alpha of count ~ degree^-alpha by least squares on (ln degree, ln count)
/// over points with degree >= 1; absent with fewer than two such points.
std::optional<double> fit_power_law(const std::map<std::size_t, std::size_t>& histogram);

}  // namespace tesa
