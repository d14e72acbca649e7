#include "tesa/evaluation.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "tesa/error.hpp"
#include "tesa/random.hpp"

namespace tesa {

EvalStats::EvalStats(const EvalCorpus& corpus, const PipelineConfig& cfg) {
  doc_terms_.reserve(corpus.documents.size());
  for (const auto& doc : corpus.documents) {
    std::map<std::string, std::uint32_t> counts;
    for (auto& token : normalize_text(doc.text, cfg)) ++counts[std::move(token)];
    for (const auto& [term, f] : counts) ++df_[term];
    doc_terms_.push_back(std::move(counts));
  }
}

std::uint32_t EvalStats::frequency(std::size_t doc, const std::string& term) const {
  const auto& terms = doc_terms_.at(doc);
  const auto it = terms.find(term);
  return it == terms.end() ? 0 : it->second;
}

std::uint32_t EvalStats::df(const std::string& term) const {
  const auto it = df_.find(term);
  return it == df_.end() ? 0 : it->second;
}

double eval_tfidf(const EvalStats& stats, std::size_t doc, const std::string& term) {
  const auto f = stats.frequency(doc, term);
  if (f == 0) return 0.0;
  return tfidf_weight(f, stats.df(term), stats.num_documents());
}

DocumentEmbedder::DocumentEmbedder(const EsaModel& model, const AncestorTable& ancestors, LambdaSchedule lambda,
                                   SupportMode mode)
    : model_(model), ancestors_(&ancestors), lambda_(std::move(lambda)), mode_(mode) {}

DocumentEmbedder::DocumentEmbedder(const EsaModel& model) : model_(model), mode_(SupportMode::inclusive) {}

const SparseVectorXd& DocumentEmbedder::concept_of(TermId w) {
  auto it = cache_.find(w);
  if (it == cache_.end()) {
    auto v = ancestors_ ? reinforced_concept_vector(model_, *ancestors_, w, lambda_, mode_)
                        : concept_vector(model_, w);
    it = cache_.emplace(w, std::move(v)).first;
  }
  return it->second;
}

SparseVectorXd DocumentEmbedder::document_vector(const EvalStats& stats, std::size_t doc) {
  SparseAccumulator<double> acc(static_cast<Eigen::Index>(model_.num_pages()));
  for (const auto& [term, f] : stats.terms(doc)) {
    const auto w = model_.vocab.find(term);
    if (!w) continue;
    const double weight = tfidf_weight(f, stats.df(term), stats.num_documents());
    if (weight != 0.0) acc.add(weight, concept_of(*w));
  }
  return normalized(acc.finish());
}

namespace {

EmbeddedCorpus embed_with(DocumentEmbedder& embedder, const EsaModel& model, const EvalCorpus& corpus) {
  EmbeddedCorpus out;
  out.classes = corpus.classes;
  const EvalStats stats(corpus, model.pipeline);
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    out.vectors.push_back(embedder.document_vector(stats, d));
    if (out.vectors.back().isZero()) ++out.zero_vectors;
    out.labels.push_back(corpus.label_index(corpus.documents[d]));
  }
  return out;
}

}  // namespace

EmbeddedCorpus embed_eval_corpus(const EsaModel& model, const AncestorTable& ancestors, const EvalCorpus& corpus,
                                 const LambdaSchedule& lambda, SupportMode mode) {
  DocumentEmbedder embedder(model, ancestors, lambda, mode);
  return embed_with(embedder, model, corpus);
}

EmbeddedCorpus embed_eval_corpus(const EsaModel& model, const EvalCorpus& corpus) {
  DocumentEmbedder embedder(model);
  return embed_with(embedder, model, corpus);
}

ClassifierModel ClassifierModel::train(std::span<const SparseVectorXd> vectors, std::span<const std::size_t> labels,
                                       std::span<const std::string> classes) {
  ClassifierModel model;
  model.classes.assign(classes.begin(), classes.end());
  const Eigen::Index dim = vectors.empty() ? 0 : vectors.front().size();
  std::vector<SparseAccumulator<double>> sums(classes.size(), SparseAccumulator<double>(dim));
  for (std::size_t i = 0; i < vectors.size(); ++i) sums.at(labels[i]).add(1.0, vectors[i]);
  for (auto& sum : sums) model.centroids.push_back(normalized(sum.finish()));
  return model;
}

std::size_t ClassifierModel::predict(const SparseVectorXd& v) const {
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double score = cosine(v, centroids[c]);
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

CrossValidationReport cross_validate(const EmbeddedCorpus& data, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  const std::size_t n = data.vectors.size();
  std::vector<std::vector<std::size_t>> by_class(data.classes.size());
  for (std::size_t i = 0; i < n; ++i) by_class.at(data.labels[i]).push_back(i);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].size() < folds)
      throw DataError("class '" + data.classes[c] + "' has " + std::to_string(by_class[c].size()) +
                      " documents, fewer than " + std::to_string(folds) + " folds");
  }

  Rng rng(seed);
  std::vector<std::size_t> fold_of(n, 0);
  for (auto& members : by_class) {
    shuffle(std::span<std::size_t>(members), rng);
    for (std::size_t k = 0; k < members.size(); ++k) fold_of[members[k]] = k % folds;
  }

  CrossValidationReport report;
  report.folds = folds;
  report.seed = seed;
  report.zero_vectors = data.zero_vectors;
  double total = 0.0;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<SparseVectorXd> train;
    std::vector<std::size_t> train_labels;
    for (std::size_t i = 0; i < n; ++i) {
      if (fold_of[i] != f) {
        train.push_back(data.vectors[i]);
        train_labels.push_back(data.labels[i]);
      }
    }
    const auto classifier = ClassifierModel::train(train, train_labels, data.classes);
    std::size_t correct = 0, tested = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (fold_of[i] != f) continue;
      ++tested;
      if (classifier.predict(data.vectors[i]) == data.labels[i]) ++correct;
    }
    const double accuracy = static_cast<double>(correct) / static_cast<double>(tested);
    report.per_fold.push_back(accuracy);
    total += accuracy;
  }
  report.precision = total / static_cast<double>(folds);
  return report;
}

CrossValidationReport cross_validate(const EsaModel& model, const AncestorTable& ancestors, const EvalCorpus& corpus,
                                     const LambdaSchedule& lambda, std::size_t folds, std::uint64_t seed,
                                     SupportMode mode) {
  const auto data = embed_eval_corpus(model, ancestors, corpus, lambda, mode);
  auto report = cross_validate(data, folds, seed);
  report.lambda = lambda;
  return report;
}

namespace {

nlohmann::json to_json(const CrossValidationReport& report) {
  return {{"precision", report.precision},
          {"per_fold", report.per_fold},
          {"lambda", std::vector<double>(report.lambda.weights().begin(), report.lambda.weights().end())},
          {"folds", report.folds},
          {"seed", report.seed},
          {"zero_vectors", report.zero_vectors}};
}

}  // namespace

std::string report_json(const CrossValidationReport& report) { return to_json(report).dump(); }

std::string report_json(std::span<const CrossValidationReport> reports) {
  auto array = nlohmann::json::array();
  for (const auto& r : reports) array.push_back(to_json(r));
  return array.dump(2);
}

void write_sparse_features(std::ostream& out, const EmbeddedCorpus& data) {
  for (std::size_t i = 0; i < data.vectors.size(); ++i) {
    const auto& v = data.vectors[i];
    out << data.labels[i] + 1;
    for (Eigen::Index k = 0; k < v.nonZeros(); ++k) out << ' ' << v.index(k) + 1 << ':' << format_weight(v.value(k));
    out << '\n';
  }
  if (!out) throw IoError("failed writing sparse features");
}

std::vector<SparseFeatureRow> read_sparse_features(std::istream& in) {
  std::vector<SparseFeatureRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    SparseFeatureRow row;
    if (!(fields >> row.label)) throw ParseError("missing label", line_no);
    std::string item;
    while (fields >> item) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ParseError("expected dim:weight, got '" + item + "'", line_no);
      try {
        const auto dim = std::stoll(item.substr(0, colon));
        if (dim < 1) throw ParseError("feature index must be >= 1", line_no);
        row.features.emplace_back(static_cast<Eigen::Index>(dim - 1), std::stod(item.substr(colon + 1)));
      } catch (const std::logic_error&) {
        throw ParseError("bad feature '" + item + "'", line_no);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::optional<double> fit_power_law(const std::map<std::size_t, std::size_t>& histogram) {
  std::vector<std::pair<double, double>> points;
  for (const auto& [degree, count] : histogram) {
    if (degree >= 1 && count >= 1)
      points.emplace_back(std::log(static_cast<double>(degree)), std::log(static_cast<double>(count)));
  }
  if (points.size() < 2) return std::nullopt;
  Eigen::MatrixXd design(static_cast<Eigen::Index>(points.size()), 2);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(points.size()));
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = points[static_cast<std::size_t>(i)].first;
    rhs[i] = points[static_cast<std::size_t>(i)].second;
  }
  const Eigen::Vector2d coeffs = design.colPivHouseholderQr().solve(rhs);
  return -coeffs[1];
}

DegreeDistribution degree_distribution(const WeightedDigraph& g) {
  std::vector<std::size_t> in(g.num_nodes(), 0), out(g.num_nodes(), 0);
  for (const auto& e : g.edges()) {
    ++out[e.source];
    ++in[e.target];
  }
  DegreeDistribution d;
  for (NodeId n = 0; n < g.num_nodes(); ++n) {
    if (g.kind(n) != NodeKind::category) continue;
    ++d.in_histogram[in[n]];
    ++d.out_histogram[out[n]];
  }
  d.alpha_in = fit_power_law(d.in_histogram);
  d.alpha_out = fit_power_law(d.out_histogram);
  return d;
}

}  // namespace tesa
