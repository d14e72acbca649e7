#include "tesa/reinforcement.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <unordered_map>

#include "tesa/error.hpp"

namespace tesa {

LambdaSchedule::LambdaSchedule(std::vector<double> weights) : weights_(std::move(weights)) {
  for (const auto w : weights_) {
    if (!std::isfinite(w) || w < 0.0) throw ConfigError("lambda entries must be finite and >= 0");
  }
}

LambdaSchedule LambdaSchedule::parse(std::string_view text) {
  const auto blank = text.find_first_not_of(" \t\r\n") == std::string_view::npos;
  if (blank) return {};
  std::vector<double> weights;
  while (true) {
    const auto comma = text.find(',');
    auto field = text.substr(0, comma);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size())
      throw ConfigError("invalid lambda entry '" + std::string(field) + "'");
    weights.push_back(value);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return LambdaSchedule(std::move(weights));
}

bool LambdaSchedule::is_zero() const {
  for (const auto w : weights_) {
    if (w != 0.0) return false;
  }
  return true;
}

bool LambdaSchedule::is_non_increasing() const {
  for (std::size_t i = 1; i < weights_.size(); ++i) {
    if (weights_[i] > weights_[i - 1]) return false;
  }
  return true;
}

std::string LambdaSchedule::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (i) out += ',';
    out += format_exact(weights_[i]);
  }
  return out;
}

AncestorTable::AncestorTable(const EsaModel& model, const SpanningTree& tree) {
  std::unordered_map<std::string_view, NodeId> node_of;
  for (NodeId n = 0; n < tree.names.size(); ++n) node_of.emplace(tree.names[n], n);
  std::vector<std::optional<CategoryIndex>> category_of(tree.names.size());
  paths_.resize(model.num_pages());
  for (PageIndex p = 0; p < model.num_pages(); ++p) {
    const auto& id = model.page_ids[p];
    const auto it = node_of.find(id);
    if (it == node_of.end()) throw DataError("page '" + id + "' is not in the spanning tree");
    for (NodeId n = it->second; n != tree.root;) {
      n = tree.parent[n];
      auto& c = category_of[n];
      if (!c) c = model.descendants.at(tree.names[n]);
      paths_[p].push_back(*c);
      if (paths_[p].size() > tree.names.size()) throw DataError("spanning tree has a cycle");
    }
  }
}

namespace {

/// sum_i lambda_i * t_{pi^i(p)}(w), reading t_c(w) through `categorical`.
template <typename Node, typename Categorical>
double reinforcement(std::span<const Node> path, const LambdaSchedule& lambda, Categorical&& categorical) {
  double sum = 0.0;
  const auto depth = std::min(path.size(), lambda.size());
  for (std::size_t i = 1; i <= depth; ++i) {
    const double coefficient = lambda(i);
    if (coefficient == 0.0) continue;
    sum += coefficient * categorical(path[i - 1]);
  }
  return sum;
}

}  // namespace

double reinforce(double base, std::span<const double> ancestor_tfidf, const LambdaSchedule& lambda) {
  return base + reinforcement(std::span<const double>(ancestor_tfidf), lambda, [](double t) { return t; });
}

double reinforced_tfidf(const EsaModel& model, const AncestorTable& ancestors, PageIndex p, TermId w,
                        const LambdaSchedule& lambda) {
  if (p >= ancestors.num_pages()) throw DataError("page index out of range");
  if (w >= model.vocab.size()) throw DataError("unknown term id " + std::to_string(w));
  const double base = tfidf(p, w, model.stats);
  return base + reinforcement(ancestors.ancestors(p), lambda, [&](CategoryIndex c) {
           return categorical_tfidf(c, w, model.stats, model.descendants);
         });
}

SparseVectorXd reinforced_concept_vector(const EsaModel& model, const AncestorTable& ancestors, TermId w,
                                         const LambdaSchedule& lambda, SupportMode mode) {
  if (w >= model.vocab.size()) throw DataError("unknown term id " + std::to_string(w));
  const auto& stats = model.stats;
  std::vector<double> column(model.descendants.size(), 0.0);
  if (!lambda.is_zero()) {
    for (const auto& [c, value] : categorical_column(w, stats, model.descendants)) column[c] = value;
  }
  auto categorical = [&](CategoryIndex c) { return column[c]; };

  std::vector<std::pair<Eigen::Index, double>> entries;
  const auto postings = stats.postings(w);
  if (mode == SupportMode::exclusive) {
    for (const auto& posting : postings) {
      const double base = tfidf_weight(posting.freq, stats.df(w), stats.num_pages());
      entries.emplace_back(posting.index,
                           base + reinforcement(ancestors.ancestors(posting.index), lambda, categorical));
    }
  } else {
    auto next = postings.begin();
    for (PageIndex p = 0; p < model.num_pages(); ++p) {
      double base = 0.0;
      if (next != postings.end() && next->index == p) {
        base = tfidf_weight(next->freq, stats.df(w), stats.num_pages());
        ++next;
      }
      entries.emplace_back(p, base + reinforcement(ancestors.ancestors(p), lambda, categorical));
    }
  }
  return SparseVectorXd::from_entries(static_cast<Eigen::Index>(model.num_pages()), entries);
}

double reinforced_relatedness(const EsaModel& model, const AncestorTable& ancestors, TermId w1, TermId w2,
                              const LambdaSchedule& lambda, SupportMode mode) {
  const auto u = reinforced_concept_vector(model, ancestors, w1, lambda, mode);
  const auto v = reinforced_concept_vector(model, ancestors, w2, lambda, mode);
  if (u.isZero()) throw DataError("word '" + model.vocab.term(w1) + "' has empty concept vector");
  if (v.isZero()) throw DataError("word '" + model.vocab.term(w2) + "' has empty concept vector");
  return cosine(u, v);
}

SupportMode parse_support_mode(std::string_view text) {
  if (text == "inclusive") return SupportMode::inclusive;
  if (text == "exclusive") return SupportMode::exclusive;
  throw ConfigError("unknown support mode '" + std::string(text) + "'");
}

std::string_view to_string(SupportMode mode) {
  return mode == SupportMode::inclusive ? "inclusive" : "exclusive";
}

}  // namespace tesa
