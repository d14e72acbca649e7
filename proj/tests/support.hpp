#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// recount everything from raw fixture text with dense Eigen arithmetic and
// never call the library's weighting or vector code.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tesa/arborification.hpp"
#include "tesa/corpus.hpp"
#include "tesa/random.hpp"
#include "tesa/vectors.hpp"

namespace tesa::test {

inline std::filesystem::path data_dir() { return TESA_TEST_DATA_DIR; }

inline Corpus load_fixture(const std::string& name, const std::string& root = "root") {
  const auto dir = data_dir() / name;
  return load_corpus(dir / "pages.jsonl", dir / "categories.jsonl", root).corpus;
}

inline Corpus fix1() { return load_fixture("fix1"); }

inline std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

/// Dense tf matrix (pages x terms) recounted from whitespace-split text;
/// valid for fixtures whose text is already lowercase words.
struct DenseOracle {
  std::vector<std::string> pages;
  std::vector<std::string> terms;
  Eigen::MatrixXd tf;
  std::map<std::string, std::set<std::string>> members;  // category -> direct pages
  std::map<std::string, std::set<std::string>> children;  // category -> direct subcategories

  explicit DenseOracle(const Corpus& corpus) {
    std::set<std::string> vocab;
    for (const auto& [id, page] : corpus.pages) {
      pages.push_back(id);
      for (const auto& w : split_words(page.text)) vocab.insert(w);
      for (const auto& c : page.categories) members[c].insert(id);
    }
    for (const auto& [id, cat] : corpus.categories) {
      for (const auto& parent : cat.parents) children[parent].insert(id);
    }
    terms.assign(vocab.begin(), vocab.end());
    tf = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pages.size()), static_cast<Eigen::Index>(terms.size()));
    for (std::size_t p = 0; p < pages.size(); ++p) {
      for (const auto& w : split_words(corpus.pages.at(pages[p]).text)) tf(p, term(w)) += 1.0;
    }
  }

  Eigen::Index term(const std::string& w) const {
    return std::lower_bound(terms.begin(), terms.end(), w) - terms.begin();
  }
  Eigen::Index page(const std::string& p) const {
    return std::lower_bound(pages.begin(), pages.end(), p) - pages.begin();
  }
  double n() const { return static_cast<double>(pages.size()); }

  double df(Eigen::Index w) const { return static_cast<double>((tf.col(w).array() > 0).count()); }

  double tfidf(Eigen::Index p, Eigen::Index w) const {
    const double f = tf(p, w);
    return f == 0 ? 0.0 : (1.0 + std::log(f)) * std::log(n() / df(w));
  }

  /// F(c) by breadth-first search down the child lists.
  std::set<std::string> descendants(const std::string& c) const {
    std::set<std::string> out, seen{c};
    std::vector<std::string> stack{c};
    while (!stack.empty()) {
      const auto cur = stack.back();
      stack.pop_back();
      if (auto it = members.find(cur); it != members.end()) out.insert(it->second.begin(), it->second.end());
      if (auto it = children.find(cur); it != children.end()) {
        for (const auto& child : it->second) {
          if (seen.insert(child).second) stack.push_back(child);
        }
      }
    }
    return out;
  }

  double categorical(const std::string& c, Eigen::Index w) const {
    const auto f_c = descendants(c);
    double sum = 0.0, outside = 0.0;
    for (std::size_t p = 0; p < pages.size(); ++p) {
      if (f_c.contains(pages[p]))
        sum += tf(p, w);
      else if (tf(p, w) > 0)
        outside += 1.0;
    }
    return sum == 0 ? 0.0 : (1.0 + std::log(sum)) * std::log(n() / (1.0 + outside));
  }

  Eigen::VectorXd concept_vec(Eigen::Index w) const {
    Eigen::VectorXd v(tf.rows());
    for (Eigen::Index p = 0; p < tf.rows(); ++p) v[p] = tfidf(p, w);
    return v;
  }

  Eigen::VectorXd page_vec(Eigen::Index p) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(tf.rows());
    for (Eigen::Index w = 0; w < tf.cols(); ++w) v += tfidf(p, w) * concept_vec(w);
    return v / v.norm();
  }

  Eigen::VectorXd category_vec(const std::string& c) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(tf.rows());
    for (Eigen::Index w = 0; w < tf.cols(); ++w) v += categorical(c, w) * concept_vec(w);
    return v / v.norm();
  }

  /// Reinforced concept vector given each page's ancestor path (inclusive).
  Eigen::VectorXd reinforced_vec(Eigen::Index w, const std::vector<std::vector<std::string>>& paths,
                                 const std::vector<double>& lambda) const {
    Eigen::VectorXd v(tf.rows());
    for (Eigen::Index p = 0; p < tf.rows(); ++p) {
      double value = tfidf(p, w);
      const auto& path = paths[static_cast<std::size_t>(p)];
      for (std::size_t i = 0; i < std::min(path.size(), lambda.size()); ++i)
        value += lambda[i] * categorical(path[i], w);
      v[p] = value;
    }
    return v;
  }
};

inline double dense_cosine(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const double nu = u.norm(), nv = v.norm();
  return nu == 0 || nv == 0 ? 0.0 : u.dot(v) / (nu * nv);
}

inline double max_abs_diff(const SparseVectorXd& sparse, const Eigen::VectorXd& dense) {
  return (sparse.toDense() - dense).cwiseAbs().maxCoeff();
}

/// Structural check of an in-tree over all nodes of `g`: one parent each,
/// every parent edge exists in g, and every node reaches the root.
inline bool valid_intree(const WeightedDigraph& g, const SpanningTree& t, NodeId sink) {
  if (t.names.size() != g.num_nodes() || t.parent.size() != g.num_nodes()) return false;
  if (t.names[t.root] != g.name(sink)) return false;
  for (NodeId n = 0; n < t.names.size(); ++n) {
    if (n == t.root) continue;
    const auto src = g.find(t.names[n]);
    const auto dst = g.find(t.names[t.parent[n]]);
    if (!src || !dst) return false;
    bool found = false;
    for (const auto& e : g.edges()) found |= e.source == *src && e.target == *dst && e.weight == t.parent_weight[n];
    if (!found) return false;
    NodeId cur = n;
    for (std::size_t steps = 0; cur != t.root; ++steps) {
      if (steps > t.names.size()) return false;
      cur = t.parent[cur];
    }
  }
  return true;
}

/// Maximum in-tree weight by enumerating every choice of one outgoing edge
/// per non-sink node. Empty when no in-tree exists.
inline std::optional<double> brute_force_intree(const WeightedDigraph& g, NodeId sink) {
  const auto n = g.num_nodes();
  std::vector<std::vector<WeightedEdge>> out(n);
  for (const auto& e : g.edges()) {
    if (e.source != sink && e.source != e.target) out[e.source].push_back(e);
  }
  std::vector<NodeId> nodes;
  for (NodeId v = 0; v < n; ++v) {
    if (v != sink) nodes.push_back(v);
  }
  std::optional<double> best;
  std::vector<NodeId> parent(n, sink);
  std::vector<double> weight(n, 0.0);
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == nodes.size()) {
      for (const auto v : nodes) {
        NodeId cur = v;
        for (std::size_t steps = 0; cur != sink; ++steps) {
          if (steps > n) return;
          cur = parent[cur];
        }
      }
      double total = 0.0;
      for (NodeId v = 0; v < n; ++v) {
        if (v != sink) total += weight[v];
      }
      if (!best || total > *best) best = total;
      return;
    }
    for (const auto& e : out[nodes[k]]) {
      parent[nodes[k]] = e.target;
      weight[nodes[k]] = e.weight;
      rec(k + 1);
    }
  };
  rec(0);
  return best;
}

/// Random digraph on `n` nodes named n0..; node 0 is the sink, every other
/// node gets a path to it, plus extra random edges (cycles allowed).
inline WeightedDigraph random_digraph(Rng& rng, std::size_t n, std::size_t extra, bool dyadic_weights) {
  WeightedDigraph g;
  for (std::size_t i = 0; i < n; ++i) g.add_node("n" + std::to_string(i), i == 0 ? NodeKind::category : NodeKind::page);
  g.set_sink(0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto weight = [&] { return dyadic_weights ? static_cast<double>(uniform_below(rng, 9)) / 8.0 : unit(rng); };
  for (std::size_t i = 1; i < n; ++i) {
    const auto target = static_cast<NodeId>(uniform_below(rng, i));
    g.add_edge(static_cast<NodeId>(i), target, weight());
  }
  for (std::size_t k = 0; n > 1 && k < extra; ++k) {
    const auto s = static_cast<NodeId>(1 + uniform_below(rng, n - 1));
    const auto t = static_cast<NodeId>(uniform_below(rng, n));
    if (s != t) g.add_edge(s, t, weight());
  }
  return g;
}

/// Three planted cycles (two 2-cycles and a triangle), each with an exit to
/// the root, fed by pages. The cycle edges outweigh the exits.
inline WeightedDigraph cyc1() {
  WeightedDigraph g;
  for (const auto* name : {"pa", "pb", "pc", "pd", "pe", "pf", "pg"}) g.add_node(name, NodeKind::page);
  for (const auto* name : {"a1", "a2", "b1", "b2", "t1", "t2", "t3", "root"}) g.add_node(name, NodeKind::category);
  const auto id = [&](const char* name) { return g.at(name); };
  g.set_sink(id("root"));
  const std::vector<std::tuple<const char*, const char*, double>> edges = {
      {"pa", "a1", 0.9}, {"pb", "a2", 0.8}, {"pc", "b1", 0.7}, {"pd", "b2", 0.6}, {"pe", "t1", 0.5},
      {"pf", "t2", 0.4}, {"pg", "t3", 0.3}, {"a1", "a2", 0.9}, {"a2", "a1", 0.8}, {"b1", "b2", 0.7},
      {"b2", "b1", 0.6}, {"t1", "t2", 0.9}, {"t2", "t3", 0.8}, {"t3", "t1", 0.7}, {"a1", "root", 0.1},
      {"b2", "root", 0.2}, {"t3", "root", 0.3}};
  for (const auto& [s, t, w] : edges) g.add_edge(id(s), id(t), w);
  return g;
}

}  // namespace tesa::test
