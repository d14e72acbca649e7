#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tesa/corpus.hpp"
#include "tesa/vectors.hpp"

namespace tesa {

using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t { page, category };

struct WeightedEdge {
  NodeId source;
  NodeId target;
  double weight;

  bool operator==(const WeightedEdge&) const = default;
};

/// Page/category digraph. Edges point from a page to the categories it
/// belongs to and from a category to its parent categories.
class WeightedDigraph {
 public:
  /// Throws DataError if the name already exists.
  NodeId add_node(std::string name, NodeKind kind);
  void add_edge(NodeId source, NodeId target, double weight);
  void set_sink(NodeId sink) { sink_ = sink; }

  std::size_t num_nodes() const noexcept { return names_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::span<const WeightedEdge> edges() const noexcept { return edges_; }
  const std::string& name(NodeId n) const { return names_.at(n); }
  NodeKind kind(NodeId n) const { return kinds_.at(n); }
  std::optional<NodeId> sink() const noexcept { return sink_; }

  std::optional<NodeId> find(std::string_view name) const;
  /// Throws DataError naming the node.
  NodeId at(std::string_view name) const;

  /// Per node, indices into edges() of its outgoing edges, ordered by
  /// target name.
  std::vector<std::vector<std::size_t>> out_edges() const;

  /// Same nodes and sink, no edges.
  WeightedDigraph without_edges() const;

 private:
  std::vector<std::string> names_;
  std::vector<NodeKind> kinds_;
  std::vector<WeightedEdge> edges_;
  std::map<std::string, NodeId, std::less<>> lookup_;
  std::optional<NodeId> sink_;
};

struct DigraphBuildReport {
  std::size_t degenerate_pages = 0;
  std::size_t degenerate_categories = 0;
};

/// Weighted page/category digraph: p -> c weighs <page(p), category(c)> and
/// c -> c' weighs <category(c), category(c')>. Pages or categories whose
/// vectors are degenerate get weight-0 edges and are counted in `report`.
/// The corpus root is the sink. Nodes are added pages first, then
/// categories, each in id order; page and category ids must not collide.
WeightedDigraph build_weighted_digraph(const Corpus& corpus, const EsaModel& model,
                                       DigraphBuildReport* report = nullptr);

/// Strongly connected components (Tarjan), each listed in ascending node
/// order; components ordered by smallest member.
std::vector<std::vector<NodeId>> strongly_connected_components(const WeightedDigraph& g);

/// Kahn topological sort succeeds.
bool is_acyclic(const WeightedDigraph& g);

struct CycleBreakResult {
  WeightedDigraph graph;
  std::vector<WeightedEdge> removed;  // in removal order, node ids of the input graph
};

/// Within each strongly connected component of size > 1, repeatedly removes
/// the lowest-weight internal edge (ties: lexicographically smallest
/// (source, target) names) until the component falls apart. Self-loops are
/// removed as well.
CycleBreakResult break_cycles(const WeightedDigraph& g);

struct CycleCensus {
  std::size_t walks = 0;
  std::size_t walks_with_cycle = 0;
  double paths_with_cycle_fraction = 0.0;
  /// Distinct cycles, each rotated to start at its smallest name; sorted.
  std::vector<std::vector<std::string>> cycles;
};

/// Random-walk cycle census. Each walk starts at a page drawn uniformly
/// (all nodes when the graph has no page node) and follows a uniformly
/// chosen outgoing edge; a node's choice is fixed for the rest of the walk,
/// so the walk ends at a node without outgoing edges or on its first
/// revisit, which closes a cycle.
CycleCensus random_walk_cycle_census(const WeightedDigraph& g, std::uint64_t seed, std::size_t starts);

/// In-tree toward a root: every other node has exactly one parent.
struct SpanningTree {
  std::vector<std::string> names;
  std::vector<NodeKind> kinds;
  /// parent[n] for non-root nodes; parent[root] == root.
  std::vector<NodeId> parent;
  std::vector<double> parent_weight;
  NodeId root = 0;
  double total_weight = 0.0;

  std::optional<NodeId> find(std::string_view name) const;
};

/// Maximum-weight spanning in-tree toward `sink` by Chu-Liu/Edmonds: the
/// edge-reversed graph is solved as a minimum out-arborescence on negated
/// weights (leftist heaps + rollback union-find, O(E log V)). Tolerates
/// cycles. Ties go to the lexicographically smaller (source, target) edge.
/// Throws DataError listing nodes that cannot reach the sink.
SpanningTree max_spanning_intree(const WeightedDigraph& g, NodeId sink);

/// Same contract, naive O(VE) recursive contraction. Reference for
/// differential testing.
SpanningTree max_spanning_intree_reference(const WeightedDigraph& g, NodeId sink);

/// Nodes that cannot reach `sink`, sorted by name.
std::vector<std::string> nodes_not_reaching(const WeightedDigraph& g, NodeId sink);

/// Ancestors of `node` from its parent up to the root; empty for the root.
/// Throws DataError for an unknown node.
std::vector<std::string> ancestor_path(const SpanningTree& tree, std::string_view node);

/// `node parent weight` per non-root node, sorted by node name.
void write_tree_text(std::ostream& out, const SpanningTree& tree);
/// Inverse of write_tree_text; the root is the parent that is never a child.
SpanningTree read_tree_text(std::istream& in, const std::function<bool(std::string_view)>& is_page);

/// `source target weight` per edge, in edge order.
void write_edge_list(std::ostream& out, const WeightedDigraph& g);
/// Nodes are created in order of first appearance; nodes without incoming
/// edges are pages. `sink`, when given, must name a node.
WeightedDigraph read_edge_list(std::istream& in, std::optional<std::string> sink = std::nullopt);

/// Shortest decimal string that round-trips to the same double.
std::string format_exact(double value);

}  // namespace tesa
