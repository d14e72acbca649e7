#include "tesa/arborification.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "tesa/error.hpp"
#include "tesa/random.hpp"

namespace tesa {

NodeId WeightedDigraph::add_node(std::string name, NodeKind kind) {
  const auto id = static_cast<NodeId>(names_.size());
  if (!lookup_.emplace(name, id).second) throw DataError("duplicate node '" + name + "'");
  names_.push_back(std::move(name));
  kinds_.push_back(kind);
  return id;
}

void WeightedDigraph::add_edge(NodeId source, NodeId target, double weight) {
  if (source >= num_nodes() || target >= num_nodes()) throw DataError("edge endpoint out of range");
  edges_.push_back({source, target, weight});
}

std::optional<NodeId> WeightedDigraph::find(std::string_view name) const {
  const auto it = lookup_.find(name);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

NodeId WeightedDigraph::at(std::string_view name) const {
  if (const auto n = find(name)) return *n;
  throw DataError("unknown node '" + std::string(name) + "'");
}

std::vector<std::vector<std::size_t>> WeightedDigraph::out_edges() const {
  std::vector<std::vector<std::size_t>> out(num_nodes());
  for (std::size_t e = 0; e < edges_.size(); ++e) out[edges_[e].source].push_back(e);
  for (auto& list : out) {
    std::stable_sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      return names_[edges_[a].target] < names_[edges_[b].target];
    });
  }
  return out;
}

WeightedDigraph WeightedDigraph::without_edges() const {
  WeightedDigraph g = *this;
  g.edges_.clear();
  return g;
}

WeightedDigraph build_weighted_digraph(const Corpus& corpus, const EsaModel& model, DigraphBuildReport* report) {
  DigraphBuildReport local;
  const auto concepts = concept_vectors(model);

  std::vector<std::optional<SparseVectorXd>> page_vecs(model.num_pages());
  for (PageIndex p = 0; p < model.num_pages(); ++p) {
    try {
      page_vecs[p] = page_vector(model, p, concepts);
    } catch (const DataError&) {
      ++local.degenerate_pages;
    }
  }
  const auto& desc = model.descendants;
  std::vector<std::optional<SparseVectorXd>> cat_vecs(desc.size());
  for (CategoryIndex c = 0; c < desc.size(); ++c) {
    try {
      cat_vecs[c] = category_vector(model, c, concepts);
    } catch (const DataError&) {
      ++local.degenerate_categories;
    }
  }

  auto weight = [](const std::optional<SparseVectorXd>& a, const std::optional<SparseVectorXd>& b) {
    if (!a || !b) return 0.0;
    return std::clamp(dot(*a, *b), 0.0, 1.0);
  };

  WeightedDigraph g;
  for (const auto& id : model.page_ids) g.add_node(id, NodeKind::page);
  for (const auto& id : desc.ids()) {
    if (g.find(id)) throw DataError("category id '" + id + "' collides with a page id");
    g.add_node(id, NodeKind::category);
  }
  for (const auto& [id, page] : corpus.pages) {
    const auto p = model.page_index(id);
    for (const auto& c : page.categories) {
      const auto ci = desc.at(c);
      g.add_edge(p, g.at(c), weight(page_vecs[p], cat_vecs[ci]));
    }
  }
  for (const auto& [id, cat] : corpus.categories) {
    const auto ci = desc.at(id);
    for (const auto& parent : cat.parents) {
      g.add_edge(g.at(id), g.at(parent), weight(cat_vecs[ci], cat_vecs[desc.at(parent)]));
    }
  }
  g.set_sink(g.at(corpus.root_id));
  if (report) *report = local;
  return g;
}

namespace {

/// Iterative Tarjan over an adjacency list of local node ids.
std::vector<std::vector<std::uint32_t>> tarjan(const std::vector<std::vector<std::uint32_t>>& adj) {
  const auto n = static_cast<std::uint32_t>(adj.size());
  constexpr std::uint32_t unvisited = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> index(n, unvisited), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  std::vector<std::pair<std::uint32_t, std::size_t>> call;
  std::vector<std::vector<std::uint32_t>> components;
  std::uint32_t counter = 0;

  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, next] = call.back();
      if (next < adj[v].size()) {
        const auto w = adj[v][next++];
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const auto done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        std::vector<std::uint32_t> comp;
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != done);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
    }
  }
  std::sort(components.begin(), components.end());
  return components;
}

}  // namespace

std::vector<std::vector<NodeId>> strongly_connected_components(const WeightedDigraph& g) {
  std::vector<std::vector<std::uint32_t>> adj(g.num_nodes());
  for (const auto& e : g.edges()) adj[e.source].push_back(e.target);
  return tarjan(adj);
}

bool is_acyclic(const WeightedDigraph& g) {
  std::vector<std::size_t> indegree(g.num_nodes(), 0);
  std::vector<std::vector<NodeId>> adj(g.num_nodes());
  for (const auto& e : g.edges()) {
    adj[e.source].push_back(e.target);
    ++indegree[e.target];
  }
  std::vector<NodeId> ready;
  for (NodeId n = 0; n < g.num_nodes(); ++n) {
    if (indegree[n] == 0) ready.push_back(n);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const auto n = ready.back();
    ready.pop_back();
    ++visited;
    for (const auto m : adj[n]) {
      if (--indegree[m] == 0) ready.push_back(m);
    }
  }
  return visited == g.num_nodes();
}

CycleBreakResult break_cycles(const WeightedDigraph& g) {
  const auto edges = g.edges();
  std::vector<char> alive(edges.size(), 1);
  CycleBreakResult result{g.without_edges(), {}};

  auto remove = [&](std::size_t e) {
    alive[e] = 0;
    result.removed.push_back(edges[e]);
  };
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].source == edges[e].target) remove(e);
  }

  auto edge_less = [&](std::size_t a, std::size_t b) {
    const auto& x = edges[a];
    const auto& y = edges[b];
    if (x.weight != y.weight) return x.weight < y.weight;
    const auto kx = std::tie(g.name(x.source), g.name(x.target));
    const auto ky = std::tie(g.name(y.source), g.name(y.target));
    if (kx != ky) return kx < ky;
    return a < b;
  };

  // Components as sorted global node lists; internal SCCs are recomputed
  // after every removal.
  std::deque<std::vector<NodeId>> work;
  for (auto& comp : strongly_connected_components(g)) {
    if (comp.size() > 1) work.push_back(std::move(comp));
  }
  std::vector<std::uint32_t> local(g.num_nodes(), std::numeric_limits<std::uint32_t>::max());
  while (!work.empty()) {
    auto comp = std::move(work.front());
    work.pop_front();
    for (std::uint32_t i = 0; i < comp.size(); ++i) local[comp[i]] = i;
    auto inside = [&](NodeId n) { return local[n] != std::numeric_limits<std::uint32_t>::max(); };

    std::vector<std::size_t> internal;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (alive[e] && inside(edges[e].source) && inside(edges[e].target)) internal.push_back(e);
    }
    const auto victim = *std::min_element(internal.begin(), internal.end(), edge_less);
    remove(victim);

    std::vector<std::vector<std::uint32_t>> adj(comp.size());
    for (const auto e : internal) {
      if (alive[e]) adj[local[edges[e].source]].push_back(local[edges[e].target]);
    }
    for (const auto& sub : tarjan(adj)) {
      if (sub.size() < 2) continue;
      std::vector<NodeId> global;
      for (const auto i : sub) global.push_back(comp[i]);
      std::sort(global.begin(), global.end());
      work.push_back(std::move(global));
    }
    for (const auto n : comp) local[n] = std::numeric_limits<std::uint32_t>::max();
  }

  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (alive[e]) result.graph.add_edge(edges[e].source, edges[e].target, edges[e].weight);
  }
  return result;
}

CycleCensus random_walk_cycle_census(const WeightedDigraph& g, std::uint64_t seed, std::size_t starts) {
  CycleCensus census;
  const auto out = g.out_edges();
  const auto edges = g.edges();
  std::vector<NodeId> pool;
  for (NodeId n = 0; n < g.num_nodes(); ++n) {
    if (g.kind(n) == NodeKind::page) pool.push_back(n);
  }
  std::sort(pool.begin(), pool.end(), [&](NodeId a, NodeId b) { return g.name(a) < g.name(b); });
  if (pool.empty()) {
    for (NodeId n = 0; n < g.num_nodes(); ++n) pool.push_back(n);
    std::sort(pool.begin(), pool.end(), [&](NodeId a, NodeId b) { return g.name(a) < g.name(b); });
  }
  if (pool.empty()) return census;

  Rng rng(seed);
  std::set<std::vector<std::string>> found;
  constexpr std::size_t absent = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> position(g.num_nodes(), absent);
  std::vector<NodeId> path;
  for (std::size_t walk = 0; walk < starts; ++walk) {
    ++census.walks;
    NodeId current = pool[uniform_below(rng, pool.size())];
    path.assign(1, current);
    position[current] = 0;
    while (!out[current].empty()) {
      const auto& choices = out[current];
      const NodeId next = edges[choices[uniform_below(rng, choices.size())]].target;
      if (position[next] != absent) {
        std::vector<std::string> cycle;
        for (std::size_t i = position[next]; i < path.size(); ++i) cycle.push_back(g.name(path[i]));
        std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
        found.insert(std::move(cycle));
        ++census.walks_with_cycle;
        break;
      }
      position[next] = path.size();
      path.push_back(next);
      current = next;
    }
    for (const auto n : path) position[n] = absent;
  }
  census.paths_with_cycle_fraction =
      census.walks == 0 ? 0.0 : static_cast<double>(census.walks_with_cycle) / static_cast<double>(census.walks);
  census.cycles.assign(found.begin(), found.end());
  return census;
}

std::optional<NodeId> SpanningTree::find(std::string_view name) const {
  for (NodeId n = 0; n < names.size(); ++n) {
    if (names[n] == name) return n;
  }
  return std::nullopt;
}

std::vector<std::string> nodes_not_reaching(const WeightedDigraph& g, NodeId sink) {
  std::vector<std::vector<NodeId>> reverse(g.num_nodes());
  for (const auto& e : g.edges()) reverse[e.target].push_back(e.source);
  std::vector<char> reached(g.num_nodes(), 0);
  std::vector<NodeId> stack{sink};
  reached[sink] = 1;
  while (!stack.empty()) {
    const auto n = stack.back();
    stack.pop_back();
    for (const auto m : reverse[n]) {
      if (!reached[m]) {
        reached[m] = 1;
        stack.push_back(m);
      }
    }
  }
  std::vector<std::string> missing;
  for (NodeId n = 0; n < g.num_nodes(); ++n) {
    if (!reached[n]) missing.push_back(g.name(n));
  }
  std::sort(missing.begin(), missing.end());
  return missing;
}

namespace {

/// Edge of the reversed (out-arborescence) problem: `from` becomes the
/// parent of `to`. Ranked by (key, rank); rank is the lexicographic
/// position of the original (source, target) pair.
struct ArcKey {
  NodeId from;
  NodeId to;
  double key;
  std::uint32_t rank;
};

struct Reduction {
  std::vector<ArcKey> arcs;  // indexed by rank
};

void check_reachable(const WeightedDigraph& g, NodeId sink) {
  if (sink >= g.num_nodes()) throw DataError("sink out of range");
  const auto missing = nodes_not_reaching(g, sink);
  if (missing.empty()) return;
  std::string list;
  for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += (i ? ", " : "") + missing[i];
  if (missing.size() > 20) list += ", ...";
  throw DataError(std::to_string(missing.size()) + " node(s) cannot reach sink '" + g.name(sink) + "': " + list);
}

/// Reverses and negates: in-tree edge child -> parent of weight w becomes
/// arc parent -> child with key -w. Self-loops and the sink's own outgoing
/// edges never belong to an in-tree and are dropped.
Reduction reduce(const WeightedDigraph& g, NodeId sink) {
  const auto edges = g.edges();
  std::vector<std::size_t> order;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].source != edges[e].target && edges[e].source != sink) order.push_back(e);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(g.name(edges[a].source), g.name(edges[a].target)) <
           std::tie(g.name(edges[b].source), g.name(edges[b].target));
  });
  Reduction r;
  r.arcs.reserve(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& e = edges[order[k]];
    r.arcs.push_back({e.target, e.source, -e.weight, static_cast<std::uint32_t>(k)});
  }
  return r;
}

SpanningTree assemble(const WeightedDigraph& g, NodeId sink, const Reduction& r,
                      const std::vector<std::uint32_t>& chosen) {
  SpanningTree tree;
  tree.names.reserve(g.num_nodes());
  for (NodeId n = 0; n < g.num_nodes(); ++n) {
    tree.names.push_back(g.name(n));
    tree.kinds.push_back(g.kind(n));
  }
  tree.root = sink;
  tree.parent.assign(g.num_nodes(), sink);
  tree.parent_weight.assign(g.num_nodes(), 0.0);
  for (NodeId n = 0; n < g.num_nodes(); ++n) {
    if (n == sink) continue;
    const auto& arc = r.arcs[chosen[n]];
    tree.parent[n] = arc.from;
    tree.parent_weight[n] = -arc.key;
    tree.total_weight += tree.parent_weight[n];
  }
  return tree;
}

/// Leftist min-heap of arcs with lazy additive keys.
class ArcHeaps {
 public:
  explicit ArcHeaps(const std::vector<ArcKey>& arcs) {
    nodes_.reserve(arcs.size());
    for (const auto& a : arcs) nodes_.push_back({a.key, a.rank, -1, -1, 1, 0.0});
  }

  int single(std::uint32_t rank) const { return static_cast<int>(rank); }

  int merge(int a, int b) {
    if (a < 0) return b;
    if (b < 0) return a;
    push(a);
    push(b);
    if (less(b, a)) std::swap(a, b);
    nodes_[a].right = merge(nodes_[a].right, b);
    if (rank(nodes_[a].left) < rank(nodes_[a].right)) std::swap(nodes_[a].left, nodes_[a].right);
    nodes_[a].npl = rank(nodes_[a].right) + 1;
    return a;
  }

  /// Top arc's (reduced key, rank).
  std::pair<double, std::uint32_t> top(int h) {
    push(h);
    return {nodes_[h].key, nodes_[h].arc};
  }

  /// Removes the top and subtracts `delta` from every remaining key.
  int pop_and_shift(int h, double delta) {
    push(h);
    const int l = nodes_[h].left;
    const int r = nodes_[h].right;
    if (l >= 0) nodes_[l].lazy -= delta;
    if (r >= 0) nodes_[r].lazy -= delta;
    return merge(l, r);
  }

 private:
  struct Node {
    double key;
    std::uint32_t arc;
    int left;
    int right;
    int npl;
    double lazy;
  };

  int rank(int h) const { return h < 0 ? 0 : nodes_[h].npl; }

  void push(int h) {
    auto& n = nodes_[h];
    if (n.lazy == 0.0) return;
    n.key += n.lazy;
    if (n.left >= 0) nodes_[n.left].lazy += n.lazy;
    if (n.right >= 0) nodes_[n.right].lazy += n.lazy;
    n.lazy = 0.0;
  }

  bool less(int a, int b) const {
    if (nodes_[a].key != nodes_[b].key) return nodes_[a].key < nodes_[b].key;
    return nodes_[a].arc < nodes_[b].arc;
  }

  std::vector<Node> nodes_;
};

class RollbackUnionFind {
 public:
  explicit RollbackUnionFind(std::size_t n) : parent_(n, -1) {}

  int find(int x) const {
    while (parent_[x] >= 0) x = parent_[x];
    return x;
  }
  std::size_t time() const { return history_.size(); }
  void rollback(std::size_t t) {
    while (history_.size() > t) {
      parent_[history_.back().first] = history_.back().second;
      history_.pop_back();
    }
  }
  bool join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (parent_[a] > parent_[b]) std::swap(a, b);
    history_.emplace_back(a, parent_[a]);
    history_.emplace_back(b, parent_[b]);
    parent_[a] += parent_[b];
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<int> parent_;
  std::vector<std::pair<int, int>> history_;
};

/// Minimum out-arborescence rooted at `root`; returns the chosen arc rank
/// per node (unspecified for the root).
std::vector<std::uint32_t> min_arborescence(std::size_t n, NodeId root, const std::vector<ArcKey>& arcs) {
  ArcHeaps heaps(arcs);
  std::vector<int> heap(n, -1);
  for (const auto& a : arcs) heap[a.to] = heaps.merge(heap[a.to], heaps.single(a.rank));

  RollbackUnionFind uf(n);
  std::vector<long> seen(n, -1);
  std::vector<int> path(n);
  std::vector<std::uint32_t> queue(n);
  constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> in(n, none);
  struct Contraction {
    int node;
    std::size_t time;
    std::vector<std::uint32_t> cycle;
  };
  std::deque<Contraction> contractions;
  seen[root] = static_cast<long>(root);

  for (std::size_t s = 0; s < n; ++s) {
    int u = static_cast<int>(s);
    std::size_t qi = 0;
    while (seen[u] < 0) {
      if (heap[u] < 0) throw DataError("node without incoming arc during arborescence search");
      const auto [key, rank] = heaps.top(heap[u]);
      heap[u] = heaps.pop_and_shift(heap[u], key);
      queue[qi] = rank;
      path[qi++] = u;
      seen[u] = static_cast<long>(s);
      u = uf.find(static_cast<int>(arcs[rank].from));
      if (seen[u] == static_cast<long>(s)) {
        int cycle_heap = -1;
        const std::size_t end = qi;
        const std::size_t time = uf.time();
        int w;
        do {
          w = path[--qi];
          cycle_heap = heaps.merge(cycle_heap, heap[w]);
        } while (uf.join(u, w));
        u = uf.find(u);
        heap[u] = cycle_heap;
        seen[u] = -1;
        contractions.push_front({u, time, {queue.begin() + static_cast<long>(qi), queue.begin() + static_cast<long>(end)}});
      }
    }
    for (std::size_t i = 0; i < qi; ++i) in[uf.find(static_cast<int>(arcs[queue[i]].to))] = queue[i];
  }

  for (const auto& c : contractions) {
    uf.rollback(c.time);
    const auto entering = in[c.node];
    for (const auto rank : c.cycle) in[uf.find(static_cast<int>(arcs[rank].to))] = rank;
    in[uf.find(static_cast<int>(arcs[entering].to))] = entering;
  }
  return in;
}

/// Naive Chu-Liu/Edmonds: pick cheapest in-arc per node, contract a cycle,
/// recurse, expand. `arcs[i].rank` is carried through contractions as the
/// original arc id.
std::vector<std::uint32_t> min_arborescence_naive(std::size_t n, NodeId root, const std::vector<ArcKey>& arcs) {
  constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> best(n, none);  // position in `arcs`
  auto better = [&](std::uint32_t a, std::uint32_t b) {
    if (arcs[a].key != arcs[b].key) return arcs[a].key < arcs[b].key;
    return arcs[a].rank < arcs[b].rank;
  };
  for (std::uint32_t i = 0; i < arcs.size(); ++i) {
    const auto& a = arcs[i];
    if (a.to == root || a.from == a.to) continue;
    if (best[a.to] == none || better(i, best[a.to])) best[a.to] = i;
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (v != root && best[v] == none) throw DataError("node without incoming arc during arborescence search");
  }

  // Find cycles among the chosen arcs.
  std::vector<long> comp(n, -1);
  std::vector<char> on_cycle(n, 0);
  std::vector<long> visit(n, -1);
  long next_comp = 0;
  for (std::size_t s = 0; s < n; ++s) {
    std::size_t v = s;
    while (v != root && visit[v] == -1 && comp[v] == -1) {
      visit[v] = static_cast<long>(s);
      v = arcs[best[v]].from;
    }
    if (v != root && visit[v] == static_cast<long>(s) && comp[v] == -1) {
      std::size_t x = v;
      do {
        comp[x] = next_comp;
        on_cycle[x] = 1;
        x = arcs[best[x]].from;
      } while (x != v);
      ++next_comp;
    }
  }
  if (next_comp == 0) {
    std::vector<std::uint32_t> out(n, none);
    for (std::size_t v = 0; v < n; ++v) {
      if (v != root) out[v] = best[v];
    }
    return out;
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (comp[v] == -1) comp[v] = next_comp++;
  }

  std::vector<ArcKey> contracted;
  std::vector<std::uint32_t> origin;
  for (std::uint32_t i = 0; i < arcs.size(); ++i) {
    const auto& a = arcs[i];
    const auto cf = static_cast<NodeId>(comp[a.from]);
    const auto ct = static_cast<NodeId>(comp[a.to]);
    if (cf == ct) continue;
    const double key = on_cycle[a.to] ? a.key - arcs[best[a.to]].key : a.key;
    contracted.push_back({cf, ct, key, a.rank});
    origin.push_back(i);
  }
  const auto sub = min_arborescence_naive(static_cast<std::size_t>(next_comp), static_cast<NodeId>(comp[root]), contracted);

  std::vector<std::uint32_t> out(n, none);
  for (std::size_t v = 0; v < n; ++v) {
    if (on_cycle[v]) out[v] = best[v];
  }
  for (std::size_t c = 0; c < sub.size(); ++c) {
    if (sub[c] == none) continue;
    const auto i = origin[sub[c]];
    out[arcs[i].to] = i;
  }
  return out;
}

}  // namespace

SpanningTree max_spanning_intree(const WeightedDigraph& g, NodeId sink) {
  check_reachable(g, sink);
  const auto r = reduce(g, sink);
  const auto chosen = min_arborescence(g.num_nodes(), sink, r.arcs);
  return assemble(g, sink, r, chosen);
}

SpanningTree max_spanning_intree_reference(const WeightedDigraph& g, NodeId sink) {
  check_reachable(g, sink);
  const auto r = reduce(g, sink);
  auto chosen = min_arborescence_naive(g.num_nodes(), sink, r.arcs);
  // Positions equal ranks at the top level.
  return assemble(g, sink, r, chosen);
}

std::vector<std::string> ancestor_path(const SpanningTree& tree, std::string_view node) {
  const auto start = tree.find(node);
  if (!start) throw DataError("unknown node '" + std::string(node) + "'");
  std::vector<std::string> path;
  NodeId n = *start;
  while (n != tree.root) {
    n = tree.parent[n];
    path.push_back(tree.names[n]);
    if (path.size() > tree.names.size()) throw DataError("parent map contains a cycle");
  }
  return path;
}

std::string format_exact(double value) { return fmt::format("{}", value); }

void write_tree_text(std::ostream& out, const SpanningTree& tree) {
  std::vector<NodeId> order;
  for (NodeId n = 0; n < tree.names.size(); ++n) {
    if (n != tree.root) order.push_back(n);
  }
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return tree.names[a] < tree.names[b]; });
  for (const auto n : order) {
    out << tree.names[n] << ' ' << tree.names[tree.parent[n]] << ' ' << format_exact(tree.parent_weight[n]) << '\n';
  }
}

SpanningTree read_tree_text(std::istream& in, const std::function<bool(std::string_view)>& is_page) {
  std::vector<std::tuple<std::string, std::string, double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string node, parent;
    double weight;
    if (!(fields >> node >> parent >> weight)) throw ParseError("expected 'node parent weight'", line_no);
    rows.emplace_back(node, parent, weight);
  }

  SpanningTree tree;
  std::map<std::string, NodeId, std::less<>> ids;
  auto intern = [&](const std::string& name) {
    const auto [it, inserted] = ids.emplace(name, static_cast<NodeId>(tree.names.size()));
    if (inserted) {
      tree.names.push_back(name);
      tree.kinds.push_back(is_page(name) ? NodeKind::page : NodeKind::category);
    }
    return it->second;
  };
  std::set<std::string> children;
  for (const auto& [node, parent, weight] : rows) {
    intern(node);
    intern(parent);
    if (!children.insert(node).second) throw ParseError("node '" + node + "' has two parents");
  }
  std::optional<NodeId> root;
  for (NodeId n = 0; n < tree.names.size(); ++n) {
    if (children.contains(tree.names[n])) continue;
    if (root) throw ParseError("tree has more than one root");
    root = n;
  }
  if (!root) {
    if (!rows.empty()) throw ParseError("tree has no root");
    return tree;
  }
  tree.root = *root;
  tree.parent.assign(tree.names.size(), *root);
  tree.parent_weight.assign(tree.names.size(), 0.0);
  for (const auto& [node, parent, weight] : rows) {
    const auto n = ids.at(node);
    tree.parent[n] = ids.at(parent);
    tree.parent_weight[n] = weight;
  }
  for (NodeId n = 0; n < tree.names.size(); ++n) {
    if (n != tree.root) tree.total_weight += tree.parent_weight[n];
  }
  return tree;
}

void write_edge_list(std::ostream& out, const WeightedDigraph& g) {
  for (const auto& e : g.edges()) {
    out << g.name(e.source) << ' ' << g.name(e.target) << ' ' << format_exact(e.weight) << '\n';
  }
}

WeightedDigraph read_edge_list(std::istream& in, std::optional<std::string> sink) {
  std::vector<std::tuple<std::string, std::string, double>> rows;
  std::vector<std::string> order;
  std::set<std::string> known, has_incoming;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line.front() == '#') continue;
    std::istringstream fields(line);
    std::string source, target;
    double weight;
    if (!(fields >> source >> target >> weight)) throw ParseError("expected 'source target weight'", line_no);
    for (const auto& name : {source, target}) {
      if (known.insert(name).second) order.push_back(name);
    }
    has_incoming.insert(target);
    rows.emplace_back(source, target, weight);
  }
  if (sink && !known.contains(*sink)) {
    known.insert(*sink);
    order.push_back(*sink);
  }
  WeightedDigraph g;
  for (const auto& name : order) {
    g.add_node(name, has_incoming.contains(name) || (sink && name == *sink) ? NodeKind::category : NodeKind::page);
  }
  for (const auto& [source, target, weight] : rows) g.add_edge(g.at(source), g.at(target), weight);
  if (sink) g.set_sink(g.at(*sink));
  return g;
}

}  // namespace tesa
