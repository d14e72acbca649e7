#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tesa/arborification.hpp"
#include "tesa/corpus.hpp"
#include "tesa/error.hpp"
#include "tesa/reinforcement.hpp"
#include "tesa/textproc.hpp"
#include "tesa/vectors.hpp"

namespace tesa {

inline constexpr int kIndexFormatVersion = 1;

struct BuildOptions {
  PipelineConfig pipeline;
  FilterThresholds thresholds;
};

struct BuildSummary {
  std::size_t pages_in = 0;
  std::size_t pages = 0;
  std::size_t categories = 0;
  std::size_t terms = 0;
  std::size_t membership_edges = 0;
  std::size_t subcategory_edges = 0;
  std::size_t removed_edges = 0;
  std::size_t degenerate_pages = 0;
  std::size_t degenerate_categories = 0;
  double tree_weight = 0.0;
};

/// A built index: the ESA model over the filtered, cycle-broken corpus, the
/// maximum spanning in-tree and the graphs it came from.
struct TesaIndex {
  EsaModel model;
  SpanningTree tree;
  AncestorTable ancestors;
  /// Digraph of the filtered corpus, weights from the first pass; may
  /// contain cycles.
  WeightedDigraph raw_graph;
  /// Subcategory edges removed from raw_graph (node ids of raw_graph).
  std::vector<WeightedEdge> removed_edges;
  /// Acyclic digraph with weights recomputed on the cycle-broken corpus;
  /// the spanning tree is extracted from it.
  WeightedDigraph graph;
  std::string root_id;
  FilterThresholds thresholds;
  std::uint64_t corpus_hash = 0;
  BuildSummary summary;
};

enum class ErrorKind { config, data, parse, io, other };

/// Failure of one build stage; `kind()` classifies the underlying error.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message, ErrorKind kind)
      : Error("stage '" + stage + "': " + message), stage_(std::move(stage)), kind_(kind) {}

  const std::string& stage() const noexcept { return stage_; }
  ErrorKind kind() const noexcept { return kind_; }

 private:
  std::string stage_;
  ErrorKind kind_;
};

/// filter -> vocabulary/stats -> F(c) -> weighted digraph -> break_cycles ->
/// F(c) and weights again on the cycle-broken corpus -> spanning in-tree.
/// Throws StageError.
TesaIndex build_index(const Corpus& corpus, const BuildOptions& options);

/// Lemmatizers (and any other named transform) by name, for reloading.
using TransformRegistry = std::map<std::string, NamedTransform, std::less<>>;

std::uint64_t pipeline_hash(const PipelineConfig& cfg);

/// Writes manifest.json and the component files; output depends only on
/// the index contents.
void save_index(const TesaIndex& index, const std::filesystem::path& dir);

/// Throws ConfigError on a manifest with another format version and
/// DataError on inconsistent components.
TesaIndex load_index(const std::filesystem::path& dir, const TransformRegistry& registry = {});

}  // namespace tesa
