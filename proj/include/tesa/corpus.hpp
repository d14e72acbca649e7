#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace tesa {

struct PipelineConfig;

struct PageRecord {
  std::string id;
  std::string title;
  std::string text;
  std::vector<std::string> links_out;
  std::vector<std::string> categories;

  bool operator==(const PageRecord&) const = default;
};

struct CategoryRecord {
  std::string id;
  std::string title;
  std::vector<std::string> parents;

  bool operator==(const CategoryRecord&) const = default;
};

/// Page/category corpus. Maps are keyed by id, so iteration is in
/// lexicographic id order; page-space dimensions follow that order.
struct Corpus {
  std::map<std::string, PageRecord> pages;
  std::map<std::string, CategoryRecord> categories;
  std::string root_id;

  bool operator==(const Corpus&) const = default;
};

/// Counts of references dropped while resolving a corpus.
struct LoadReport {
  std::size_t dangling_categories = 0;  // page -> unknown category
  std::size_t dangling_parents = 0;     // category -> unknown parent, or itself
  std::size_t dangling_links = 0;       // page -> unknown page

  std::size_t warnings() const { return dangling_categories + dangling_parents + dangling_links; }
};

struct LoadedCorpus {
  Corpus corpus;
  LoadReport report;
};

/// Reads pages.jsonl / categories.jsonl. Unresolvable references are dropped
/// and counted; malformed lines raise ParseError, a missing root ConfigError.
LoadedCorpus load_corpus(std::istream& pages, std::istream& categories, const std::string& root_id);
LoadedCorpus load_corpus(const std::filesystem::path& pages_path,
                         const std::filesystem::path& categories_path, const std::string& root_id);

/// Writes the corpus back as JSONL, records in id order.
void save_corpus(const Corpus& corpus, std::ostream& pages, std::ostream& categories);

/// Thresholds applied by filter_corpus.
struct FilterThresholds {
  std::size_t min_words = 125;
  std::size_t min_links_in = 15;
  std::size_t min_links_out = 15;

  bool operator==(const FilterThresholds&) const = default;
};

/// Keeps pages with at least `min_words` distinct normalized tokens and at
/// least the given numbers of incoming and outgoing links, where links are
/// counted among surviving pages only; iterates to a fixed point. Links to
/// removed pages are dropped and categories without surviving descendant
/// pages are pruned (the root is always kept). Throws DataError when no page
/// survives.
Corpus filter_corpus(const Corpus& corpus, const PipelineConfig& cfg, const FilterThresholds& thresholds);

/// Removes the given child -> parent subcategory relations.
Corpus remove_subcategory_edges(
    const Corpus& corpus, const std::vector<std::pair<std::string, std::string>>& child_parent);

struct LabeledDocument {
  std::string doc_id;
  std::string label;
  std::string text;

  bool operator==(const LabeledDocument&) const = default;
};

struct EvalCorpus {
  std::vector<LabeledDocument> documents;  // in file order
  std::vector<std::string> classes;        // distinct labels, sorted

  /// 0-based position of the document's label in `classes`.
  std::size_t label_index(const LabeledDocument& doc) const;
};

/// Reads eval.jsonl. Empty input or a duplicate doc_id raises DataError.
EvalCorpus load_eval_corpus(std::istream& in);
EvalCorpus load_eval_corpus(const std::filesystem::path& path);

/// FNV-1a 64-bit, used for manifest fingerprints.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Fingerprint of the canonical JSONL serialization plus root id.
std::uint64_t corpus_hash(const Corpus& corpus);

}  // namespace tesa
