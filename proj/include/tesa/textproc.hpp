#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tesa {

struct Corpus;

using TermId = std::uint32_t;

/// A token-to-token rewrite identified by name. The name is what gets
/// persisted; the function is re-resolved by name when an index is loaded.
struct NamedTransform {
  std::string name;
  std::function<std::string(std::string_view)> apply;
};

struct SuffixRule {
  std::string suffix;
  std::string replacement;
};

/// Parses `suffix→replacement` lines (ASCII `->` also accepted); a bare
/// `-suffix` strips the suffix. Blank lines and lines starting with `#` are
/// skipped. Order is preserved. Throws ParseError on anything else.
std::vector<SuffixRule> parse_suffix_rules(std::istream& in);

/// Applies the first rule whose suffix matches and leaves a nonempty stem.
std::string apply_suffix_rules(std::string_view token, std::span<const SuffixRule> rules);

/// Plain-text list, one token per line; tokens are lowercased.
std::set<std::string> parse_stopwords(std::istream& in);

struct PipelineConfig {
  std::set<std::string> stopwords;
  /// Stemmer. Empty means identity.
  std::vector<SuffixRule> suffix_rules;
  std::size_t min_token_len = 1;
  /// Applied after lowercasing, before stopword removal and stemming.
  std::optional<NamedTransform> lemmatizer;

  std::string stemmer_name() const { return suffix_rules.empty() ? "identity" : "suffix"; }
};

/// ASCII lowercase; bytes >= 0x80 (UTF-8 sequences) pass through untouched.
std::string ascii_lower(std::string_view s);

/// Splits on every byte that is neither ASCII alphanumeric nor >= 0x80.
std::vector<std::string> tokenize(std::string_view text);

/// tokenize, lowercase, lemmatize, drop stopwords, stem, drop stopwords
/// again (a stem may itself be a stopword), drop short tokens. Order and
/// duplicates are preserved.
std::vector<std::string> normalize_text(std::string_view text, const PipelineConfig& cfg);

/// Dense bijection term <-> TermId, ids assigned in lexicographic order.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(const std::map<std::string, std::uint64_t>& term_frequencies);

  std::size_t size() const noexcept { return terms_.size(); }
  std::optional<TermId> find(std::string_view term) const;
  const std::string& term(TermId id) const { return terms_.at(id); }
  /// Total occurrences of the term across the corpus.
  std::uint64_t frequency(TermId id) const { return frequencies_.at(id); }

  std::span<const std::string> terms() const noexcept { return terms_; }

  bool operator==(const Vocabulary&) const = default;

 private:
  std::vector<std::string> terms_;
  std::vector<std::uint64_t> frequencies_;
};

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> page_tokens);
Vocabulary build_vocabulary(const Corpus& corpus, const PipelineConfig& cfg);

/// Normalized tokens of every page, in page-id order.
std::vector<std::vector<std::string>> normalize_pages(const Corpus& corpus, const PipelineConfig& cfg);

}  // namespace tesa
