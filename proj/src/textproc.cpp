#include "tesa/textproc.hpp"

#include <algorithm>

#include "tesa/corpus.hpp"
#include "tesa/error.hpp"

namespace tesa {
namespace {

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<SuffixRule> parse_suffix_rules(std::istream& in) {
  std::vector<SuffixRule> rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::string_view arrow = "\xe2\x86\x92";  // U+2192
    auto pos = body.find(arrow);
    if (pos == std::string_view::npos) {
      arrow = "->";
      pos = body.find(arrow);
    }
    std::string_view suffix, replacement;
    if (pos != std::string_view::npos) {
      suffix = trim(body.substr(0, pos));
      replacement = trim(body.substr(pos + arrow.size()));
    } else if (body.front() == '-') {
      suffix = body;  // "-s": strip the suffix
    } else {
      throw ParseError("expected 'suffix->replacement' or '-suffix'", line_no);
    }
    if (!suffix.empty() && suffix.front() == '-') suffix.remove_prefix(1);
    if (suffix.empty()) throw ParseError("empty suffix", line_no);
    rules.push_back({ascii_lower(suffix), ascii_lower(replacement)});
  }
  return rules;
}

std::string apply_suffix_rules(std::string_view token, std::span<const SuffixRule> rules) {
  for (const auto& rule : rules) {
    if (token.size() > rule.suffix.size() && token.ends_with(rule.suffix)) {
      std::string out(token.substr(0, token.size() - rule.suffix.size()));
      out += rule.replacement;
      return out;
    }
  }
  return std::string(token);
}

std::set<std::string> parse_stopwords(std::istream& in) {
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto body = trim(line);
    if (!body.empty()) words.insert(ascii_lower(body));
  }
  return words;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

std::vector<std::string> normalize_text(std::string_view text, const PipelineConfig& cfg) {
  std::vector<std::string> out;
  for (auto& raw : tokenize(text)) {
    std::string token = ascii_lower(raw);
    if (cfg.lemmatizer) token = cfg.lemmatizer->apply(token);
    if (token.empty() || cfg.stopwords.contains(token)) continue;
    token = apply_suffix_rules(token, cfg.suffix_rules);
    if (token.empty() || cfg.stopwords.contains(token)) continue;
    if (token.size() < cfg.min_token_len) continue;
    out.push_back(std::move(token));
  }
  return out;
}

Vocabulary::Vocabulary(const std::map<std::string, std::uint64_t>& term_frequencies) {
  terms_.reserve(term_frequencies.size());
  frequencies_.reserve(term_frequencies.size());
  for (const auto& [term, freq] : term_frequencies) {
    terms_.push_back(term);
    frequencies_.push_back(freq);
  }
}

std::optional<TermId> Vocabulary::find(std::string_view term) const {
  const auto it = std::lower_bound(terms_.begin(), terms_.end(), term);
  if (it == terms_.end() || *it != term) return std::nullopt;
  return static_cast<TermId>(it - terms_.begin());
}

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> page_tokens) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& tokens : page_tokens) {
    for (const auto& token : tokens) ++counts[token];
  }
  return Vocabulary(counts);
}

std::vector<std::vector<std::string>> normalize_pages(const Corpus& corpus, const PipelineConfig& cfg) {
  std::vector<std::vector<std::string>> out;
  out.reserve(corpus.pages.size());
  for (const auto& [id, page] : corpus.pages) out.push_back(normalize_text(page.text, cfg));
  return out;
}

Vocabulary build_vocabulary(const Corpus& corpus, const PipelineConfig& cfg) {
  const auto tokens = normalize_pages(corpus, cfg);
  return build_vocabulary(tokens);
}

}  // namespace tesa
