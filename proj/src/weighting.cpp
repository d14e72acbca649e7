#include "tesa/weighting.hpp"

#include <algorithm>
#include <map>

#include "tesa/error.hpp"

namespace tesa {

TermStats::TermStats(std::size_t num_terms, std::vector<std::vector<Posting>> page_terms)
    : df_(num_terms, 0) {
  forward_offsets_.reserve(page_terms.size() + 1);
  forward_offsets_.push_back(0);
  std::vector<std::size_t> counts(num_terms, 0);
  for (const auto& terms : page_terms) {
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const auto& t = terms[k];
      if (t.index >= num_terms) throw DataError("term id out of range");
      if (t.freq == 0) throw DataError("zero frequency posting");
      if (k > 0 && terms[k - 1].index >= t.index) throw DataError("page terms not strictly ascending");
      forward_.push_back(t);
      ++counts[t.index];
    }
    forward_offsets_.push_back(forward_.size());
  }

  inverted_offsets_.assign(num_terms + 1, 0);
  for (std::size_t w = 0; w < num_terms; ++w) {
    inverted_offsets_[w + 1] = inverted_offsets_[w] + counts[w];
    df_[w] = static_cast<std::uint32_t>(counts[w]);
  }
  inverted_.resize(forward_.size());
  std::vector<std::size_t> cursor(inverted_offsets_.begin(), inverted_offsets_.end() - 1);
  for (std::size_t p = 0; p + 1 < forward_offsets_.size(); ++p) {
    for (std::size_t k = forward_offsets_[p]; k < forward_offsets_[p + 1]; ++k) {
      const auto& t = forward_[k];
      inverted_[cursor[t.index]++] = Posting{static_cast<std::uint32_t>(p), t.freq};
    }
  }
}

std::span<const Posting> TermStats::page_terms(PageIndex p) const {
  if (p >= num_pages()) throw DataError("page index out of range");
  return {forward_.data() + forward_offsets_[p], forward_offsets_[p + 1] - forward_offsets_[p]};
}

std::span<const Posting> TermStats::postings(TermId w) const {
  if (w >= num_terms()) throw DataError("term id out of range");
  return {inverted_.data() + inverted_offsets_[w], inverted_offsets_[w + 1] - inverted_offsets_[w]};
}

std::uint32_t TermStats::frequency(PageIndex p, TermId w) const {
  const auto terms = page_terms(p);
  const auto it = std::lower_bound(terms.begin(), terms.end(), w,
                                   [](const Posting& a, TermId b) { return a.index < b; });
  return (it != terms.end() && it->index == w) ? it->freq : 0;
}

TermStats compute_term_stats(std::span<const std::vector<std::string>> page_tokens, const Vocabulary& vocab) {
  std::vector<std::vector<Posting>> page_terms;
  page_terms.reserve(page_tokens.size());
  for (const auto& tokens : page_tokens) {
    std::map<TermId, std::uint32_t> counts;
    for (const auto& token : tokens) {
      if (const auto id = vocab.find(token)) ++counts[*id];
    }
    std::vector<Posting> terms;
    terms.reserve(counts.size());
    for (const auto& [id, f] : counts) terms.push_back({id, f});
    page_terms.push_back(std::move(terms));
  }
  return TermStats(vocab.size(), std::move(page_terms));
}

TermStats compute_term_stats(const Corpus& corpus, const Vocabulary& vocab, const PipelineConfig& cfg) {
  const auto tokens = normalize_pages(corpus, cfg);
  return compute_term_stats(tokens, vocab);
}

double tfidf(PageIndex p, TermId w, const TermStats& stats) {
  return tfidf_weight(stats.frequency(p, w), stats.df(w), stats.num_pages());
}

DescendantIndex DescendantIndex::build(const Corpus& corpus) {
  DescendantIndex out;
  std::map<std::string, CategoryIndex> index;
  for (const auto& [id, cat] : corpus.categories) {
    index.emplace(id, static_cast<CategoryIndex>(out.ids_.size()));
    out.ids_.push_back(id);
  }
  const std::size_t m = out.ids_.size();
  std::vector<std::vector<CategoryIndex>> children(m);
  std::vector<std::vector<PageIndex>> members(m);
  for (const auto& [id, cat] : corpus.categories) {
    for (const auto& parent : cat.parents) children[index.at(parent)].push_back(index.at(id));
  }
  PageIndex p = 0;
  for (const auto& [id, page] : corpus.pages) {
    for (const auto& c : page.categories) members[index.at(c)].push_back(p);
    ++p;
  }

  out.pages_.resize(m);
  std::vector<std::uint32_t> mark(m, 0);
  std::vector<CategoryIndex> stack;
  for (CategoryIndex c = 0; c < m; ++c) {
    const std::uint32_t stamp = c + 1;
    auto& f = out.pages_[c];
    stack.assign(1, c);
    mark[c] = stamp;
    while (!stack.empty()) {
      const auto top = stack.back();
      stack.pop_back();
      f.insert(f.end(), members[top].begin(), members[top].end());
      for (const auto child : children[top]) {
        if (mark[child] != stamp) {
          mark[child] = stamp;
          stack.push_back(child);
        }
      }
    }
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
  }
  out.index_containing(corpus.pages.size());
  return out;
}

DescendantIndex::DescendantIndex(std::vector<std::string> category_ids,
                                 std::vector<std::vector<PageIndex>> pages, std::size_t num_pages)
    : ids_(std::move(category_ids)), pages_(std::move(pages)) {
  if (ids_.size() != pages_.size()) throw DataError("descendant index: id/list count mismatch");
  if (!std::is_sorted(ids_.begin(), ids_.end())) throw DataError("descendant index: ids not sorted");
  for (const auto& f : pages_) {
    if (!std::is_sorted(f.begin(), f.end()) || (!f.empty() && f.back() >= num_pages))
      throw DataError("descendant index: malformed page list");
  }
  index_containing(num_pages);
}

void DescendantIndex::index_containing(std::size_t num_pages) {
  containing_.assign(num_pages, {});
  for (CategoryIndex c = 0; c < pages_.size(); ++c) {
    for (const auto p : pages_[c]) containing_[p].push_back(c);
  }
}

std::optional<CategoryIndex> DescendantIndex::find(std::string_view id) const {
  const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<CategoryIndex>(it - ids_.begin());
}

CategoryIndex DescendantIndex::at(std::string_view id) const {
  if (const auto c = find(id)) return *c;
  throw DataError("unknown category '" + std::string(id) + "'");
}

std::vector<std::string> descendant_pages(std::string_view category, const Corpus& corpus) {
  const auto desc = DescendantIndex::build(corpus);
  std::vector<std::string> ids;
  ids.reserve(corpus.pages.size());
  for (const auto& [id, page] : corpus.pages) ids.push_back(id);
  std::vector<std::string> out;
  for (const auto p : desc.pages(desc.at(category))) out.push_back(ids[p]);
  return out;
}

double categorical_tfidf(CategoryIndex c, TermId w, const TermStats& stats, const DescendantIndex& desc) {
  const auto f = desc.pages(c);
  if (f.empty()) throw DataError("category '" + desc.id(c) + "' has no descendant pages");
  std::uint64_t sum_freq = 0;
  std::uint64_t inside = 0;
  for (const auto& posting : stats.postings(w)) {
    if (std::binary_search(f.begin(), f.end(), posting.index)) {
      sum_freq += posting.freq;
      ++inside;
    }
  }
  const std::uint64_t outside = stats.df(w) - inside;
  return tfidf_weight(sum_freq, 1 + outside, stats.num_pages());
}

std::vector<std::pair<TermId, double>> categorical_profile(CategoryIndex c, const TermStats& stats,
                                                           const DescendantIndex& desc) {
  const auto f = desc.pages(c);
  if (f.empty()) throw DataError("category '" + desc.id(c) + "' has no descendant pages");
  std::map<TermId, std::pair<std::uint64_t, std::uint64_t>> acc;  // sum f, pages inside
  for (const auto p : f) {
    for (const auto& t : stats.page_terms(p)) {
      auto& slot = acc[t.index];
      slot.first += t.freq;
      ++slot.second;
    }
  }
  std::vector<std::pair<TermId, double>> out;
  for (const auto& [w, counts] : acc) {
    const double value = tfidf_weight(counts.first, 1 + (stats.df(w) - counts.second), stats.num_pages());
    if (value != 0.0) out.emplace_back(w, value);
  }
  return out;
}

std::vector<std::pair<CategoryIndex, double>> categorical_column(TermId w, const TermStats& stats,
                                                                 const DescendantIndex& desc) {
  std::map<CategoryIndex, std::pair<std::uint64_t, std::uint64_t>> acc;
  for (const auto& posting : stats.postings(w)) {
    for (const auto c : desc.containing(posting.index)) {
      auto& slot = acc[c];
      slot.first += posting.freq;
      ++slot.second;
    }
  }
  std::vector<std::pair<CategoryIndex, double>> out;
  for (const auto& [c, counts] : acc) {
    const double value = tfidf_weight(counts.first, 1 + (stats.df(w) - counts.second), stats.num_pages());
    if (value != 0.0) out.emplace_back(c, value);
  }
  return out;
}

}  // namespace tesa
