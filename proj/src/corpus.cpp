#include "tesa/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tesa/error.hpp"
#include "tesa/textproc.hpp"

namespace tesa {
namespace {

using nlohmann::json;

json parse_line(const std::string& line, std::size_t line_no) {
  try {
    auto value = json::parse(line);
    if (!value.is_object()) throw ParseError("expected a JSON object", line_no);
    return value;
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
  }
}

std::string get_string(const json& obj, const char* key, std::size_t line_no, bool required) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (required) throw ParseError(std::string("missing field '") + key + "'", line_no);
    return {};
  }
  if (!it->is_string()) throw ParseError(std::string("field '") + key + "' must be a string", line_no);
  return it->get<std::string>();
}

std::vector<std::string> get_string_list(const json& obj, const char* key, std::size_t line_no) {
  std::vector<std::string> out;
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) throw ParseError(std::string("field '") + key + "' must be an array", line_no);
  std::set<std::string> seen;
  for (const auto& item : *it) {
    if (!item.is_string()) throw ParseError(std::string("field '") + key + "' must hold strings", line_no);
    auto s = item.get<std::string>();
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

std::string get_id(const json& obj, const char* key, std::size_t line_no) {
  auto id = get_string(obj, key, line_no, true);
  if (id.empty()) throw ParseError(std::string("field '") + key + "' is empty", line_no);
  if (id.find_first_of(" \t\r\n") != std::string::npos)
    throw ParseError("id '" + id + "' contains whitespace", line_no);
  return id;
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    fn(line, line_no);
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

template <typename Pred>
std::vector<std::string> keep_if(const std::vector<std::string>& ids, Pred&& keep, std::size_t& dropped) {
  std::vector<std::string> out;
  for (const auto& id : ids) {
    if (keep(id)) {
      out.push_back(id);
    } else {
      ++dropped;
    }
  }
  return out;
}

}  // namespace

LoadedCorpus load_corpus(std::istream& pages, std::istream& categories, const std::string& root_id) {
  LoadedCorpus result;
  auto& corpus = result.corpus;
  auto& report = result.report;

  for_each_line(categories, [&](const std::string& line, std::size_t line_no) {
    const auto obj = parse_line(line, line_no);
    CategoryRecord rec;
    rec.id = get_id(obj, "id", line_no);
    rec.title = get_string(obj, "title", line_no, false);
    rec.parents = get_string_list(obj, "parents", line_no);
    const auto id = rec.id;
    if (!corpus.categories.emplace(id, std::move(rec)).second)
      throw ParseError("duplicate category id '" + id + "'", line_no);
  });
  for_each_line(pages, [&](const std::string& line, std::size_t line_no) {
    const auto obj = parse_line(line, line_no);
    PageRecord rec;
    rec.id = get_id(obj, "id", line_no);
    rec.title = get_string(obj, "title", line_no, false);
    rec.text = get_string(obj, "text", line_no, false);
    rec.links_out = get_string_list(obj, "links_out", line_no);
    rec.categories = get_string_list(obj, "categories", line_no);
    const auto id = rec.id;
    if (!corpus.pages.emplace(id, std::move(rec)).second)
      throw ParseError("duplicate page id '" + id + "'", line_no);
  });

  if (root_id.empty() || !corpus.categories.contains(root_id))
    throw ConfigError("root category '" + root_id + "' not found");
  corpus.root_id = root_id;

  for (auto& [id, cat] : corpus.categories) {
    cat.parents = keep_if(
        cat.parents, [&](const std::string& p) { return p != id && corpus.categories.contains(p); },
        report.dangling_parents);
  }
  for (auto& [id, page] : corpus.pages) {
    page.categories = keep_if(
        page.categories, [&](const std::string& c) { return corpus.categories.contains(c); },
        report.dangling_categories);
    page.links_out = keep_if(
        page.links_out, [&](const std::string& p) { return corpus.pages.contains(p); },
        report.dangling_links);
  }
  return result;
}

LoadedCorpus load_corpus(const std::filesystem::path& pages_path,
                         const std::filesystem::path& categories_path, const std::string& root_id) {
  auto pages = open_input(pages_path);
  auto categories = open_input(categories_path);
  return load_corpus(pages, categories, root_id);
}

void save_corpus(const Corpus& corpus, std::ostream& pages, std::ostream& categories) {
  for (const auto& [id, page] : corpus.pages) {
    json obj = {{"id", page.id},
                {"title", page.title},
                {"text", page.text},
                {"links_out", page.links_out},
                {"categories", page.categories}};
    pages << obj.dump() << '\n';
  }
  for (const auto& [id, cat] : corpus.categories) {
    json obj = {{"id", cat.id}, {"title", cat.title}, {"parents", cat.parents}};
    categories << obj.dump() << '\n';
  }
}

Corpus filter_corpus(const Corpus& corpus, const PipelineConfig& cfg, const FilterThresholds& thresholds) {
  std::vector<std::string> ids;
  std::map<std::string, std::size_t> index;
  for (const auto& [id, page] : corpus.pages) {
    index.emplace(id, ids.size());
    ids.push_back(id);
  }
  const std::size_t n = ids.size();

  std::vector<std::size_t> distinct_words(n);
  std::vector<std::vector<std::size_t>> out_links(n);
  {
    std::size_t i = 0;
    for (const auto& [id, page] : corpus.pages) {
      auto tokens = normalize_text(page.text, cfg);
      std::sort(tokens.begin(), tokens.end());
      distinct_words[i] =
          static_cast<std::size_t>(std::unique(tokens.begin(), tokens.end()) - tokens.begin());
      for (const auto& target : page.links_out) {
        const auto it = index.find(target);
        if (it != index.end() && it->second != i) out_links[i].push_back(it->second);
      }
      std::sort(out_links[i].begin(), out_links[i].end());
      out_links[i].erase(std::unique(out_links[i].begin(), out_links[i].end()), out_links[i].end());
      ++i;
    }
  }

  std::vector<char> alive(n);
  for (std::size_t i = 0; i < n; ++i) alive[i] = distinct_words[i] >= thresholds.min_words;

  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::size_t> in_count(n, 0), out_count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (const auto j : out_links[i]) {
        if (!alive[j]) continue;
        ++out_count[i];
        ++in_count[j];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (alive[i] && (in_count[i] < thresholds.min_links_in || out_count[i] < thresholds.min_links_out)) {
        alive[i] = 0;
        changed = true;
      }
    }
  }

  Corpus out;
  out.root_id = corpus.root_id;
  for (std::size_t i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    PageRecord page = corpus.pages.at(ids[i]);
    std::erase_if(page.links_out, [&](const std::string& t) { return !alive[index.at(t)]; });
    out.pages.emplace(page.id, std::move(page));
  }
  if (out.pages.empty()) throw DataError("empty corpus: filter removed every page");

  // Categories reachable upward from a surviving page have nonempty F(c).
  std::set<std::string> keep{corpus.root_id};
  std::queue<std::string> frontier;
  for (const auto& [id, page] : out.pages) {
    for (const auto& c : page.categories) {
      if (keep.insert(c).second) frontier.push(c);
    }
  }
  while (!frontier.empty()) {
    const auto c = frontier.front();
    frontier.pop();
    for (const auto& p : corpus.categories.at(c).parents) {
      if (keep.insert(p).second) frontier.push(p);
    }
  }
  for (const auto& [id, cat] : corpus.categories) {
    if (!keep.contains(id)) continue;
    CategoryRecord copy = cat;
    std::erase_if(copy.parents, [&](const std::string& p) { return !keep.contains(p); });
    out.categories.emplace(id, std::move(copy));
  }
  return out;
}

Corpus remove_subcategory_edges(const Corpus& corpus,
                                const std::vector<std::pair<std::string, std::string>>& child_parent) {
  Corpus out = corpus;
  for (const auto& [child, parent] : child_parent) {
    const auto it = out.categories.find(child);
    if (it == out.categories.end()) continue;
    std::erase(it->second.parents, parent);
  }
  return out;
}

std::size_t EvalCorpus::label_index(const LabeledDocument& doc) const {
  const auto it = std::lower_bound(classes.begin(), classes.end(), doc.label);
  if (it == classes.end() || *it != doc.label) throw DataError("unknown label '" + doc.label + "'");
  return static_cast<std::size_t>(it - classes.begin());
}

EvalCorpus load_eval_corpus(std::istream& in) {
  EvalCorpus out;
  std::set<std::string> seen;
  std::set<std::string> labels;
  for_each_line(in, [&](const std::string& line, std::size_t line_no) {
    const auto obj = parse_line(line, line_no);
    LabeledDocument doc;
    doc.doc_id = get_id(obj, "doc_id", line_no);
    doc.label = get_string(obj, "label", line_no, true);
    if (doc.label.empty()) throw ParseError("field 'label' is empty", line_no);
    doc.text = get_string(obj, "text", line_no, false);
    if (!seen.insert(doc.doc_id).second)
      throw DataError("line " + std::to_string(line_no) + ": duplicate doc_id '" + doc.doc_id + "'");
    labels.insert(doc.label);
    out.documents.push_back(std::move(doc));
  });
  if (out.documents.empty()) throw DataError("evaluation corpus is empty");
  out.classes.assign(labels.begin(), labels.end());
  return out;
}

EvalCorpus load_eval_corpus(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_eval_corpus(in);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t corpus_hash(const Corpus& corpus) {
  std::ostringstream pages, categories;
  save_corpus(corpus, pages, categories);
  auto h = fnv1a64(pages.str());
  h = fnv1a64(categories.str(), h);
  return fnv1a64(corpus.root_id, h);
}

}  // namespace tesa
