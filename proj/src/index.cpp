#include "tesa/index.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace tesa {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class F>
auto run_stage(const char* stage, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError& e) {
    throw StageError(stage, e.what(), ErrorKind::config);
  } catch (const ParseError& e) {
    throw StageError(stage, e.what(), ErrorKind::parse);
  } catch (const DataError& e) {
    throw StageError(stage, e.what(), ErrorKind::data);
  } catch (const IoError& e) {
    throw StageError(stage, e.what(), ErrorKind::io);
  } catch (const std::exception& e) {
    throw StageError(stage, e.what(), ErrorKind::other);
  }
}

}  // namespace

TesaIndex build_index(const Corpus& corpus, const BuildOptions& options) {
  TesaIndex index;
  index.root_id = corpus.root_id;
  index.thresholds = options.thresholds;
  index.corpus_hash = corpus_hash(corpus);
  index.summary.pages_in = corpus.pages.size();

  const Corpus filtered =
      run_stage("filter", [&] { return filter_corpus(corpus, options.pipeline, options.thresholds); });

  const EsaModel first = run_stage("vocabulary", [&] { return build_esa_model(filtered, options.pipeline); });
  index.raw_graph = run_stage("weights", [&] { return build_weighted_digraph(filtered, first); });

  const auto broken = run_stage("break_cycles", [&] { return break_cycles(index.raw_graph); });
  index.removed_edges = broken.removed;

  std::vector<std::pair<std::string, std::string>> removed_names;
  for (const auto& e : broken.removed) {
    if (e.source != e.target) removed_names.emplace_back(index.raw_graph.name(e.source), index.raw_graph.name(e.target));
  }
  const Corpus acyclic = remove_subcategory_edges(filtered, removed_names);

  index.model = first;
  DigraphBuildReport report;
  index.graph = run_stage("reweight", [&] {
    index.model.descendants = DescendantIndex::build(acyclic);
    return build_weighted_digraph(acyclic, index.model, &report);
  });

  index.tree = run_stage("tree", [&] { return max_spanning_intree(index.graph, *index.graph.sink()); });
  index.ancestors = run_stage("ancestors", [&] { return AncestorTable(index.model, index.tree); });

  auto& s = index.summary;
  s.pages = filtered.pages.size();
  s.categories = filtered.categories.size();
  s.terms = index.model.vocab.size();
  for (const auto& [id, page] : filtered.pages) s.membership_edges += page.categories.size();
  for (const auto& [id, cat] : filtered.categories) s.subcategory_edges += cat.parents.size();
  s.removed_edges = index.removed_edges.size();
  s.degenerate_pages = report.degenerate_pages;
  s.degenerate_categories = report.degenerate_categories;
  s.tree_weight = index.tree.total_weight;
  return index;
}

namespace {

constexpr std::array<char, 8> kPostingsMagic = {'T', 'E', 'S', 'A', 'P', 'S', 'T', '1'};

const std::array<const char*, 10> kIndexFiles = {"manifest.json", "pipeline.json", "pages.tsv", "terms.tsv",
                                                 "postings.bin",  "categories.tsv", "graph_raw.txt",
                                                 "removed_edges.txt", "graph.txt", "tree.txt"};

json pipeline_json(const PipelineConfig& cfg) {
  json rules = json::array();
  for (const auto& r : cfg.suffix_rules) rules.push_back({r.suffix, r.replacement});
  return {{"stopwords", cfg.stopwords},
          {"stemmer", cfg.stemmer_name()},
          {"suffix_rules", rules},
          {"min_token_len", cfg.min_token_len},
          {"lemmatizer", cfg.lemmatizer ? json(cfg.lemmatizer->name) : json(nullptr)}};
}

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot read " + path.string());
  return in;
}

void close_checked(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

class ByteReader {
 public:
  explicit ByteReader(std::string data) : data_(std::move(data)) {}

  std::uint64_t get(int bytes) {
    if (pos_ + static_cast<std::size_t>(bytes) > data_.size()) throw DataError("postings.bin is truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    return v;
  }
  std::string_view take(std::size_t n) {
    if (pos_ + n > data_.size()) throw DataError("postings.bin is truncated");
    std::string_view s(data_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

template <class T>
T parse_number(std::string_view text, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw DataError(std::string("bad ") + what + " '" + std::string(text) + "'");
  return v;
}

void read_edges_into(std::istream& in, WeightedDigraph& g, std::vector<WeightedEdge>* sink_list = nullptr) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string source, target;
    double weight;
    if (!(fields >> source >> target >> weight)) throw ParseError("expected 'source target weight'", line_no);
    const WeightedEdge e{g.at(source), g.at(target), weight};
    if (sink_list)
      sink_list->push_back(e);
    else
      g.add_edge(e.source, e.target, e.weight);
  }
}

/// Renumbers a parsed tree so node ids follow the graph's node order, as a
/// freshly built tree does; total_weight is then summed in the same order.
SpanningTree align_tree(const SpanningTree& parsed, const WeightedDigraph& g) {
  if (parsed.names.size() != g.num_nodes())
    throw DataError(fmt::format("tree.txt covers {} nodes, graph has {}", parsed.names.size(), g.num_nodes()));
  std::vector<NodeId> to_graph(parsed.names.size());
  for (NodeId n = 0; n < parsed.names.size(); ++n) {
    const auto id = g.find(parsed.names[n]);
    if (!id) throw DataError("tree.txt names unknown node '" + parsed.names[n] + "'");
    to_graph[n] = *id;
  }
  SpanningTree tree;
  tree.names.resize(g.num_nodes());
  tree.kinds.resize(g.num_nodes());
  tree.parent.resize(g.num_nodes());
  tree.parent_weight.resize(g.num_nodes());
  tree.root = to_graph[parsed.root];
  for (NodeId n = 0; n < parsed.names.size(); ++n) {
    const auto m = to_graph[n];
    tree.names[m] = g.name(m);
    tree.kinds[m] = g.kind(m);
    tree.parent[m] = to_graph[parsed.parent[n]];
    tree.parent_weight[m] = parsed.parent_weight[n];
  }
  for (NodeId n = 0; n < tree.names.size(); ++n) {
    if (n != tree.root) tree.total_weight += tree.parent_weight[n];
  }
  return tree;
}

WeightedDigraph empty_graph(const TesaIndex& index) {
  WeightedDigraph g;
  for (const auto& id : index.model.page_ids) g.add_node(id, NodeKind::page);
  for (const auto& id : index.model.descendants.ids()) g.add_node(id, NodeKind::category);
  g.set_sink(g.at(index.root_id));
  return g;
}

}  // namespace

std::uint64_t pipeline_hash(const PipelineConfig& cfg) { return fnv1a64(pipeline_json(cfg).dump()); }

void save_index(const TesaIndex& index, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const auto& model = index.model;

  {
    const auto path = dir / "pipeline.json";
    auto out = open_out(path);
    out << pipeline_json(model.pipeline).dump(2) << '\n';
    close_checked(out, path);
  }
  {
    const auto path = dir / "pages.tsv";
    auto out = open_out(path);
    for (std::size_t p = 0; p < model.page_ids.size(); ++p) out << p << '\t' << model.page_ids[p] << '\n';
    close_checked(out, path);
  }
  {
    const auto path = dir / "terms.tsv";
    auto out = open_out(path);
    for (TermId w = 0; w < model.vocab.size(); ++w)
      out << w << '\t' << model.vocab.term(w) << '\t' << model.vocab.frequency(w) << '\t' << model.stats.df(w) << '\n';
    close_checked(out, path);
  }
  {
    std::string buf(kPostingsMagic.begin(), kPostingsMagic.end());
    put_u64(buf, model.stats.num_pages());
    put_u64(buf, model.stats.num_terms());
    for (PageIndex p = 0; p < model.stats.num_pages(); ++p) {
      const auto terms = model.stats.page_terms(p);
      put_u32(buf, static_cast<std::uint32_t>(terms.size()));
      for (const auto& t : terms) {
        put_u32(buf, t.index);
        put_u32(buf, t.freq);
      }
    }
    const auto path = dir / "postings.bin";
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    close_checked(out, path);
  }
  {
    const auto path = dir / "categories.tsv";
    auto out = open_out(path);
    for (CategoryIndex c = 0; c < model.descendants.size(); ++c) {
      out << model.descendants.id(c) << '\t';
      const auto pages = model.descendants.pages(c);
      for (std::size_t k = 0; k < pages.size(); ++k) out << (k ? "," : "") << pages[k];
      out << '\n';
    }
    close_checked(out, path);
  }
  {
    const auto path = dir / "graph_raw.txt";
    auto out = open_out(path);
    write_edge_list(out, index.raw_graph);
    close_checked(out, path);
  }
  {
    const auto path = dir / "removed_edges.txt";
    auto out = open_out(path);
    for (const auto& e : index.removed_edges)
      out << index.raw_graph.name(e.source) << ' ' << index.raw_graph.name(e.target) << ' ' << format_exact(e.weight)
          << '\n';
    close_checked(out, path);
  }
  {
    const auto path = dir / "graph.txt";
    auto out = open_out(path);
    write_edge_list(out, index.graph);
    close_checked(out, path);
  }
  {
    const auto path = dir / "tree.txt";
    auto out = open_out(path);
    write_tree_text(out, index.tree);
    close_checked(out, path);
  }

  const auto& s = index.summary;
  const json manifest = {
      {"format_version", kIndexFormatVersion},
      {"corpus_hash", hex64(index.corpus_hash)},
      {"pipeline_hash", hex64(pipeline_hash(model.pipeline))},
      {"root", index.root_id},
      {"thresholds",
       {{"min_words", index.thresholds.min_words},
        {"min_links_in", index.thresholds.min_links_in},
        {"min_links_out", index.thresholds.min_links_out}}},
      {"files", std::vector<std::string>(kIndexFiles.begin() + 1, kIndexFiles.end())},
      {"counts",
       {{"pages_in", s.pages_in},
        {"pages", s.pages},
        {"categories", s.categories},
        {"terms", s.terms},
        {"membership_edges", s.membership_edges},
        {"subcategory_edges", s.subcategory_edges},
        {"removed_edges", s.removed_edges},
        {"degenerate_pages", s.degenerate_pages},
        {"degenerate_categories", s.degenerate_categories}}},
      {"tree_weight", format_exact(s.tree_weight)}};
  const auto path = dir / "manifest.json";
  auto out = open_out(path);
  out << manifest.dump(2) << '\n';
  close_checked(out, path);
}

TesaIndex load_index(const fs::path& dir, const TransformRegistry& registry) {
  if (!fs::is_directory(dir)) throw IoError("index directory not found: " + dir.string());
  TesaIndex index;

  json manifest;
  try {
    auto in = open_in(dir / "manifest.json");
    manifest = json::parse(in);
    const auto version = manifest.at("format_version").get<int>();
    if (version != kIndexFormatVersion)
      throw ConfigError("index format version " + std::to_string(version) + " is not supported (expected " +
                        std::to_string(kIndexFormatVersion) + ")");
    index.root_id = manifest.at("root").get<std::string>();
    index.corpus_hash = std::stoull(manifest.at("corpus_hash").get<std::string>(), nullptr, 16);
    const auto& t = manifest.at("thresholds");
    index.thresholds = {t.at("min_words").get<std::size_t>(), t.at("min_links_in").get<std::size_t>(),
                        t.at("min_links_out").get<std::size_t>()};
    const auto& c = manifest.at("counts");
    auto& s = index.summary;
    s.pages_in = c.at("pages_in").get<std::size_t>();
    s.pages = c.at("pages").get<std::size_t>();
    s.categories = c.at("categories").get<std::size_t>();
    s.terms = c.at("terms").get<std::size_t>();
    s.membership_edges = c.at("membership_edges").get<std::size_t>();
    s.subcategory_edges = c.at("subcategory_edges").get<std::size_t>();
    s.removed_edges = c.at("removed_edges").get<std::size_t>();
    s.degenerate_pages = c.at("degenerate_pages").get<std::size_t>();
    s.degenerate_categories = c.at("degenerate_categories").get<std::size_t>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed manifest.json: ") + e.what());
  }

  auto& model = index.model;
  try {
    auto in = open_in(dir / "pipeline.json");
    const auto p = json::parse(in);
    model.pipeline.stopwords = p.at("stopwords").get<std::set<std::string>>();
    for (const auto& rule : p.at("suffix_rules"))
      model.pipeline.suffix_rules.push_back({rule.at(0).get<std::string>(), rule.at(1).get<std::string>()});
    model.pipeline.min_token_len = p.at("min_token_len").get<std::size_t>();
    if (!p.at("lemmatizer").is_null()) {
      const auto name = p.at("lemmatizer").get<std::string>();
      const auto it = registry.find(name);
      if (it == registry.end()) throw ConfigError("index uses lemmatizer '" + name + "', which is not registered");
      model.pipeline.lemmatizer = it->second;
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed pipeline.json: ") + e.what());
  }
  if (hex64(pipeline_hash(model.pipeline)) != manifest.value("pipeline_hash", ""))
    throw DataError("pipeline.json does not match the manifest");

  {
    auto in = open_in(dir / "pages.tsv");
    std::string line;
    while (std::getline(in, line)) {
      const auto fields = split(line, '\t');
      if (fields.size() != 2 || parse_number<std::size_t>(fields[0], "page index") != model.page_ids.size())
        throw DataError("malformed pages.tsv line " + std::to_string(model.page_ids.size() + 1));
      model.page_ids.push_back(fields[1]);
    }
  }
  {
    auto in = open_in(dir / "terms.tsv");
    std::map<std::string, std::uint64_t> freqs;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      const auto fields = split(line, '\t');
      if (fields.size() != 4 || parse_number<std::size_t>(fields[0], "term id") != n)
        throw DataError("malformed terms.tsv line " + std::to_string(n + 1));
      freqs.emplace(fields[1], parse_number<std::uint64_t>(fields[2], "frequency"));
      ++n;
    }
    if (freqs.size() != n) throw DataError("terms.tsv has duplicate terms");
    model.vocab = Vocabulary(freqs);
  }
  {
    auto in = open_in(dir / "postings.bin", std::ios::in | std::ios::binary);
    ByteReader bytes(std::string(std::istreambuf_iterator<char>(in), {}));
    if (bytes.take(kPostingsMagic.size()) != std::string_view(kPostingsMagic.data(), kPostingsMagic.size()))
      throw DataError("postings.bin has a bad magic number");
    const auto num_pages = bytes.get(8);
    const auto num_terms = bytes.get(8);
    if (num_pages != model.page_ids.size() || num_terms != model.vocab.size())
      throw DataError("postings.bin does not match pages.tsv/terms.tsv");
    std::vector<std::vector<Posting>> page_terms(num_pages);
    for (auto& terms : page_terms) {
      const auto count = bytes.get(4);
      for (std::uint64_t k = 0; k < count; ++k) {
        const auto term = static_cast<std::uint32_t>(bytes.get(4));
        const auto freq = static_cast<std::uint32_t>(bytes.get(4));
        terms.push_back({term, freq});
      }
    }
    if (!bytes.done()) throw DataError("postings.bin has trailing bytes");
    model.stats = TermStats(num_terms, std::move(page_terms));
  }
  {
    auto in = open_in(dir / "categories.tsv");
    std::vector<std::string> ids;
    std::vector<std::vector<PageIndex>> pages;
    std::string line;
    while (std::getline(in, line)) {
      const auto fields = split(line, '\t');
      if (fields.size() != 2) throw DataError("malformed categories.tsv line " + std::to_string(ids.size() + 1));
      ids.push_back(fields[0]);
      auto& list = pages.emplace_back();
      if (!fields[1].empty()) {
        for (const auto& p : split(fields[1], ','))
          list.push_back(parse_number<PageIndex>(p, "page index"));
      }
    }
    model.descendants = DescendantIndex(std::move(ids), std::move(pages), model.page_ids.size());
  }

  index.raw_graph = empty_graph(index);
  {
    auto in = open_in(dir / "graph_raw.txt");
    read_edges_into(in, index.raw_graph);
  }
  {
    auto in = open_in(dir / "removed_edges.txt");
    read_edges_into(in, index.raw_graph, &index.removed_edges);
  }
  index.graph = empty_graph(index);
  {
    auto in = open_in(dir / "graph.txt");
    read_edges_into(in, index.graph);
  }
  {
    auto in = open_in(dir / "tree.txt");
    const std::set<std::string, std::less<>> pages(model.page_ids.begin(), model.page_ids.end());
    index.tree = align_tree(read_tree_text(in, [&](std::string_view name) { return pages.contains(name); }), index.graph);
  }
  if (index.tree.names[index.tree.root] != index.root_id)
    throw DataError("tree.txt is rooted at '" + index.tree.names[index.tree.root] + "', expected '" + index.root_id +
                    "'");
  index.summary.tree_weight = index.tree.total_weight;
  index.ancestors = AncestorTable(model, index.tree);
  return index;
}

}  // namespace tesa
