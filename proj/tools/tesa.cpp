// tesa: build an ESA index over a page/category corpus, inspect its
// spanning tree, query (reinforced) relatedness and run evaluation sweeps.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "tesa/arborification.hpp"
#include "tesa/corpus.hpp"
#include "tesa/error.hpp"
#include "tesa/evaluation.hpp"
#include "tesa/index.hpp"
#include "tesa/reinforcement.hpp"
#include "tesa/textproc.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

using nlohmann::json;

std::ifstream open_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tesa::IoError("cannot read " + path);
  return in;
}

struct BuildArgs {
  std::string pages, categories, root, out;
  tesa::FilterThresholds thresholds;
  std::string stopwords, stem_rules;
  std::size_t min_token_len = 1;
};

int cmd_build(const BuildArgs& a) {
  auto loaded = tesa::load_corpus(a.pages, a.categories, a.root);
  const auto& r = loaded.report;
  if (r.warnings() > 0) {
    std::cerr << fmt::format("warning: dropped {} unknown page categories, {} unknown or self parents, {} unknown links\n",
                             r.dangling_categories, r.dangling_parents, r.dangling_links);
  }

  tesa::BuildOptions options;
  options.thresholds = a.thresholds;
  options.pipeline.min_token_len = a.min_token_len;
  if (!a.stopwords.empty()) {
    auto in = open_file(a.stopwords);
    options.pipeline.stopwords = tesa::parse_stopwords(in);
  }
  if (!a.stem_rules.empty()) {
    auto in = open_file(a.stem_rules);
    options.pipeline.suffix_rules = tesa::parse_suffix_rules(in);
  }

  const auto index = tesa::build_index(loaded.corpus, options);
  tesa::save_index(index, a.out);

  const auto& s = index.summary;
  std::cout << fmt::format("pages_in {}\n", s.pages_in) << fmt::format("pages {}\n", s.pages)
            << fmt::format("categories {}\n", s.categories) << fmt::format("terms {}\n", s.terms)
            << fmt::format("membership_edges {}\n", s.membership_edges)
            << fmt::format("subcategory_edges {}\n", s.subcategory_edges)
            << fmt::format("removed_edges {}\n", s.removed_edges)
            << fmt::format("degenerate_pages {}\n", s.degenerate_pages)
            << fmt::format("degenerate_categories {}\n", s.degenerate_categories)
            << fmt::format("tree_weight {}\n", tesa::format_exact(s.tree_weight));
  return 0;
}

tesa::TermId lookup_word(const tesa::EsaModel& model, const std::string& word) {
  const auto tokens = tesa::normalize_text(word, model.pipeline);
  if (tokens.size() != 1) throw tesa::DataError("word '" + word + "' is not in the vocabulary");
  const auto id = model.vocab.find(tokens.front());
  if (!id) throw tesa::DataError("word '" + word + "' is not in the vocabulary");
  return *id;
}

struct SimArgs {
  std::string index, word1, word2, lambda, mode = "inclusive";
};

int cmd_sim(const SimArgs& a) {
  const auto lambda = tesa::LambdaSchedule::parse(a.lambda);
  const auto mode = tesa::parse_support_mode(a.mode);
  const auto index = tesa::load_index(a.index);
  const auto w1 = lookup_word(index.model, a.word1);
  const auto w2 = lookup_word(index.model, a.word2);
  const double mu = lambda.is_zero() ? tesa::esa_relatedness(index.model, w1, w2)
                                     : tesa::reinforced_relatedness(index.model, index.ancestors, w1, w2, lambda, mode);
  std::cout << fmt::format("{:.6f}\n", mu);
  return 0;
}

struct TreeArgs {
  std::string index, page;
};

int cmd_tree(const TreeArgs& a) {
  const auto index = tesa::load_index(a.index);
  if (a.page.empty()) {
    tesa::write_tree_text(std::cout, index.tree);
  } else {
    for (const auto& name : tesa::ancestor_path(index.tree, a.page)) std::cout << name << '\n';
  }
  return 0;
}

struct EvalArgs {
  std::string index, eval, sweep, mode = "inclusive", export_path, out;
  std::vector<std::string> lambdas;
  std::size_t folds = 10;
  std::uint64_t seed = 42;
};

std::vector<tesa::LambdaSchedule> read_sweep(const std::string& path) {
  auto in = open_file(path);
  std::vector<tesa::LambdaSchedule> schedules;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    schedules.push_back(tesa::LambdaSchedule::parse(line));
  }
  return schedules;
}

int cmd_eval(const EvalArgs& a) {
  const auto mode = tesa::parse_support_mode(a.mode);
  std::vector<tesa::LambdaSchedule> schedules;
  for (const auto& text : a.lambdas) schedules.push_back(tesa::LambdaSchedule::parse(text));
  if (!a.sweep.empty()) {
    auto more = read_sweep(a.sweep);
    schedules.insert(schedules.end(), more.begin(), more.end());
  }
  if (schedules.empty()) schedules.emplace_back();
  if (!a.export_path.empty() && schedules.size() != 1)
    throw tesa::ConfigError("--export needs exactly one lambda schedule");

  const auto index = tesa::load_index(a.index);
  const auto corpus = tesa::load_eval_corpus(std::filesystem::path(a.eval));

  if (!a.export_path.empty()) {
    const auto data = tesa::embed_eval_corpus(index.model, index.ancestors, corpus, schedules.front(), mode);
    std::ofstream out(a.export_path, std::ios::trunc);
    if (!out) throw tesa::IoError("cannot write " + a.export_path);
    tesa::write_sparse_features(out, data);
    return 0;
  }

  std::vector<tesa::CrossValidationReport> reports;
  for (const auto& lambda : schedules)
    reports.push_back(tesa::cross_validate(index.model, index.ancestors, corpus, lambda, a.folds, a.seed, mode));
  const auto text = tesa::report_json(reports) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(a.out, std::ios::trunc);
    if (!(out << text)) throw tesa::IoError("cannot write " + a.out);
  }
  return 0;
}

struct StatsArgs {
  std::string index, graph, sink;
  std::uint64_t seed = 42;
  std::size_t starts = 1000;
};

json histogram_json(const std::map<std::size_t, std::size_t>& h) {
  auto out = json::array();
  for (const auto& [degree, count] : h) out.push_back({degree, count});
  return out;
}

int cmd_stats(const StatsArgs& a) {
  tesa::WeightedDigraph graph;
  if (!a.graph.empty()) {
    auto in = open_file(a.graph);
    graph = tesa::read_edge_list(in, a.sink.empty() ? std::nullopt : std::optional<std::string>(a.sink));
  } else {
    graph = tesa::load_index(a.index).raw_graph;
  }
  const auto degrees = tesa::degree_distribution(graph);
  const auto census = tesa::random_walk_cycle_census(graph, a.seed, a.starts);
  const auto alpha = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  std::size_t categories = 0;
  for (tesa::NodeId n = 0; n < graph.num_nodes(); ++n) categories += graph.kind(n) == tesa::NodeKind::category;

  const json report = {{"nodes", graph.num_nodes()},
                       {"edges", graph.num_edges()},
                       {"categories", categories},
                       {"in_degree", histogram_json(degrees.in_histogram)},
                       {"out_degree", histogram_json(degrees.out_histogram)},
                       {"alpha_in", alpha(degrees.alpha_in)},
                       {"alpha_out", alpha(degrees.alpha_out)},
                       {"census",
                        {{"seed", a.seed},
                         {"walks", census.walks},
                         {"walks_with_cycle", census.walks_with_cycle},
                         {"fraction", census.paths_with_cycle_fraction},
                         {"cycles", census.cycles}}}};
  std::cout << report.dump(2) << '\n';
  return 0;
}

int exit_code(tesa::ErrorKind kind) {
  switch (kind) {
    case tesa::ErrorKind::config: return kExitUsage;
    case tesa::ErrorKind::other: return kExitInternal;
    default: return kExitData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explicit semantic analysis with thematic reinforcement from a category tree"};
  app.set_config("--config", "", "TOML/INI file with option defaults; flags take precedence");
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Filter the corpus, compute weights and extract the category tree");
  b->add_option("--pages", build.pages, "pages.jsonl")->required()->check(CLI::ExistingFile);
  b->add_option("--categories", build.categories, "categories.jsonl")->required()->check(CLI::ExistingFile);
  b->add_option("--root", build.root, "Root category id")->required();
  b->add_option("--out", build.out, "Index directory")->required();
  b->add_option("--min-words", build.thresholds.min_words, "Minimum distinct normalized words per page")
      ->capture_default_str();
  b->add_option("--min-links-in", build.thresholds.min_links_in, "Minimum incoming links")->capture_default_str();
  b->add_option("--min-links-out", build.thresholds.min_links_out, "Minimum outgoing links")->capture_default_str();
  b->add_option("--stopwords", build.stopwords, "Stopword list, one per line")->check(CLI::ExistingFile);
  b->add_option("--stem-rules", build.stem_rules, "Suffix rules, suffix->replacement per line")
      ->check(CLI::ExistingFile);
  b->add_option("--min-token-len", build.min_token_len, "Drop shorter tokens")->capture_default_str();

  SimArgs sim;
  auto* s = app.add_subcommand("sim", "Relatedness of two words");
  s->add_option("index", sim.index, "Index directory")->required();
  s->add_option("word1", sim.word1)->required();
  s->add_option("word2", sim.word2)->required();
  s->add_option("--lambda", sim.lambda, "Comma-separated lambda_1..lambda_k; empty for standard ESA");
  s->add_option("--mode", sim.mode, "inclusive or exclusive")->capture_default_str();

  TreeArgs tree;
  auto* t = app.add_subcommand("tree", "Print the spanning tree, or one page's ancestors");
  t->add_option("index", tree.index, "Index directory")->required();
  t->add_option("--page", tree.page, "Page id");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Cross-validated nearest-centroid classification per lambda schedule");
  e->add_option("index", eval.index, "Index directory")->required();
  e->add_option("--eval", eval.eval, "eval.jsonl")->required()->check(CLI::ExistingFile);
  e->add_option("--lambda", eval.lambdas, "Lambda schedule; repeatable")->allow_extra_args(false);
  e->add_option("--sweep", eval.sweep, "File with one lambda schedule per line")->check(CLI::ExistingFile);
  e->add_option("--folds", eval.folds)->capture_default_str();
  e->add_option("--seed", eval.seed)->capture_default_str();
  e->add_option("--mode", eval.mode, "inclusive or exclusive")->capture_default_str();
  e->add_option("--export", eval.export_path, "Write sparse features for the single schedule instead");
  e->add_option("--out", eval.out, "Write the JSON report here instead of stdout");

  StatsArgs stats;
  auto* st = app.add_subcommand("stats", "Category degree distribution, power-law fit and cycle census");
  auto* idx_opt = st->add_option("index", stats.index, "Index directory");
  auto* graph_opt = st->add_option("--graph", stats.graph, "Edge list instead of an index")->check(CLI::ExistingFile);
  idx_opt->excludes(graph_opt);
  st->add_option("--sink", stats.sink, "Sink node of --graph");
  st->add_option("--seed", stats.seed)->capture_default_str();
  st->add_option("--starts", stats.starts, "Random walks")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*b) return cmd_build(build);
    if (*s) return cmd_sim(sim);
    if (*t) return cmd_tree(tree);
    if (*e) return cmd_eval(eval);
    if (*st) {
      if (stats.index.empty() && stats.graph.empty()) {
        std::cerr << "error: stats needs an index directory or --graph\n";
        return kExitUsage;
      }
      return cmd_stats(stats);
    }
  } catch (const tesa::StageError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return exit_code(err.kind());
  } catch (const tesa::ConfigError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const tesa::Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitData;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
