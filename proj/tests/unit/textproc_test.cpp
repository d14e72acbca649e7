#include <doctest.h>

#include <sstream>

#include "support.hpp"
#include "tesa/error.hpp"
#include "tesa/textproc.hpp"

using namespace tesa;

namespace {

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) out += (out.empty() ? "" : " ") + t;
  return out;
}

std::vector<SuffixRule> rules_from(const std::string& text) {
  std::istringstream in(text);
  return parse_suffix_rules(in);
}

}  // namespace

TEST_CASE("normalize_text: empty input") { CHECK(normalize_text("", PipelineConfig{}).empty()); }

TEST_CASE("normalize_text: stopwords removed, order kept") {
  PipelineConfig cfg;
  cfg.stopwords = {"the", "uses"};
  CHECK(normalize_text("The car uses the gasoline", cfg) == std::vector<std::string>{"car", "gasoline"});
}

TEST_CASE("normalize_text: suffix strip rule") {
  PipelineConfig cfg;
  cfg.suffix_rules = rules_from("-s\n");
  CHECK(normalize_text("voitures Voiture", cfg) == std::vector<std::string>{"voiture", "voiture"});
}

TEST_CASE("normalize_text: duplicates, punctuation and min length") {
  PipelineConfig cfg;
  cfg.min_token_len = 3;
  CHECK(normalize_text("A cat, a CAT; an ox-cart!", cfg) == std::vector<std::string>{"cat", "cat", "cart"});
}

TEST_CASE("normalize_text: UTF-8 bytes stay inside tokens") {
  CHECK(normalize_text("Été CAFÉ", PipelineConfig{}) == std::vector<std::string>{"\xc3\x89t\xc3\xa9", "caf\xc3\x89"});
}

TEST_CASE("normalize_text: lemmatizer runs before stemming and stopwords") {
  PipelineConfig cfg;
  cfg.stopwords = {"be"};
  cfg.suffix_rules = rules_from("ing -> \n");
  cfg.lemmatizer = NamedTransform{"toy", [](std::string_view t) {
                                    return t == "was" ? std::string("be") : t == "ran" ? std::string("running")
                                                                                       : std::string(t);
                                  }};
  CHECK(normalize_text("he was ran", cfg) == std::vector<std::string>{"he", "runn"});
}

TEST_CASE("normalize_text: a stem that is a stopword is dropped") {
  PipelineConfig cfg;
  cfg.stopwords = {"the"};
  cfg.suffix_rules = rules_from("se->\n");
  CHECK(normalize_text("these cats", cfg) == std::vector<std::string>{"cats"});
}

TEST_CASE("normalize_text is idempotent on its output (identity stemmer)") {
  Rng rng(11);
  PipelineConfig cfg;
  cfg.stopwords = {"ab", "ba", "c"};
  cfg.min_token_len = 2;
  const std::string alphabet = "abcAB9 ,.-";
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const auto len = uniform_below(rng, 40);
    for (std::uint64_t i = 0; i < len; ++i) text += alphabet[uniform_below(rng, alphabet.size())];
    const auto once = normalize_text(text, cfg);
    CHECK(normalize_text(join(once), cfg) == once);
    CHECK(normalize_text(text, cfg) == once);
  }
}

TEST_CASE("parse_suffix_rules") {
  const auto rules = rules_from("# comment\n\nies\xe2\x86\x92y\n-s\ning -> e\n");
  REQUIRE(rules.size() == 3);
  CHECK(rules[0].suffix == "ies");
  CHECK(rules[0].replacement == "y");
  CHECK(rules[1].suffix == "s");
  CHECK(rules[1].replacement.empty());
  CHECK(rules[2].suffix == "ing");
  CHECK(rules[2].replacement == "e");
  CHECK(apply_suffix_rules("ponies", rules) == "pony");
  CHECK(apply_suffix_rules("s", rules) == "s");
  CHECK_THROWS_AS(rules_from("nonsense\n"), ParseError);
}

TEST_CASE("parse_stopwords lowercases and skips blanks") {
  std::istringstream in("The\n\n  of \nAND\n");
  CHECK(parse_stopwords(in) == std::set<std::string>{"the", "of", "and"});
}

TEST_CASE("build_vocabulary on FIX-1") {
  const auto corpus = test::fix1();
  const auto vocab = build_vocabulary(corpus, PipelineConfig{});
  const test::DenseOracle oracle(corpus);
  REQUIRE(vocab.size() == 5);
  for (TermId id = 0; id < vocab.size(); ++id) {
    CHECK(vocab.term(id) == oracle.terms[id]);
    CHECK(vocab.find(oracle.terms[id]) == id);
    CHECK(static_cast<double>(vocab.frequency(id)) == oracle.tf.col(id).sum());
  }
  CHECK_FALSE(vocab.find("zeta"));
  CHECK(build_vocabulary(test::fix1(), PipelineConfig{}) == vocab);
}

TEST_CASE("build_vocabulary: pages empty after normalization") {
  Corpus corpus;
  corpus.root_id = "root";
  corpus.pages["p"] = PageRecord{"p", "", "the of", {}, {}};
  PipelineConfig cfg;
  cfg.stopwords = {"the", "of"};
  CHECK(build_vocabulary(corpus, cfg).size() == 0);
}
