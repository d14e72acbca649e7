#include <doctest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"
#include "tesa/error.hpp"
#include "tesa/sparse_vector.hpp"
#include "tesa/vectors.hpp"

using namespace tesa;

namespace {

SparseVectorXd random_sparse(Rng& rng, Eigen::Index dim) {
  std::vector<std::pair<Eigen::Index, double>> entries;
  std::uniform_real_distribution<double> value(-2.0, 2.0);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (uniform_below(rng, 3) == 0) entries.emplace_back(i, value(rng));
  }
  return SparseVectorXd::from_entries(dim, entries);
}

}  // namespace

TEST_CASE("SparseVector construction invariants") {
  const auto v = SparseVectorXd::from_entries(5, {{0, 1.0}, {2, 0.0}, {4, -3.0}});
  CHECK(v.nonZeros() == 2);
  CHECK(v.index(1) == 4);
  CHECK(v.norm() == std::sqrt(10.0));
  CHECK_THROWS(SparseVectorXd::from_entries(5, {{2, 1.0}, {1, 1.0}}));
  CHECK_THROWS(SparseVectorXd::from_entries(5, {{1, 1.0}, {1, 1.0}}));
  CHECK_THROWS(SparseVectorXd::from_entries(5, {{5, 1.0}}));
  Eigen::VectorXd dense(3);
  dense << 0.0, 2.0, 0.0;
  CHECK(SparseVectorXd::from_dense(dense).entries() == std::vector<std::pair<Eigen::Index, double>>{{1, 2.0}});
}

TEST_CASE("cosine examples") {
  const auto u = SparseVectorXd::from_entries(2, {{0, 1.0}, {1, 1.0}});
  const auto v = SparseVectorXd::from_entries(2, {{0, 1.0}});
  CHECK(cosine(u, v) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(cosine(u, u) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine(v, SparseVectorXd::from_entries(2, {{1, 3.0}})) == 0.0);
  CHECK(cosine(u, SparseVectorXd(2)) == 0.0);
}

TEST_CASE("sparse operations agree with dense arithmetic") {
  Rng rng(17);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index dim = 1 + static_cast<Eigen::Index>(uniform_below(rng, 30));
    const auto u = random_sparse(rng, dim);
    const auto v = random_sparse(rng, dim);
    const Eigen::VectorXd du = u.toDense(), dv = v.toDense();
    CHECK(std::abs(dot(u, v) - du.dot(dv)) <= 1e-12);
    CHECK(std::abs(u.norm() - du.norm()) <= 1e-12 * std::max(1.0, du.norm()));
    CHECK(std::abs(cosine(u, v) - test::dense_cosine(du, dv)) <= 1e-12);
    CHECK(cosine(u, v) == cosine(v, u));
    const double alpha = scale(rng);
    CHECK(std::abs(cosine(alpha * u, v) - cosine(u, v)) <= 1e-12);
    if (!u.isZero()) CHECK(std::abs(normalized(u).norm() - 1.0) <= 1e-12);

    SparseAccumulator<double> acc(dim);
    acc.add(2.0, u);
    acc.add(-0.5, v);
    CHECK(test::max_abs_diff(acc.finish(), 2.0 * du - 0.5 * dv) <= 1e-12);
  }
}

TEST_CASE("concept vectors on FIX-1") {
  const auto corpus = test::fix1();
  const auto model = build_esa_model(corpus, PipelineConfig{});
  const test::DenseOracle oracle(corpus);

  const auto alpha = concept_vector(model, model.term_id("alpha"));
  REQUIRE(alpha.nonZeros() == 1);
  CHECK(alpha.index(0) == model.page_index("p1"));
  CHECK(alpha.value(0) == (1 + std::log(2.0)) * std::log(4.0));
  CHECK(concept_vector(model, model.term_id("beta")).isZero());

  const auto all = concept_vectors(model);
  for (TermId w = 0; w < model.vocab.size(); ++w) {
    CHECK(all[w] == concept_vector(model, w));
    CHECK(test::max_abs_diff(all[w], oracle.concept_vec(w)) <= 1e-9);
    if (model.stats.df(w) < model.num_pages()) CHECK(all[w].nonZeros() == model.stats.df(w));
  }
  CHECK_THROWS_AS(model.term_id("zeta"), DataError);
}

TEST_CASE("esa_relatedness on FIX-1") {
  const auto corpus = test::fix1();
  const auto model = build_esa_model(corpus, PipelineConfig{});
  const test::DenseOracle oracle(corpus);
  const auto alpha = model.term_id("alpha"), gamma = model.term_id("gamma");
  const double expected = test::dense_cosine(oracle.concept_vec(alpha), oracle.concept_vec(gamma));
  CHECK(esa_relatedness(model, alpha, gamma) == doctest::Approx(expected).epsilon(1e-12));
  // gamma sits on p1 and p3 with equal weight: cos = 1/sqrt(2).
  CHECK(expected == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(esa_relatedness(model, gamma, gamma) == doctest::Approx(1.0).epsilon(1e-15));
  // alpha (p1) and epsilon (p2, p4) never share a page.
  CHECK(esa_relatedness(model, alpha, model.term_id("epsilon")) == 0.0);
  CHECK(esa_relatedness(model, alpha, gamma) == esa_relatedness(model, gamma, alpha));
  try {
    esa_relatedness(model, alpha, model.term_id("beta"));
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("beta") != std::string::npos);
  }
  for (TermId a = 0; a < model.vocab.size(); ++a) {
    for (TermId b = 0; b < model.vocab.size(); ++b) {
      if (concept_vector(model, a).isZero() || concept_vector(model, b).isZero()) continue;
      const double mu = esa_relatedness(model, a, b);
      CHECK(mu >= 0.0);
      CHECK(mu <= 1.0 + 1e-15);
    }
  }
}

TEST_CASE("page and category vectors on FIX-1 match the dense oracle") {
  const auto corpus = test::fix1();
  const auto model = build_esa_model(corpus, PipelineConfig{});
  const test::DenseOracle oracle(corpus);
  for (PageIndex p = 0; p < model.num_pages(); ++p) {
    const auto v = page_vector(model, p);
    CHECK(std::abs(v.norm() - 1.0) <= 1e-9);
    CHECK(test::max_abs_diff(v, oracle.page_vec(p)) <= 1e-9);
  }
  for (const auto* c : {"c1", "c2", "root"}) {
    const auto v = category_vector(model, model.descendants.at(c));
    CHECK(std::abs(v.norm() - 1.0) <= 1e-9);
    CHECK(test::max_abs_diff(v, oracle.category_vec(c)) <= 1e-9);
  }
}

TEST_CASE("singleton category vector equals the page vector") {
  auto corpus = test::fix1();
  corpus.categories["only_p2"] = {"only_p2", "", {"c1"}};
  corpus.pages.at("p2").categories.push_back("only_p2");
  const auto model = build_esa_model(corpus, PipelineConfig{});
  const auto c = category_vector(model, model.descendants.at("only_p2"));
  const auto p = page_vector(model, model.page_index("p2"));
  CHECK(test::max_abs_diff(c, p.toDense()) <= 1e-9);
}

TEST_CASE("page with a single word is its normalized concept vector") {
  auto corpus = test::fix1();
  corpus.pages["p5"] = {"p5", "", "gamma gamma", {}, {"c2"}};
  const auto model = build_esa_model(corpus, PipelineConfig{});
  const auto page = page_vector(model, model.page_index("p5"));
  const auto expected = normalized(concept_vector(model, model.term_id("gamma")));
  CHECK(test::max_abs_diff(page, expected.toDense()) <= 1e-12);
}

TEST_CASE("degenerate page and category vectors are errors") {
  auto corpus = test::fix1();
  corpus.pages["p5"] = {"p5", "", "beta", {}, {"lonely"}};
  corpus.categories["lonely"] = {"lonely", "", {"root"}};
  corpus.categories["empty"] = {"empty", "", {"root"}};
  const auto model = build_esa_model(corpus, PipelineConfig{});
  CHECK_THROWS_AS(page_vector(model, model.page_index("p5")), DataError);
  CHECK_THROWS_AS(category_vector(model, model.descendants.at("lonely")), DataError);
  CHECK_THROWS_AS(category_vector(model, model.descendants.at("empty")), DataError);
}

TEST_CASE("vector text export") {
  const auto model = build_esa_model(test::fix1(), PipelineConfig{});
  std::ostringstream out;
  const std::vector<TermId> terms{model.term_id("alpha"), model.term_id("beta")};
  write_vectors_text(out, model, terms);
  CHECK(out.str() == "alpha 0:2.34720039\nbeta\n");
  CHECK(format_weight(0.5) == "0.500000000");
}
