#include <doctest.h>

#include <cmath>
#include <numeric>

#include "qrcert/search.hpp"

using namespace qrcert;

namespace {

SearchConfig small_config() {
  SearchConfig c;
  c.scenario = Scenario(2, 2);
  c.sample_count = 40;
  c.seed = 7;
  c.top_threshold = 0.3;
  return c;
}

}  // namespace

TEST_SUITE("search") {
  TEST_CASE("first draw for seed 42 is frozen") {
    std::mt19937_64 rng(42);
    const BellOperator op = sample_operator(rng);
    const double expected[12] = {-1, 1, 0, -1, 1, 1, 0, -1, 0, 0, 0, -1};
    REQUIRE(op.scenario == Scenario(4, 3));
    for (int i = 0; i < 12; ++i) CHECK(op.joint(i / 3, i % 3) == expected[i]);
    CHECK(op.constant == 0.0);
    CHECK(op.alice_marginal.cwiseAbs().sum() == 0.0);
  }

  TEST_CASE("coefficients are uniform on -1, 0, 1") {
    std::mt19937_64 rng(123);
    int counts[3] = {0, 0, 0};
    const int draws = 3000;
    for (int k = 0; k < draws; ++k) {
      const BellOperator op = sample_operator(rng);
      for (int i = 0; i < 12; ++i) ++counts[static_cast<int>(op.joint(i / 3, i % 3)) + 1];
    }
    for (int c : counts) CHECK(std::abs(c / (12.0 * draws) - 1.0 / 3.0) <= 0.01);
  }

  TEST_CASE("histogram bins are half open") {
    CHECK(histogram_bin(0.0, 0.05) == 0);
    CHECK(histogram_bin(0.0499, 0.05) == 0);
    CHECK(histogram_bin(0.05, 0.05) == 1);
    CHECK(histogram_bin(0.7885, 0.05) == 15);
    CHECK(histogram_bin(-1e-12, 0.05) == 0);
  }

  TEST_CASE("configuration validation") {
    SearchConfig c;
    CHECK_NOTHROW(c.validate());
    c.sample_count = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = SearchConfig{};
    c.bin_width = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = SearchConfig{};
    c.p = 1.5;
    CHECK_THROWS_AS(c.validate(), Error);
    CHECK_THROWS_AS(evaluate_operator(catalog("chsh"), SearchConfig{}), Error);
  }

  TEST_CASE("operators without a quantum advantage are degenerate") {
    BellOperator op(Scenario(4, 3));
    op.cor(2, 3) = 1.0;
    const OperatorEvaluation e = evaluate_operator(op, SearchConfig{});
    CHECK(e.degenerate);
    CHECK_FALSE(e.skipped);
    CHECK(e.min_entropy == 0.0);
    CHECK(e.classical_bound == 1.0);
    const OperatorEvaluation zero = evaluate_operator(BellOperator(Scenario(4, 3)), SearchConfig{});
    CHECK(zero.degenerate);
  }

  TEST_CASE("embedded CHSH is found at its best pair") {
    SearchConfig c;
    c.scenario = Scenario(2, 2);
    const OperatorEvaluation e = evaluate_operator(catalog("chsh"), c);
    CHECK_FALSE(e.degenerate);
    CHECK(e.quantum_max == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-7));
    CHECK(e.classical_bound == 2.0);
    CHECK(e.min_entropy == doctest::Approx(0.58411).epsilon(1e-3));
    CHECK(e.pair.alice >= 1);
    CHECK(e.pair.bob <= 2);
  }

  TEST_CASE("report bookkeeping") {
    const SearchReport r = run_search(small_config());
    CHECK(r.sample_count == 40);
    CHECK(static_cast<int>(r.entropies.size()) == 40);
    CHECK(r.evaluated + r.skipped == 40);
    CHECK(std::accumulate(r.histogram.begin(), r.histogram.end(), 0) == r.evaluated);
    CHECK(r.histogram.size() == 40);
    CHECK(r.degenerate <= r.histogram[0]);
    CHECK(r.distinct_classes >= 1);
    CHECK(r.distinct_classes <= 40);
    for (std::size_t k = 0; k < r.top_classes.size(); ++k) {
      CHECK(r.top_classes[k].min_entropy > 0.3);
      if (k > 0) CHECK(r.top_classes[k].min_entropy <= r.top_classes[k - 1].min_entropy);
      CHECK(canonical_form(r.top_classes[k].canonical) == r.top_classes[k].canonical);
    }
    int instances = 0;
    for (const auto& t : r.top_classes) instances += t.instances;
    int above = 0;
    for (double h : r.entropies) above += h > 0.3 ? 1 : 0;
    CHECK(instances == above);
    SearchConfig alone = small_config();
    for (const auto& t : r.top_classes) CHECK(evaluate_operator(t.canonical, alone).min_entropy > alone.top_threshold);
  }

  TEST_CASE("entropy is invariant under setting symmetries") {
    const SearchConfig c;
    std::mt19937_64 rng(2024);
    int informative = 0;
    for (int k = 0; k < 20; ++k) {
      const BellOperator op = sample_operator(rng);
      const OperatorEvaluation base = evaluate_operator(op, c);
      REQUIRE_FALSE(base.skipped);
      if (!base.degenerate) ++informative;
      for (std::uint64_t g = 0; g < 3; ++g) {
        const BellOperator moved = apply_symmetry(op, SettingSymmetry::random(op.scenario, 1000 * k + g));
        const OperatorEvaluation e = evaluate_operator(moved, c);
        CHECK(e.degenerate == base.degenerate);
        CHECK(std::abs(e.min_entropy - base.min_entropy) <= 1e-5);
      }
    }
    CHECK(informative > 0);
  }

  TEST_CASE("same seed, same report, any thread count") {
    SearchConfig c = small_config();
    const SearchReport a = run_search(c);
    c.threads = 3;
    const SearchReport b = run_search(c);
    CHECK(a.histogram == b.histogram);
    REQUIRE(a.entropies.size() == b.entropies.size());
    for (std::size_t i = 0; i < a.entropies.size(); ++i) CHECK(a.entropies[i] == b.entropies[i]);
    CHECK(a.top_classes.size() == b.top_classes.size());
    c.seed = 8;
    CHECK(run_search(c).entropies != a.entropies);
  }

  TEST_CASE("symmetric copies are equivalent") {
    const BellOperator chsh = catalog("chsh");
    SearchConfig c;
    c.scenario = chsh.scenario;
    const BellOperator copy = apply_symmetry(chsh, SettingSymmetry::random(chsh.scenario, 5));
    CHECK(canonical_form(copy) == canonical_form(chsh));
    CHECK(class_members_equivalent(chsh, copy, {0.9, 0.95}, c));
    CHECK_FALSE(class_members_equivalent(chsh, catalog("e0"), {0.95}, c));
  }
}
