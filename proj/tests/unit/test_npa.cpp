#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "oracles/oracles.hpp"
#include "qrcert/npa.hpp"
#include "qrcert/qubit.hpp"

using namespace qrcert;
using std::numbers::pi;

namespace {

// Index-word counts: 1 + na + nb, plus na*nb for AB, plus the ordered pairs of distinct letters at Q2.
int expected_dimension(Scenario s, Level level) {
  int d = 1 + s.n_alice + s.n_bob;
  if (level != Level::Q1) d += s.n_alice * s.n_bob;
  if (level == Level::Q2) d += s.n_alice * (s.n_alice - 1) + s.n_bob * (s.n_bob - 1);
  return d;
}

QubitStrategy random_strategy(std::mt19937_64& rng, Scenario s, double p) {
  std::normal_distribution<double> g;
  QubitStrategy out;
  auto draw = [&] {
    BlochVector v{g(rng), g(rng), g(rng)};
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    for (double& x : v) x /= n;
    return v;
  };
  for (int i = 0; i < s.n_alice; ++i) out.alice.push_back(draw());
  for (int j = 0; j < s.n_bob; ++j) out.bob.push_back(draw());
  out.visibility = p;
  return out;
}

}  // namespace

TEST_SUITE("npa") {
  TEST_CASE("level names") {
    CHECK(parse_level("Q1") == Level::Q1);
    CHECK(parse_level("q1+ab") == Level::Q1AB);
    CHECK(parse_level("Q2") == Level::Q2);
    CHECK_THROWS_AS(parse_level("Q3"), Error);
    CHECK(to_string(Level::Q1AB) == "Q1+AB");
  }

  TEST_CASE("word reduction") {
    const Scenario s(3, 3);
    CHECK(reduce_word(s, {1, 1}, {}) == Monomial{{1}, {}});
    CHECK(reduce_word(s, {1, 2, 2, 1}, {3, 3}) == Monomial{{1, 2, 1}, {3}});
    CHECK(reduce_word(s, {}, {}).is_identity());
    CHECK_THROWS_AS(reduce_word(s, {4}, {}), Error);
    CHECK_THROWS_AS(reduce_word(s, {}, {0}), Error);
    CHECK((Monomial{{1, 2}, {3, 1}}).adjoint() == Monomial{{2, 1}, {1, 3}});
  }

  TEST_CASE("index word counts") {
    for (Scenario s : {Scenario(2, 2), Scenario(2, 3), Scenario(3, 3), Scenario(4, 3), Scenario(5, 5)}) {
      for (Level level : {Level::Q1, Level::Q1AB, Level::Q2}) {
        CHECK(static_cast<int>(monomials(s, level).size()) == expected_dimension(s, level));
      }
    }
    const auto q1 = monomials(Scenario(2, 2), Level::Q1);
    CHECK(q1[0].is_identity());
    CHECK(q1[1] == Monomial{{1}, {}});
    CHECK(q1[3] == Monomial{{}, {1}});
  }

  TEST_CASE("moment class counts match the brute-force oracle") {
    // Values produced by tests/oracles/count_moment_classes.py.
    struct Row { Scenario s; Level level; int dim; int classes; };
    const Row rows[] = {
        {Scenario(2, 2), Level::Q1, 5, 11},     {Scenario(2, 2), Level::Q1AB, 9, 17},
        {Scenario(2, 2), Level::Q2, 13, 31},    {Scenario(3, 3), Level::Q2, 28, 154},
        {Scenario(2, 3), Level::Q2, 20, 79},    {Scenario(4, 3), Level::Q2, 38, 302},
        {Scenario(5, 5), Level::Q2, 76, 1276},  {Scenario(7, 7), Level::Q1AB, 64, 1282},
    };
    for (const auto& r : rows) {
      const MomentStructure m(r.s, r.level);
      CHECK(m.dimension() == r.dim);
      CHECK(m.n_vars() == r.classes);
    }
  }

  TEST_CASE("class matrix is symmetric and covers every class") {
    const MomentStructure m(Scenario(3, 3), Level::Q2);
    std::set<int> seen;
    for (int r = 0; r < m.dimension(); ++r) {
      for (int c = 0; c < m.dimension(); ++c) {
        CHECK(m.entry_class(r, c) == m.entry_class(c, r));
        seen.insert(m.entry_class(r, c));
      }
      CHECK(m.entry_class(0, r) == m.class_of(m.monomials()[r]));
    }
    CHECK(static_cast<int>(seen.size()) == m.n_vars());
    CHECK(m.entry_class(0, 0) == 0);
    CHECK(m.representative(0).is_identity());
    // <A1 A1> = <A1> for projectors.
    CHECK(m.entry_class(1, 1) == m.class_of_alice(1));
    CHECK(m.class_of(Monomial{{1, 2}, {}}) == m.class_of(Monomial{{2, 1}, {}}));
    CHECK(m.class_of(Monomial{{1, 2, 1, 2, 1}, {}}) == -1);
  }

  TEST_CASE("higher levels contain the lower-level matrix") {
    const Scenario s(2, 3);
    const MomentStructure q1(s, Level::Q1), q1ab(s, Level::Q1AB), q2(s, Level::Q2);
    auto same_block = [](const MomentStructure& lo, const MomentStructure& hi) {
      const auto& words = hi.monomials();
      std::vector<int> at;
      for (const auto& w : lo.monomials()) {
        const auto it = std::find(words.begin(), words.end(), w);
        REQUIRE(it != words.end());
        at.push_back(static_cast<int>(it - words.begin()));
      }
      for (int r = 0; r < lo.dimension(); ++r)
        for (int c = 0; c < lo.dimension(); ++c)
          if (!(lo.representative(lo.entry_class(r, c)) == hi.representative(hi.entry_class(at[r], at[c])))) return false;
      return true;
    };
    CHECK(same_block(q1, q1ab));
    CHECK(same_block(q1ab, q2));
  }

  TEST_CASE("correlator functional") {
    const MomentStructure m(Scenario(2, 2), Level::Q1);
    const MomentFunctional f = functional_from_operator(m, catalog("e0"));
    // Cor(1, b) = 1 - 2<A1> - 2<Bb> + 4<A1 Bb>.
    CHECK(f.constant == doctest::Approx(2.0));
    CHECK(f.coefficients.count(0) == 0);
    CHECK(f.coefficients.at(m.class_of_alice(1)) == doctest::Approx(-4.0));
    CHECK(f.coefficients.at(m.class_of_bob(1)) == doctest::Approx(-2.0));
    CHECK(f.coefficients.at(m.class_of_pair(1, 2)) == doctest::Approx(4.0));
    CHECK(functional_from_operator(m, catalog("zero")).is_zero(1e-15));
    CHECK_THROWS_AS(functional_from_operator(m, catalog("bc3")), Error);
  }

  TEST_CASE("functional arithmetic") {
    MomentFunctional f;
    f.add(0, 2.0);
    f.add(3, 1.5);
    f.constant = 0.5;
    MomentFunctional g = f * 2.0;
    g += f;
    CHECK(g.coefficients.at(3) == doctest::Approx(4.5));
    const MomentFunctional pinned = g.pinned();
    CHECK(pinned.coefficients.count(0) == 0);
    CHECK(pinned.constant == doctest::Approx(1.5 + 6.0));
    Eigen::VectorXd y = Eigen::VectorXd::Zero(5);
    y[0] = 1.0;
    y[3] = 2.0;
    CHECK(g.evaluate(y) == doctest::Approx(pinned.evaluate(y)));
  }

  TEST_CASE("qubit moments reproduce singlet statistics") {
    std::mt19937_64 rng(5);
    for (double p : {1.0, 0.9}) {
      const QubitStrategy st = random_strategy(rng, Scenario(3, 2), p);
      const MomentStructure m(st.scenario(), Level::Q2);
      const Eigen::VectorXd y = qubit_moments(m, st);
      const Correlators cor = singlet_correlations(st);
      CHECK(y[0] == doctest::Approx(1.0));
      for (int a = 1; a <= 3; ++a) {
        CHECK(y[m.class_of_alice(a)] == doctest::Approx(0.5));
        for (int b = 1; b <= 2; ++b) {
          BellOperator one(st.scenario());
          one.cor(a, b) = 1.0;
          CHECK(functional_from_operator(m, one).evaluate(y) == doctest::Approx(cor.joint(a - 1, b - 1)));
          double total = 0.0;
          for (int oa : {1, -1})
            for (int ob : {1, -1}) {
              const double pr = probability_functional(m, a, b, oa, ob).evaluate(y);
              CHECK(pr >= -1e-12);
              total += pr;
            }
          CHECK(total == doctest::Approx(1.0));
        }
      }
      CHECK(local_probability_functional(m, Party::Bob, 2, -1).evaluate(y) == doctest::Approx(0.5));
    }
  }

  TEST_CASE("qubit moment matrices are PSD") {
    std::mt19937_64 rng(21);
    for (Level level : {Level::Q1, Level::Q1AB, Level::Q2}) {
      for (double p : {0.8, 0.95, 1.0}) {
        const QubitStrategy st = random_strategy(rng, Scenario(3, 3), p);
        const MomentStructure m(st.scenario(), level);
        CHECK(oracle::min_eigenvalue(m.assemble(qubit_moments(m, st))) >= -1e-10);
      }
    }
  }

  TEST_CASE("equal settings give perfect anticorrelation") {
    const QubitStrategy st = QubitStrategy::planar({0.4, 1.3}, {0.4, 2.0});
    const MomentStructure m(st.scenario(), Level::Q1AB);
    const Eigen::VectorXd y = qubit_moments(m, st);
    CHECK(probability_functional(m, 1, 1, 1, -1).evaluate(y) == doctest::Approx(0.5));
    CHECK(probability_functional(m, 1, 1, 1, 1).evaluate(y) == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("probability functionals reject bad arguments") {
    const MomentStructure m(Scenario(2, 2), Level::Q1);
    CHECK_THROWS_AS(probability_functional(m, 3, 1, 1, 1), Error);
    CHECK_THROWS_AS(probability_functional(m, 1, 1, 0, 1), Error);
    CHECK_THROWS_AS(m.assemble(Eigen::VectorXd::Zero(3)), Error);
    CHECK_THROWS_AS(probability_functional(m, 1, 1, 1, 1).evaluate(Eigen::VectorXd::Zero(3)), Error);
  }

  TEST_CASE("shared structures are cached") {
    CHECK(shared_structure(Scenario(2, 2), Level::Q2) == shared_structure(Scenario(2, 2), Level::Q2));
    CHECK(shared_structure(Scenario(2, 2), Level::Q2) != shared_structure(Scenario(2, 2), Level::Q1));
  }

  TEST_CASE("dump matches the golden file") {
    const std::string text = MomentStructure(Scenario(2, 2), Level::Q1).dump();
    std::ifstream in(QRCERT_TEST_DATA_DIR "/golden/npa_2x2_q1.txt");
    REQUIRE(in.good());
    std::stringstream golden;
    golden << in.rdbuf();
    CHECK(text == golden.str());
  }
}
