#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles/oracles.hpp"
#include "qrcert/bell.hpp"
#include "qrcert/rng.hpp"
#include "qrcert/qubit.hpp"

using namespace qrcert;
using std::numbers::pi;
using std::numbers::sqrt2;

namespace {

BellOperator random_operator(std::mt19937_64& rng, Scenario s, bool marginals) {
  BellOperator op(s);
  for (int a = 0; a < s.n_alice; ++a)
    for (int b = 0; b < s.n_bob; ++b) op.joint(a, b) = static_cast<double>(uniform_below(rng, 5)) - 2.0;
  if (marginals) {
    for (int a = 0; a < s.n_alice; ++a) op.alice_marginal[a] = static_cast<double>(uniform_below(rng, 3)) - 1.0;
    for (int b = 0; b < s.n_bob; ++b) op.bob_marginal[b] = static_cast<double>(uniform_below(rng, 3)) - 1.0;
    op.constant = 0.5;
  }
  return op;
}

int nonzeros(const BellOperator& op) { return static_cast<int>((op.joint.array() != 0.0).count()); }

}  // namespace

TEST_SUITE("bell") {
  TEST_CASE("scenario rejects empty parties") {
    CHECK_THROWS_AS(Scenario(0, 2), Error);
    CHECK_THROWS_AS(Scenario(2, 0), Error);
    CHECK_NOTHROW(Scenario(1, 1));
  }

  TEST_CASE("evaluate on reference strategies") {
    CHECK(evaluate(catalog("chsh"), singlet_correlations(chsh_strategy())) == doctest::Approx(2 * sqrt2).epsilon(1e-12));
    CHECK(evaluate(catalog("bc3"), singlet_correlations(braunstein_caves_strategy(3))) ==
          doctest::Approx(6 * std::cos(pi / 6)).epsilon(1e-12));
    const Correlators table = singlet_correlations(chsh_strategy(0.7));
    CHECK(evaluate(catalog("zero"), table) == 0.0);
  }

  TEST_CASE("evaluate rejects a shape mismatch") {
    CHECK_THROWS_AS(evaluate(catalog("chsh"), singlet_correlations(modchsh_strategy())), Error);
  }

  TEST_CASE("operator constant and marginals enter evaluate") {
    BellOperator op(Scenario(1, 1));
    op.constant = 0.25;
    op.alice_marginal[0] = 2.0;
    op.bob_marginal[0] = -1.0;
    op.cor(1, 1) = 3.0;
    Correlators c(Scenario(1, 1));
    c.alice[0] = 0.5;
    c.bob[0] = 0.25;
    c.joint(0, 0) = -0.5;
    CHECK(evaluate(op, c) == doctest::Approx(0.25 + 1.0 - 0.25 - 1.5));
  }

  TEST_CASE("singlet correlations") {
    const auto equal = QubitStrategy::planar({0.3, 1.1}, {0.3, 1.1});
    const Correlators c = singlet_correlations(equal);
    CHECK(c.joint(0, 0) == doctest::Approx(-1.0));
    CHECK(c.joint(1, 1) == doctest::Approx(-1.0));
    CHECK(c.alice.cwiseAbs().maxCoeff() == 0.0);

    const Correlators e = singlet_correlations(e0e1_strategy(pi / 4));
    CHECK(evaluate(catalog("e0"), e) == doctest::Approx(sqrt2));
    CHECK(evaluate(catalog("e1"), e) == doctest::Approx(sqrt2));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(-pi, pi);
    for (double p : {0.3, 0.8, 1.0}) {
      const auto s = QubitStrategy::planar({angle(rng), angle(rng), angle(rng)}, {angle(rng), angle(rng)}, p);
      CHECK(singlet_correlations(s).joint.cwiseAbs().maxCoeff() <= p + 1e-15);
    }
  }

  TEST_CASE("classical bounds of named operators") {
    CHECK(classical_bound(catalog("chsh")) == 2.0);
    CHECK(classical_bound(catalog("bc3")) == 4.0);
    CHECK(classical_bound(catalog("modchsh")) == 3.0);
    BellOperator sum = catalog("e0");
    sum.joint += catalog("e1").joint;
    CHECK(classical_bound(sum) == 2.0);
  }

  TEST_CASE("classical bound agrees with full enumeration") {
    for (const auto& name : catalog_names()) {
      const BellOperator op = catalog(name);
      CHECK_MESSAGE(classical_bound(op) == doctest::Approx(oracle::classical_bound_full(op)), name);
    }
    std::mt19937_64 rng(11);
    for (int k = 0; k < 40; ++k) {
      const Scenario s(1 + static_cast<int>(uniform_below(rng, 4)), 1 + static_cast<int>(uniform_below(rng, 4)));
      const BellOperator op = random_operator(rng, s, k % 2 == 1);
      CHECK(classical_bound(op) == doctest::Approx(oracle::classical_bound_full(op)));
    }
  }

  TEST_CASE("classical bound refuses huge scenarios") {
    CHECK_THROWS_AS(classical_bound(BellOperator(Scenario(13, 13))), Error);
  }

  TEST_CASE("catalog coefficient tables") {
    const BellOperator bc3 = catalog("bc3");
    CHECK(bc3.scenario == Scenario(3, 3));
    for (auto [a, b] : {std::pair{1, 1}, {1, 2}, {2, 2}, {2, 3}, {3, 3}}) CHECK(bc3.cor(a, b) == 1.0);
    CHECK(bc3.cor(3, 1) == -1.0);
    CHECK(nonzeros(bc3) == 6);
    CHECK(catalog("BC(3)") == bc3);

    const BellOperator e0 = catalog("e0");
    CHECK(e0.cor(1, 1) == 1.0);
    CHECK(e0.cor(1, 2) == 1.0);
    CHECK(nonzeros(e0) == 2);

    CHECK(nonzeros(catalog("i1")) == 7);
    CHECK(nonzeros(catalog("i2")) == 10);
    CHECK(nonzeros(catalog("t3")) == 12);

    const BellOperator aux = catalog("modchsh-aux");
    CHECK(aux.cor(1, 2) == 1.0);
    CHECK(aux.cor(1, 3) == 1.0);
    CHECK(aux.cor(2, 2) == 1.0);
    CHECK(aux.cor(2, 3) == -1.0);
    CHECK(nonzeros(aux) == 4);

    for (const auto& name : catalog_names()) {
      const BellOperator op = catalog(name);
      CHECK(op.constant == 0.0);
      CHECK(op.correlator_only());
    }
  }

  TEST_CASE("catalog rejects unknown names and bad n") {
    CHECK_THROWS_AS(catalog("chsh3"), Error);
    CHECK_THROWS_AS(catalog("bc1"), Error);
    CHECK_THROWS_AS(catalog("bc"), Error);
    CHECK_THROWS_AS(braunstein_caves(1), Error);
  }

  TEST_CASE("Braunstein-Caves structure") {
    for (int n : {2, 3, 5, 7}) {
      const BellOperator op = braunstein_caves(n);
      CHECK(nonzeros(op) == 2 * n);
      CHECK(op.cor(n, 1) == -1.0);
    }
  }

  TEST_CASE("canonical form is idempotent and constant on orbits") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 20; ++k) {
      const BellOperator op = random_operator(rng, Scenario(4, 3), false);
      const BellOperator c = canonical_form(op);
      CHECK(canonical_form(c) == c);
      const BellOperator moved = apply_symmetry(op, SettingSymmetry::random(op.scenario, 100 + k));
      CHECK(canonical_form(moved) == c);
      CHECK(classical_bound(moved) == classical_bound(op));
    }
  }

  TEST_CASE("BC3 under an Alice swap and a sign flip") {
    const BellOperator bc3 = catalog("bc3");
    SettingSymmetry g = SettingSymmetry::identity(bc3.scenario);
    g.alice_perm = {1, 0, 2};
    g.bob_flip = {false, true, false};
    const BellOperator moved = apply_symmetry(bc3, g);
    CHECK_FALSE(moved == bc3);
    CHECK(isomorphic(moved, bc3));
  }

  TEST_CASE("pseudo-random copies of I2 are recognised") {
    const BellOperator i2 = catalog("i2");
    for (std::uint64_t seed : {1u, 2u, 3u, 99u}) {
      CHECK(canonical_form(apply_symmetry(i2, SettingSymmetry::random(i2.scenario, seed))) == canonical_form(i2));
    }
    CHECK_FALSE(isomorphic(i2, catalog("i1")));
  }

  TEST_CASE("canonical form requires correlator-only operators") {
    BellOperator op = catalog("chsh");
    op.alice_marginal[0] = 1.0;
    CHECK_THROWS_AS(canonical_form(op), Error);
  }

  TEST_CASE("embedding keeps values and adds zero settings") {
    const BellOperator big = catalog("bc3").embedded(Scenario(4, 3));
    CHECK(big.scenario == Scenario(4, 3));
    CHECK(big.joint.row(3).cwiseAbs().sum() == 0.0);
    CHECK(classical_bound(big) == 4.0);
    CHECK_THROWS_AS(catalog("t3").embedded(Scenario(2, 2)), Error);
  }
}
