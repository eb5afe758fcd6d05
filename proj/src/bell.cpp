#include "qrcert/bell.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "qrcert/rng.hpp"

namespace qrcert {

Scenario::Scenario(int alice, int bob) : n_alice(alice), n_bob(bob) {
  if (alice < 1 || bob < 1) throw Error("scenario needs at least one setting per party");
}

Correlators::Correlators(Scenario s)
    : scenario(s),
      alice(Eigen::VectorXd::Zero(s.n_alice)),
      bob(Eigen::VectorXd::Zero(s.n_bob)),
      joint(Eigen::MatrixXd::Zero(s.n_alice, s.n_bob)) {}

BellOperator::BellOperator(Scenario s)
    : scenario(s),
      alice_marginal(Eigen::VectorXd::Zero(s.n_alice)),
      bob_marginal(Eigen::VectorXd::Zero(s.n_bob)),
      joint(Eigen::MatrixXd::Zero(s.n_alice, s.n_bob)) {}

namespace {

void check_setting(int a, int n, const char* party) {
  if (a < 1 || a > n) {
    throw Error(std::string(party) + " setting " + std::to_string(a) + " out of range 1.." +
                std::to_string(n));
  }
}

void check_shapes(const BellOperator& op) {
  const auto& s = op.scenario;
  if (op.alice_marginal.size() != s.n_alice || op.bob_marginal.size() != s.n_bob ||
      op.joint.rows() != s.n_alice || op.joint.cols() != s.n_bob) {
    throw Error("Bell operator coefficient shapes do not match its scenario");
  }
}

}  // namespace

double& BellOperator::cor(int a, int b) {
  check_setting(a, scenario.n_alice, "Alice");
  check_setting(b, scenario.n_bob, "Bob");
  return joint(a - 1, b - 1);
}

double BellOperator::cor(int a, int b) const {
  check_setting(a, scenario.n_alice, "Alice");
  check_setting(b, scenario.n_bob, "Bob");
  return joint(a - 1, b - 1);
}

bool BellOperator::correlator_only() const {
  return constant == 0.0 && alice_marginal.isZero(0.0) && bob_marginal.isZero(0.0);
}

BellOperator BellOperator::embedded(Scenario larger) const {
  if (larger.n_alice < scenario.n_alice || larger.n_bob < scenario.n_bob) {
    throw Error("cannot embed an operator into a smaller scenario");
  }
  BellOperator out(larger);
  out.constant = constant;
  out.alice_marginal.head(scenario.n_alice) = alice_marginal;
  out.bob_marginal.head(scenario.n_bob) = bob_marginal;
  out.joint.topLeftCorner(scenario.n_alice, scenario.n_bob) = joint;
  return out;
}

BellOperator BellOperator::scaled(double factor) const {
  BellOperator out = *this;
  out.constant *= factor;
  out.alice_marginal *= factor;
  out.bob_marginal *= factor;
  out.joint *= factor;
  return out;
}

bool operator==(const BellOperator& l, const BellOperator& r) {
  return l.scenario == r.scenario && l.constant == r.constant &&
         l.alice_marginal == r.alice_marginal && l.bob_marginal == r.bob_marginal &&
         l.joint == r.joint;
}

double evaluate(const BellOperator& op, const Correlators& c) {
  check_shapes(op);
  if (!(op.scenario == c.scenario) || c.alice.size() != op.scenario.n_alice ||
      c.bob.size() != op.scenario.n_bob || c.joint.rows() != op.joint.rows() ||
      c.joint.cols() != op.joint.cols()) {
    throw Error("correlator table does not match the operator's scenario");
  }
  return op.constant + op.alice_marginal.dot(c.alice) + op.bob_marginal.dot(c.bob) +
         op.joint.cwiseProduct(c.joint).sum();
}

double classical_bound(const BellOperator& op) {
  check_shapes(op);
  const int na = op.scenario.n_alice;
  const int nb = op.scenario.n_bob;
  if (na + nb > 24) throw Error("scenario too large for exhaustive classical bound");
  double best = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd x(na);
  for (std::uint32_t mask = 0; mask < (1u << na); ++mask) {
    for (int i = 0; i < na; ++i) x[i] = (mask >> i) & 1u ? -1.0 : 1.0;
    const Eigen::VectorXd bob_field = op.bob_marginal + op.joint.transpose() * x;
    const double value = op.constant + op.alice_marginal.dot(x) + bob_field.cwiseAbs().sum();
    best = std::max(best, value);
  }
  return best;
}

BellOperator braunstein_caves(int n) {
  if (n < 2) throw Error("Braunstein-Caves operator needs n >= 2");
  BellOperator op(Scenario(n, n));
  for (int k = 1; k <= n; ++k) {
    op.cor(k, k) += 1.0;
    if (k < n) op.cor(k, k + 1) += 1.0;
  }
  op.cor(n, 1) -= 1.0;
  return op;
}

namespace {

struct Term {
  int a;
  int b;
  double sign;
};

BellOperator from_terms(Scenario s, std::initializer_list<Term> terms) {
  BellOperator op(s);
  for (const auto& t : terms) op.cor(t.a, t.b) += t.sign;
  return op;
}

std::string lowercase(std::string_view name) {
  std::string out(name);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

BellOperator catalog(std::string_view raw_name) {
  const std::string name = lowercase(raw_name);
  const Scenario s22(2, 2), s23(2, 3), s43(4, 3);

  if (name == "chsh") return from_terms(s22, {{1, 1, 1}, {1, 2, 1}, {2, 1, 1}, {2, 2, -1}});
  if (name == "e0") return from_terms(s22, {{1, 1, 1}, {1, 2, 1}});
  if (name == "e1") return from_terms(s22, {{2, 1, 1}, {2, 2, -1}});
  if (name == "zero") return BellOperator(s22);
  if (name == "t3") {
    return from_terms(s43, {{1, 1, 1}, {2, 1, 1}, {3, 1, 1}, {4, 1, 1},
                            {1, 2, 1}, {2, 2, 1}, {3, 2, -1}, {4, 2, -1},
                            {1, 3, 1}, {2, 3, -1}, {3, 3, 1}, {4, 3, -1}});
  }
  if (name == "chsh1") return from_terms(s43, {{1, 1, 1}, {3, 1, 1}, {1, 2, 1}, {3, 2, -1}});
  if (name == "chsh2") return from_terms(s43, {{2, 1, 1}, {4, 1, 1}, {2, 2, 1}, {4, 2, -1}});
  if (name == "modchsh") {
    return from_terms(s23, {{1, 2, 1}, {1, 3, 1}, {2, 1, 1}, {2, 2, 1}, {2, 3, -1}});
  }
  if (name == "modchsh-aux") {
    return from_terms(s23, {{1, 2, 1}, {1, 3, 1}, {2, 2, 1}, {2, 3, -1}});
  }
  if (name == "i1") {
    return from_terms(s43, {{1, 2, 1}, {1, 3, -1}, {2, 1, -1}, {2, 2, -1},
                            {3, 1, 1}, {3, 3, 1}, {4, 1, 1}});
  }
  if (name == "i2") {
    return from_terms(s43, {{1, 2, -1}, {1, 3, 1}, {2, 1, 1}, {2, 2, 1}, {2, 3, 1},
                            {3, 2, 1}, {3, 3, -1}, {4, 1, 1}, {4, 2, 1}, {4, 3, 1}});
  }

  // bc<n> or bc(n)
  if (name.size() > 2 && name.starts_with("bc")) {
    std::string_view digits = std::string_view(name).substr(2);
    if (digits.front() == '(' && digits.back() == ')') digits = digits.substr(1, digits.size() - 2);
    int n = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec == std::errc() && ptr == digits.data() + digits.size()) return braunstein_caves(n);
  }
  throw Error("unknown Bell operator: " + std::string(raw_name));
}

std::vector<std::string> catalog_names() {
  return {"bc3", "bc5", "bc7", "chsh", "e0", "e1", "t3", "chsh1", "chsh2",
          "modchsh", "modchsh-aux", "i1", "i2", "zero"};
}

SettingSymmetry SettingSymmetry::identity(Scenario s) {
  SettingSymmetry g;
  g.alice_perm.resize(s.n_alice);
  g.bob_perm.resize(s.n_bob);
  std::iota(g.alice_perm.begin(), g.alice_perm.end(), 0);
  std::iota(g.bob_perm.begin(), g.bob_perm.end(), 0);
  g.alice_flip.assign(s.n_alice, false);
  g.bob_flip.assign(s.n_bob, false);
  return g;
}

SettingSymmetry SettingSymmetry::random(Scenario s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SettingSymmetry g = identity(s);
  auto shuffle = [&rng](std::vector<int>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_below(rng, i)]);
    }
  };
  shuffle(g.alice_perm);
  shuffle(g.bob_perm);
  for (std::size_t i = 0; i < g.alice_flip.size(); ++i) g.alice_flip[i] = uniform_below(rng, 2);
  for (std::size_t j = 0; j < g.bob_flip.size(); ++j) g.bob_flip[j] = uniform_below(rng, 2);
  return g;
}

BellOperator apply_symmetry(const BellOperator& op, const SettingSymmetry& g) {
  check_shapes(op);
  const int na = op.scenario.n_alice;
  const int nb = op.scenario.n_bob;
  if (static_cast<int>(g.alice_perm.size()) != na || static_cast<int>(g.bob_perm.size()) != nb ||
      static_cast<int>(g.alice_flip.size()) != na || static_cast<int>(g.bob_flip.size()) != nb) {
    throw Error("symmetry does not match the operator's scenario");
  }
  BellOperator out(op.scenario);
  out.constant = op.constant;
  for (int i = 0; i < na; ++i) {
    const double si = g.alice_flip[i] ? -1.0 : 1.0;
    out.alice_marginal[g.alice_perm[i]] = si * op.alice_marginal[i];
    for (int j = 0; j < nb; ++j) {
      const double sj = g.bob_flip[j] ? -1.0 : 1.0;
      out.joint(g.alice_perm[i], g.bob_perm[j]) = si * sj * op.joint(i, j);
    }
  }
  for (int j = 0; j < nb; ++j) {
    out.bob_marginal[g.bob_perm[j]] = (g.bob_flip[j] ? -1.0 : 1.0) * op.bob_marginal[j];
  }
  return out;
}

namespace {

using Row = std::vector<double>;

bool row_less(const Row& a, const Row& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

BellOperator canonical_form(const BellOperator& op) {
  check_shapes(op);
  if (!op.correlator_only()) throw Error("canonical_form expects a correlator-only operator");
  const int na = op.scenario.n_alice;
  const int nb = op.scenario.n_bob;
  if (nb > 10) throw Error("canonical_form: too many Bob settings for orbit enumeration");

  std::vector<int> perm(nb);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Row> best;
  std::vector<Row> rows(na, Row(nb));

  // For a fixed column transform, rows flip and reorder independently: take the
  // smaller of each row and its negation, then sort.
  do {
    for (std::uint32_t mask = 0; mask < (1u << nb); ++mask) {
      for (int i = 0; i < na; ++i) {
        Row& row = rows[i];
        for (int j = 0; j < nb; ++j) {
          const double s = (mask >> j) & 1u ? -1.0 : 1.0;
          row[perm[j]] = s * op.joint(i, j) + 0.0;
        }
        Row negated(nb);
        for (int j = 0; j < nb; ++j) negated[j] = -row[j] + 0.0;
        if (row_less(negated, row)) row = std::move(negated);
      }
      std::sort(rows.begin(), rows.end(), row_less);
      bool smaller = best.empty();
      if (!smaller) {
        for (int i = 0; i < na; ++i) {
          if (row_less(rows[i], best[i])) { smaller = true; break; }
          if (row_less(best[i], rows[i])) break;
        }
      }
      if (smaller) best = rows;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  BellOperator out(op.scenario);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) out.joint(i, j) = best[i][j];
  return out;
}

bool isomorphic(const BellOperator& a, const BellOperator& b) {
  return a.scenario == b.scenario && canonical_form(a) == canonical_form(b);
}

}  // namespace qrcert
