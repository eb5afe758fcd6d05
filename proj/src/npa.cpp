#include "qrcert/npa.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>
#include <tuple>

namespace qrcert {

Level parse_level(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "q1") return Level::Q1;
  if (t == "q1+ab" || t == "q1ab" || t == "q1_ab") return Level::Q1AB;
  if (t == "q2") return Level::Q2;
  throw Error("unsupported NPA level: " + std::string(text));
}

std::string to_string(Level level) {
  switch (level) {
    case Level::Q1: return "Q1";
    case Level::Q1AB: return "Q1+AB";
    case Level::Q2: return "Q2";
  }
  return "?";
}

Monomial Monomial::adjoint() const {
  return Monomial{{alice.rbegin(), alice.rend()}, {bob.rbegin(), bob.rend()}};
}

std::string Monomial::to_string() const {
  if (is_identity()) return "1";
  std::string out;
  for (int a : alice) out += "A" + std::to_string(a);
  for (int b : bob) out += "B" + std::to_string(b);
  return out;
}

namespace {

std::vector<int> collapse(std::vector<int> word) {
  word.erase(std::unique(word.begin(), word.end()), word.end());
  return word;
}

}  // namespace

Monomial reduce_word(const Scenario& s, std::vector<int> alice_word, std::vector<int> bob_word) {
  for (int a : alice_word)
    if (a < 1 || a > s.n_alice) throw Error("Alice letter out of range: " + std::to_string(a));
  for (int b : bob_word)
    if (b < 1 || b > s.n_bob) throw Error("Bob letter out of range: " + std::to_string(b));
  return Monomial{collapse(std::move(alice_word)), collapse(std::move(bob_word))};
}

std::vector<Monomial> monomials(const Scenario& s, Level level) {
  std::vector<Monomial> out;
  out.push_back({});
  for (int a = 1; a <= s.n_alice; ++a) out.push_back({{a}, {}});
  for (int b = 1; b <= s.n_bob; ++b) out.push_back({{}, {b}});
  if (level == Level::Q2) {
    for (int a = 1; a <= s.n_alice; ++a)
      for (int k = 1; k <= s.n_alice; ++k)
        if (a != k) out.push_back({{a, k}, {}});
    for (int b = 1; b <= s.n_bob; ++b)
      for (int l = 1; l <= s.n_bob; ++l)
        if (b != l) out.push_back({{}, {b, l}});
  }
  if (level == Level::Q1AB || level == Level::Q2) {
    for (int a = 1; a <= s.n_alice; ++a)
      for (int b = 1; b <= s.n_bob; ++b) out.push_back({{a}, {b}});
  }
  return out;
}

MomentStructure::MomentStructure(Scenario s, Level level)
    : scenario_(s), level_(level), monomials_(qrcert::monomials(s, level)) {
  const int n = dimension();
  entry_class_.assign(static_cast<std::size_t>(n) * n, -1);
  for (int r = 0; r < n; ++r) {
    const Monomial left = monomials_[r].adjoint();
    for (int c = r; c < n; ++c) {
      const Monomial& right = monomials_[c];
      std::vector<int> a = left.alice;
      a.insert(a.end(), right.alice.begin(), right.alice.end());
      std::vector<int> b = left.bob;
      b.insert(b.end(), right.bob.begin(), right.bob.end());
      Monomial word = reduce_word(s, std::move(a), std::move(b));
      Monomial rep = std::min(word, word.adjoint());
      auto [it, inserted] = index_.try_emplace(rep, static_cast<int>(representatives_.size()));
      if (inserted) representatives_.push_back(rep);
      entry_class_[r * n + c] = it->second;
      entry_class_[c * n + r] = it->second;
    }
  }
}

int MomentStructure::class_of(const Monomial& word) const {
  const Monomial w = reduce_word(scenario_, word.alice, word.bob);
  const auto it = index_.find(std::min(w, w.adjoint()));
  return it == index_.end() ? -1 : it->second;
}

int MomentStructure::class_of_alice(int a) const {
  if (a < 1 || a > scenario_.n_alice) throw Error("Alice setting out of range");
  return class_of({{a}, {}});
}

int MomentStructure::class_of_bob(int b) const {
  if (b < 1 || b > scenario_.n_bob) throw Error("Bob setting out of range");
  return class_of({{}, {b}});
}

int MomentStructure::class_of_pair(int a, int b) const {
  if (a < 1 || a > scenario_.n_alice || b < 1 || b > scenario_.n_bob) {
    throw Error("settings pair out of range");
  }
  return class_of({{a}, {b}});
}

Eigen::MatrixXd MomentStructure::assemble(const Eigen::VectorXd& y) const {
  if (y.size() != n_vars()) throw Error("moment vector size does not match the structure");
  const int n = dimension();
  Eigen::MatrixXd g(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) g(r, c) = y[entry_class(r, c)];
  return g;
}

std::string MomentStructure::dump() const {
  std::ostringstream out;
  out << "scenario " << scenario_.n_alice << ' ' << scenario_.n_bob << '\n';
  out << "level " << qrcert::to_string(level_) << '\n';
  out << "monomials " << dimension() << '\n';
  for (int r = 0; r < dimension(); ++r) out << r << ' ' << monomials_[r].to_string() << '\n';
  out << "classes " << n_vars() << '\n';
  for (int k = 0; k < n_vars(); ++k) out << k << ' ' << representatives_[k].to_string() << '\n';
  out << "matrix\n";
  for (int r = 0; r < dimension(); ++r) {
    for (int c = 0; c < dimension(); ++c) out << (c ? " " : "") << entry_class(r, c);
    out << '\n';
  }
  return out.str();
}

MomentStructurePtr shared_structure(Scenario s, Level level) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>, MomentStructurePtr> cache;
  const auto key = std::make_tuple(s.n_alice, s.n_bob, static_cast<int>(level));
  std::lock_guard lock(mutex);
  auto& slot = cache[key];
  if (!slot) slot = std::make_shared<const MomentStructure>(s, level);
  return slot;
}

void MomentFunctional::add(int cls, double value) {
  if (value == 0.0) return;
  auto [it, inserted] = coefficients.try_emplace(cls, value);
  if (!inserted) {
    it->second += value;
    if (it->second == 0.0) coefficients.erase(it);
  }
}

double MomentFunctional::evaluate(const Eigen::VectorXd& y) const {
  double v = constant;
  for (const auto& [k, c] : coefficients) {
    if (k < 0 || k >= y.size()) throw Error("functional references a class outside the vector");
    v += c * y[k];
  }
  return v;
}

MomentFunctional& MomentFunctional::operator+=(const MomentFunctional& other) {
  constant += other.constant;
  for (const auto& [k, c] : other.coefficients) add(k, c);
  return *this;
}

MomentFunctional MomentFunctional::operator*(double factor) const {
  MomentFunctional out;
  out.constant = constant * factor;
  for (const auto& [k, c] : coefficients) out.add(k, c * factor);
  return out;
}

MomentFunctional MomentFunctional::pinned() const {
  MomentFunctional out = *this;
  if (auto it = out.coefficients.find(0); it != out.coefficients.end()) {
    out.constant += it->second;
    out.coefficients.erase(it);
  }
  return out;
}

bool MomentFunctional::is_zero(double tol) const {
  if (std::abs(constant) > tol) return false;
  return std::all_of(coefficients.begin(), coefficients.end(),
                     [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

MomentFunctional functional_from_operator(const MomentStructure& m, const BellOperator& op) {
  if (!(op.scenario == m.scenario())) throw Error("operator scenario does not match the structure");
  const int na = m.scenario().n_alice;
  const int nb = m.scenario().n_bob;
  MomentFunctional f;
  f.constant = op.constant;
  // <A_i> = 2 y[A_i] - 1
  for (int i = 1; i <= na; ++i) {
    const double a = op.alice_marginal[i - 1];
    f.add(m.class_of_alice(i), 2.0 * a);
    f.constant -= a;
  }
  for (int j = 1; j <= nb; ++j) {
    const double b = op.bob_marginal[j - 1];
    f.add(m.class_of_bob(j), 2.0 * b);
    f.constant -= b;
  }
  // Cor(i, j) = 4 y[A_i B_j] - 2 y[A_i] - 2 y[B_j] + 1
  for (int i = 1; i <= na; ++i) {
    for (int j = 1; j <= nb; ++j) {
      const double alpha = op.joint(i - 1, j - 1);
      if (alpha == 0.0) continue;
      f.add(m.class_of_pair(i, j), 4.0 * alpha);
      f.add(m.class_of_alice(i), -2.0 * alpha);
      f.add(m.class_of_bob(j), -2.0 * alpha);
      f.constant += alpha;
    }
  }
  return f;
}

namespace {

void check_outcome(int o) {
  if (o != 1 && o != -1) throw Error("outcome must be +1 or -1");
}

}  // namespace

MomentFunctional probability_functional(const MomentStructure& m, int a, int b, int oa, int ob) {
  check_outcome(oa);
  check_outcome(ob);
  const int ab = m.class_of_pair(a, b);
  const int ya = m.class_of_alice(a);
  const int yb = m.class_of_bob(b);
  MomentFunctional f;
  if (oa == 1 && ob == 1) {
    f.add(ab, 1.0);
  } else if (oa == 1) {
    f.add(ya, 1.0);
    f.add(ab, -1.0);
  } else if (ob == 1) {
    f.add(yb, 1.0);
    f.add(ab, -1.0);
  } else {
    f.constant = 1.0;
    f.add(ya, -1.0);
    f.add(yb, -1.0);
    f.add(ab, 1.0);
  }
  return f;
}

MomentFunctional local_probability_functional(const MomentStructure& m, Party party, int setting,
                                              int outcome) {
  check_outcome(outcome);
  const int cls = party == Party::Alice ? m.class_of_alice(setting) : m.class_of_bob(setting);
  MomentFunctional f;
  if (outcome == 1) {
    f.add(cls, 1.0);
  } else {
    f.constant = 1.0;
    f.add(cls, -1.0);
  }
  return f;
}

}  // namespace qrcert
