#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qrcert {

/// Thrown on malformed input (shape mismatch, out-of-range setting, unknown name).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two parties, binary +-1 outcomes, `n_alice` x `n_bob` measurement settings.
/// Setting indices in the public API are 1-based.
struct Scenario {
  int n_alice = 2;
  int n_bob = 2;

  Scenario() = default;
  Scenario(int alice, int bob);

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Expectation values of a two-party binary experiment.
struct Correlators {
  Scenario scenario;
  Eigen::VectorXd alice;  // <A_i>
  Eigen::VectorXd bob;    // <B_j>
  Eigen::MatrixXd joint;  // Cor(i, j), 0-based storage

  explicit Correlators(Scenario s);
};

/// constant + sum_i a_i <A_i> + sum_j b_j <B_j> + sum_ij alpha_ij Cor(i, j).
struct BellOperator {
  Scenario scenario;
  double constant = 0.0;
  Eigen::VectorXd alice_marginal;
  Eigen::VectorXd bob_marginal;
  Eigen::MatrixXd joint;  // alpha, 0-based storage

  BellOperator() : BellOperator(Scenario{}) {}
  explicit BellOperator(Scenario s);

  /// 1-based access to the coefficient of Cor(a, b).
  double& cor(int a, int b);
  double cor(int a, int b) const;

  bool correlator_only() const;
  /// Same coefficients viewed in a larger scenario; extra settings get zero weight.
  BellOperator embedded(Scenario larger) const;
  BellOperator scaled(double factor) const;

  friend bool operator==(const BellOperator& l, const BellOperator& r);
};

double evaluate(const BellOperator& op, const Correlators& correlations);

/// Maximum over local deterministic strategies. Alice's 2^n_alice assignments are
/// enumerated; Bob answers each one optimally, which is the same maximum as
/// enumerating both parties.
double classical_bound(const BellOperator& op);

/// Named operators. Accepted: "bc<n>" / "BC(n)", "chsh", "e0", "e1", "t3",
/// "chsh1", "chsh2", "modchsh", "modchsh-aux", "i1", "i2", "zero".
BellOperator catalog(std::string_view name);
BellOperator braunstein_caves(int n);
std::vector<std::string> catalog_names();

/// Relabelling of settings plus outcome flips. `alice_perm[i]` is the new row of
/// old row i; a true sign flips that setting's outcomes.
struct SettingSymmetry {
  std::vector<int> alice_perm;
  std::vector<int> bob_perm;
  std::vector<bool> alice_flip;
  std::vector<bool> bob_flip;

  static SettingSymmetry identity(Scenario s);
  /// Uniformly random group element drawn from a seeded 64-bit generator.
  static SettingSymmetry random(Scenario s, std::uint64_t seed);
};

BellOperator apply_symmetry(const BellOperator& op, const SettingSymmetry& g);

/// Lexicographically minimal joint table (row-major) over setting permutations
/// and per-setting sign flips. Requires a correlator-only operator.
BellOperator canonical_form(const BellOperator& op);
bool isomorphic(const BellOperator& a, const BellOperator& b);

}  // namespace qrcert
