#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qrcert/bell.hpp"

namespace qrcert {

enum class Level { Q1, Q1AB, Q2 };

Level parse_level(std::string_view text);
std::string to_string(Level level);

/// Product of outcome-(+1) projectors, Alice's letters first. Letters are
/// 1-based setting indices; a canonical word never repeats a letter twice in a row.
struct Monomial {
  std::vector<int> alice;
  std::vector<int> bob;

  bool is_identity() const { return alice.empty() && bob.empty(); }
  std::size_t length() const { return alice.size() + bob.size(); }
  Monomial adjoint() const;
  std::string to_string() const;

  friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

/// Collapses repeated adjacent letters per party. Throws on letters outside the scenario.
Monomial reduce_word(const Scenario& s, std::vector<int> alice_word, std::vector<int> bob_word);

/// Index words of the moment matrix in a fixed order: by length, then
/// Alice-only words, Bob-only words, mixed words, each lexicographic.
std::vector<Monomial> monomials(const Scenario& s, Level level);

/// Real-symmetric moment matrix layout: entry (r, c) holds class of
/// <w_r^dagger w_c>, with a word and its adjoint sharing one class. Class 0 is
/// the identity. Binary outcomes admit no orthogonality zeros, so there is no zero class.
class MomentStructure {
 public:
  MomentStructure(Scenario s, Level level);

  const Scenario& scenario() const { return scenario_; }
  Level level() const { return level_; }
  const std::vector<Monomial>& monomials() const { return monomials_; }
  int dimension() const { return static_cast<int>(monomials_.size()); }
  int n_vars() const { return static_cast<int>(representatives_.size()); }
  int entry_class(int r, int c) const { return entry_class_[r * dimension() + c]; }
  /// Canonical representative (the smaller of a word and its adjoint).
  const Monomial& representative(int cls) const { return representatives_.at(cls); }
  /// Class of an arbitrary word, or -1 when the word does not occur in the matrix.
  int class_of(const Monomial& word) const;
  int class_of_alice(int a) const;
  int class_of_bob(int b) const;
  int class_of_pair(int a, int b) const;

  /// Moment matrix for the class values `y` (size n_vars).
  Eigen::MatrixXd assemble(const Eigen::VectorXd& y) const;
  /// Plain-text dump: monomial list followed by the class matrix.
  std::string dump() const;

 private:
  Scenario scenario_;
  Level level_;
  std::vector<Monomial> monomials_;
  std::vector<int> entry_class_;
  std::vector<Monomial> representatives_;
  std::map<Monomial, int> index_;
};

using MomentStructurePtr = std::shared_ptr<const MomentStructure>;

/// Shared, immutable structure for (scenario, level); built once per process.
MomentStructurePtr shared_structure(Scenario s, Level level);

/// constant + sum_k coefficients[k] * y[k].
struct MomentFunctional {
  std::map<int, double> coefficients;
  double constant = 0.0;

  void add(int cls, double value);
  double evaluate(const Eigen::VectorXd& y) const;
  MomentFunctional& operator+=(const MomentFunctional& other);
  MomentFunctional operator*(double factor) const;
  /// Folds class 0 (the identity moment, always 1) into the constant.
  MomentFunctional pinned() const;
  bool is_zero(double tol = 0.0) const;
};

MomentFunctional functional_from_operator(const MomentStructure& m, const BellOperator& op);

enum class Party { Alice, Bob };

/// P(outcome_a, outcome_b | a, b); outcomes are +1 or -1, settings 1-based.
MomentFunctional probability_functional(const MomentStructure& m, int a, int b, int outcome_a,
                                        int outcome_b);
/// P(outcome | setting) for one party.
MomentFunctional local_probability_functional(const MomentStructure& m, Party party, int setting,
                                              int outcome);

}  // namespace qrcert
