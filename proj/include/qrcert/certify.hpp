#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qrcert/bell.hpp"
#include "qrcert/npa.hpp"
#include "qrcert/sdp.hpp"

namespace qrcert {

/// How certificate targets ("the device reaches value v") enter the SDP.
/// Equality reproduces the published numbers; AtLeast gives nested feasible sets.
enum class ConstraintMode { Equality, AtLeast };

/// An auxiliary solve (for instance a constraint right-hand side) did not end Optimal.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, SolverStatus status) : Error(what), status_(status) {}
  SolverStatus status() const { return status_; }

 private:
  SolverStatus status_;
};

ConstraintMode parse_mode(std::string_view text);

enum class Relation {
  Target,   // == in Equality mode, >= in AtLeast mode
  AtLeast,  // always >=
};

struct BellConstraint {
  BellOperator op;
  double rhs = 0.0;
  Relation relation = Relation::Target;
};

struct SettingsPair {
  int alice = 1;
  int bob = 1;
  friend bool operator==(const SettingsPair&, const SettingsPair&) = default;
};

struct ParamSpec {
  std::string name;  // "phi" or "C"
  double lo = 0.0;
  double hi = 0.0;
  int grid_points = 0;
};

/// p-parameterised constraint set plus the settings pair whose outcomes are certified.
struct Certificate {
  /// (p, param, level) -> constraints; param is ignored when the certificate has none.
  using Generator = std::function<std::vector<BellConstraint>(double, double, Level)>;

  std::string name;
  Scenario scenario;
  SettingsPair target;
  Level level = Level::Q2;
  std::optional<ParamSpec> param;
  Generator generator;

  std::vector<BellConstraint> constraints(double p, std::optional<double> param_value,
                                          Level at_level) const;
};

/// bc<n>, chsh, e0e1, t3, t3c, modchsh, modchsh+, i1, i2.
Certificate certificate(std::string_view name);
std::vector<std::string> certificate_names();

/// op == p * quantum_value, certifying `target`.
Certificate single_operator_certificate(std::string name, const BellOperator& op,
                                        double quantum_value, SettingsPair target, Level level);

struct ExtraConstraint {
  BellOperator op;
  std::function<double(double)> rhs;  // as a function of p
  Relation relation = Relation::AtLeast;
};

Certificate augmented_certificate(const Certificate& base, std::vector<ExtraConstraint> extras,
                                  std::string name = {});

struct EvalOptions {
  std::optional<Level> level;  // defaults to the certificate's level
  ConstraintMode mode = ConstraintMode::Equality;
  SolverOptions solver;
  unsigned threads = 1;
};

struct CertificationResult {
  std::string certificate;
  double p = 1.0;
  std::optional<double> param;
  Level level = Level::Q2;
  SettingsPair pair;
  bool local = false;
  /// Certified maxima in (+,+), (+,-), (-,+), (-,-) order, or (+), (-) for local.
  std::vector<double> outcome_maxima;
  std::vector<SolverStatus> statuses;
  double guessing_probability = 1.0;
  double min_entropy = 0.0;
  /// False when any outcome solve ended non-Optimal; the numbers are then unusable.
  bool certified = false;
};

/// -log2 of a guessing probability, clamped so a certified value of 1 (or a
/// rounding hair above) reports exactly zero bits.
double min_entropy_bits(double guessing_probability);

SdpProblem build_problem(MomentStructurePtr structure, const std::vector<BellConstraint>& constraints,
                         MomentFunctional objective, ConstraintMode mode);

/// Certified upper bounds on P(a, b | pair) for the four outcome pairs. When
/// `stop_at` is set, stops after the first outcome whose bound reaches it.
struct OutcomeBounds {
  std::vector<double> maxima;
  std::vector<SolverStatus> statuses;
  bool certified = true;
  bool stopped_early = false;
};
OutcomeBounds pair_outcome_bounds(MomentStructurePtr structure,
                                  const std::vector<BellConstraint>& constraints, SettingsPair pair,
                                  ConstraintMode mode, const SolverOptions& solver,
                                  std::optional<double> stop_at = std::nullopt);

CertificationResult guessing_probability(const Certificate& cert, double p,
                                         std::optional<double> param = std::nullopt,
                                         const EvalOptions& options = {});

CertificationResult local_guessing_probability(const Certificate& cert, double p,
                                               std::optional<double> param, Party party,
                                               const EvalOptions& options = {});

/// Certified quantum maximum of `op` at `level`. Throws SolverFailure.
double quantum_max(const BellOperator& op, Level level, const SolverOptions& solver = {});
SdpSolution quantum_max_solution(const BellOperator& op, Level level, const SolverOptions& solver = {});

/// max T3 subject to CHSH1 >= C and CHSH2 >= C (noise-free). The value is the
/// one attained by a feasible moment vector, so p * value stays feasible.
/// Results are memoised per (C, level). Throws SolverFailure.
double t3max_given_C(double C, Level level, const SolverOptions& solver = {});

struct ParamPolicy {
  enum class Kind { None, Fixed, Tuned } kind = Kind::None;
  double value = 0.0;
  int grid_points = 0;  // 0: the certificate's default grid
  int refine_steps = 30;

  static ParamPolicy none() { return {}; }
  static ParamPolicy fixed(double v) { return {Kind::Fixed, v, 0, 0}; }
  static ParamPolicy tuned(int grid = 0, int refine = 30) { return {Kind::Tuned, 0.0, grid, refine}; }
};

std::vector<CertificationResult> sweep_noise(const Certificate& cert, const std::vector<double>& p_list,
                                             const ParamPolicy& policy, const EvalOptions& options = {});

struct TuneResult {
  double best_param = 0.0;
  CertificationResult result;
  /// (param, min_entropy) for every grid point, in grid order.
  std::vector<std::pair<double, double>> grid;
};

/// Grid search followed by golden-section refinement around the best grid point.
TuneResult tune_parameter(const Certificate& cert, double p, int grid_points = 0, int refine_steps = 30,
                          const EvalOptions& options = {});

}  // namespace qrcert
