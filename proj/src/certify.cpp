#include "qrcert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "qrcert/parallel.hpp"

namespace qrcert {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;

const int kOutcomes[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};

double bc_value(int n) { return 2.0 * n * std::cos(kPi / (2.0 * n)); }

Certificate make(std::string name, Scenario s, SettingsPair target, Level level,
                 Certificate::Generator gen) {
  Certificate c;
  c.name = std::move(name);
  c.scenario = s;
  c.target = target;
  c.level = level;
  c.generator = std::move(gen);
  return c;
}

Certificate braunstein_caves_certificate(int n) {
  const BellOperator op = braunstein_caves(n);
  const Level level = n >= 7 ? Level::Q1AB : Level::Q2;
  return single_operator_certificate("bc" + std::to_string(n), op, bc_value(n),
                                     {1, (n + 3) / 2}, level);
}

Certificate e0e1_certificate() {
  const BellOperator e0 = catalog("e0");
  const BellOperator e1 = catalog("e1");
  Certificate c = make("e0e1", e0.scenario, {2, 1}, Level::Q2,
                       [e0, e1](double p, double phi, Level) {
                         return std::vector<BellConstraint>{
                             {e0, p * 2.0 * std::cos(phi), Relation::Target},
                             {e1, p * 2.0 * std::sin(phi), Relation::Target}};
                       });
  c.param = ParamSpec{"phi", 0.0, kPi / 2, 65};
  return c;
}

Certificate t3_certificate() {
  const BellOperator t3 = catalog("t3");
  return make("t3", t3.scenario, {1, 3}, Level::Q2, [t3](double p, double, Level level) {
    return std::vector<BellConstraint>{{t3, p * t3max_given_C(0.0, level), Relation::Target}};
  });
}

Certificate t3c_certificate() {
  const BellOperator t3 = catalog("t3");
  const BellOperator chsh1 = catalog("chsh1");
  const BellOperator chsh2 = catalog("chsh2");
  Certificate c = make("t3c", t3.scenario, {1, 3}, Level::Q2,
                       [t3, chsh1, chsh2](double p, double C, Level level) {
                         return std::vector<BellConstraint>{
                             {t3, p * t3max_given_C(C, level), Relation::Target},
                             {chsh1, p * C, Relation::AtLeast},
                             {chsh2, p * C, Relation::AtLeast}};
                       });
  c.param = ParamSpec{"C", 0.0, 2.0 * kSqrt2, 57};
  return c;
}

}  // namespace

ConstraintMode parse_mode(std::string_view text) {
  if (text == "eq" || text == "equality" || text == "==") return ConstraintMode::Equality;
  if (text == "geq" || text == "atleast" || text == ">=") return ConstraintMode::AtLeast;
  throw Error("unknown constraint mode '" + std::string(text) + "' (use eq or geq)");
}

std::vector<BellConstraint> Certificate::constraints(double p, std::optional<double> param_value,
                                                     Level at_level) const {
  if (!(p > 0.0 && p <= 1.0)) throw Error("noise parameter p must lie in (0, 1]");
  double value = 0.0;
  if (param) {
    if (!param_value) throw Error("certificate '" + name + "' needs parameter " + param->name);
    const double slack = 1e-12 * std::max(1.0, std::abs(param->hi));
    if (*param_value < param->lo - slack || *param_value > param->hi + slack) {
      throw Error(param->name + " outside [" + std::to_string(param->lo) + ", " +
                  std::to_string(param->hi) + "]");
    }
    value = std::clamp(*param_value, param->lo, param->hi);
  }
  return generator(p, value, at_level);
}

Certificate single_operator_certificate(std::string name, const BellOperator& op,
                                        double quantum_value, SettingsPair target, Level level) {
  if (target.alice < 1 || target.alice > op.scenario.n_alice || target.bob < 1 ||
      target.bob > op.scenario.n_bob) {
    throw Error("target settings pair outside the scenario");
  }
  return make(std::move(name), op.scenario, target, level,
              [op, quantum_value](double p, double, Level) {
                return std::vector<BellConstraint>{{op, p * quantum_value, Relation::Target}};
              });
}

Certificate augmented_certificate(const Certificate& base, std::vector<ExtraConstraint> extras,
                                  std::string name) {
  for (const auto& e : extras) {
    if (!(e.op.scenario == base.scenario)) throw Error("augmenting operator has a different scenario");
    if (!e.rhs) throw Error("augmenting constraint has no right-hand side");
  }
  Certificate c = base;
  if (!name.empty()) c.name = std::move(name);
  auto inner = base.generator;
  c.generator = [inner, extras = std::move(extras)](double p, double param, Level level) {
    auto out = inner(p, param, level);
    for (const auto& e : extras) out.push_back({e.op, e.rhs(p), e.relation});
    return out;
  };
  return c;
}

Certificate certificate(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (key.size() > 2 && key.rfind("bc", 0) == 0 &&
      std::all_of(key.begin() + 2, key.end(), [](unsigned char ch) { return std::isdigit(ch); })) {
    const int n = std::stoi(key.substr(2));
    if (n < 2) throw Error("Braunstein-Caves certificates need n >= 2");
    return braunstein_caves_certificate(n);
  }
  if (key == "chsh") return single_operator_certificate("chsh", catalog("chsh"), 2.0 * kSqrt2, {1, 1}, Level::Q2);
  if (key == "e0e1") return e0e1_certificate();
  if (key == "t3") return t3_certificate();
  if (key == "t3c") return t3c_certificate();
  if (key == "modchsh") {
    return single_operator_certificate("modchsh", catalog("modchsh"), 1.0 + 2.0 * kSqrt2, {1, 1}, Level::Q2);
  }
  if (key == "modchsh+") {
    return augmented_certificate(
        certificate("modchsh"),
        {{catalog("modchsh-aux"), [](double p) { return p * 2.0 * kSqrt2; }, Relation::AtLeast}},
        "modchsh+");
  }
  if (key == "i1") {
    return single_operator_certificate("i1", catalog("i1"), 1.0 + 6.0 * std::cos(kPi / 6), {1, 1}, Level::Q2);
  }
  if (key == "i2") {
    return single_operator_certificate("i2", catalog("i2"), 2.0 + 4.0 * kSqrt2, {1, 1}, Level::Q2);
  }
  throw Error("unknown certificate '" + std::string(name) + "'");
}

std::vector<std::string> certificate_names() {
  return {"bc3", "bc5", "bc7", "chsh", "e0e1", "t3", "t3c", "modchsh", "modchsh+", "i1", "i2"};
}

double min_entropy_bits(double guessing_probability) {
  if (!(guessing_probability > 0.0)) throw Error("guessing probability must be positive");
  if (guessing_probability >= 1.0) return 0.0;
  return -std::log2(guessing_probability);
}

SdpProblem build_problem(MomentStructurePtr structure, const std::vector<BellConstraint>& constraints,
                         MomentFunctional objective, ConstraintMode mode) {
  SdpProblem problem;
  problem.structure = structure;
  problem.objective = std::move(objective);
  problem.sense = Sense::Maximize;
  for (const auto& c : constraints) {
    if (!(c.op.scenario == structure->scenario())) {
      throw Error("constraint operator does not match the certificate scenario");
    }
    LinearConstraint row{functional_from_operator(*structure, c.op), c.rhs};
    if (c.relation == Relation::Target && mode == ConstraintMode::Equality) {
      problem.equalities.push_back(std::move(row));
    } else {
      problem.inequalities.push_back(std::move(row));
    }
  }
  return problem;
}

namespace {

struct OutcomeSolve {
  double bound = 1.0;
  SolverStatus status = SolverStatus::NumericalTrouble;
};

OutcomeSolve solve_outcome(const MomentStructurePtr& structure, const std::vector<BellConstraint>& constraints,
                           MomentFunctional objective, ConstraintMode mode, const SolverOptions& solver) {
  const SdpProblem problem = build_problem(structure, constraints, std::move(objective), mode);
  const SdpSolution sol = solve(problem, solver);
  OutcomeSolve out;
  out.status = sol.status;
  if (sol.optimal()) out.bound = certify_bound(problem, sol);
  return out;
}

void finish(CertificationResult& r, double floor) {
  r.certified = std::all_of(r.statuses.begin(), r.statuses.end(),
                            [](SolverStatus s) { return s == SolverStatus::Optimal; });
  if (!r.certified) {
    r.guessing_probability = std::numeric_limits<double>::quiet_NaN();
    r.min_entropy = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  const double g = *std::max_element(r.outcome_maxima.begin(), r.outcome_maxima.end());
  // The certified bound can dip a hair below the true optimum's floor only through rounding.
  r.guessing_probability = std::clamp(g, floor, 1.0);
  r.min_entropy = min_entropy_bits(r.guessing_probability);
}

/// A failed right-hand-side solve leaves the result unusable rather than throwing.
bool generate(const Certificate& cert, double p, std::optional<double> param, Level level,
              std::vector<BellConstraint>& constraints, CertificationResult& r) {
  try {
    constraints = cert.constraints(p, param, level);
    return true;
  } catch (const SolverFailure& e) {
    std::fill(r.statuses.begin(), r.statuses.end(), e.status());
    finish(r, 0.25);
    return false;
  }
}

}  // namespace

OutcomeBounds pair_outcome_bounds(MomentStructurePtr structure,
                                  const std::vector<BellConstraint>& constraints, SettingsPair pair,
                                  ConstraintMode mode, const SolverOptions& solver,
                                  std::optional<double> stop_at) {
  OutcomeBounds out;
  for (const auto& o : kOutcomes) {
    const auto r = solve_outcome(structure, constraints,
                                 probability_functional(*structure, pair.alice, pair.bob, o[0], o[1]),
                                 mode, solver);
    out.maxima.push_back(r.bound);
    out.statuses.push_back(r.status);
    if (r.status != SolverStatus::Optimal) {
      out.certified = false;
      return out;
    }
    if (stop_at && r.bound >= *stop_at) {
      out.stopped_early = true;
      return out;
    }
  }
  return out;
}

CertificationResult guessing_probability(const Certificate& cert, double p, std::optional<double> param,
                                         const EvalOptions& options) {
  const Level level = options.level.value_or(cert.level);
  const auto structure = shared_structure(cert.scenario, level);

  CertificationResult r;
  r.certificate = cert.name;
  r.p = p;
  if (cert.param) r.param = param;
  r.level = level;
  r.pair = cert.target;
  r.outcome_maxima.assign(4, 1.0);
  r.statuses.assign(4, SolverStatus::NumericalTrouble);
  std::vector<BellConstraint> constraints;
  if (!generate(cert, p, param, level, constraints, r)) return r;
  parallel_for(4, options.threads, [&](std::size_t k) {
    const auto s = solve_outcome(
        structure, constraints,
        probability_functional(*structure, cert.target.alice, cert.target.bob, kOutcomes[k][0], kOutcomes[k][1]),
        options.mode, options.solver);
    r.outcome_maxima[k] = s.bound;
    r.statuses[k] = s.status;
  });
  finish(r, 0.25);
  return r;
}

CertificationResult local_guessing_probability(const Certificate& cert, double p, std::optional<double> param,
                                               Party party, const EvalOptions& options) {
  const Level level = options.level.value_or(cert.level);
  const auto structure = shared_structure(cert.scenario, level);
  const int setting = party == Party::Alice ? cert.target.alice : cert.target.bob;

  CertificationResult r;
  r.certificate = cert.name;
  r.p = p;
  if (cert.param) r.param = param;
  r.level = level;
  r.pair = cert.target;
  r.local = true;
  r.outcome_maxima.assign(2, 1.0);
  r.statuses.assign(2, SolverStatus::NumericalTrouble);
  std::vector<BellConstraint> constraints;
  if (!generate(cert, p, param, level, constraints, r)) return r;
  parallel_for(2, options.threads, [&](std::size_t k) {
    const auto s = solve_outcome(structure, constraints,
                                 local_probability_functional(*structure, party, setting, k == 0 ? 1 : -1),
                                 options.mode, options.solver);
    r.outcome_maxima[k] = s.bound;
    r.statuses[k] = s.status;
  });
  finish(r, 0.5);
  return r;
}

SdpSolution quantum_max_solution(const BellOperator& op, Level level, const SolverOptions& solver) {
  SdpProblem problem;
  problem.structure = shared_structure(op.scenario, level);
  problem.objective = functional_from_operator(*problem.structure, op);
  return solve(problem, solver);
}

double quantum_max(const BellOperator& op, Level level, const SolverOptions& solver) {
  SdpProblem problem;
  problem.structure = shared_structure(op.scenario, level);
  problem.objective = functional_from_operator(*problem.structure, op);
  const SdpSolution sol = solve(problem, solver);
  if (!sol.optimal()) throw SolverFailure("quantum maximum solve ended " + to_string(sol.status), sol.status);
  return certify_bound(problem, sol);
}

double t3max_given_C(double C, Level level, const SolverOptions& solver) {
  if (!(C >= -1e-12 && C <= 2.0 * kSqrt2 + 1e-12)) throw Error("C must lie in [0, 2*sqrt(2)]");
  static std::mutex mutex;
  static std::map<std::pair<double, Level>, double> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find({C, level}); it != cache.end()) return it->second;
  }
  const BellOperator t3 = catalog("t3");
  const auto structure = shared_structure(t3.scenario, level);
  std::vector<BellConstraint> sides;
  if (C > 0.0) {
    sides = {{catalog("chsh1"), C, Relation::AtLeast}, {catalog("chsh2"), C, Relation::AtLeast}};
  }
  const SdpProblem problem =
      build_problem(structure, sides, functional_from_operator(*structure, t3), ConstraintMode::AtLeast);
  const SdpSolution sol = solve(problem, solver);
  if (!sol.optimal()) {
    throw SolverFailure("T3 maximum at C=" + std::to_string(C) + " ended " + to_string(sol.status), sol.status);
  }
  // Primal value: attained by a feasible moment vector, so p-scaled targets stay feasible.
  const double value = sol.objective_value;
  std::lock_guard lock(mutex);
  cache.emplace(std::pair{C, level}, value);
  return value;
}

namespace {

double score(const CertificationResult& r) {
  return r.certified ? r.min_entropy : -std::numeric_limits<double>::infinity();
}

}  // namespace

TuneResult tune_parameter(const Certificate& cert, double p, int grid_points, int refine_steps,
                          const EvalOptions& options) {
  if (!cert.param) throw Error("certificate '" + cert.name + "' has no tunable parameter");
  const ParamSpec& spec = *cert.param;
  const int n = grid_points > 0 ? grid_points : spec.grid_points;
  if (n < 2) throw Error("tuning grid needs at least two points");

  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = spec.lo + (spec.hi - spec.lo) * i / (n - 1);
  xs.back() = spec.hi;

  std::vector<CertificationResult> grid(n);
  EvalOptions inner = options;
  inner.threads = 1;
  parallel_for(n, options.threads, [&](std::size_t i) { grid[i] = guessing_probability(cert, p, xs[i], inner); });

  TuneResult out;
  int best = 0;
  for (int i = 0; i < n; ++i) {
    out.grid.emplace_back(xs[i], grid[i].certified ? grid[i].min_entropy : std::numeric_limits<double>::quiet_NaN());
    if (score(grid[i]) > score(grid[best])) best = i;
  }
  out.best_param = xs[best];
  out.result = grid[best];

  // Golden-section search on the bracket around the best grid point.
  double a = xs[std::max(best - 1, 0)];
  double b = xs[std::min(best + 1, n - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto eval = [&](double x) {
    auto r = guessing_probability(cert, p, x, options);
    if (score(r) > score(out.result)) {
      out.best_param = x;
      out.result = r;
    }
    return score(r);
  };
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = refine_steps > 0 ? eval(x1) : 0.0;
  double f2 = refine_steps > 0 ? eval(x2) : 0.0;
  for (int k = 1; k < refine_steps; ++k) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = eval(x2);
    }
  }
  return out;
}

std::vector<CertificationResult> sweep_noise(const Certificate& cert, const std::vector<double>& p_list,
                                             const ParamPolicy& policy, const EvalOptions& options) {
  if (cert.param && policy.kind == ParamPolicy::Kind::None) {
    throw Error("certificate '" + cert.name + "' needs a fixed or tuned " + cert.param->name);
  }
  std::vector<CertificationResult> out(p_list.size());
  EvalOptions inner = options;
  inner.threads = 1;
  parallel_for(p_list.size(), options.threads, [&](std::size_t i) {
    const double p = p_list[i];
    if (!cert.param) {
      out[i] = guessing_probability(cert, p, std::nullopt, inner);
    } else if (policy.kind == ParamPolicy::Kind::Fixed) {
      out[i] = guessing_probability(cert, p, policy.value, inner);
    } else {
      out[i] = tune_parameter(cert, p, policy.grid_points, policy.refine_steps, inner).result;
    }
  });
  return out;
}

}  // namespace qrcert
