#include "qrcert/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "qrcert/parallel.hpp"
#include "qrcert/rng.hpp"

namespace qrcert {

namespace {

constexpr double kDegenerateTol = 1e-6;

/// Row-major key of a correlator table, for ordered maps.
std::vector<double> key_of(const BellOperator& op) {
  std::vector<double> k(op.joint.size());
  for (int a = 0; a < op.joint.rows(); ++a)
    for (int b = 0; b < op.joint.cols(); ++b) k[a * op.joint.cols() + b] = op.joint(a, b);
  return k;
}

}  // namespace

void SearchConfig::validate() const {
  if (sample_count < 1) throw Error("sample_count must be at least 1");
  if (!(bin_width > 0.0)) throw Error("bin_width must be positive");
  if (!(p > 0.0 && p <= 1.0)) throw Error("noise parameter p must lie in (0, 1]");
}

int histogram_bin(double entropy, double bin_width) {
  // Half-open bins; a value within rounding of an edge counts in the upper bin.
  const double x = entropy / bin_width;
  return std::max(0, static_cast<int>(std::floor(x + 1e-9)));
}

BellOperator sample_operator(std::mt19937_64& rng, Scenario scenario) {
  BellOperator op(scenario);
  for (int a = 0; a < scenario.n_alice; ++a)
    for (int b = 0; b < scenario.n_bob; ++b) op.joint(a, b) = static_cast<double>(uniform_below(rng, 3)) - 1.0;
  return op;
}

OperatorEvaluation evaluate_operator(const BellOperator& op, const SearchConfig& config) {
  if (!(op.scenario == config.scenario)) throw Error("operator scenario differs from the search scenario");
  OperatorEvaluation out;
  out.classical_bound = classical_bound(op);
  const SdpSolution qsol = quantum_max_solution(op, config.level, config.solver);
  out.solves = 1;
  if (!qsol.optimal()) {
    out.skipped = true;
    return out;
  }
  SdpProblem qproblem;
  qproblem.structure = shared_structure(op.scenario, config.level);
  qproblem.objective = functional_from_operator(*qproblem.structure, op);
  // The right-hand side must stay attainable, so use the primal value here and
  // the certified one only for the degeneracy test.
  out.quantum_max = qsol.objective_value;
  const double upper = certify_bound(qproblem, qsol);
  if (upper - out.classical_bound <= kDegenerateTol) {
    out.degenerate = true;
    out.min_entropy = 0.0;
    return out;
  }

  const auto structure = qproblem.structure;
  const std::vector<BellConstraint> constraints{{op, config.p * out.quantum_max, Relation::Target}};
  double best_guess = std::numeric_limits<double>::infinity();
  bool have_best = false;
  for (int a = 1; a <= op.scenario.n_alice; ++a) {
    for (int b = 1; b <= op.scenario.n_bob; ++b) {
      std::optional<double> stop;
      if (have_best) stop = best_guess;
      const OutcomeBounds bounds =
          pair_outcome_bounds(structure, constraints, {a, b}, ConstraintMode::Equality, config.solver, stop);
      out.solves += static_cast<int>(bounds.statuses.size());
      if (!bounds.certified) {
        out.skipped = true;
        return out;
      }
      if (bounds.stopped_early) continue;
      const double g = std::min(1.0, *std::max_element(bounds.maxima.begin(), bounds.maxima.end()));
      if (!have_best || g < best_guess) {
        best_guess = g;
        out.pair = {a, b};
        have_best = true;
      }
    }
  }
  out.min_entropy = min_entropy_bits(best_guess);
  return out;
}

SearchReport run_search(const SearchConfig& config) {
  config.validate();
  SearchReport report;
  report.config = config;
  report.bin_width = config.bin_width;
  report.sample_count = config.sample_count;

  std::mt19937_64 rng(config.seed);
  std::vector<BellOperator> samples;
  samples.reserve(config.sample_count);
  for (int i = 0; i < config.sample_count; ++i) samples.push_back(sample_operator(rng, config.scenario));

  // Isomorphic operators share their entropy, so each class is evaluated once.
  std::map<std::vector<double>, int> class_index;
  std::vector<BellOperator> classes;
  std::vector<int> sample_class(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    BellOperator canon = canonical_form(samples[i]);
    auto [it, inserted] = class_index.emplace(key_of(canon), static_cast<int>(classes.size()));
    if (inserted) classes.push_back(std::move(canon));
    sample_class[i] = it->second;
  }
  report.distinct_classes = static_cast<int>(classes.size());

  std::vector<OperatorEvaluation> evals(classes.size());
  parallel_for(classes.size(), config.threads, [&](std::size_t k) { evals[k] = evaluate_operator(classes[k], config); });

  const int n_bins = std::max(1, static_cast<int>(std::ceil(2.0 / config.bin_width - 1e-9)));
  report.histogram.assign(n_bins, 0);
  std::vector<int> instances(classes.size(), 0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const OperatorEvaluation& e = evals[sample_class[i]];
    if (e.skipped) {
      ++report.skipped;
      report.entropies.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    ++report.evaluated;
    if (e.degenerate) ++report.degenerate;
    report.entropies.push_back(e.min_entropy);
    const int bin = std::min(histogram_bin(e.min_entropy, config.bin_width), n_bins - 1);
    ++report.histogram[bin];
    ++instances[sample_class[i]];
  }

  for (std::size_t k = 0; k < classes.size(); ++k) {
    const OperatorEvaluation& e = evals[k];
    if (e.skipped || e.min_entropy <= config.top_threshold) continue;
    report.top_classes.push_back({classes[k], instances[k], e.min_entropy, e.pair, e.quantum_max, e.classical_bound});
  }
  std::stable_sort(report.top_classes.begin(), report.top_classes.end(),
                   [](const TopClass& l, const TopClass& r) { return l.min_entropy > r.min_entropy; });
  return report;
}

bool class_members_equivalent(const BellOperator& a, const BellOperator& b, const std::vector<double>& p_list,
                              const SearchConfig& config) {
  if (!(a.scenario == b.scenario)) return false;
  SearchConfig c = config;
  c.scenario = a.scenario;
  for (double p : p_list) {
    c.p = p;
    const OperatorEvaluation ea = evaluate_operator(a, c);
    const OperatorEvaluation eb = evaluate_operator(b, c);
    if (ea.skipped || eb.skipped) return false;
    if (std::abs(ea.quantum_max - eb.quantum_max) > 1e-5) return false;
    if (std::abs(ea.min_entropy - eb.min_entropy) > 1e-5) return false;
  }
  return true;
}

}  // namespace qrcert
