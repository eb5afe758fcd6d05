#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qrcert/bell.hpp"
#include "qrcert/certify.hpp"

namespace qrcert {

struct SearchConfig {
  Scenario scenario{4, 3};
  int sample_count = 500;
  std::uint64_t seed = 42;
  double p = 0.95;
  Level level = Level::Q2;
  double bin_width = 0.05;
  double top_threshold = 0.72;
  SolverOptions solver;
  unsigned threads = 1;

  void validate() const;
};

/// Settings pairs are tried in row-major order; the first pair reaching the
/// best entropy wins ties.
struct OperatorEvaluation {
  double min_entropy = 0.0;
  SettingsPair pair;
  double quantum_max = 0.0;
  double classical_bound = 0.0;
  bool degenerate = false;  // quantum max equals the classical bound
  bool skipped = false;     // some solve was not Optimal
  int solves = 0;
};

struct TopClass {
  BellOperator canonical;
  int instances = 0;
  double min_entropy = 0.0;
  SettingsPair pair;
  double quantum_max = 0.0;
  double classical_bound = 0.0;
};

struct SearchReport {
  SearchConfig config;
  double bin_width = 0.05;
  /// counts[k] covers [k * bin_width, (k + 1) * bin_width).
  std::vector<int> histogram;
  std::vector<TopClass> top_classes;
  int sample_count = 0;
  int evaluated = 0;  // includes degenerate operators, which land in bin 0
  int degenerate = 0;
  int skipped = 0;
  int distinct_classes = 0;
  /// Per-sample entropies in draw order; NaN for skipped samples.
  std::vector<double> entropies;
};

/// Twelve (or n_alice x n_bob) joint coefficients drawn uniformly from {-1, 0, 1}, row-major.
BellOperator sample_operator(std::mt19937_64& rng, Scenario scenario = {4, 3});

OperatorEvaluation evaluate_operator(const BellOperator& op, const SearchConfig& config);

SearchReport run_search(const SearchConfig& config);

/// Equal quantum maxima and equal best-pair entropies (within 1e-5) at every p.
bool class_members_equivalent(const BellOperator& a, const BellOperator& b, const std::vector<double>& p_list,
                              const SearchConfig& config = {});

int histogram_bin(double entropy, double bin_width);

}  // namespace qrcert
