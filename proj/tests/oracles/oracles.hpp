#pragma once

// Independent reference computations for the test suites. None of these call
// the library code paths they are used to check.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "qrcert/bell.hpp"
#include "qrcert/qubit.hpp"

namespace oracle {

/// Classical bound by enumerating every deterministic assignment of both parties.
inline double classical_bound_full(const qrcert::BellOperator& op) {
  const int na = op.scenario.n_alice;
  const int nb = op.scenario.n_bob;
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint32_t ma = 0; ma < (1u << na); ++ma) {
    for (std::uint32_t mb = 0; mb < (1u << nb); ++mb) {
      double v = op.constant;
      for (int i = 0; i < na; ++i) {
        const double a = (ma >> i & 1u) ? -1.0 : 1.0;
        v += op.alice_marginal[i] * a;
        for (int j = 0; j < nb; ++j) {
          const double b = (mb >> j & 1u) ? -1.0 : 1.0;
          v += op.joint(i, j) * a * b;
        }
      }
      for (int j = 0; j < nb; ++j) v += op.bob_marginal[j] * ((mb >> j & 1u) ? -1.0 : 1.0);
      best = std::max(best, v);
    }
  }
  return best;
}

/// Single-party min-entropy certified by a CHSH value S, in closed form.
inline double local_chsh_entropy(double S) {
  if (S <= 2.0) return 0.0;
  return -std::log2(0.5 + 0.5 * std::sqrt(2.0 - S * S / 4.0));
}

inline double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Singlet strategy for a correlator-only operator by alternating maximisation:
/// with Cor = -a.b, each side's best unit vector given the other is closed form.
/// Several random starts; returns the best found.
inline qrcert::QubitStrategy seesaw_singlet(const qrcert::BellOperator& op, int restarts = 20,
                                            std::uint64_t seed = 1) {
  using V = Eigen::Vector3d;
  const int na = op.scenario.n_alice;
  const int nb = op.scenario.n_bob;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  auto value = [&](const std::vector<V>& a, const std::vector<V>& b) {
    double v = 0.0;
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < nb; ++j) v -= op.joint(i, j) * a[i].dot(b[j]);
    return v;
  };
  auto best_response = [](const std::vector<V>& other, const Eigen::MatrixXd& w, std::vector<V>& out) {
    for (int i = 0; i < static_cast<int>(out.size()); ++i) {
      V s = V::Zero();
      for (int j = 0; j < static_cast<int>(other.size()); ++j) s -= w(i, j) * other[j];
      if (s.norm() > 1e-14) out[i] = s.normalized();
    }
  };
  std::vector<V> best_a, best_b;
  double best = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    std::vector<V> a(na), b(nb);
    for (auto& v : a) v = V(g(rng), g(rng), g(rng)).normalized();
    for (auto& v : b) v = V(g(rng), g(rng), g(rng)).normalized();
    for (int it = 0; it < 2000; ++it) {
      best_response(b, op.joint, a);
      best_response(a, op.joint.transpose(), b);
    }
    const double v = value(a, b);
    if (v > best) { best = v; best_a = a; best_b = b; }
  }
  qrcert::QubitStrategy s;
  for (const auto& v : best_a) s.alice.push_back({v[0], v[1], v[2]});
  for (const auto& v : best_b) s.bob.push_back({v[0], v[1], v[2]});
  return s;
}

}  // namespace oracle
