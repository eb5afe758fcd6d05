#pragma once

#include <array>
#include <vector>

#include "qrcert/bell.hpp"
#include "qrcert/npa.hpp"

namespace qrcert {

using BlochVector = std::array<double, 3>;

/// Projective qubit measurements on the Werner state
/// p |psi-><psi-| + (1 - p) 1/4. Each setting is a unit Bloch vector; the
/// +1 outcome projects onto (1 + n.sigma)/2.
struct QubitStrategy {
  std::vector<BlochVector> alice;
  std::vector<BlochVector> bob;
  double visibility = 1.0;

  /// Measurements in the x-z plane at the given angles (x = sin, z = cos).
  static QubitStrategy planar(const std::vector<double>& alice_angles,
                              const std::vector<double>& bob_angles, double p = 1.0);

  Scenario scenario() const;
};

/// Cor(i, j) = -p a_i . b_j (singlet anticorrelation sign); marginals vanish.
/// For planar settings this is -p cos(alpha_i - beta_j).
Correlators singlet_correlations(const QubitStrategy& s);

/// Every class moment <w^dagger w'> computed from 4x4 matrices (real part).
Eigen::VectorXd qubit_moments(const MomentStructure& m, const QubitStrategy& s);

/// Reference strategies at which the catalog operators reach their quantum maxima
/// (with the -cos sign convention above).
QubitStrategy chsh_strategy(double p = 1.0);
QubitStrategy braunstein_caves_strategy(int n, double p = 1.0);
/// Reaches E0 = 2p cos(phi), E1 = 2p sin(phi).
QubitStrategy e0e1_strategy(double phi, double p = 1.0);
QubitStrategy modchsh_strategy(double p = 1.0);
/// Tetrahedral Alice settings against Pauli x, y, z for Bob: T3 = 4 sqrt(3) p.
QubitStrategy t3_strategy(double p = 1.0);

}  // namespace qrcert
