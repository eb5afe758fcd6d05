#include "qrcert/qubit.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace qrcert {

namespace {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

Mat2 projector(const BlochVector& n) {
  Mat2 sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, Complex(0, -1), Complex(0, 1), 0;
  sz << 1, 0, 0, -1;
  return 0.5 * (Mat2::Identity() + n[0] * sx + n[1] * sy + n[2] * sz);
}

Mat4 werner_state(double p) {
  Eigen::Vector4cd singlet(0, 1, -1, 0);
  singlet /= std::sqrt(2.0);
  return p * singlet * singlet.adjoint() + (1.0 - p) * Mat4::Identity() / 4.0;
}

Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

BlochVector planar_vector(double angle) { return {std::sin(angle), 0.0, std::cos(angle)}; }

BlochVector negated(BlochVector v) { return {-v[0], -v[1], -v[2]}; }

/// Bob's settings are stored antipodal so that the singlet's -a.b becomes +a.b.
QubitStrategy aligned(const std::vector<double>& alice, const std::vector<double>& bob, double p) {
  std::vector<double> shifted(bob);
  for (double& b : shifted) b += std::numbers::pi;
  return QubitStrategy::planar(alice, shifted, p);
}

}  // namespace

QubitStrategy QubitStrategy::planar(const std::vector<double>& alice_angles,
                                    const std::vector<double>& bob_angles, double p) {
  QubitStrategy s;
  for (double a : alice_angles) s.alice.push_back(planar_vector(a));
  for (double b : bob_angles) s.bob.push_back(planar_vector(b));
  s.visibility = p;
  return s;
}

Scenario QubitStrategy::scenario() const {
  return Scenario(static_cast<int>(alice.size()), static_cast<int>(bob.size()));
}

Correlators singlet_correlations(const QubitStrategy& s) {
  Correlators c(s.scenario());
  for (std::size_t i = 0; i < s.alice.size(); ++i) {
    for (std::size_t j = 0; j < s.bob.size(); ++j) {
      const auto& a = s.alice[i];
      const auto& b = s.bob[j];
      c.joint(i, j) = -s.visibility * (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]);
    }
  }
  return c;
}

Eigen::VectorXd qubit_moments(const MomentStructure& m, const QubitStrategy& s) {
  if (!(s.scenario() == m.scenario())) throw Error("strategy does not match the structure");
  const Mat4 rho = werner_state(s.visibility);
  std::vector<Mat4> alice_ops, bob_ops;
  for (const auto& a : s.alice) alice_ops.push_back(kron(projector(a), Mat2::Identity()));
  for (const auto& b : s.bob) bob_ops.push_back(kron(Mat2::Identity(), projector(b)));

  Eigen::VectorXd y(m.n_vars());
  for (int k = 0; k < m.n_vars(); ++k) {
    const Monomial& w = m.representative(k);
    Mat4 op = Mat4::Identity();
    for (int a : w.alice) op = op * alice_ops[a - 1];
    for (int b : w.bob) op = op * bob_ops[b - 1];
    y[k] = (rho * op).trace().real();
  }
  return y;
}

QubitStrategy chsh_strategy(double p) {
  using std::numbers::pi;
  return aligned({0.0, pi / 2}, {pi / 4, -pi / 4}, p);
}

QubitStrategy braunstein_caves_strategy(int n, double p) {
  using std::numbers::pi;
  std::vector<double> alice, bob;
  for (int k = 0; k < n; ++k) {
    alice.push_back(k * pi / n);
    bob.push_back(k * pi / n - pi / (2 * n));
  }
  return aligned(alice, bob, p);
}

QubitStrategy e0e1_strategy(double phi, double p) {
  using std::numbers::pi;
  return aligned({0.0, -pi / 2}, {-phi, phi}, p);
}

QubitStrategy modchsh_strategy(double p) {
  using std::numbers::pi;
  return aligned({0.0, pi / 2}, {pi / 2, pi / 4, -pi / 4}, p);
}

QubitStrategy t3_strategy(double p) {
  const double r = 1.0 / std::sqrt(3.0);
  QubitStrategy s;
  s.alice = {{r, r, r}, {r, r, -r}, {r, -r, r}, {r, -r, -r}};
  s.bob = {negated({1, 0, 0}), negated({0, 1, 0}), negated({0, 0, 1})};
  s.visibility = p;
  return s;
}

}  // namespace qrcert
