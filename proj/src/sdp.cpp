#include "qrcert/sdp.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <sstream>

namespace qrcert {

std::string to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Optimal: return "Optimal";
    case SolverStatus::Infeasible: return "Infeasible";
    case SolverStatus::MaxIterations: return "MaxIterations";
    case SolverStatus::NumericalTrouble: return "NumericalTrouble";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Entry {
  int r;
  int c;
  double v;
};

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// max b.z + b0  s.t.  F0 + sum_k z_k F_k >= 0 (dense block),  g0 + G z >= 0 (slacks).
/// The moment vector is recovered as y = y_const + T z.
struct Reduced {
  int n = 0;
  int lp = 0;
  int m = 0;
  std::vector<std::vector<Entry>> F;
  std::vector<Entry> F0;
  Matrix G;
  Vector g0;
  Vector b;
  double b0 = 0.0;
  Vector y_const;
  std::vector<std::vector<std::pair<int, double>>> class_map;
  double sign = 1.0;
  bool infeasible = false;
};

void check_functional(const MomentFunctional& f, int n_vars) {
  for (const auto& [k, c] : f.coefficients) {
    if (k < 0 || k >= n_vars) throw Error("functional references a class outside the structure");
    if (!std::isfinite(c)) throw Error("non-finite functional coefficient");
  }
  if (!std::isfinite(f.constant)) throw Error("non-finite functional constant");
}

/// Substitutes y = y_const + T z into a functional: returns (row over z, constant).
std::pair<Vector, double> substitute(const Reduced& red, const MomentFunctional& f) {
  const MomentFunctional pf = f.pinned();
  Vector row = Vector::Zero(red.m);
  double constant = pf.constant;
  for (const auto& [cls, coef] : pf.coefficients) {
    constant += coef * red.y_const[cls];
    for (const auto& [var, t] : red.class_map[cls]) row[var] += coef * t;
  }
  return {row, constant};
}

Reduced reduce(const SdpProblem& problem) {
  if (!problem.structure) throw Error("SDP problem has no moment structure");
  const MomentStructure& ms = *problem.structure;
  const int N = ms.n_vars();
  check_functional(problem.objective, N);
  for (const auto& c : problem.equalities) check_functional(c.functional, N);
  for (const auto& c : problem.inequalities) check_functional(c.functional, N);

  Reduced red;
  red.n = ms.dimension();
  red.sign = problem.sense == Sense::Maximize ? 1.0 : -1.0;

  // Gauss-Jordan elimination of the equality rows (class 0 is already pinned).
  const int rows = static_cast<int>(problem.equalities.size());
  Matrix E = Matrix::Zero(rows, N);
  Vector h(rows);
  for (int i = 0; i < rows; ++i) {
    const MomentFunctional pf = problem.equalities[i].functional.pinned();
    for (const auto& [k, c] : pf.coefficients) E(i, k) = c;
    h[i] = problem.equalities[i].rhs - pf.constant;
  }
  std::vector<int> pivot_of_row(rows, -1);
  std::vector<int> pivot_row_of_class(N, -1);
  for (int i = 0; i < rows; ++i) {
    const double scale = std::max(1.0, E.row(i).cwiseAbs().maxCoeff());
    int best = -1;
    double best_abs = 0.0;
    for (int k = 1; k < N; ++k) {
      if (pivot_row_of_class[k] >= 0) continue;
      if (std::abs(E(i, k)) > best_abs) { best_abs = std::abs(E(i, k)); best = k; }
    }
    if (best < 0 || best_abs <= 1e-10 * scale) {
      if (std::abs(h[i]) > 1e-9 * std::max(1.0, std::abs(problem.equalities[i].rhs))) {
        red.infeasible = true;
      }
      E.row(i).setZero();
      h[i] = 0.0;
      continue;  // redundant row
    }
    const double piv = E(i, best);
    E.row(i) /= piv;
    h[i] /= piv;
    for (int r = 0; r < rows; ++r) {
      if (r == i || E(r, best) == 0.0) continue;
      const double f = E(r, best);
      E.row(r) -= f * E.row(i);
      h[r] -= f * h[i];
      E(r, best) = 0.0;
    }
    pivot_of_row[i] = best;
    pivot_row_of_class[best] = i;
  }
  E = E.unaryExpr([](double v) { return std::abs(v) < 1e-14 ? 0.0 : v; });

  std::vector<int> var_of_class(N, -1);
  for (int k = 1; k < N; ++k) {
    if (pivot_row_of_class[k] < 0) var_of_class[k] = red.m++;
  }
  red.y_const = Vector::Zero(N);
  red.y_const[0] = 1.0;
  red.class_map.assign(N, {});
  for (int k = 1; k < N; ++k) {
    if (var_of_class[k] >= 0) {
      red.class_map[k].push_back({var_of_class[k], 1.0});
    } else {
      const int i = pivot_row_of_class[k];
      red.y_const[k] = h[i];
      for (int j = 1; j < N; ++j) {
        if (var_of_class[j] >= 0 && E(i, j) != 0.0) red.class_map[k].push_back({var_of_class[j], -E(i, j)});
      }
    }
  }

  red.F.assign(red.m, {});
  for (int r = 0; r < red.n; ++r) {
    for (int c = 0; c < red.n; ++c) {
      const int cls = ms.entry_class(r, c);
      if (red.y_const[cls] != 0.0) red.F0.push_back({r, c, red.y_const[cls]});
      for (const auto& [var, t] : red.class_map[cls]) red.F[var].push_back({r, c, t});
    }
  }

  auto [brow, bconst] = substitute(red, problem.objective);
  red.b = red.sign * brow;
  red.b0 = red.sign * bconst;

  std::vector<Vector> g_rows;
  std::vector<double> g_consts;
  for (const auto& ineq : problem.inequalities) {
    auto [row, constant] = substitute(red, ineq.functional);
    constant -= ineq.rhs;
    if (row.cwiseAbs().maxCoeff() <= 1e-14 || row.size() == 0) {
      if (constant < -1e-9) red.infeasible = true;
      continue;
    }
    g_rows.push_back(row);
    g_consts.push_back(constant);
  }
  red.lp = static_cast<int>(g_rows.size());
  red.G.resize(red.lp, red.m);
  red.g0.resize(red.lp);
  for (int l = 0; l < red.lp; ++l) {
    red.G.row(l) = g_rows[l].transpose();
    red.g0[l] = g_consts[l];
  }
  return red;
}

/// tr(F Y) for a sparse symmetric F and a general Y.
double trace_product(const std::vector<Entry>& f, const Matrix& y) {
  double s = 0.0;
  for (const auto& e : f) s += e.v * y(e.c, e.r);
  return s;
}

void accumulate(Matrix& out, const std::vector<Entry>& f, double scale) {
  if (scale == 0.0) return;
  for (const auto& e : f) out(e.r, e.c) += scale * e.v;
}

double frobenius(const std::vector<Entry>& f) {
  double s = 0.0;
  for (const auto& e : f) s += e.v * e.v;
  return std::sqrt(s);
}

/// Largest alpha with base + alpha * step still positive definite (inf if unbounded).
double max_step(const Eigen::LLT<Matrix>& base, const Matrix& step) {
  Matrix w = base.matrixL().solve(step);
  w = base.matrixL().solve(w.transpose().eval());
  w = 0.5 * (w + w.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(w, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return lmin < 0.0 ? -1.0 / lmin : kInf;
}

double max_step(const Vector& base, const Vector& step) {
  double alpha = kInf;
  for (int i = 0; i < base.size(); ++i)
    if (step[i] < 0.0) alpha = std::min(alpha, -base[i] / step[i]);
  return alpha;
}

struct Direction {
  Vector dz;
  Matrix dX;
  Matrix dS;
  Vector dx;
  Vector ds;
};

class InteriorPoint {
 public:
  InteriorPoint(const Reduced& red, const SolverOptions& opt) : red_(red), opt_(opt) {}

  SdpSolution run();
  SolverStatus stalled_status(const SdpSolution& sol) const;

 private:
  Matrix dense_f0() const {
    Matrix out = Matrix::Zero(red_.n, red_.n);
    accumulate(out, red_.F0, 1.0);
    return out;
  }
  Matrix combination(const Vector& coef) const {
    Matrix out = Matrix::Zero(red_.n, red_.n);
    for (int k = 0; k < red_.m; ++k) accumulate(out, red_.F[k], coef[k]);
    return out;
  }
  void build_schur();
  void build_gram();
  Direction direction(double mu_target, const Matrix* corr, const Vector* corr_lp) const;

  const Reduced& red_;
  const SolverOptions& opt_;

  Matrix X_, S_, Z_, Rd_;
  Vector x_, s_, z_, rd_, rp_;
  Matrix schur_;
  Eigen::LLT<Matrix> schur_llt_;
  Eigen::LLT<Matrix> gram_llt_;
};

void InteriorPoint::build_schur() {
  const int m = red_.m;
  schur_.setZero(m, m);
  // M_ij = tr(F_i X F_j Z) = sum over entries (a,b) of F_i and (c,d) of F_j of X(b,c) Z(d,a).
  for (int i = 0; i < m; ++i) {
    for (const auto& ei : red_.F[i]) {
      const double* xb = X_.col(ei.c).data();
      const double* za = Z_.col(ei.r).data();
      for (int j = i; j < m; ++j) {
        double acc = 0.0;
        for (const auto& ej : red_.F[j]) acc += ej.v * xb[ej.r] * za[ej.c];
        schur_(i, j) += ei.v * acc;
      }
    }
  }
  if (red_.lp > 0) {
    const Vector w = x_.cwiseQuotient(s_);
    schur_.triangularView<Eigen::Upper>() += (red_.G.transpose() * w.asDiagonal() * red_.G);
  }
  schur_.triangularView<Eigen::StrictlyLower>() = schur_.transpose();
}

void InteriorPoint::build_gram() {
  // tr(F_i F_j) plus the slack-block overlap; constant over the run.
  const int m = red_.m;
  Matrix gram = Matrix::Zero(m, m);
  Matrix marker = Matrix::Zero(red_.n, red_.n);
  for (int i = 0; i < m; ++i) {
    for (const auto& e : red_.F[i]) marker(e.r, e.c) = e.v;
    for (int j = i; j < m; ++j) {
      double acc = 0.0;
      for (const auto& e : red_.F[j]) acc += e.v * marker(e.r, e.c);
      gram(i, j) = acc;
    }
    for (const auto& e : red_.F[i]) marker(e.r, e.c) = 0.0;
  }
  if (red_.lp > 0) gram.triangularView<Eigen::Upper>() += red_.G.transpose() * red_.G;
  gram.triangularView<Eigen::StrictlyLower>() = gram.transpose();
  gram_llt_.compute(gram);
}

Direction InteriorPoint::direction(double mu_target, const Matrix* corr, const Vector* corr_lp) const {
  const int m = red_.m;
  Matrix t = mu_target * Z_ - X_ * Rd_ * Z_;
  if (corr) t -= *corr;
  Vector tl(red_.lp);
  for (int l = 0; l < red_.lp; ++l) {
    tl[l] = mu_target / s_[l] - x_[l] * rd_[l] / s_[l] - (corr_lp ? (*corr_lp)[l] : 0.0);
  }
  Vector rhs(m);
  for (int k = 0; k < m; ++k) rhs[k] = red_.b[k] + trace_product(red_.F[k], t);
  if (red_.lp > 0) rhs += red_.G.transpose() * tl;

  Direction d;
  d.dz = schur_llt_.solve(rhs);
  d.dS = Rd_ + combination(d.dz);
  d.ds = rd_ + red_.G * d.dz;
  d.dX = mu_target * Z_ - X_ - X_ * d.dS * Z_;
  if (corr) d.dX -= *corr;
  d.dX = (0.5 * (d.dX + d.dX.transpose())).eval();
  d.dx.resize(red_.lp);
  for (int l = 0; l < red_.lp; ++l) {
    d.dx[l] = mu_target / s_[l] - x_[l] - x_[l] * d.ds[l] / s_[l] -
              (corr_lp ? (*corr_lp)[l] : 0.0);
  }
  // Rounding in the dense products above leaves the primal step slightly off the
  // equality subspace once the Schur matrix is ill conditioned; project it back.
  if (m > 0 && gram_llt_.info() == Eigen::Success) {
    Vector err(m);
    for (int k = 0; k < m; ++k) err[k] = trace_product(red_.F[k], d.dX) + rp_[k];
    if (red_.lp > 0) err += red_.G.transpose() * d.dx;
    const Vector lambda = gram_llt_.solve(err);
    d.dX -= combination(lambda);
    if (red_.lp > 0) d.dx -= red_.G * lambda;
  }
  return d;
}

SolverStatus InteriorPoint::stalled_status(const SdpSolution& sol) const {
  const bool close = sol.gap <= opt_.stall_gap_tol && sol.primal_infeasibility <= opt_.stall_feas_tol &&
                     sol.dual_infeasibility <= opt_.stall_feas_tol;
  return close ? SolverStatus::Optimal : SolverStatus::NumericalTrouble;
}

SdpSolution InteriorPoint::run() {
  const int n = red_.n;
  const int lp = red_.lp;
  const int m = red_.m;
  const double cones = static_cast<double>(n + lp);
  const Matrix F0 = dense_f0();
  const double norm_f0 = std::sqrt(F0.squaredNorm() + red_.g0.squaredNorm());
  const double norm_b = red_.b.norm();

  // Scaled-identity start.
  double xi = std::max(10.0, std::sqrt(cones));
  double eta = std::max({10.0, std::sqrt(cones), norm_f0});
  for (int k = 0; k < m; ++k) {
    const double fk = std::sqrt(std::pow(frobenius(red_.F[k]), 2) + red_.G.col(k).squaredNorm());
    xi = std::max(xi, std::sqrt(cones) * (1.0 + std::abs(red_.b[k])) / (1.0 + fk));
    eta = std::max(eta, fk);
  }
  X_ = xi * Matrix::Identity(n, n);
  S_ = eta * Matrix::Identity(n, n);
  x_ = Vector::Constant(lp, xi);
  s_ = Vector::Constant(lp, eta);
  z_ = Vector::Zero(m);

  SdpSolution sol;
  Vector& rp = rp_;
  rp.resize(m);
  if (m > 0) build_gram();
  std::vector<double> errors;
  for (int iter = 0;; ++iter) {
    Rd_ = F0 + combination(z_) - S_;
    rd_ = red_.g0 + red_.G * z_ - s_;
    for (int k = 0; k < m; ++k) rp[k] = red_.b[k] + trace_product(red_.F[k], X_);
    if (lp > 0) rp += red_.G.transpose() * x_;

    const double pobj = red_.b.dot(z_) + red_.b0;
    const double dobj = (F0.cwiseProduct(X_)).sum() + red_.g0.dot(x_) + red_.b0;
    const double mu = ((X_.cwiseProduct(S_)).sum() + x_.dot(s_)) / cones;
    sol.gap = std::abs(dobj - pobj) / std::max(1.0, 0.5 * (std::abs(pobj) + std::abs(dobj)));
    sol.primal_infeasibility = std::sqrt(Rd_.squaredNorm() + rd_.squaredNorm()) / (1.0 + norm_f0);
    sol.dual_infeasibility = rp.norm() / (1.0 + norm_b);
    sol.dual_residual_l1 = rp.cwiseAbs().sum();
    sol.objective_value = red_.sign * pobj;
    sol.dual_value = red_.sign * dobj;
    sol.iterations = iter;
    sol.gap_history.push_back(sol.gap);
    if (opt_.verbose) {
      std::fprintf(stderr, "%3d pobj % .10e dobj % .10e gap %.2e pinf %.2e dinf %.2e mu %.2e\n", iter,
                   pobj, dobj, sol.gap, sol.primal_infeasibility, sol.dual_infeasibility, mu);
    }

    if (sol.gap <= opt_.gap_tol && sol.primal_infeasibility <= opt_.feas_tol &&
        sol.dual_infeasibility <= opt_.feas_tol) {
      sol.status = SolverStatus::Optimal;
      break;
    }
    if (X_.cwiseAbs().maxCoeff() > 1e10 || (lp > 0 && x_.maxCoeff() > 1e10)) {
      sol.status = SolverStatus::Infeasible;
      break;
    }
    // No factor-2 improvement of the worst residual in the last stall_window steps.
    const double error = std::max({sol.gap, sol.primal_infeasibility, sol.dual_infeasibility});
    errors.push_back(error);
    if (opt_.stall_window > 0 && iter > 2 * opt_.stall_window) {
      const auto split = errors.end() - opt_.stall_window;
      const double before = *std::min_element(errors.begin(), split);
      const double recent = *std::min_element(split, errors.end());
      if (recent > 0.5 * before) {
        sol.status = stalled_status(sol);
        break;
      }
    }
    if (iter >= opt_.max_iter) {
      sol.status = SolverStatus::MaxIterations;
      break;
    }

    Eigen::LLT<Matrix> s_llt(S_);
    Eigen::LLT<Matrix> x_llt(X_);
    if (s_llt.info() != Eigen::Success || x_llt.info() != Eigen::Success) {
      sol.status = stalled_status(sol);
      break;
    }
    Z_ = s_llt.solve(Matrix::Identity(n, n));
    Z_ = (0.5 * (Z_ + Z_.transpose())).eval();

    if (m > 0) {
      build_schur();
      schur_llt_.compute(schur_);
      if (schur_llt_.info() != Eigen::Success) {
        // Near the optimum the Schur matrix can lose definiteness to rounding.
        const double shift = 1e-13 * std::max(1.0, schur_.diagonal().cwiseAbs().maxCoeff());
        schur_.diagonal().array() += shift;
        schur_llt_.compute(schur_);
        if (schur_llt_.info() != Eigen::Success) {
          sol.status = stalled_status(sol);
          break;
        }
      }
    } else {
      schur_llt_.compute(Matrix::Identity(0, 0));
    }

    // Predictor.
    const Direction pred = direction(0.0, nullptr, nullptr);
    const double ap = std::min(1.0, std::min(max_step(x_llt, pred.dX), max_step(x_, pred.dx)));
    const double ad = std::min(1.0, std::min(max_step(s_llt, pred.dS), max_step(s_, pred.ds)));
    const double mu_aff = (((X_ + ap * pred.dX).cwiseProduct(S_ + ad * pred.dS)).sum() +
                           (x_ + ap * pred.dx).dot(s_ + ad * pred.ds)) / cones;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // Corrector.
    auto steps = [&](const Direction& dir) {
      return std::pair{
          std::min(1.0, opt_.step_fraction * std::min(max_step(x_llt, dir.dX), max_step(x_, dir.dx))),
          std::min(1.0, opt_.step_fraction * std::min(max_step(s_llt, dir.dS), max_step(s_, dir.ds)))};
    };
    const Matrix corr = pred.dX * pred.dS * Z_;
    const Vector corr_lp = pred.dx.cwiseProduct(pred.ds).cwiseQuotient(s_);
    Direction d = direction(sigma * mu, &corr, &corr_lp);
    auto [alpha_p, alpha_d] = steps(d);
    // Short steps mean the iterate drifted off the central path: recentre instead.
    for (double recentre : {0.5, 1.0}) {
      if (std::min(alpha_p, alpha_d) >= 0.1 || sigma >= recentre) break;
      Direction c = direction(recentre * mu, nullptr, nullptr);
      auto [cp, cd] = steps(c);
      if (std::min(cp, cd) > std::min(alpha_p, alpha_d)) {
        d = std::move(c);
        alpha_p = cp;
        alpha_d = cd;
      }
    }
    if (opt_.verbose) std::fprintf(stderr, "    sigma %.2e alpha_p %.3e alpha_d %.3e\n", sigma, alpha_p, alpha_d);
    if (alpha_p < 1e-12 && alpha_d < 1e-12) {
      sol.status = stalled_status(sol);
      break;
    }
    X_ += alpha_p * d.dX;
    x_ += alpha_p * d.dx;
    S_ += alpha_d * d.dS;
    s_ += alpha_d * d.ds;
    z_ += alpha_d * d.dz;
  }

  Vector y = red_.y_const;
  for (int k = 0; k < static_cast<int>(red_.class_map.size()); ++k)
    for (const auto& [var, t] : red_.class_map[k]) y[k] += t * z_[var];
  sol.y = std::move(y);
  return sol;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolverOptions& options) {
  const Reduced red = reduce(problem);
  if (red.infeasible) {
    SdpSolution sol;
    sol.status = SolverStatus::Infeasible;
    sol.y = red.y_const;
    return sol;
  }
  InteriorPoint ipm(red, options);
  return ipm.run();
}

SdpSolution solve_lmi(const LmiProblem& problem, const SolverOptions& options) {
  const int n = static_cast<int>(problem.F0.rows());
  const int m = static_cast<int>(problem.F.size());
  if (problem.F0.cols() != n || problem.b.size() != m) throw Error("LMI shapes do not match");
  const int lp = static_cast<int>(problem.g0.size());
  if (lp > 0 && (problem.G.rows() != lp || problem.G.cols() != m)) throw Error("LMI slack block shape mismatch");
  auto sparse = [n](const Matrix& a) {
    if (a.rows() != n || a.cols() != n) throw Error("LMI matrix has the wrong size");
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw Error("LMI matrices must be symmetric");
    std::vector<Entry> out;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        if (a(r, c) != 0.0) out.push_back({r, c, a(r, c)});
    return out;
  };
  Reduced red;
  red.n = n;
  red.m = m;
  red.lp = lp;
  red.F0 = sparse(problem.F0);
  for (const auto& f : problem.F) red.F.push_back(sparse(f));
  red.G = lp > 0 ? problem.G : Matrix::Zero(0, m);
  red.g0 = lp > 0 ? problem.g0 : Vector::Zero(0);
  red.b = problem.b;
  red.y_const = Vector::Zero(m);
  red.class_map.assign(m, {});
  for (int k = 0; k < m; ++k) red.class_map[k].push_back({k, 1.0});
  InteriorPoint ipm(red, options);
  return ipm.run();
}

double certify_bound(const SdpProblem& problem, const SdpSolution& solution) {
  if (!solution.optimal()) {
    throw Error("certify_bound needs an Optimal solution, got " + to_string(solution.status));
  }
  const double slack = solution.dual_residual_l1;
  return problem.sense == Sense::Maximize ? solution.dual_value + slack : solution.dual_value - slack;
}

namespace {

void write_functional(std::ostream& out, const MomentFunctional& f) {
  out << std::setprecision(17) << f.constant << ' ' << f.coefficients.size();
  for (const auto& [k, c] : f.coefficients) out << ' ' << k << ':' << c;
  out << '\n';
}

}  // namespace

std::string dump_problem(const SdpProblem& problem) {
  if (!problem.structure) throw Error("SDP problem has no moment structure");
  const MomentStructure& ms = *problem.structure;
  std::ostringstream out;
  out << "qrcert-sdp 1\n";
  out << "sense " << (problem.sense == Sense::Maximize ? "max" : "min") << '\n';
  out << "dimension " << ms.dimension() << '\n';
  out << "classes " << ms.n_vars() << '\n';
  for (int r = 0; r < ms.dimension(); ++r)
    for (int c = r; c < ms.dimension(); ++c) out << "entry " << r << ' ' << c << ' ' << ms.entry_class(r, c) << '\n';
  out << "objective ";
  write_functional(out, problem.objective);
  for (const auto& e : problem.equalities) {
    out << "eq " << std::setprecision(17) << e.rhs << ' ';
    write_functional(out, e.functional);
  }
  for (const auto& e : problem.inequalities) {
    out << "geq " << std::setprecision(17) << e.rhs << ' ';
    write_functional(out, e.functional);
  }
  return out.str();
}

std::string to_sdpa(const SdpProblem& problem) {
  const Reduced red = reduce(problem);
  if (red.infeasible) throw Error("equality constraints are inconsistent");
  // SDPA: min c.x  s.t.  sum_k x_k F_k - F_0 >= 0.  Here c = -b, SDPA F_0 = -F0.
  std::ostringstream out;
  out << std::setprecision(17);
  out << "* qrcert reduced LMI; objective constant " << red.b0 << " (sign " << red.sign << ")\n";
  out << red.m << '\n' << (red.lp > 0 ? 2 : 1) << '\n' << red.n;
  if (red.lp > 0) out << ' ' << -red.lp;
  out << '\n';
  for (int k = 0; k < red.m; ++k) out << (k ? " " : "") << -red.b[k];
  out << '\n';
  auto emit = [&out](int mat, const std::vector<Entry>& entries, double scale) {
    for (const auto& e : entries)
      if (e.r <= e.c) out << mat << " 1 " << e.r + 1 << ' ' << e.c + 1 << ' ' << scale * e.v << '\n';
  };
  emit(0, red.F0, -1.0);
  for (int l = 0; l < red.lp; ++l)
    if (red.g0[l] != 0.0) out << "0 2 " << l + 1 << ' ' << l + 1 << ' ' << -red.g0[l] << '\n';
  for (int k = 0; k < red.m; ++k) {
    emit(k + 1, red.F[k], 1.0);
    for (int l = 0; l < red.lp; ++l)
      if (red.G(l, k) != 0.0) out << k + 1 << " 2 " << l + 1 << ' ' << l + 1 << ' ' << red.G(l, k) << '\n';
  }
  return out.str();
}

}  // namespace qrcert
