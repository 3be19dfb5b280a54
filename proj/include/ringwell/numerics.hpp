#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ringwell {

struct NoBracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RootConfig {
  double rel_tol = 1e-15;
  double abs_tol = 1e-15;
  int max_iter = 200;
  double pole_offset_frac = 1e-9;  // initial bracket inset as a fraction of the pole gap
};

// Safeguarded bracketed root search (Brent: bisection with secant/inverse
// quadratic acceleration). The iterate never leaves [lo, hi].
template <class F>
double solve_bracketed(F&& f, double lo, double hi, const RootConfig& cfg = {}) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw NoBracketError("solve_bracketed: no sign change on bracket");
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol = 0.5 * (cfg.rel_tol * std::abs(b) + cfg.abs_tol);
    const double mid = 0.5 * (c - b);
    if (std::abs(mid) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double s = fb / fa, pp, qq;
      if (a == c) {
        pp = 2.0 * mid * s;
        qq = 1.0 - s;
      } else {
        double q0 = fa / fc, r0 = fb / fc;
        pp = s * (2.0 * mid * q0 * (q0 - r0) - (b - a) * (r0 - 1.0));
        qq = (q0 - 1.0) * (r0 - 1.0) * (s - 1.0);
      }
      if (pp > 0.0) qq = -qq;
      pp = std::abs(pp);
      if (2.0 * pp < std::min(3.0 * mid * qq - std::abs(tol * qq), std::abs(e * qq))) {
        e = d;
        d = pp / qq;
      } else {
        d = mid;
        e = d;
      }
    } else {
      d = mid;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (mid > 0.0 ? tol : -tol);
    fb = f(b);
    if (fb == 0.0) return b;
  }
  throw NoConvergenceError("solve_bracketed: max_iter exceeded");
}

// Rational secular problem: sum_i weights[i] / (x - poles[i]) compared
// against the constant rhs_const. All weights must be positive; degenerate
// poles are merged (weights summed) before solving.
struct SecularProblem {
  std::vector<double> poles;
  std::vector<double> weights;
  double rhs_const = 1.0;
};

// `above`: solves rhs = +sum w/(x - d). One root in each gap between
// adjacent poles plus one above the largest pole.
// `below`: solves rhs = -sum w/(x - d). One root below the smallest pole
// plus one in each gap.
// Either way the number of roots equals the number of (merged) poles, and
// they are returned in ascending order.
enum class SecularSide { above, below };

namespace detail {

inline std::pair<std::vector<double>, std::vector<double>> merge_poles(
    const SecularProblem& prob) {
  std::vector<std::pair<double, double>> pw(prob.poles.size());
  for (std::size_t i = 0; i < prob.poles.size(); ++i)
    pw[i] = {prob.poles[i], prob.weights[i]};
  std::sort(pw.begin(), pw.end());
  const double span = pw.back().first - pw.front().first;
  const double merge_tol = 1e-12 * span;
  std::vector<double> d, w;
  for (const auto& [pole, weight] : pw) {
    if (!d.empty() && pole - d.back() <= merge_tol) {
      w.back() += weight;
    } else {
      d.push_back(pole);
      w.push_back(weight);
    }
  }
  return {std::move(d), std::move(w)};
}

}  // namespace detail

inline std::vector<double> solve_secular(const SecularProblem& prob, SecularSide side,
                                         const RootConfig& cfg = {}) {
  if (prob.poles.empty())
    throw std::invalid_argument("solve_secular: empty problem");
  if (prob.poles.size() != prob.weights.size())
    throw std::invalid_argument("solve_secular: poles/weights size mismatch");
  for (double w : prob.weights)
    if (!(w > 0.0)) throw std::invalid_argument("solve_secular: weights must be > 0");
  if (!(prob.rhs_const > 0.0))
    throw std::invalid_argument("solve_secular: rhs_const must be > 0");

  auto [d, w] = detail::merge_poles(prob);
  const int m = static_cast<int>(d.size());
  const double sgn = (side == SecularSide::above) ? 1.0 : -1.0;
  auto residual = [&, sgn](double x) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += w[i] / (x - d[i]);
    return prob.rhs_const - sgn * s;
  };

  double wsum = 0.0;
  for (double wi : w) wsum += wi;
  const double reach = wsum / prob.rhs_const;  // max distance of exterior root from the pole

  // Walk from `pole` in direction `dir` until the residual has the sign the
  // divergence dictates (or an exact zero shows up, which is the root itself).
  auto near_pole = [&](double pole, int dir, double gap, bool want_negative,
                       double* exact_root) -> double {
    double delta = cfg.pole_offset_frac * gap;
    double x = pole + dir * delta;
    for (int i = 0; i < 80; ++i) {
      if (x == pole) break;
      const double fx = residual(x);
      if (fx == 0.0) {
        *exact_root = x;
        return x;
      }
      if (std::isfinite(fx) && (fx < 0.0) == want_negative) return x;
      delta /= 16.0;
      x = pole + dir * delta;
    }
    // Root numerically indistinguishable from the pole.
    *exact_root = pole + dir * std::abs(pole) * 1e-16;
    return *exact_root;
  };

  std::vector<double> roots;
  roots.reserve(m);
  auto solve_interval = [&](double xlo, double xhi) {
    roots.push_back(solve_bracketed(residual, xlo, xhi, cfg));
  };

  if (side == SecularSide::above) {
    for (int i = 0; i + 1 < m; ++i) {
      const double gap = d[i + 1] - d[i];
      double exact = std::numeric_limits<double>::quiet_NaN();
      const double xlo = near_pole(d[i], +1, gap, true, &exact);
      if (!std::isnan(exact)) { roots.push_back(exact); continue; }
      exact = std::numeric_limits<double>::quiet_NaN();
      const double xhi = near_pole(d[i + 1], -1, gap, false, &exact);
      if (!std::isnan(exact)) { roots.push_back(exact); continue; }
      solve_interval(xlo, xhi);
    }
    const double gap = (m > 1) ? d[m - 1] - d[0] : std::max(std::abs(d[0]), 1.0);
    double exact = std::numeric_limits<double>::quiet_NaN();
    const double xlo = near_pole(d[m - 1], +1, gap, true, &exact);
    if (!std::isnan(exact)) {
      roots.push_back(exact);
    } else {
      double xhi = d[m - 1] + reach;
      double pad = std::max(1.0, std::abs(xhi)) * 1e-12;
      for (int i = 0; i < 64 && residual(xhi) < 0.0; ++i, pad *= 2.0) xhi += pad;
      solve_interval(xlo, xhi);
    }
  } else {
    const double gap = (m > 1) ? d[m - 1] - d[0] : std::max(std::abs(d[0]), 1.0);
    double exact = std::numeric_limits<double>::quiet_NaN();
    const double xhi = near_pole(d[0], -1, gap, true, &exact);
    if (!std::isnan(exact)) {
      roots.push_back(exact);
    } else {
      double xlo = d[0] - reach;
      double pad = std::max(1.0, std::abs(xlo)) * 1e-12;
      for (int i = 0; i < 64 && residual(xlo) < 0.0; ++i, pad *= 2.0) xlo -= pad;
      solve_interval(xlo, xhi);
    }
    for (int i = 0; i + 1 < m; ++i) {
      const double g = d[i + 1] - d[i];
      double ex = std::numeric_limits<double>::quiet_NaN();
      const double xlo = near_pole(d[i], +1, g, false, &ex);
      if (!std::isnan(ex)) { roots.push_back(ex); continue; }
      ex = std::numeric_limits<double>::quiet_NaN();
      const double xhi2 = near_pole(d[i + 1], -1, g, true, &ex);
      if (!std::isnan(ex)) { roots.push_back(ex); continue; }
      solve_interval(xlo, xhi2);
    }
  }

  std::sort(roots.begin(), roots.end());
  // Postcondition: relative residual at every root.
  for (double r : roots) {
    double s_abs = 0.0, s = 0.0;
    for (int i = 0; i < m; ++i) {
      const double term = w[i] / (r - d[i]);
      s += term;
      s_abs += std::abs(term);
    }
    const double res = std::abs(prob.rhs_const - sgn * s);
    if (res > 1e-10 * (std::abs(prob.rhs_const) + s_abs))
      throw NoConvergenceError("solve_secular: residual check failed");
  }
  return roots;
}

struct Eigensystem {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

// Dense symmetric eigendecomposition; rejects matrices whose asymmetry
// exceeds 1e-12 relative to the largest entry.
inline Eigensystem sym_eig(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("sym_eig: matrix not square");
  const double scale = a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
  const double asym = a.size() ? (a - a.transpose()).cwiseAbs().maxCoeff() : 0.0;
  if (asym > 1e-12 * std::max(scale, 1.0))
    throw std::invalid_argument("sym_eig: matrix not symmetric within tolerance");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success)
    throw NoConvergenceError("sym_eig: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

struct BdgUnstableError : std::runtime_error {
  std::string which;       // "A+B" or "A-B"
  double min_eigenvalue;
  BdgUnstableError(std::string w, double m)
      : std::runtime_error("bdg_eig: " + w + " not positive definite (min eigenvalue " +
                           std::to_string(m) + ")"),
        which(std::move(w)),
        min_eigenvalue(m) {}
};

// Positive symplectic spectrum of the quadratic bosonic form
//   1/2 sum_kh [ A_kh (b_k^+ b_h + b_h b_k^+) + B_kh (b_k^+ b_h^+ + b_h b_k) ].
// Frequencies satisfy w_i^2 = eig((A-B)(A+B)); computed through the
// congruent symmetric form L^T (A-B) L with A+B = L L^T, which keeps the
// problem symmetric positive definite.
inline Eigen::VectorXd bdg_eig(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument("bdg_eig: A and B must be square and same size");
  const Eigen::MatrixXd apb = a + b;
  const Eigen::MatrixXd amb = a - b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esp(apb, Eigen::EigenvaluesOnly);
  if (esp.eigenvalues()(0) <= 0.0)
    throw BdgUnstableError("A+B", esp.eigenvalues()(0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esm(amb, Eigen::EigenvaluesOnly);
  if (esm.eigenvalues()(0) <= 0.0)
    throw BdgUnstableError("A-B", esm.eigenvalues()(0));
  Eigen::LLT<Eigen::MatrixXd> llt(apb);
  if (llt.info() != Eigen::Success)
    throw BdgUnstableError("A+B", esp.eigenvalues()(0));
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::MatrixXd sym = l.transpose() * amb * l;
  const Eigensystem es = sym_eig(sym);
  return es.values.cwiseMax(0.0).cwiseSqrt();
}

}  // namespace ringwell
