#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "ringwell/levels.hpp"
#include "ringwell/model.hpp"
#include "ringwell/numerics.hpp"

namespace ringwell {

// In the strong-interaction limit the model reduces to one-body hopping on
// the ring with a single effective well of depth w = U N + V0 at site 0.
// This matrix is the independent oracle for the analytic spectrum below.
inline Eigen::MatrixXd one_body_matrix(const ModelParams& p) {
  p.validate();
  const double w = p.U * p.N + p.V0;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p.M, p.M);
  h(0, 0) = -w;
  for (int j = 0; j < p.M; ++j) {
    h(j, (j + 1) % p.M) += -p.T;
    h(j, (j + p.M - 1) % p.M) += -p.T;
  }
  return h;
}

// Number of roots of the symmetric-sector secular equation
// 1 = (w/M) sum_k r_k^2 / (lambda - 2T c_k): one per gap between adjacent
// poles plus the isolated one above the band.
inline int solution_count(int m) {
  if (m < 2) throw std::invalid_argument("solution_count: M must be >= 2");
  return m % 2 == 0 ? m / 2 + 1 : (m + 1) / 2;
}

// Residual of the hyperbolic form of the secular equation,
// (2T/w) sinh y - coth(M y / 2), whose unique positive zero parametrizes the
// isolated level through lambda_0 = 2T cosh y.
inline double isolated_root_residual(double y, const ModelParams& p) {
  const double w = p.U * p.N + p.V0;
  return 2.0 * p.T / w * std::sinh(y) - 1.0 / std::tanh(0.5 * p.M * y);
}

inline double solve_isolated_y(const ModelParams& p, const RootConfig& cfg = {}) {
  p.validate();
  const double w = p.U * p.N + p.V0;
  if (!(w > 0.0)) throw std::domain_error("solve_isolated_y: requires w > 0");
  auto f = [&](double y) { return isolated_root_residual(y, p); };
  // At y = asinh(w/2T) the residual is 1 - coth(My/2) < 0; expand upward.
  const double ylo = std::asinh(w / (2.0 * p.T));
  double step = std::max(ylo, 1.0 / p.M);
  double yhi = ylo + step;
  for (int i = 0; i < 200 && f(yhi) <= 0.0; ++i) {
    step *= 2.0;
    yhi = ylo + step;
    if (yhi > 710.0) throw NoConvergenceError("solve_isolated_y: bracket expansion failed");
  }
  return solve_bracketed(f, ylo, yhi, cfg);
}

// Analytic spectrum of the effective one-body model. The defect-coupled
// (symmetric) sector has levels -lambda_q, q = 0..K, with lambda stored in
// descending order: lambda[0] is the isolated root above the band and
// lambda[q] sits just above the pole 2T c_q. The antisymmetric sector keeps
// the bare levels -2T c_k, k = 1..S. B rotates the symmetric modes into the
// eigenmodes, row p holding the coefficients of eigenmode p.
struct SiSpectrum {
  std::vector<double> lambda;    // q = 0..K, descending
  std::vector<double> f_energy;  // -2T c_k, k = 1..S
  Eigen::MatrixXd B;             // (K+1) x (K+1), orthogonal
  std::vector<double> A;         // row normalizations, > 0
  double y = 0.0;                // cosh y = lambda[0] / 2T (w > 0 only)
  bool lambda0_dominant = false;
  bool si_justified = false;     // false when w == 0 or V0 == 0
};

inline SiSpectrum si_sp_energies(const ModelParams& p, const RootConfig& cfg = {}) {
  const ModeGrid grid = mode_grid(p);
  const double w = p.U * p.N + p.V0;
  SiSpectrum out;
  out.f_energy.resize(grid.S);
  for (int k = 1; k <= grid.S; ++k) out.f_energy[k - 1] = -2.0 * p.T * grid.c[k];

  const int kk = grid.K;
  out.lambda.resize(kk + 1);
  out.A.resize(kk + 1);
  out.B = Eigen::MatrixXd::Zero(kk + 1, kk + 1);

  if (w == 0.0) {
    // Pure hopping: the symmetric sector is already diagonal.
    for (int q = 0; q <= kk; ++q) {
      out.lambda[q] = 2.0 * p.T * grid.c[q];
      out.B(q, q) = 1.0;
      out.A[q] = std::sqrt(grid.r2[q]);
    }
    out.si_justified = false;
    out.lambda0_dominant = false;
    return out;
  }

  out.y = solve_isolated_y(p, cfg);
  out.lambda[0] = 2.0 * p.T * std::cosh(out.y);

  if (kk >= 1) {
    SecularProblem prob;
    prob.poles.resize(kk + 1);
    prob.weights.resize(kk + 1);
    for (int i = 0; i <= kk; ++i) {
      prob.poles[i] = 2.0 * p.T * grid.c[kk - i];  // ascending
      prob.weights[i] = w / p.M * grid.r2[kk - i];
    }
    const std::vector<double> roots = solve_secular(prob, SecularSide::above, cfg);
    // roots[kk] re-solves the isolated level; keep the hyperbolic value but
    // insist the two routes agree.
    const double scale = std::max(2.0 * p.T, w);
    if (std::abs(roots[kk] - out.lambda[0]) > 1e-8 * scale)
      throw NoConvergenceError("si_sp_energies: hyperbolic and secular isolated roots disagree");
    for (int q = 1; q <= kk; ++q) out.lambda[q] = roots[kk - q];
  }

  for (int q = 0; q <= kk; ++q) {
    double s = 0.0;
    for (int k = 0; k <= kk; ++k) {
      const double d = out.lambda[q] - 2.0 * p.T * grid.c[k];
      s += grid.r2[k] * (w / p.M) * (w / p.M) / (d * d);
    }
    out.A[q] = 1.0 / std::sqrt(s);
    for (int k = 0; k <= kk; ++k)
      out.B(q, k) = w * std::sqrt(grid.r2[k]) / p.M * out.A[q] /
                    (out.lambda[q] - 2.0 * p.T * grid.c[k]);
  }

  double rival = -std::numeric_limits<double>::infinity();
  for (int q = 1; q <= kk; ++q) rival = std::max(rival, out.lambda[q]);
  for (int k = 0; k < p.M; ++k) rival = std::max(rival, 2.0 * p.T * grid.c[k]);
  out.lambda0_dominant = out.lambda[0] > rival;
  out.si_justified = p.V0 > 0.0;
  return out;
}

enum class SiApproxBranch { isolated_large_t, isolated_small_t, doublet, uniform };

struct SiApprox {
  std::vector<double> mu;  // lambda / 2T
  double t_over_w = 0.0;
  double regime_boundary = 0.0;  // M / 4
  bool regime_ok = false;
};

// Closed-form limits of the secular roots. `doublet` gives the in-gap roots
// just above the poles c_k (large T/w); the self-paired mode at k = M/2 has
// half the generic offset because its weight r_k^2 is 1 instead of 2.
// `uniform` gives the small-T/w roots near the midpoints cos(y_k + pi/M).
inline SiApprox si_sp_energies_approx(const ModelParams& p, SiApproxBranch branch) {
  const ModeGrid grid = mode_grid(p);
  const double w = p.U * p.N + p.V0;
  if (!(w > 0.0)) throw std::domain_error("si_sp_energies_approx: requires w > 0");
  SiApprox out;
  out.t_over_w = p.T / w;
  out.regime_boundary = p.M / 4.0;
  const bool large_t = out.t_over_w > out.regime_boundary;
  switch (branch) {
    case SiApproxBranch::isolated_large_t:
      out.mu = {1.0 + w / (2.0 * p.T * p.M)};
      out.regime_ok = large_t;
      break;
    case SiApproxBranch::isolated_small_t:
      out.mu = {std::sqrt(1.0 + w * w / (4.0 * p.T * p.T))};
      out.regime_ok = !large_t;
      break;
    case SiApproxBranch::doublet:
      out.mu.resize(grid.K);
      for (int k = 1; k <= grid.K; ++k)
        out.mu[k - 1] = grid.c[k] + w * grid.r2[k] / (2.0 * p.T * p.M);
      out.regime_ok = large_t;
      break;
    case SiApproxBranch::uniform:
      out.mu.resize(grid.K);
      for (int k = 0; k < grid.K; ++k) {
        const double yb = grid.y[k] + std::numbers::pi / p.M;
        const double s = std::sin(yb);
        out.mu[k] = std::cos(yb) + 4.0 * p.T / (w * p.M) * s * s;
      }
      out.regime_ok = !large_t;
      break;
  }
  return out;
}

// Many-body level of the diagonal model: E = C_N - 2T sum_k c_k l_k
// - sum_q lambda_q m_q, with sum l + sum m = N.
inline double si_energy(const SiSpectrum& sp, const ModelParams& p,
                        std::span<const int> ell, std::span<const int> m) {
  if (static_cast<int>(ell.size()) != static_cast<int>(sp.f_energy.size()) ||
      static_cast<int>(m.size()) != static_cast<int>(sp.lambda.size()))
    throw std::invalid_argument("si_energy: occupation sizes do not match sectors");
  long total = 0;
  for (int x : ell) total += x;
  for (int x : m) total += x;
  if (total != p.N)
    throw std::invalid_argument("si_energy: occupations must sum to N");
  double e = derive(p).C_N;
  for (std::size_t k = 0; k < ell.size(); ++k) e += sp.f_energy[k] * ell[k];
  for (std::size_t q = 0; q < m.size(); ++q) e -= sp.lambda[q] * m[q];
  return e;
}

struct SiLevel {
  double energy;
  std::vector<int> ell;  // f-sector occupations, k = 1..S
  std::vector<int> m;    // D-sector occupations, q = 0..K
};

inline std::vector<SiLevel> si_levels(const ModelParams& p, int count,
                                      const RootConfig& cfg = {}) {
  if (count < 1) throw std::invalid_argument("si_levels: count must be >= 1");
  const SiSpectrum sp = si_sp_energies(p, cfg);
  const int s = static_cast<int>(sp.f_energy.size());
  const int kk = static_cast<int>(sp.lambda.size()) - 1;
  // Single-particle levels sorted ascending; ties resolved D-sector first.
  struct Level { double e; int kind; int idx; };  // kind 0 = D, 1 = f
  std::vector<Level> levels;
  for (int q = 0; q <= kk; ++q) levels.push_back({-sp.lambda[q], 0, q});
  for (int k = 1; k <= s; ++k) levels.push_back({sp.f_energy[k - 1], 1, k});
  std::sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) {
    return std::tie(a.e, a.kind, a.idx) < std::tie(b.e, b.kind, b.idx);
  });
  std::vector<double> energies(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) energies[i] = levels[i].e;
  const double c_n = derive(p).C_N;
  auto configs = detail::k_smallest_fixed_total(energies, p.N, count);
  std::vector<SiLevel> out;
  out.reserve(configs.size());
  for (auto& [e, occ] : configs) {
    SiLevel lvl;
    lvl.energy = c_n + e;
    lvl.ell.assign(s, 0);
    lvl.m.assign(kk + 1, 0);
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (levels[i].kind == 0)
        lvl.m[levels[i].idx] = occ[i];
      else
        lvl.ell[levels[i].idx - 1] = occ[i];
    }
    out.push_back(std::move(lvl));
  }
  return out;
}

namespace detail {

inline double log_sinh(double z) {  // z > 0
  return z + std::log1p(-std::exp(-2.0 * z)) - std::numbers::ln2;
}

inline double log_cosh(double z) {
  z = std::abs(z);
  return z + std::log1p(std::exp(-2.0 * z)) - std::numbers::ln2;
}

}  // namespace detail

// Ground state of the effective model: all N bosons in the isolated level.
// x are the momentum amplitudes of that level, xi the site amplitudes, and
// n_j = N xi_j^2, m_k = N x_k^2 the occupations. Closed forms:
//   n_j     = 2N cosh^2[(M/2 - j) y] / (M + sinh(M y) coth y)
//   |x_k|^2 = [2 sinh^2(M y/2) sinh^2 y / (M + sinh(M y) coth y)]
//             / [M (cosh y - c_k)^2]
// The 1/M in |x_k|^2 follows from sum_k (cosh y - c_k)^{-2}
//   = M [M + sinh(M y) coth y] / [2 sinh^2(M y/2) sinh^2 y]
// (differentiate the ring sum identity for sum_k (cosh y - c_k)^{-1});
// it is what makes sum_k |x_k|^2 = 1 hold exactly.
struct SiGroundState {
  double y = 0.0;
  std::vector<double> x, xi, n, m;  // all of size M
};

inline SiGroundState si_ground_distributions(const ModelParams& p, const RootConfig& cfg = {}) {
  const ModeGrid grid = mode_grid(p);
  const double w = p.U * p.N + p.V0;
  if (!(w > 0.0))
    throw std::domain_error("si_ground_distributions: no bound state parametrization (w == 0)");
  SiGroundState out;
  out.y = solve_isolated_y(p, cfg);
  const double y = out.y;
  const double my = p.M * y;
  out.x.resize(p.M);
  out.xi.resize(p.M);
  out.n.resize(p.M);
  out.m.resize(p.M);
  if (my < 600.0) {
    const double denom = p.M + std::sinh(my) / std::tanh(y);
    const double shmy2 = std::sinh(0.5 * my);
    const double shy = std::sinh(y);
    const double chy = std::cosh(y);
    for (int j = 0; j < p.M; ++j) {
      const double a = std::cosh((0.5 * p.M - j) * y);
      out.n[j] = 2.0 * p.N * a * a / denom;
      out.xi[j] = std::sqrt(out.n[j] / p.N);
    }
    for (int k = 0; k < p.M; ++k) {
      const double d = chy - grid.c[k];
      const double xk2 = 2.0 * shmy2 * shmy2 * shy * shy / denom / (p.M * d * d);
      out.m[k] = p.N * xk2;
      out.x[k] = std::sqrt(xk2);
    }
  } else {
    // Exponent arithmetic for deep wells where sinh(M y) overflows.
    const double log_denom = detail::log_sinh(my) - std::log(std::tanh(y));
    for (int j = 0; j < p.M; ++j) {
      const double a = (0.5 * p.M - j) * y;
      out.n[j] = 2.0 * p.N * std::exp(2.0 * detail::log_cosh(a) - log_denom);
      out.xi[j] = std::sqrt(out.n[j] / p.N);
    }
    const double log_chy = detail::log_cosh(y);
    for (int k = 0; k < p.M; ++k) {
      const double log_d = log_chy + std::log1p(-grid.c[k] * std::exp(-log_chy));
      const double log_xk2 = std::numbers::ln2 + 2.0 * detail::log_sinh(0.5 * my) +
                             2.0 * detail::log_sinh(y) - log_denom - 2.0 * log_d -
                             std::log(static_cast<double>(p.M));
      const double xk2 = std::exp(log_xk2);
      out.m[k] = p.N * xk2;
      out.x[k] = std::sqrt(xk2);
    }
  }
  return out;
}

}  // namespace ringwell
