#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringwell/levels.hpp"
#include "ringwell/model.hpp"
#include "ringwell/numerics.hpp"

namespace ringwell {

struct SingularError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidRegimeError : std::runtime_error {
  int mode;
  InvalidRegimeError(const std::string& msg, int k)
      : std::runtime_error(msg + " (mode " + std::to_string(k) + ")"), mode(k) {}
};

struct DepletionError : std::runtime_error {
  double m0;
  explicit DepletionError(double m0_)
      : std::runtime_error("sf_ground_distributions: condensate occupation m_0 = " +
                           std::to_string(m0_) + " < 0; Bogoliubov picture broken"),
        m0(m0_) {}
};

namespace detail {

inline double g_of_mode(const ModelParams& p, int k) {
  const double c = std::cos(2.0 * std::numbers::pi * k / p.M);
  return p.V0 / p.M + 2.0 * p.T * (1.0 - c) - p.U * p.N / p.M;
}

}  // namespace detail

// Coherent displacement that removes the terms linear in the fluctuation
// operators: x_k = -V0 sqrt(N) / [(U N - M g_k)(1 + S)] with
// S = sum_{k!=0} V0 / (U N - M g_k). Completing the square leaves the scalar
//   Phi = -V0 sqrt(N) X / M = -N V0 S / [M (1 + S)],   X = sum_{k!=0} x_k,
// and C_total = Lambda + Phi is the constant of the displaced quadratic form.
struct SfDisplacement {
  std::vector<double> x;  // k = 0..M-1, x[0] = 0, x_k = x_{M-k}
  double S_sum = 0.0;
  double Phi = 0.0;
  double C_total = 0.0;
};

inline SfDisplacement displacement_params(const ModelParams& p) {
  const DerivedParams d = derive(p);
  SfDisplacement out;
  out.x.assign(p.M, 0.0);
  out.C_total = d.Lambda;
  if (p.V0 == 0.0) return out;
  const double un_total = p.U * p.N;
  std::vector<double> denom(p.M, 0.0);
  for (int k = 1; k < p.M; ++k) {
    denom[k] = un_total - p.M * detail::g_of_mode(p, k);
    const double scale = std::abs(un_total) + p.M * std::abs(detail::g_of_mode(p, k));
    if (std::abs(denom[k]) <= 1e-13 * std::max(scale, 1.0))
      throw SingularError("displacement_params: resonance U N = M g_k at mode " +
                          std::to_string(k));
    out.S_sum += p.V0 / denom[k];
  }
  if (std::abs(1.0 + out.S_sum) <= 1e-12 * (1.0 + std::abs(out.S_sum)))
    throw SingularError("displacement_params: 1 + S vanishes");
  for (int k = 1; k < p.M; ++k)
    out.x[k] = -p.V0 * std::sqrt(static_cast<double>(p.N)) / (denom[k] * (1.0 + out.S_sum));
  out.Phi = -p.N * p.V0 * out.S_sum / (p.M * (1.0 + out.S_sum));
  out.C_total = d.Lambda + out.Phi;
  return out;
}

// Antisymmetric-sector quasiparticles: nu_k = sqrt(g_k^2 - U^2 n^2) with the
// squeezing angle tanh(alpha_k) = U n / g_k. Real spectra require
// g_k - U n > 0 for every k = 1..S; the worst margin is reported, and the
// same inequality in (tau, v) form gives the threshold
// tau > (1 - v/2) / (2 M sin^2(pi k / M)), worst at k = 1.
struct NuResult {
  std::vector<double> nu, alpha;  // k = 1..S stored at [k-1]
  double worst_margin = std::numeric_limits<double>::infinity();
  int worst_k = 0;
  std::optional<double> tau_threshold;  // empty when U N == 0
};

inline NuResult nu_energies(const ModelParams& p) {
  const ModeGrid grid = mode_grid(p);
  const double un = p.U * p.N / p.M;
  NuResult out;
  for (int k = 1; k <= grid.S; ++k) {
    const double margin = grid.g[k] - un;
    if (margin < out.worst_margin) {
      out.worst_margin = margin;
      out.worst_k = k;
    }
  }
  if (grid.S >= 1 && out.worst_margin < 0.0)
    throw InvalidRegimeError("nu_energies: g_k - U n < 0", out.worst_k);
  out.nu.resize(grid.S);
  out.alpha.resize(grid.S);
  for (int k = 1; k <= grid.S; ++k) {
    out.nu[k - 1] = std::sqrt(grid.g[k] * grid.g[k] - un * un);
    out.alpha[k - 1] = (un == 0.0) ? 0.0 : std::atanh(un / grid.g[k]);
  }
  const DerivedParams d = derive(p);
  if (d.tau) {
    const double s1 = std::sin(std::numbers::pi / p.M);
    out.tau_threshold = (1.0 - *d.v / 2.0) / (2.0 * p.M * s1 * s1);
  }
  return out;
}

// Symmetric-sector level shifts: the K roots of
//   1 = -(V0/M) sum_h r_h^2 / (theta - g_h),
// one below g_1 and one in each gap, so theta_l < g_l pole by pole.
inline std::vector<double> theta_solve(const ModelParams& p, const RootConfig& cfg = {}) {
  const ModeGrid grid = mode_grid(p);
  if (p.V0 == 0.0)
    return std::vector<double>(grid.g.begin() + 1, grid.g.end());
  SecularProblem prob;
  prob.poles.assign(grid.g.begin() + 1, grid.g.end());
  prob.weights.resize(grid.K);
  for (int k = 1; k <= grid.K; ++k) prob.weights[k - 1] = p.V0 / p.M * grid.r2[k];
  return solve_secular(prob, SecularSide::below, cfg);
}

// Perturbative theta for weak coupling t = 8T/(M V0) >> 1. The angular
// offsets xi_k solve (t c_k - 1 + rho_k) xi^2 + (t - rho_k) s_k xi + 8/M^2 = 0
// with rho_k = 4/[M^2 (1 - c_k)]; the branch that vanishes as t grows is
// taken, reducing to xi_k = -8/(t M^2 s_k) and theta_k ~= g_k - 2 V0 / M.
struct ThetaApprox {
  std::vector<double> theta, xi;   // l = 1..K at [l-1]
  std::vector<bool> complex_root;  // discriminant < 0 at this mode
  double t = 0.0;                  // 8T / (M V0)
  bool shift_form_ok = false;      // t large enough for the -2 V0/M shift form
};

inline ThetaApprox theta_approx(const ModelParams& p) {
  p.validate();
  if (p.V0 == 0.0)
    throw std::domain_error("theta_approx: undefined for V0 = 0");
  const ModeGrid grid = mode_grid(p);
  const double un = p.U * p.N / p.M;
  ThetaApprox out;
  out.t = 8.0 * p.T / (p.M * p.V0);
  out.shift_form_ok = out.t >= 50.0;
  out.theta.resize(grid.K);
  out.xi.resize(grid.K);
  out.complex_root.assign(grid.K, false);
  for (int k = 1; k <= grid.K; ++k) {
    const double c = grid.c[k], s = std::sin(grid.y[k]);
    const double rho = 4.0 / (p.M * p.M * (1.0 - c));
    const double a = out.t * c - 1.0 + rho;
    const double b = (out.t - rho) * s;
    const double cc = 8.0 / (p.M * p.M);
    const double disc = b * b - 4.0 * a * cc;
    if (disc < 0.0) {
      out.complex_root[k - 1] = true;
      out.xi[k - 1] = std::numeric_limits<double>::quiet_NaN();
      out.theta[k - 1] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double q = -0.5 * (b + std::sqrt(disc));
    const double xi = cc / q;
    out.xi[k - 1] = xi;
    out.theta[k - 1] = p.V0 / p.M - un + 2.0 * p.T * (1.0 - std::cos(grid.y[k] + xi));
  }
  return out;
}

// Orthogonal rotation diagonalizing the defect-coupled quadratic form:
// f_{h,l} = -(V0/M) r_h Y_l / (theta_l - g_h) with Y_l > 0 fixed by column
// normalization, |Y_l|^-2 = (V0/M)^2 sum_h r_h^2/(theta_l - g_h)^2.
struct FMatrix {
  Eigen::MatrixXd f;      // K x K, rows h = 1..K, columns l = 1..K
  std::vector<double> Y;  // column sums of r_h f_{h,l}
};

inline FMatrix f_matrix(const ModelParams& p, const std::vector<double>& theta) {
  const ModeGrid grid = mode_grid(p);
  if (static_cast<int>(theta.size()) != grid.K)
    throw std::invalid_argument("f_matrix: theta size must be K");
  FMatrix out;
  out.f = Eigen::MatrixXd::Zero(grid.K, grid.K);
  out.Y.assign(grid.K, 0.0);
  if (p.V0 == 0.0) {
    out.f = Eigen::MatrixXd::Identity(grid.K, grid.K);
    for (int l = 1; l <= grid.K; ++l) out.Y[l - 1] = std::sqrt(grid.r2[l]);
    return out;
  }
  const double scale = 2.0 * p.T + p.V0 + p.U * p.N;
  for (int l = 1; l <= grid.K; ++l) {
    double sum = 0.0;
    for (int h = 1; h <= grid.K; ++h) {
      const double d = theta[l - 1] - grid.g[h];
      if (std::abs(d) <= 1e-14 * scale)
        throw SingularError("f_matrix: theta_" + std::to_string(l) + " sits on pole g_" +
                            std::to_string(h));
      sum += grid.r2[h] / (d * d);
    }
    out.Y[l - 1] = p.M / (p.V0 * std::sqrt(sum));
    for (int h = 1; h <= grid.K; ++h)
      out.f(h - 1, l - 1) = -p.V0 / p.M * std::sqrt(grid.r2[h]) * out.Y[l - 1] /
                            (theta[l - 1] - grid.g[h]);
  }
  return out;
}

// Symmetric-sector quasiparticles eta_l = sqrt(theta_l^2 - U^2 n^2), squeezing
// angle tanh(beta_l) = U n / theta_l (beta >= 0). Both theta_l - U n > 0 and
// theta_l + U n > 0 must hold; margins are reported together with the
// weak-coupling sufficient conditions 4 tau M sin^2(pi k/M) > v and
// 4 tau M sin^2(pi k/M) - 2 > v (worst mode k = 1).
struct EtaResult {
  std::vector<double> eta, beta;  // l = 1..K at [l-1]
  double worst_minus = std::numeric_limits<double>::infinity();  // min (theta - U n)
  double worst_plus = std::numeric_limits<double>::infinity();   // min (theta + U n)
  int worst_l = 0;
  std::optional<double> large_t_margin_plus;   // min_k 4 tau M sin^2 - v
  std::optional<double> large_t_margin_minus;  // min_k 4 tau M sin^2 - 2 - v
};

inline EtaResult eta_energies(const ModelParams& p, const std::vector<double>& theta) {
  const double un = p.U * p.N / p.M;
  EtaResult out;
  for (std::size_t l = 0; l < theta.size(); ++l) {
    const double dm = theta[l] - un, dp = theta[l] + un;
    if (dm < out.worst_minus) {
      out.worst_minus = dm;
      out.worst_l = static_cast<int>(l) + 1;
    }
    out.worst_plus = std::min(out.worst_plus, dp);
  }
  if (!theta.empty() && (out.worst_minus < 0.0 || out.worst_plus < 0.0))
    throw InvalidRegimeError("eta_energies: theta_l -+ U n < 0", out.worst_l);
  out.eta.resize(theta.size());
  out.beta.resize(theta.size());
  for (std::size_t l = 0; l < theta.size(); ++l) {
    out.eta[l] = std::sqrt(theta[l] * theta[l] - un * un);
    out.beta[l] = (un == 0.0) ? 0.0 : std::atanh(un / theta[l]);
  }
  const DerivedParams d = derive(p);
  if (d.tau) {
    const double s1 = std::sin(std::numbers::pi / p.M);
    const double base = 4.0 * *d.tau * p.M * s1 * s1;
    out.large_t_margin_plus = base - *d.v;
    out.large_t_margin_minus = base - 2.0 - *d.v;
  }
  return out;
}

// Full Bogoliubov solution of the defected ring.
struct SfSolution {
  ModelParams params;
  ModeGrid grid;
  SfDisplacement disp;
  NuResult f_sector;
  std::vector<double> theta;
  FMatrix rot;
  EtaResult F_sector;
};

inline SfSolution solve_sf(const ModelParams& p, const RootConfig& cfg = {}) {
  SfSolution sol;
  sol.params = p;
  sol.grid = mode_grid(p);
  sol.disp = displacement_params(p);
  sol.f_sector = nu_energies(p);
  sol.theta = theta_solve(p, cfg);
  sol.rot = f_matrix(p, sol.theta);
  sol.F_sector = eta_energies(p, sol.theta);
  return sol;
}

// E(p, q) = sum_k [nu_k (p_k + 1/2) - g_k/2] - C_total
//         + sum_l [eta_l (q_l + 1/2) - theta_l/2].
inline double sf_energy(const SfSolution& sol, std::span<const int> p_occ,
                        std::span<const int> q_occ) {
  const int s = static_cast<int>(sol.f_sector.nu.size());
  const int kk = static_cast<int>(sol.theta.size());
  if (static_cast<int>(p_occ.size()) != s || static_cast<int>(q_occ.size()) != kk)
    throw std::invalid_argument("sf_energy: occupation sizes do not match sectors");
  double e = -sol.disp.C_total;
  for (int k = 1; k <= s; ++k)
    e += sol.f_sector.nu[k - 1] * (p_occ[k - 1] + 0.5) - 0.5 * sol.grid.g[k];
  for (int l = 1; l <= kk; ++l)
    e += sol.F_sector.eta[l - 1] * (q_occ[l - 1] + 0.5) - 0.5 * sol.theta[l - 1];
  return e;
}

struct SfLevel {
  double energy;
  std::vector<int> p_occ;  // f-sector quanta, k = 1..S
  std::vector<int> q_occ;  // C-sector quanta, l = 1..K
};

inline std::vector<SfLevel> sf_levels(const SfSolution& sol, int count) {
  if (count < 1) throw std::invalid_argument("sf_levels: count must be >= 1");
  const int s = static_cast<int>(sol.f_sector.nu.size());
  const int kk = static_cast<int>(sol.theta.size());
  struct Mode { double e; int kind; int idx; };  // kind 0 = f, 1 = C
  std::vector<Mode> modes;
  for (int k = 1; k <= s; ++k) modes.push_back({sol.f_sector.nu[k - 1], 0, k});
  for (int l = 1; l <= kk; ++l) modes.push_back({sol.F_sector.eta[l - 1], 1, l});
  std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
    return std::tie(a.e, a.kind, a.idx) < std::tie(b.e, b.kind, b.idx);
  });
  std::vector<double> quanta(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) quanta[i] = modes[i].e;
  const std::vector<int> zero_p(s, 0), zero_q(kk, 0);
  const double e_gs = sf_energy(sol, zero_p, zero_q);
  auto configs = detail::k_smallest_unbounded(quanta, e_gs, count);
  std::vector<SfLevel> out;
  out.reserve(configs.size());
  for (auto& [e, occ] : configs) {
    SfLevel lvl;
    lvl.energy = e;
    lvl.p_occ.assign(s, 0);
    lvl.q_occ.assign(kk, 0);
    for (std::size_t i = 0; i < modes.size(); ++i) {
      if (modes[i].kind == 0)
        lvl.p_occ[modes[i].idx - 1] = occ[i];
      else
        lvl.q_occ[modes[i].idx - 1] = occ[i];
    }
    out.push_back(std::move(lvl));
  }
  return out;
}

// Ground-state occupations. For k != 0 the mode operator transforms into
//   x_k + w_k [ s_k (f ch - f^+ sh)(alpha/2) + sum_l f_{k,l} (C ch + C^+ sh)(beta_l/2) ]
// with w_k = 1/sqrt(2) (w = 1 and no f part for the self-paired mode at
// M/2), s_k = +-1 for k below/above M/2. Vacuum contraction gives
//   m_k = x_k^2 + sh^2(alpha/2)/2 + (1/2) sum_l f_{k,l}^2 sh^2(beta_l/2),
// the full momentum density matrix <b_q^+ b_k>, and from its Fourier
// transform the site occupations. The condensate mode is carried as the
// scalar sqrt(m_0) with m_0 = N - sum_{k!=0} m_k, so sum_k m_k = N exactly.
struct SfDistributions {
  std::vector<double> m;  // momentum occupations, k = 0..M-1
  std::vector<double> n;  // site occupations, j = 0..M-1
  Eigen::MatrixXd rho;    // <b_q^+ b_k>, M x M
};

inline SfDistributions sf_ground_distributions(const SfSolution& sol) {
  const ModelParams& p = sol.params;
  const int m_sites = p.M;
  const int s = static_cast<int>(sol.f_sector.nu.size());
  const int kk = static_cast<int>(sol.theta.size());
  const bool even = m_sites % 2 == 0;

  // sh^2 of half angles
  std::vector<double> sha2(s), shb2(kk);
  for (int k = 0; k < s; ++k) {
    const double sh = std::sinh(0.5 * sol.f_sector.alpha[k]);
    sha2[k] = sh * sh;
  }
  for (int l = 0; l < kk; ++l) {
    const double sh = std::sinh(0.5 * sol.F_sector.beta[l]);
    shb2[l] = sh * sh;
  }
  // C-sector pair correlations sum_l f_{i,l} f_{j,l} sh^2(beta_l/2)
  Eigen::MatrixXd cpair = Eigen::MatrixXd::Zero(kk, kk);
  for (int i = 0; i < kk; ++i)
    for (int j = 0; j < kk; ++j) {
      double acc = 0.0;
      for (int l = 0; l < kk; ++l) acc += sol.rot.f(i, l) * sol.rot.f(j, l) * shb2[l];
      cpair(i, j) = acc;
    }

  auto reduced = [&](int k) { return std::min(k, m_sites - k); };
  auto is_edge = [&](int k) { return even && k == m_sites / 2; };
  auto fsign = [&](int k) { return k <= m_sites / 2 ? 1.0 : -1.0; };
  auto weight = [&](int k) { return is_edge(k) ? 1.0 : std::numbers::sqrt2 / 2.0; };

  SfDistributions out;
  out.m.assign(m_sites, 0.0);
  double depletion = 0.0;
  for (int k = 1; k < m_sites; ++k) {
    const int kp = reduced(k);
    double mk = sol.disp.x[k] * sol.disp.x[k];
    if (!is_edge(k) && kp <= s) mk += 0.5 * sha2[kp - 1];
    const double wk = weight(k);
    mk += wk * wk * cpair(kp - 1, kp - 1);
    out.m[k] = mk;
    depletion += mk;
  }
  const double m0 = p.N - depletion;
  if (m0 < 0.0) throw DepletionError(m0);
  out.m[0] = m0;

  out.rho = Eigen::MatrixXd::Zero(m_sites, m_sites);
  out.rho(0, 0) = m0;
  const double b0 = std::sqrt(m0);
  for (int k = 1; k < m_sites; ++k) {
    out.rho(0, k) = b0 * sol.disp.x[k];
    out.rho(k, 0) = out.rho(0, k);
  }
  for (int q = 1; q < m_sites; ++q)
    for (int k = 1; k < m_sites; ++k) {
      const int qp = reduced(q), kp = reduced(k);
      double val = sol.disp.x[q] * sol.disp.x[k];
      if (qp == kp && !is_edge(q) && !is_edge(k) && kp <= s)
        val += fsign(q) * fsign(k) * 0.5 * sha2[kp - 1];
      val += weight(q) * weight(k) * cpair(qp - 1, kp - 1);
      out.rho(q, k) = val;
    }

  out.n.assign(m_sites, 0.0);
  for (int j = 0; j < m_sites; ++j) {
    double acc = 0.0;
    for (int q = 0; q < m_sites; ++q)
      for (int k = 0; k < m_sites; ++k)
        acc += std::cos(2.0 * std::numbers::pi * (k - q) * j / m_sites) * out.rho(q, k);
    out.n[j] = acc / m_sites;
  }
  return out;
}

// Numerical cross-check of the analytic quasiparticle energies: the positive
// symplectic spectrum of the displaced quadratic form over modes k != 0,
//   A_qk = g_k delta_qk - V0/M,  B_qk = -U n delta_{q, -k},
// must reproduce the multiset {nu_k} union {eta_l}.
struct BdgCheck {
  bool ok = false;
  double max_abs_diff = 0.0;
  double tol = 0.0;
  Eigen::VectorXd numeric;   // from bdg_eig, ascending
  Eigen::VectorXd analytic;  // sorted {nu} u {eta}
};

inline BdgCheck bdg_compare(const ModelParams& p, const std::vector<double>& nu,
                            const std::vector<double>& eta) {
  const int m = p.M - 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(m, m, -p.V0 / p.M);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
  const double un = p.U * p.N / p.M;
  for (int i = 0; i < m; ++i) {
    a(i, i) += detail::g_of_mode(p, i + 1);
    const int partner = p.M - (i + 1);  // -k mod M
    b(i, partner - 1) = -un;
  }
  BdgCheck out;
  out.numeric = bdg_eig(a, b);
  std::vector<double> all(nu);
  all.insert(all.end(), eta.begin(), eta.end());
  std::sort(all.begin(), all.end());
  out.analytic = Eigen::Map<const Eigen::VectorXd>(all.data(), all.size());
  if (out.numeric.size() != out.analytic.size())
    throw std::logic_error("bdg_compare: sector sizes do not add up to M-1");
  double scale = 1.0;
  if (out.analytic.size() > 0)
    scale = std::max({1.0, out.analytic.cwiseAbs().maxCoeff(), out.numeric.cwiseAbs().maxCoeff()});
  out.tol = 1e-9 * scale;
  out.max_abs_diff = (out.numeric - out.analytic).cwiseAbs().maxCoeff();
  out.ok = out.max_abs_diff <= out.tol;
  return out;
}

inline BdgCheck bdg_oracle_check(const ModelParams& p, const RootConfig& cfg = {}) {
  const SfSolution sol = solve_sf(p, cfg);
  return bdg_compare(p, sol.f_sector.nu, sol.F_sector.eta);
}

}  // namespace ringwell
