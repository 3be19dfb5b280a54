#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "ringwell/exact.hpp"
#include "ringwell/sf.hpp"
#include "ringwell/si.hpp"
#include "ringwell/sweep.hpp"

namespace ringwell {

struct ValidationCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool pass = true;

  void add(std::string name, bool ok, std::string detail) {
    pass = pass && ok;
    checks.push_back({std::move(name), ok, std::move(detail)});
  }

  nlohmann::json to_json() const {
    nlohmann::json out;
    out["meta"] = {{"artifact", "ringwell"}, {"version", kVersion}, {"command", "validate"}};
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks)
      arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    out["checks"] = std::move(arr);
    out["pass"] = pass;
    return out;
  }
};

namespace detail {

inline ModelParams random_params(std::mt19937_64& rng, int m_min = 2, int m_max = 12) {
  std::uniform_int_distribution<int> md(m_min, m_max), nd(1, 8);
  std::uniform_real_distribution<double> ud(0.05, 2.0);
  ModelParams p;
  p.M = md(rng);
  p.N = nd(rng);
  p.T = ud(rng);
  p.U = ud(rng);
  p.V0 = ud(rng);
  return p;
}

// max |difference| between the analytic spectrum union and the one-body
// matrix eigenvalues, both sorted.
inline double union_spectrum_gap(const ModelParams& p) {
  const SiSpectrum sp = si_sp_energies(p);
  std::vector<double> analytic;
  for (double l : sp.lambda) analytic.push_back(-l);
  for (double fe : sp.f_energy) analytic.push_back(fe);
  std::sort(analytic.begin(), analytic.end());
  const Eigensystem es = sym_eig(one_body_matrix(p));
  double worst = 0.0;
  for (int i = 0; i < p.M; ++i)
    worst = std::max(worst, std::abs(analytic[i] - es.values(i)));
  return worst;
}

}  // namespace detail

// Self-check suite behind the `validate` subcommand: the cross-solver oracles
// and the structural identities, on fixed seeds.
inline ValidationReport run_validate() {
  ValidationReport rep;

  {  // sector sizes
    bool ok = true;
    for (int m = 2; m <= 64 && ok; ++m) {
      const ModeGrid g = mode_grid({.M = m, .N = 1, .T = 1.0, .U = 0.0, .V0 = 0.0});
      ok = g.S + g.K + 1 == m;
    }
    rep.add("mode_grid_sizes", ok, "S + K + 1 == M for M in 2..64");
  }

  {  // secular solution count
    bool ok = true;
    std::string detail;
    for (int m = 2; m <= 12; ++m) {
      const ModelParams p{.M = m, .N = 4, .T = 0.7, .U = 0.3, .V0 = 0.2};
      const SiSpectrum sp = si_sp_energies(p);
      const int expected = solution_count(m);
      if (static_cast<int>(sp.lambda.size()) != expected) {
        ok = false;
        detail = "M=" + std::to_string(m) + ": got " + std::to_string(sp.lambda.size()) +
                 ", expected " + std::to_string(expected);
        break;
      }
    }
    rep.add("solution_count", ok, ok ? "M/2+1 (even), (M+1)/2 (odd) for M in 2..12" : detail);
  }

  {  // union-spectrum oracle
    std::mt19937_64 rng(20250809);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const ModelParams p = detail::random_params(rng);
      const double scale = std::max(2.0 * p.T, p.U * p.N + p.V0);
      worst = std::max(worst, detail::union_spectrum_gap(p) / scale);
    }
    rep.add("si_union_spectrum", worst <= 1e-9,
            "worst relative gap " + format_double(worst) + " (tol 1e-9), 50 draws");
  }

  {  // SI normalizations and symmetry
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int i = 0; i < 25; ++i) {
      const ModelParams p = detail::random_params(rng, 2, 10);
      const SiGroundState gs = si_ground_distributions(p);
      double sx = 0.0, sn = 0.0;
      for (int k = 0; k < p.M; ++k) sx += gs.x[k] * gs.x[k];
      for (int j = 0; j < p.M; ++j) sn += gs.n[j];
      worst = std::max(worst, std::abs(sx - 1.0));
      worst = std::max(worst, std::abs(sn - p.N) / p.N);
      for (int j = 1; j < p.M; ++j)
        worst = std::max(worst, std::abs(gs.n[j] - gs.n[p.M - j]) / p.N);
      const SiSpectrum sp = si_sp_energies(p);
      const Eigen::MatrixXd id =
          sp.B * sp.B.transpose() - Eigen::MatrixXd::Identity(sp.B.rows(), sp.B.cols());
      worst = std::max(worst, id.cwiseAbs().maxCoeff());
    }
    rep.add("si_normalization_symmetry", worst <= 1e-10,
            "worst deviation " + format_double(worst) + " (tol 1e-10), 25 draws");
  }

  {  // BdG oracle on valid draws
    std::mt19937_64 rng(99);
    double worst = 0.0;
    int found = 0, attempts = 0;
    while (found < 50 && attempts < 5000) {
      ++attempts;
      ModelParams p = detail::random_params(rng, 2, 10);
      p.T = p.T + 0.5 * p.U * p.N * p.M;  // push toward the stable side
      try {
        const BdgCheck chk = bdg_oracle_check(p);
        worst = std::max(worst, chk.max_abs_diff / chk.tol * 1e-9);
        ++found;
      } catch (const InvalidRegimeError&) {
      } catch (const BdgUnstableError&) {
      }
    }
    rep.add("sf_bdg_oracle", found >= 50 && worst <= 1e-9,
            "worst relative gap " + format_double(worst) + " over " + std::to_string(found) +
                " valid draws (tol 1e-9)");
  }

  {  // V0 -> 0 limit
    const ModelParams p0{.M = 7, .N = 6, .T = 1.2, .U = 0.1, .V0 = 0.0};
    const SfSolution sol0 = solve_sf(p0);
    bool ok = sol0.rot.f.isIdentity(0.0);
    const ModeGrid g = mode_grid(p0);
    for (int l = 1; l <= g.K; ++l) ok = ok && sol0.theta[l - 1] == g.g[l];
    for (int k = 0; k < p0.M; ++k) ok = ok && sol0.disp.x[k] == 0.0;
    for (int k = 1; k <= g.S; ++k)
      ok = ok && sol0.F_sector.eta[k - 1] == sol0.f_sector.nu[k - 1];
    ModelParams p1 = p0;
    p1.V0 = 1e-8 * p0.U * p0.N;
    const SfSolution sol1 = solve_sf(p1);
    double dev = 0.0;
    for (int l = 1; l <= g.K; ++l)
      dev = std::max(dev, std::abs(sol1.theta[l - 1] - g.g[l]) / std::abs(g.g[l]));
    ok = ok && dev <= 1e-6;
    rep.add("sf_v0_limit", ok,
            "exact identity at V0=0; theta deviation " + format_double(dev) +
                " at V0=1e-8*U*N (tol 1e-6)");
  }

  {  // secular residuals and interlacing on random problems
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> pd(-3.0, 3.0), wd(0.05, 1.5);
    std::uniform_int_distribution<int> sz(1, 32);
    bool ok = true;
    for (int trial = 0; trial < 40 && ok; ++trial) {
      const int m = sz(rng);
      SecularProblem prob;
      for (int i = 0; i < m; ++i) {
        prob.poles.push_back(pd(rng));
        prob.weights.push_back(wd(rng));
      }
      for (SecularSide side : {SecularSide::above, SecularSide::below}) {
        const auto roots = solve_secular(prob, side);
        if (static_cast<int>(roots.size()) != m) ok = false;
        std::vector<double> d = prob.poles;
        std::sort(d.begin(), d.end());
        for (int i = 0; i + 1 < m && ok; ++i)
          if (side == SecularSide::above)
            ok = d[i] < roots[i] && roots[i] < d[i + 1];
          else
            ok = d[i] < roots[i + 1] && roots[i + 1] < d[i + 1];
        if (side == SecularSide::above)
          ok = ok && roots[m - 1] > d[m - 1];
        else
          ok = ok && roots[0] < d[0];
      }
    }
    rep.add("secular_count_interlacing", ok, "40 random pole/weight sets, m <= 32, both sides");
  }

  {  // hyperbolic/trigonometric ring-sum identities
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> yd(0.05, 3.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const int m = 2 + static_cast<int>(rng() % 11);
      const double y = yd(rng);
      double sh = 0.0, st = 0.0;
      for (int k = 0; k < m; ++k) {
        const double c = std::cos(2.0 * std::numbers::pi * k / m);
        sh += 1.0 / (std::cosh(y) - c);
        st += 1.0 / (std::cos(y) - c);
      }
      const double rh = m * std::sinh(m * y) / (std::sinh(y) * (std::cosh(m * y) - 1.0));
      const double rt = m * std::sin(m * y) / (std::sin(y) * (std::cos(m * y) - 1.0));
      worst = std::max(worst, std::abs(sh - rh) / std::abs(rh));
      if (std::abs(std::cos(m * y) - 1.0) > 1e-3)  // stay away from the poles
        worst = std::max(worst, std::abs(st - rt) / std::max(1.0, std::abs(rt)));
    }
    rep.add("ring_sum_identities", worst <= 1e-10,
            "worst relative deviation " + format_double(worst) + " (tol 1e-10)");
  }

  {  // minimal lattice M = 2 end to end
    const ModelParams p{.M = 2, .N = 3, .T = 0.8, .U = 0.4, .V0 = 0.3};
    bool ok = true;
    ok = ok && detail::union_spectrum_gap(p) <= 1e-9 * std::max(2.0 * p.T, p.U * p.N + p.V0);
    ModelParams psf = p;
    psf.T = 4.0;  // stable side for the Bogoliubov check
    ok = ok && bdg_oracle_check(psf).ok;
    const FockBasis basis(p.M, p.N);
    ok = ok && basis.size() == fock_dimension(2, 3);
    rep.add("m2_minimal_lattice", ok, "double-bond ring: union spectrum, BdG, basis");
  }

  return rep;
}

}  // namespace ringwell
