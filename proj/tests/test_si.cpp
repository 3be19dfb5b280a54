#include <catch2/catch.hpp>

#include <cmath>
#include <functional>
#include <random>

#include "ringwell/exact.hpp"
#include "ringwell/si.hpp"

using namespace ringwell;

namespace {

ModelParams random_point(std::mt19937_64& rng, int m_min = 2, int m_max = 12) {
  std::uniform_int_distribution<int> md(m_min, m_max), nd(1, 8);
  std::uniform_real_distribution<double> ud(0.05, 2.0);
  return {.M = md(rng), .N = nd(rng), .T = ud(rng), .U = ud(rng), .V0 = ud(rng)};
}

std::vector<double> spectrum_union(const SiSpectrum& sp) {
  std::vector<double> u;
  for (double l : sp.lambda) u.push_back(-l);
  for (double f : sp.f_energy) u.push_back(f);
  std::sort(u.begin(), u.end());
  return u;
}

}  // namespace

TEST_CASE("solution count per lattice size") {
  CHECK(solution_count(6) == 4);
  CHECK(solution_count(7) == 4);
  CHECK(solution_count(2) == 2);
  CHECK(solution_count(12) == 7);
  CHECK(solution_count(11) == 6);
}

TEST_CASE("one-body matrix structure") {
  const ModelParams p2{.M = 2, .N = 3, .T = 0.4, .U = 0.5, .V0 = 0.1};
  const Eigen::MatrixXd h2 = one_body_matrix(p2);
  const double w = p2.U * p2.N + p2.V0;
  CHECK(h2(0, 0) == Approx(-w));
  CHECK(h2(0, 1) == Approx(-2.0 * p2.T));  // double bond on the 2-ring
  CHECK(h2(1, 1) == 0.0);

  const ModelParams p3{.M = 3, .N = 1, .T = 0.9, .U = 0.0, .V0 = 0.0};
  const Eigensystem es = sym_eig(one_body_matrix(p3));
  CHECK(es.values(0) == Approx(-2.0 * p3.T));
  CHECK(es.values(1) == Approx(p3.T));
  CHECK(es.values(2) == Approx(p3.T));
}

TEST_CASE("union of analytic levels equals the one-body spectrum") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 60; ++trial) {
    const ModelParams p = random_point(rng);
    const SiSpectrum sp = si_sp_energies(p);
    const auto u = spectrum_union(sp);
    const Eigensystem es = sym_eig(one_body_matrix(p));
    const double tol = 1e-9 * std::max(2.0 * p.T, p.U * p.N + p.V0);
    REQUIRE(static_cast<int>(u.size()) == p.M);
    for (int i = 0; i < p.M; ++i) CHECK(std::abs(u[i] - es.values(i)) <= tol);
  }
}

TEST_CASE("secular roots interlace the poles") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const ModelParams p = random_point(rng);
    const SiSpectrum sp = si_sp_energies(p);
    const ModeGrid grid = mode_grid(p);
    CHECK(sp.lambda[0] > 2.0 * p.T);  // isolated root above the band
    for (int q = 1; q <= grid.K; ++q) {
      CHECK(sp.lambda[q] > 2.0 * p.T * grid.c[q]);
      CHECK(sp.lambda[q] < 2.0 * p.T * grid.c[q - 1]);
    }
    CHECK(sp.lambda0_dominant);
  }
}

TEST_CASE("rotation matrix is orthogonal and diagonalizes the coupling") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 25; ++trial) {
    const ModelParams p = random_point(rng, 2, 10);
    const SiSpectrum sp = si_sp_energies(p);
    const ModeGrid grid = mode_grid(p);
    const int kk = grid.K;
    const Eigen::MatrixXd id =
        sp.B * sp.B.transpose() - Eigen::MatrixXd::Identity(kk + 1, kk + 1);
    CHECK(id.cwiseAbs().maxCoeff() <= 1e-10);
    // sum_kh B_pk L_kh B_qh = lambda_p delta_pq with
    // L_kh = w r_k r_h / M + 2T c_k delta_kh
    const double w = p.U * p.N + p.V0;
    Eigen::MatrixXd L(kk + 1, kk + 1);
    for (int k = 0; k <= kk; ++k)
      for (int h = 0; h <= kk; ++h)
        L(k, h) = w * std::sqrt(grid.r2[k] * grid.r2[h]) / p.M +
                  (k == h ? 2.0 * p.T * grid.c[k] : 0.0);
    const Eigen::MatrixXd diag = sp.B * L * sp.B.transpose();
    const double scale = std::max(2.0 * p.T, w);
    for (int q = 0; q <= kk; ++q)
      for (int r = 0; r <= kk; ++r)
        CHECK(std::abs(diag(q, r) - (q == r ? sp.lambda[q] : 0.0)) <= 1e-9 * scale);
    for (double a : sp.A) CHECK(a > 0.0);
  }
}

TEST_CASE("isolated root at the deep-well point") {
  const ModelParams p{.M = 7, .N = 8, .T = 0.5, .U = 1.0, .V0 = 0.1};  // w = 8.1
  const double y = solve_isolated_y(p);
  CHECK(std::abs(isolated_root_residual(y, p)) < 1e-12);
  const SiSpectrum sp = si_sp_energies(p);
  const double mu0 = sp.lambda[0] / (2.0 * p.T);
  CHECK(mu0 == Approx(std::sqrt(1.0 + 8.1 * 8.1 / (4.0 * 0.25))).epsilon(0.01));
  CHECK(mu0 == Approx(8.1615).epsilon(1e-4));
}

TEST_CASE("w = 0 falls back to the bare hopping spectrum") {
  const ModelParams p{.M = 6, .N = 3, .T = 0.7, .U = 0.0, .V0 = 0.0};
  const SiSpectrum sp = si_sp_energies(p);
  const ModeGrid grid = mode_grid(p);
  CHECK_FALSE(sp.si_justified);
  CHECK(sp.B.isIdentity(0.0));
  for (int q = 0; q <= grid.K; ++q) CHECK(sp.lambda[q] == Approx(2.0 * p.T * grid.c[q]));
}

TEST_CASE("approximate branches") {
  SECTION("doublet regime: in-gap roots sit just above the poles") {
    const ModelParams p{.M = 6, .N = 6, .T = 15.0, .U = 0.05, .V0 = 0.15};  // w = 0.45
    const double w = 0.45;
    REQUIRE(p.T / w >= 5.0 * p.M);
    const SiSpectrum sp = si_sp_energies(p);
    const ModeGrid grid = mode_grid(p);
    const SiApprox ap = si_sp_energies_approx(p, SiApproxBranch::doublet);
    CHECK(ap.regime_ok);
    for (int q = 1; q <= grid.K; ++q) {
      const double offset = sp.lambda[q] / (2.0 * p.T) - grid.c[q];
      const double predicted = w * grid.r2[q] / (2.0 * p.T * p.M);
      CHECK(offset == Approx(predicted).epsilon(0.1));
      CHECK(ap.mu[q - 1] == Approx(grid.c[q] + predicted).epsilon(1e-12));
    }
    // the self-paired zone-edge mode carries half the generic offset
    const double edge = sp.lambda[grid.K] / (2.0 * p.T) - grid.c[grid.K];
    CHECK(edge == Approx(w / (2.0 * p.T * p.M)).epsilon(0.1));

    const SiApprox iso = si_sp_energies_approx(p, SiApproxBranch::isolated_large_t);
    CHECK(iso.mu[0] == Approx(sp.lambda[0] / (2.0 * p.T)).epsilon(0.01));
  }
  SECTION("deep-well regime: isolated root closed form") {
    const ModelParams p{.M = 7, .N = 8, .T = 0.5, .U = 1.0, .V0 = 0.1};
    REQUIRE(p.T / 8.1 <= p.M / 40.0);
    const SiSpectrum sp = si_sp_energies(p);
    const SiApprox ap = si_sp_energies_approx(p, SiApproxBranch::isolated_small_t);
    CHECK(ap.regime_ok);
    CHECK(ap.mu[0] == Approx(sp.lambda[0] / (2.0 * p.T)).epsilon(0.01));
  }
  SECTION("deep-well regime: uniform in-band roots") {
    const ModelParams p{.M = 7, .N = 8, .T = 0.5, .U = 1.0, .V0 = 0.1};
    const ModeGrid grid = mode_grid(p);
    const SiApprox ap = si_sp_energies_approx(p, SiApproxBranch::uniform);
    const SiSpectrum sp = si_sp_energies(p);
    REQUIRE(static_cast<int>(ap.mu.size()) == grid.K);
    // entry k approximates the root in the gap (c_{k+1}, c_k)
    for (int k = 0; k < grid.K; ++k) {
      CHECK(ap.mu[k] < grid.c[k]);
      CHECK(ap.mu[k] > grid.c[k + 1]);
      CHECK(ap.mu[k] == Approx(sp.lambda[k + 1] / (2.0 * p.T)).epsilon(0.02));
    }
  }
  SECTION("regime flag reports the mismatch") {
    const ModelParams p{.M = 6, .N = 6, .T = 15.0, .U = 0.05, .V0 = 0.15};
    CHECK_FALSE(si_sp_energies_approx(p, SiApproxBranch::uniform).regime_ok);
  }
}

TEST_CASE("many-body energies") {
  const ModelParams p{.M = 6, .N = 6, .T = 1.0, .U = 1.0, .V0 = 3.0};
  const SiSpectrum sp = si_sp_energies(p);
  const ModeGrid grid = mode_grid(p);
  const double c_n = derive(p).C_N;

  std::vector<int> ell(grid.S, 0), m(grid.K + 1, 0);
  m[0] = p.N;
  const double e_gs = si_energy(sp, p, ell, m);
  CHECK(e_gs == Approx(c_n - p.N * sp.lambda[0]).epsilon(1e-14));

  m[0] = p.N - 1;
  m[1] = 1;
  CHECK(si_energy(sp, p, ell, m) == Approx(e_gs + (sp.lambda[0] - sp.lambda[1])).epsilon(1e-12));

  m[1] = 0;
  CHECK_THROWS_AS(si_energy(sp, p, ell, m), std::invalid_argument);
}

TEST_CASE("localized limit of the ground energy") {
  // T -> 0: lambda_0 -> w, so E_gs -> -U N(N-1)/2 - N V0
  const ModelParams p{.M = 5, .N = 4, .T = 1e-6, .U = 0.8, .V0 = 0.5};
  const SiSpectrum sp = si_sp_energies(p);
  const double e_gs = derive(p).C_N - p.N * sp.lambda[0];
  const double expected = -p.U * p.N * (p.N - 1) / 2.0 - p.N * p.V0;
  CHECK(e_gs == Approx(expected).margin(1e-4));
}

TEST_CASE("level enumeration matches brute force") {
  const ModelParams p{.M = 5, .N = 3, .T = 0.8, .U = 0.5, .V0 = 0.4};
  const SiSpectrum sp = si_sp_energies(p);
  const ModeGrid grid = mode_grid(p);
  // brute force: all occupation splits of N over the S + K + 1 levels
  std::vector<double> sp_energies;
  for (int q = 0; q <= grid.K; ++q) sp_energies.push_back(-sp.lambda[q]);
  for (int k = 1; k <= grid.S; ++k) sp_energies.push_back(sp.f_energy[k - 1]);
  const int nlev = static_cast<int>(sp_energies.size());
  std::vector<double> all;
  std::vector<int> occ(nlev, 0);
  std::function<void(int, int)> enumerate = [&](int level, int left) {
    if (level == nlev - 1) {
      occ[level] = left;
      double e = derive(p).C_N;
      for (int i = 0; i < nlev; ++i) e += occ[i] * sp_energies[i];
      all.push_back(e);
      return;
    }
    for (int t = 0; t <= left; ++t) {
      occ[level] = t;
      enumerate(level + 1, left - t);
    }
    occ[level] = 0;
  };
  enumerate(0, p.N);
  std::sort(all.begin(), all.end());

  const auto levels = si_levels(p, static_cast<int>(all.size()));
  REQUIRE(levels.size() == all.size());
  for (std::size_t i = 0; i < all.size(); ++i)
    CHECK(levels[i].energy == Approx(all[i]).margin(1e-10));
  // every reported occupation reproduces its energy
  for (const auto& lvl : levels)
    CHECK(si_energy(sp, p, lvl.ell, lvl.m) == Approx(lvl.energy).margin(1e-12));
  // deterministic
  const auto again = si_levels(p, 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(again[i].ell == levels[i].ell);
    CHECK(again[i].m == levels[i].m);
  }
}

TEST_CASE("ground state distributions") {
  SECTION("normalization and symmetry") {
    std::mt19937_64 rng(45);
    for (int trial = 0; trial < 25; ++trial) {
      const ModelParams p = random_point(rng, 2, 10);
      const SiGroundState gs = si_ground_distributions(p);
      double sx = 0.0, sn = 0.0, sm = 0.0;
      for (int k = 0; k < p.M; ++k) {
        sx += gs.x[k] * gs.x[k];
        sm += gs.m[k];
      }
      for (int j = 0; j < p.M; ++j) sn += gs.n[j];
      CHECK(sx == Approx(1.0).margin(1e-10));
      CHECK(sn == Approx(double(p.N)).margin(1e-10 * p.N));
      CHECK(sm == Approx(double(p.N)).margin(1e-10 * p.N));
      for (int j = 1; j < p.M; ++j) {
        CHECK(gs.xi[j] == Approx(gs.xi[p.M - j]).margin(1e-12));
        CHECK(gs.n[0] >= gs.n[j]);
      }
    }
  }
  SECTION("delocalized limit y -> 0") {
    const ModelParams p{.M = 6, .N = 6, .T = 1.0, .U = 0.0, .V0 = 1e-7};
    const SiGroundState gs = si_ground_distributions(p);
    for (int j = 0; j < p.M; ++j)
      CHECK(gs.n[j] == Approx(double(p.N) / p.M).epsilon(1e-3));
  }
  SECTION("strong localization") {
    const ModelParams p{.M = 7, .N = 8, .T = 0.01, .U = 1.0, .V0 = 0.1};
    const SiGroundState gs = si_ground_distributions(p);
    CHECK(gs.n[0] == Approx(double(p.N)).epsilon(1e-4));
    // exponential envelope n_j ~ N exp(|2j - M| y - M y)
    for (int j = 1; j < p.M; ++j) {
      const double envelope = p.N * std::exp(std::abs(2.0 * j - p.M) * gs.y - p.M * gs.y);
      if (envelope > 1e-280) CHECK(gs.n[j] == Approx(envelope).epsilon(0.05));
    }
  }
  SECTION("extreme well depth uses the overflow-safe path") {
    const ModelParams p{.M = 8, .N = 4, .T = 1e-60, .U = 100.0, .V0 = 0.0};
    const SiGroundState gs = si_ground_distributions(p);
    REQUIRE(p.M * gs.y > 600.0);
    double sn = 0.0, sm = 0.0;
    for (int j = 0; j < p.M; ++j) sn += gs.n[j];
    for (int k = 0; k < p.M; ++k) sm += gs.m[k];
    CHECK(sn == Approx(double(p.N)).margin(1e-10 * p.N));
    CHECK(sm == Approx(double(p.N)).margin(1e-10 * p.N));
    CHECK(gs.n[0] == Approx(double(p.N)).epsilon(1e-10));
  }
  SECTION("w = 0 has no bound level to build on") {
    CHECK_THROWS_AS(si_ground_distributions({.M = 4, .N = 2, .T = 1.0, .U = 0.0, .V0 = 0.0}),
                    std::domain_error);
  }
}

TEST_CASE("distributions agree with exact diagonalization at a deep-well point") {
  const ModelParams p{.M = 6, .N = 5, .T = 0.3, .U = 1.0, .V0 = 0.1};  // w = 5.1
  const FockBasis basis(p.M, p.N);
  const ExactSpectrum spec = diagonalize(build_hamiltonian(p, basis), 1);
  const Eigen::MatrixXd rho = one_body_density(spec.vectors.col(0), basis);
  const Eigen::VectorXd n_ex = site_occupations(rho);
  const Eigen::VectorXd m_ex = momentum_occupations(rho);
  const SiGroundState gs = si_ground_distributions(p);
  for (int j = 0; j < p.M; ++j) CHECK(std::abs(gs.n[j] - n_ex(j)) / p.N <= 0.02);
  for (int k = 0; k < p.M; ++k) CHECK(std::abs(gs.m[k] - m_ex(k)) / p.N <= 0.02);
}
