#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ringwell {

// Physical inputs: N bosons on an M-site ring with hopping amplitude T,
// on-site attraction of magnitude U (the Hamiltonian carries the term
// -U/2 sum_i n_i(n_i-1), so U is stored unsigned) and a single potential
// well of depth V0 at site 0. All energies share one arbitrary unit.
struct ModelParams {
  int M = 2;        // lattice sites, >= 2
  int N = 1;        // bosons, >= 1
  double T = 1.0;   // hopping amplitude, > 0
  double U = 0.0;   // attraction magnitude, >= 0
  double V0 = 0.0;  // well depth at site 0, >= 0

  void validate() const {
    if (M < 2) throw std::invalid_argument("ModelParams: M must be >= 2");
    if (N < 1) throw std::invalid_argument("ModelParams: N must be >= 1");
    if (!(T > 0.0) || !std::isfinite(T))
      throw std::invalid_argument("ModelParams: T must be > 0");
    if (!(U >= 0.0) || !std::isfinite(U))
      throw std::invalid_argument("ModelParams: U must be >= 0");
    if (!(V0 >= 0.0) || !std::isfinite(V0))
      throw std::invalid_argument("ModelParams: V0 must be >= 0");
  }
};

// Scalars derived from ModelParams. tau and v are left empty when U*N == 0
// instead of being reported as infinities, so sweeps can skip such points.
struct DerivedParams {
  std::optional<double> tau;  // T / (U N)
  std::optional<double> v;    // V0 / (U N)
  double n = 0.0;             // filling N / M
  double w = 0.0;             // effective well depth U N + V0
  double C_N = 0.0;           // U N (N + 1) / 2
  double Lambda = 0.0;        // U N (N - 1) / (2 M) + 2 T N + n V0
};

inline DerivedParams derive(const ModelParams& p) {
  p.validate();
  DerivedParams d;
  const double un = p.U * p.N;
  if (un > 0.0) {
    d.tau = p.T / un;
    d.v = p.V0 / un;
  }
  d.n = static_cast<double>(p.N) / p.M;
  d.w = un + p.V0;
  d.C_N = un * (p.N + 1) / 2.0;
  d.Lambda = p.U * p.N * (p.N - 1.0) / (2.0 * p.M) + 2.0 * p.T * p.N + d.n * p.V0;
  return d;
}

// Momentum-mode constants of the ring. Opposite momenta +-k combine into
// antisymmetric (f) and symmetric (F) modes; only the symmetric sector
// couples to the site-0 well. S is the f-sector size, K the largest
// F-sector index, and r_k^2 in {1,2} weights the symmetric combination
// (1 for the self-paired modes k = 0 and, for even M, k = M/2).
struct ModeGrid {
  int M = 0;
  int S = 0;               // (M-1)/2 for odd M, (M-2)/2 for even M
  int K = 0;               // (M-1)/2 for odd M, M/2 for even M
  std::vector<double> c;   // cos(2 pi k / M), k = 0..M-1
  std::vector<double> y;   // 2 pi k / M,      k = 0..M-1
  std::vector<double> r2;  // r_k^2,           k = 0..K
  std::vector<double> e;   // 2T (1 - c_k),    k = 0..K
  std::vector<double> g;   // V0/M + e_k - U n, k = 0..K
};

inline ModeGrid mode_grid(const ModelParams& p) {
  p.validate();
  ModeGrid grid;
  grid.M = p.M;
  const bool even = p.M % 2 == 0;
  grid.S = even ? (p.M - 2) / 2 : (p.M - 1) / 2;
  grid.K = even ? p.M / 2 : (p.M - 1) / 2;
  grid.c.resize(p.M);
  grid.y.resize(p.M);
  for (int k = 0; k < p.M; ++k) {
    grid.y[k] = 2.0 * std::numbers::pi * k / p.M;
    grid.c[k] = std::cos(grid.y[k]);
  }
  const double un = p.U * p.N / p.M;  // U n
  grid.r2.resize(grid.K + 1);
  grid.e.resize(grid.K + 1);
  grid.g.resize(grid.K + 1);
  for (int k = 0; k <= grid.K; ++k) {
    grid.r2[k] = (k == 0 || (even && k == p.M / 2)) ? 1.0 : 2.0;
    grid.e[k] = 2.0 * p.T * (1.0 - grid.c[k]);
    grid.g[k] = p.V0 / p.M + grid.e[k] - un;
  }
  return grid;
}

enum class SeparatrixSide { superfluid, soliton, boundary };

inline const char* to_string(SeparatrixSide s) {
  switch (s) {
    case SeparatrixSide::superfluid: return "superfluid";
    case SeparatrixSide::soliton: return "soliton";
    default: return "boundary";
  }
}

// Semiclassical ground-state energies of the two competing configurations
// (all bosons on site 0 versus uniform spreading) and which side of the
// separatrix v = 2 tau - 1/2 the parameters fall on. The uniform state wins
// (superfluid side) when v < 2 tau - 1/2.
struct RegimeReport {
  double tau = 0.0;
  double v = 0.0;
  double E0_soliton = 0.0;  // -N^2 U (1/2 + v)
  double E0_uniform = 0.0;  // -N^2 U (1/(2M) + v/M + 2 tau)
  SeparatrixSide side = SeparatrixSide::boundary;
};

inline RegimeReport classify_regime(const ModelParams& p) {
  p.validate();
  const double un = p.U * p.N;
  if (!(un > 0.0))
    throw std::domain_error("classify_regime: semiclassical classifier undefined for U*N == 0");
  RegimeReport r;
  r.tau = p.T / un;
  r.v = p.V0 / un;
  const double nn = static_cast<double>(p.N) * p.N;
  r.E0_soliton = -nn * p.U * (0.5 + r.v);
  r.E0_uniform = -nn * p.U * (0.5 / p.M + r.v / p.M + 2.0 * r.tau);
  const double sep = 2.0 * r.tau - 0.5;
  const double eps = 1e-12 * std::max({1.0, std::abs(sep), std::abs(r.v)});
  if (r.v < sep - eps)
    r.side = SeparatrixSide::superfluid;
  else if (r.v > sep + eps)
    r.side = SeparatrixSide::soliton;
  else
    r.side = SeparatrixSide::boundary;
  return r;
}

// Dimension of the fixed-number bosonic Fock space, binomial(N+M-1, N).
inline std::int64_t fock_dimension(int sites, int bosons) {
  if (sites < 1 || bosons < 0)
    throw std::invalid_argument("fock_dimension: need sites >= 1, bosons >= 0");
  const std::int64_t cap = std::numeric_limits<std::int64_t>::max();
  std::int64_t result = 1;
  // binomial(bosons + sites - 1, sites - 1), multiplying in ascending order
  for (std::int64_t i = 1; i < sites; ++i) {
    if (result > (cap - 0) / (bosons + i))
      throw std::overflow_error("fock_dimension: binomial exceeds 64-bit range");
    result = result * (bosons + i) / i;  // exact: product of i consecutive over i!
  }
  return result;
}

}  // namespace ringwell
