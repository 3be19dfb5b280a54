#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "ringwell/model.hpp"
#include "ringwell/numerics.hpp"

namespace ringwell {

inline constexpr std::int64_t kFockDimensionCap = 20000;

struct DimensionCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Occupation-number basis at fixed total boson number, ordered
// lexicographically descending in (n_0, n_1, ...). Ranking is combinatorial,
// so index lookup is O(M).
class FockBasis {
 public:
  FockBasis(int sites, int bosons, std::int64_t dim_cap = kFockDimensionCap)
      : m_(sites), n_(bosons) {
    if (sites < 1 || bosons < 0)
      throw std::invalid_argument("FockBasis: need sites >= 1, bosons >= 0");
    dim_ = fock_dimension(sites, bosons);
    if (dim_ > dim_cap)
      throw DimensionCapError("FockBasis: dimension " + std::to_string(dim_) +
                              " exceeds cap " + std::to_string(dim_cap));
    build_binomials();
    enumerate();
  }

  int sites() const { return m_; }
  int bosons() const { return n_; }
  std::int64_t size() const { return dim_; }

  std::span<const int> state(std::int64_t i) const {
    return {occ_.data() + i * m_, static_cast<std::size_t>(m_)};
  }

  // Rank of an occupation vector: the number of basis states that precede it.
  std::int64_t index(std::span<const int> occ) const {
    std::int64_t rank = 0;
    int remaining = n_;
    for (int j = 0; j + 1 < m_; ++j) {
      const int free_after = remaining - occ[j];  // bosons not yet placed at site j
      if (free_after >= 1) rank += binom(free_after - 1 + m_ - 1 - j, m_ - 1 - j);
      remaining = free_after;
    }
    return rank;
  }

 private:
  // Pascal table restricted to the columns ranking actually uses (j < M);
  // saturating adds keep the unused large entries from overflowing.
  void build_binomials() {
    const int rows = n_ + m_ + 1;
    cols_ = m_ + 1;
    constexpr std::int64_t sat = std::numeric_limits<std::int64_t>::max() / 2;
    binom_.assign(static_cast<std::size_t>(rows) * cols_, 0);
    for (int i = 0; i < rows; ++i) {
      at(i, 0) = 1;
      for (int j = 1; j < cols_ && j <= i; ++j) {
        const std::int64_t a = at(i - 1, j - 1);
        const std::int64_t b = (j <= i - 1) ? at(i - 1, j) : 0;
        at(i, j) = (a > sat - b) ? sat : a + b;
      }
    }
  }

  std::int64_t& at(int i, int j) { return binom_[static_cast<std::size_t>(i) * cols_ + j]; }
  std::int64_t binom(int i, int j) const {
    if (j < 0 || j > i) return 0;
    return binom_[static_cast<std::size_t>(i) * cols_ + j];
  }

  void enumerate() {
    occ_.resize(static_cast<std::size_t>(dim_) * m_);
    std::vector<int> cur(m_, 0);
    cur[0] = n_;
    for (std::int64_t s = 0;; ++s) {
      std::copy(cur.begin(), cur.end(), occ_.begin() + s * m_);
      // successor in descending lexicographic order
      int j = m_ - 2;
      while (j >= 0 && cur[j] == 0) --j;
      if (j < 0) break;
      int tail = 1;
      for (int i = j + 1; i < m_; ++i) {
        tail += cur[i];
        cur[i] = 0;
      }
      cur[j] -= 1;
      cur[j + 1] = tail;
    }
  }

  int m_, n_;
  int cols_ = 0;
  std::int64_t dim_ = 0;
  std::vector<int> occ_;
  std::vector<std::int64_t> binom_;
};

// Full many-body Hamiltonian on the ring:
//   H = -(U/2) sum_i n_i(n_i - 1) - V0 n_0 - T sum_i (a^+_{i+1} a_i + h.c.)
// with periodic wrap a_M = a_0. The directed-bond sum is kept literally, so
// M = 2 carries the doubled bond.
inline Eigen::MatrixXd build_hamiltonian(const ModelParams& p, const FockBasis& basis) {
  p.validate();
  if (basis.sites() != p.M || basis.bosons() != p.N)
    throw std::invalid_argument("build_hamiltonian: basis does not match params");
  const std::int64_t dim = basis.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  std::vector<int> tmp(p.M);
  for (std::int64_t s = 0; s < dim; ++s) {
    const auto occ = basis.state(s);
    double diag = -p.V0 * occ[0];
    for (int i = 0; i < p.M; ++i) diag -= 0.5 * p.U * occ[i] * (occ[i] - 1.0);
    h(s, s) += diag;
    for (int i = 0; i < p.M; ++i) {
      const int j = (i + 1) % p.M;
      if (occ[i] > 0) {  // a^+_{i+1} a_i
        std::copy(occ.begin(), occ.end(), tmp.begin());
        tmp[i] -= 1;
        tmp[j] += 1;
        h(basis.index(tmp), s) += -p.T * std::sqrt(occ[i] * (occ[j] + 1.0));
      }
      if (occ[j] > 0) {  // a^+_i a_{i+1}
        std::copy(occ.begin(), occ.end(), tmp.begin());
        tmp[j] -= 1;
        tmp[i] += 1;
        h(basis.index(tmp), s) += -p.T * std::sqrt(occ[j] * (occ[i] + 1.0));
      }
    }
  }
  return h;
}

struct ExactSpectrum {
  Eigen::VectorXd energies;   // lowest k_levels, ascending
  Eigen::MatrixXd vectors;    // dim x k_levels, orthonormal columns
  int ground_degeneracy = 1;  // size of the near-degenerate ground cluster
};

inline ExactSpectrum diagonalize(const Eigen::MatrixXd& h, int k_levels) {
  const Eigensystem es = sym_eig(h);
  const std::int64_t dim = es.values.size();
  const std::int64_t k = std::clamp<std::int64_t>(k_levels, 1, dim);
  ExactSpectrum out;
  out.energies = es.values.head(k);
  out.vectors = es.vectors.leftCols(k);
  // With V0 = 0 deep in the attractive regime the ground level is a
  // quasi-degenerate multiplet and individual vectors are solver-arbitrary;
  // report the cluster size so callers can treat it as a block.
  const double tol = 1e-8 * std::max(1.0, std::abs(es.values(0)));
  out.ground_degeneracy = 1;
  while (out.ground_degeneracy < dim &&
         es.values(out.ground_degeneracy) - es.values(0) < tol)
    ++out.ground_degeneracy;
  return out;
}

// One-body density matrix <a_j^+ a_l> of a normalized state. Real because
// the Hamiltonian is real symmetric; Hermitian therefore means symmetric.
inline Eigen::MatrixXd one_body_density(const Eigen::VectorXd& psi, const FockBasis& basis) {
  if (psi.size() != basis.size())
    throw std::invalid_argument("one_body_density: state size does not match basis");
  if (std::abs(psi.norm() - 1.0) > 1e-6)
    throw std::invalid_argument("one_body_density: state not normalized");
  const int m = basis.sites();
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(m, m);
  std::vector<int> tmp(m);
  for (std::int64_t s = 0; s < basis.size(); ++s) {
    const auto occ = basis.state(s);
    const double ps = psi(s);
    if (ps == 0.0) continue;
    for (int j = 0; j < m; ++j) rho(j, j) += ps * ps * occ[j];
    for (int l = 0; l < m; ++l) {
      if (occ[l] == 0) continue;
      for (int j = 0; j < m; ++j) {
        if (j == l) continue;
        std::copy(occ.begin(), occ.end(), tmp.begin());
        tmp[l] -= 1;
        tmp[j] += 1;
        rho(j, l) += psi(basis.index(tmp)) * ps * std::sqrt(occ[l] * (occ[j] + 1.0));
      }
    }
  }
  return rho;
}

inline Eigen::VectorXd site_occupations(const Eigen::MatrixXd& rho) {
  return rho.diagonal();
}

// Momentum occupations m_k = (1/M) sum_{j,l} e^{i k~ (j-l)} rho_{jl} with
// k~ = 2 pi k / M; the convention matches b_k = M^{-1/2} sum_j a_j e^{-i k~ j}.
inline Eigen::VectorXd momentum_occupations(const Eigen::MatrixXd& rho) {
  const int m = static_cast<int>(rho.rows());
  Eigen::VectorXd mk(m);
  const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff() * m);
  for (int k = 0; k < m; ++k) {
    const double kt = 2.0 * std::numbers::pi * k / m;
    double re = 0.0, im = 0.0;
    for (int j = 0; j < m; ++j)
      for (int l = 0; l < m; ++l) {
        re += std::cos(kt * (j - l)) * rho(j, l);
        im += std::sin(kt * (j - l)) * rho(j, l);
      }
    if (std::abs(im) / m > 1e-10 * scale)
      throw std::runtime_error("momentum_occupations: imaginary residue too large");
    mk(k) = re / m;
  }
  return mk;
}

}  // namespace ringwell
