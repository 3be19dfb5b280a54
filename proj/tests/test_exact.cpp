#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "ringwell/exact.hpp"

using namespace ringwell;

TEST_CASE("fock basis enumeration and ranking") {
  const FockBasis b21(2, 1);
  REQUIRE(b21.size() == 2);
  CHECK(b21.state(0)[0] == 1);
  CHECK(b21.state(1)[1] == 1);

  const FockBasis b22(2, 2);
  REQUIRE(b22.size() == 3);
  const int expect[3][2] = {{2, 0}, {1, 1}, {0, 2}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) CHECK(b22.state(i)[j] == expect[i][j]);

  const FockBasis b66(6, 6);
  CHECK(b66.size() == 462);

  // descending lexicographic order and index bijection
  const FockBasis b(5, 4);
  for (std::int64_t i = 0; i < b.size(); ++i) {
    CHECK(b.index(b.state(i)) == i);
    if (i > 0) {
      const auto prev = b.state(i - 1), cur = b.state(i);
      CHECK(std::lexicographical_compare(cur.begin(), cur.end(), prev.begin(), prev.end()));
    }
  }
}

TEST_CASE("fock basis dimension cap") {
  CHECK_THROWS_AS(FockBasis(12, 12), DimensionCapError);
  CHECK_NOTHROW(FockBasis(12, 12, 2'000'000));
}

TEST_CASE("single particle on a 3-ring") {
  const ModelParams p{.M = 3, .N = 1, .T = 0.7, .U = 0.4, .V0 = 0.0};
  const FockBasis basis(3, 1);
  const Eigen::MatrixXd h = build_hamiltonian(p, basis);
  const ExactSpectrum spec = diagonalize(h, 3);
  CHECK(spec.energies(0) == Approx(-2.0 * p.T).epsilon(1e-12));
  CHECK(spec.energies(1) == Approx(p.T).epsilon(1e-12));
  CHECK(spec.energies(2) == Approx(p.T).epsilon(1e-12));
}

TEST_CASE("interaction term only") {
  const ModelParams p{.M = 2, .N = 2, .T = 1e-300, .U = 1.0, .V0 = 0.0};
  // T must be > 0 by contract; use a negligible value so the matrix is
  // numerically the pure interaction part.
  const FockBasis basis(2, 2);
  const Eigen::MatrixXd h = build_hamiltonian(p, basis);
  CHECK(h(0, 0) == Approx(-1.0));
  CHECK(h(1, 1) == Approx(0.0).margin(1e-280));
  CHECK(h(2, 2) == Approx(-1.0));
}

TEST_CASE("hamiltonian is symmetric and the 2-ring bond doubles") {
  const ModelParams p{.M = 2, .N = 1, .T = 0.3, .U = 0.2, .V0 = 0.4};
  const FockBasis basis(2, 1);
  const Eigen::MatrixXd h = build_hamiltonian(p, basis);
  CHECK(h(0, 1) == Approx(-2.0 * p.T));  // wrap-around doubles the single bond
  CHECK(h(0, 0) == Approx(-p.V0));
  const ModelParams p6{.M = 6, .N = 4, .T = 0.8, .U = 0.5, .V0 = 0.3};
  const FockBasis b6(6, 4);
  const Eigen::MatrixXd h6 = build_hamiltonian(p6, b6);
  CHECK((h6 - h6.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("free spectrum at U = V0 = 0 for one particle") {
  const int m = 7;
  const ModelParams p{.M = m, .N = 1, .T = 1.3, .U = 0.0, .V0 = 0.0};
  const FockBasis basis(m, 1);
  const ExactSpectrum spec = diagonalize(build_hamiltonian(p, basis), m);
  std::vector<double> expected;
  for (int k = 0; k < m; ++k)
    expected.push_back(-2.0 * p.T * std::cos(2.0 * std::numbers::pi * k / m));
  std::sort(expected.begin(), expected.end());
  for (int i = 0; i < m; ++i) CHECK(spec.energies(i) == Approx(expected[i]).margin(1e-12));
}

TEST_CASE("eigenpair residuals and orthonormality") {
  const ModelParams p{.M = 5, .N = 3, .T = 0.6, .U = 0.7, .V0 = 0.2};
  const FockBasis basis(5, 3);
  const Eigen::MatrixXd h = build_hamiltonian(p, basis);
  const ExactSpectrum spec = diagonalize(h, 6);
  const double scale = h.cwiseAbs().maxCoeff();
  for (int i = 0; i < 6; ++i)
    CHECK((h * spec.vectors.col(i) - spec.energies(i) * spec.vectors.col(i))
              .cwiseAbs()
              .maxCoeff() <= 1e-9 * scale);
  const Eigen::MatrixXd overlap = spec.vectors.transpose() * spec.vectors;
  CHECK((overlap - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("ground multiplet clustering at V0 = 0") {
  // Deep attraction without a defect: the lowest levels quasi-degenerate.
  const ModelParams p{.M = 4, .N = 4, .T = 1e-4, .U = 1.0, .V0 = 0.0};
  const FockBasis basis(4, 4);
  const ExactSpectrum spec = diagonalize(build_hamiltonian(p, basis), 6);
  CHECK(spec.ground_degeneracy >= 2);
  const ModelParams pd{.M = 4, .N = 4, .T = 1e-4, .U = 1.0, .V0 = 0.5};
  const ExactSpectrum specd = diagonalize(build_hamiltonian(pd, FockBasis(4, 4)), 6);
  CHECK(specd.ground_degeneracy == 1);  // the well removes the degeneracy
}

TEST_CASE("one-body density of simple states") {
  const FockBasis basis(4, 3);
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(basis.size());
  std::vector<int> all0 = {3, 0, 0, 0};
  psi(basis.index(all0)) = 1.0;
  const Eigen::MatrixXd rho = one_body_density(psi, basis);
  CHECK(rho(0, 0) == Approx(3.0));
  CHECK(rho.cwiseAbs().sum() == Approx(3.0));  // no off-diagonal coherence

  // single particle spread uniformly: rho_jl = 1/M
  const int m = 5;
  const FockBasis b1(m, 1);
  Eigen::VectorXd plane = Eigen::VectorXd::Constant(b1.size(), 1.0 / std::sqrt(double(m)));
  const Eigen::MatrixXd rho1 = one_body_density(plane, b1);
  for (int j = 0; j < m; ++j)
    for (int l = 0; l < m; ++l) CHECK(rho1(j, l) == Approx(1.0 / m).epsilon(1e-12));
}

TEST_CASE("site and momentum occupations") {
  const int m = 6, n = 4;
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(m, m);
  rho(0, 0) = n;
  Eigen::VectorXd mk = momentum_occupations(rho);
  for (int k = 0; k < m; ++k) CHECK(mk(k) == Approx(double(n) / m).epsilon(1e-12));

  rho = Eigen::MatrixXd::Constant(m, m, double(n) / m);  // pure condensate
  mk = momentum_occupations(rho);
  CHECK(mk(0) == Approx(double(n)).epsilon(1e-12));
  for (int k = 1; k < m; ++k) CHECK(mk(k) == Approx(0.0).margin(1e-12));
}

TEST_CASE("exact ground state observables at a defected point") {
  const ModelParams p{.M = 6, .N = 5, .T = 0.4, .U = 0.6, .V0 = 0.3};
  const FockBasis basis(6, 5);
  const ExactSpectrum spec = diagonalize(build_hamiltonian(p, basis), 1);
  const Eigen::MatrixXd rho = one_body_density(spec.vectors.col(0), basis);
  const Eigen::VectorXd n = site_occupations(rho);
  const Eigen::VectorXd mk = momentum_occupations(rho);
  CHECK(rho.trace() == Approx(double(p.N)).margin(1e-10));
  CHECK(mk.sum() == Approx(double(p.N)).margin(1e-10));
  // defect pins the peak at site 0; reflection symmetry about it
  for (int j = 1; j < p.M; ++j) {
    CHECK(n(0) >= n(j));
    CHECK(n(j) == Approx(n(p.M - j)).margin(1e-10));
    CHECK(mk(j) == Approx(mk(p.M - j)).margin(1e-10));
  }
  CHECK((rho - rho.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("variational bound for arbitrary states") {
  const ModelParams p{.M = 4, .N = 3, .T = 0.9, .U = 0.4, .V0 = 0.2};
  const FockBasis basis(4, 3);
  const Eigen::MatrixXd h = build_hamiltonian(p, basis);
  const double e0 = diagonalize(h, 1).energies(0);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd v(basis.size());
    for (int i = 0; i < v.size(); ++i) v(i) = nd(rng);
    v.normalize();
    CHECK(v.dot(h * v) >= e0 - 1e-12);
  }
}
