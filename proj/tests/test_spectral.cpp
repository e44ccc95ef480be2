#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "engel/spectral.hpp"
#include "oracles/hermite_galerkin.hpp"

using namespace engel;

namespace {

// Lowest eigenvalue of -d^2 + y^4.
constexpr double kQuarticGround = 1.0603620904841828;

// Frozen from the Hermite-Galerkin oracle (M = 200, quartic central differences, bisection).
constexpr double kNu1c = -0.346758407366;
constexpr double kMu1c = 0.56982031744189;
constexpr double kCurv1c = 1.5761265;

double montgomery_oracle(double nu, int n) { return oracle::hermite_eigenvalue(nu, 0.5, n, 140); }

double montgomery_oracle_derivative(double nu, int n) {
  const double h = 1e-3;
  return (-montgomery_oracle(nu + 2 * h, n) + 8 * montgomery_oracle(nu + h, n) - 8 * montgomery_oracle(nu - h, n) +
          montgomery_oracle(nu - 2 * h, n)) /
         (12 * h);
}

SolverOptions fixed_box(double L, int N = 4096) {
  SolverOptions o;
  o.L = L;
  o.N = N;
  return o;
}

}  // namespace

TEST(SpectralGrid, NodesAndValidation) {
  const SpectralGrid g(2.0, 5);
  EXPECT_DOUBLE_EQ(g.h(), 1.0);
  EXPECT_EQ(g.nodes(), (Vec{-2, -1, 0, 1, 2}));
  EXPECT_THROW(SpectralGrid(1.0, 2), std::invalid_argument);
  EXPECT_THROW(SpectralGrid(0.0, 10), std::invalid_argument);
  EXPECT_EQ(g.halved().N(), 9);
}

TEST(BuildHamiltonian, PotentialExamples) {
  const SpectralGrid g(2.0, 5);
  const auto gen = build_hamiltonian(Generic{1.3, -0.7}, g);
  EXPECT_DOUBLE_EQ(gen.potential[2], 0.49);
  const auto mont = build_hamiltonian(Montgomery{0.0}, g);
  for (int k = 0; k < 5; ++k) EXPECT_DOUBLE_EQ(mont.potential[static_cast<std::size_t>(k)], std::pow(g.node(k), 4) / 4);
  const auto ho = build_hamiltonian(Schrodinger{1.0}, g);
  for (int k = 0; k < 5; ++k) EXPECT_DOUBLE_EQ(ho.potential[static_cast<std::size_t>(k)], g.node(k) * g.node(k));
  EXPECT_DOUBLE_EQ(gen.off_diagonal, -1.0);
  EXPECT_DOUBLE_EQ(gen.diagonal[2], 2.0 + 0.49);
  EXPECT_THROW(build_hamiltonian(Generic{0.0, 1.0}, g), std::invalid_argument);
  EXPECT_THROW(build_hamiltonian(Schrodinger{0.0}, g), std::invalid_argument);
}

TEST(EigenLowest, HarmonicOscillatorSpectrum) {
  const auto sol = solve_level(Schrodinger{1.0}, 4, fixed_box(10.0));
  for (int k = 1; k <= 4; ++k) {
    const auto s = solve_level(Schrodinger{1.0}, k, fixed_box(10.0));
    EXPECT_NEAR(s.mu, 2 * k - 1, 1e-5);
  }
  ASSERT_EQ(sol.lower.size(), 4u);
}

TEST(EigenLowest, OrthonormalResidualAndSign) {
  const auto op = build_hamiltonian(Montgomery{-1.0}, auto_grid(Montgomery{-1.0}, 6));
  const auto pairs = eigen_lowest(op, 6);
  const double h = op.grid.h();
  for (std::size_t a = 0; a < pairs.size(); ++a) {
    if (a > 0) EXPECT_LT(pairs[a - 1].mu, pairs[a].mu);
    Vec r = op.apply(pairs[a].phi);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= pairs[a].mu * pairs[a].phi[i];
    EXPECT_LE(norm(r, h), 1e-8 * std::abs(pairs[a].mu));
    for (std::size_t b = 0; b < pairs.size(); ++b)
      EXPECT_NEAR(inner(pairs[a].phi, pairs[b].phi, h), a == b ? 1.0 : 0.0, 1e-10);
    double m = 0;
    for (double v : pairs[a].phi) m = std::max(m, std::abs(v));
    for (double v : pairs[a].phi)
      if (std::abs(v) >= m * (1 - 1e-8)) {
        EXPECT_GT(v, 0.0);
        break;
      }
  }
}

TEST(EigenLowest, MatchesHermiteOracleEigenfunction) {
  const auto op = build_hamiltonian(Montgomery{0.8}, auto_grid(Montgomery{0.8}, 3));
  const auto pairs = eigen_lowest(op, 3);
  const auto sp = oracle::hermite_spectrum(0.8, 0.5, 140);
  for (int n = 1; n <= 3; ++n) {
    const auto& phi = pairs[static_cast<std::size_t>(n - 1)].phi;
    std::size_t imax = 0;
    for (std::size_t i = 0; i < phi.size(); ++i)
      if (std::abs(phi[i]) > std::abs(phi[imax]) * (1 + 1e-8)) imax = i;
    const double sign = oracle::hermite_eigenfunction(sp, n, op.grid.node(static_cast<int>(imax))) > 0 ? 1.0 : -1.0;
    double err = 0;
    for (int k = 0; k < op.grid.N(); k += 37)
      err = std::max(err, std::abs(phi[static_cast<std::size_t>(k)] - sign * oracle::hermite_eigenfunction(sp, n, op.grid.node(k))));
    EXPECT_LT(err, 1e-4) << "n=" << n;
  }
}

TEST(EigenLowest, ConfinementFailure) {
  const auto op = build_hamiltonian(Schrodinger{1.0}, SpectralGrid(1.5, 400));
  EXPECT_THROW(eigen_lowest(op, 3), ConfinementError);
  EigenOptions loose;
  loose.check_confinement = false;
  EXPECT_NO_THROW(eigen_lowest(op, 3, loose));
}

TEST(Montgomery, GroundStateAtZeroMatchesQuarticConstant) {
  const auto s = solve_level(Montgomery{0.0}, 1);
  EXPECT_NEAR(s.mu, kQuarticGround * std::pow(4.0, -1.0 / 3.0), 1e-9);
  EXPECT_NEAR(s.mu, montgomery_oracle(0.0, 1), 1e-9);
  const auto g = solve_level(Generic{1.0, 0.0}, 1);
  EXPECT_NEAR(g.mu, s.mu, 1e-6);
}

TEST(Montgomery, BranchesMatchHermiteOracle) {
  for (double nu : {-3.0, -0.5, 0.7, 2.5})
    for (int n = 1; n <= 4; ++n)
      EXPECT_NEAR(solve_level(Montgomery{nu}, n).mu, montgomery_oracle(nu, n), 1e-8) << nu << " " << n;
}

TEST(Montgomery, GridConvergenceUnderRefinement) {
  for (int n = 1; n <= 4; ++n) {
    const double L = auto_grid(Montgomery{-0.5}, n).L();
    const double a = solve_level(Montgomery{-0.5}, n, fixed_box(L, 2048)).mu;
    const double b = solve_level(Montgomery{-0.5}, n, fixed_box(L, 4096)).mu;
    EXPECT_NEAR(a, b, 1e-6);
  }
}

TEST(Rescaling, GenericEqualsDilatedMontgomery) {
  for (double delta : {0.5, 1.0, 2.0, 8.0})
    for (double beta : {-2.0, -1.0, -0.3, 0.0, 0.6, 1.2, 2.0})
      for (int n = 1; n <= 4; ++n) {
        const double direct = solve_level(Generic{delta, beta}, n).mu;
        const double rescaled = rescaled_eigenvalue(delta, beta, n);
        EXPECT_NEAR(direct, rescaled, 1e-6 * std::abs(rescaled)) << delta << " " << beta << " " << n;
      }
}

TEST(Rescaling, NegativeDeltaUsesRealCubeRoot) {
  const double direct = solve_level(Generic{-2.0, 0.7}, 2).mu;
  EXPECT_NEAR(direct, rescaled_eigenvalue(-2.0, 0.7, 2), 1e-6 * direct);
  EXPECT_NEAR(direct, solve_level(Generic{2.0, -0.7}, 2).mu, 1e-9 * direct);
}

TEST(FeynmanHellmann, MatchesCentralDifference) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ud(0.5, 4.0), ub(-2.0, 2.0);
  for (int trial = 0; trial < 8; ++trial) {
    const double delta = ud(rng), beta = ub(rng);
    const int n = 1 + trial % 3;
    const double L = auto_grid(Generic{delta, beta}, n).L() * 1.2;
    const auto opts = fixed_box(L);
    const double step = 1e-4;
    const double fd = (solve_level(Generic{delta, beta + step}, n, opts).mu -
                       solve_level(Generic{delta, beta - step}, n, opts).mu) /
                      (2 * step);
    EXPECT_NEAR(mu_beta_derivative(delta, beta, n, opts), fd, 1e-6);
  }
}

TEST(FeynmanHellmann, SecondDerivativeMatchesSecondDifference) {
  for (auto [delta, beta, n] : {std::tuple{1.0, -0.2, 1}, {2.0, 0.9, 2}, {0.5, -1.5, 3}}) {
    const double L = auto_grid(Generic{delta, beta}, n).L() * 1.2;
    const auto opts = fixed_box(L);
    const double step = 1e-3;
    const double mm = solve_level(Generic{delta, beta - step}, n, opts).mu;
    const double m0 = solve_level(Generic{delta, beta}, n, opts).mu;
    const double mp = solve_level(Generic{delta, beta + step}, n, opts).mu;
    EXPECT_NEAR(solve_level(Generic{delta, beta}, n, opts).d2mu, (mp - 2 * m0 + mm) / (step * step), 1e-4);
  }
}

TEST(FeynmanHellmann, VanishesAtCriticalCone) {
  // Critical point located independently by bisection on the oracle branch derivative.
  double a = -0.6, b = -0.1;
  for (int it = 0; it < 40; ++it) {
    const double m = 0.5 * (a + b);
    (montgomery_oracle_derivative(m, 1) > 0 ? b : a) = m;
  }
  const double nu_c = 0.5 * (a + b);
  EXPECT_NEAR(nu_c, kNu1c, 1e-6);
  for (double delta : {1.0, 2.0, 0.5}) {
    EXPECT_NEAR(mu_beta_derivative(delta, nu_c * std::cbrt(delta), 1), 0.0, 1e-5);
    EXPECT_GT(mu_beta_derivative(delta, (nu_c + 0.2) * std::cbrt(delta), 1), 0.0);
    EXPECT_LT(mu_beta_derivative(delta, (nu_c - 0.2) * std::cbrt(delta), 1), 0.0);
  }
  const auto s = solve_level(Montgomery{kNu1c}, 1);
  EXPECT_NEAR(s.mu, kMu1c, 1e-9);
  EXPECT_NEAR(s.d2mu, kCurv1c, 1e-5);
}

TEST(ProjectorDerivative, IdempotentStructureAndOperatorIdentity) {
  for (auto [delta, beta, n] : {std::tuple{1.0, 0.3, 1}, {2.0, -0.8, 2}, {0.5, 1.0, 3}}) {
    const auto opts = SolverOptions{};
    const auto P = projector_derivative(delta, beta, n, opts);
    EXPECT_LE(P.idempotency_defect(), 1e-8);
    EXPECT_LE(P.diagonal_derivative_norm(), 1e-8);
    EXPECT_LE(P.tail_estimate, 1e-8);
    EXPECT_LE(P.tail_coupling, 1e-8);
    // (H - mu) dPi phi = (dmu - dH) phi
    const auto op = build_hamiltonian(Generic{delta, beta}, P.grid);
    const auto pairs = eigen_lowest(op, n);
    const double mu = pairs.back().mu;
    const Vec dv = parameter_derivative(Generic{delta, beta}, P.grid);
    const double h = P.grid.h();
    Vec dhphi(P.phi.size());
    for (std::size_t i = 0; i < dhphi.size(); ++i) dhphi[i] = dv[i] * P.phi[i];
    const double dmu = inner(dhphi, P.phi, h);
    const Vec dpi_phi = P.apply_derivative(P.phi);
    Vec lhs = op.apply(dpi_phi);
    for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] -= mu * dpi_phi[i] + (dmu * P.phi[i] - dhphi[i]);
    EXPECT_LE(norm(lhs, h), 1e-7 * norm(dhphi, h));
  }
}

TEST(ProjectorDerivative, MatchesEigenvectorDifferenceQuotient) {
  const double delta = 1.5, beta = -0.4, step = 1e-5;
  const int n = 2;
  const auto opts = fixed_box(auto_grid(Generic{delta, beta}, n).L());
  const auto P = projector_derivative(delta, beta, n, opts);
  const auto grid = SpectralGrid(opts.L, opts.N);
  const auto up = eigen_lowest(build_hamiltonian(Generic{delta, beta + step}, grid), n).back().phi;
  const auto dn = eigen_lowest(build_hamiltonian(Generic{delta, beta - step}, grid), n).back().phi;
  double err = 0, scale = 0;
  for (std::size_t i = 0; i < up.size(); ++i) {
    err = std::max(err, std::abs((up[i] - dn[i]) / (2 * step) - P.D[i]));
    scale = std::max(scale, std::abs(P.D[i]));
  }
  EXPECT_LT(err, 1e-5 * scale);
}

TEST(ProjectorDerivative, RefusesCollapsedGap) {
  // Deep double well: tunnelling splitting far below double precision.
  EXPECT_THROW(projector_derivative(1.0, -12.0, 1), GapError);
  const auto op = build_hamiltonian(Montgomery{-12.0}, auto_grid(Montgomery{-12.0}, 2));
  const auto pairs = eigen_lowest(op, 2);
  EXPECT_TRUE(pairs[0].near_degenerate);
}

TEST(ReducedResolvent, Examples) {
  const double delta = 1.0, beta = 0.5;
  const int n = 2;
  const auto opts = fixed_box(auto_grid(Generic{delta, beta}, 4).L());
  const auto grid = SpectralGrid(opts.L, opts.N);
  const auto op = build_hamiltonian(Generic{delta, beta}, grid);
  const auto pairs = eigen_lowest(op, 4);
  const double h = grid.h();
  const Vec zero(static_cast<std::size_t>(grid.N()), 0.0);
  EXPECT_EQ(reduced_resolvent_solve(delta, beta, n, zero, opts), zero);
  for (int m : {1, 3, 4}) {
    const auto& pm = pairs[static_cast<std::size_t>(m - 1)];
    const Vec u = reduced_resolvent_solve(delta, beta, n, pm.phi, opts);
    const double c = 1.0 / (pairs[1].mu - pm.mu);
    double err = 0;
    for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(u[i] - c * pm.phi[i]));
    EXPECT_LT(err, 1e-8 * std::abs(c)) << m;
  }
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    Vec rhs(zero.size());
    for (double& v : rhs) v = nd(rng);
    const Vec u = reduced_resolvent_solve(delta, beta, n, rhs, opts);
    const auto& phi = pairs[1].phi;
    EXPECT_NEAR(inner(u, phi, h), 0.0, 1e-10 * norm(u, h));
    Vec r = rhs;
    const double p = inner(r, phi, h);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= p * phi[i];
    const Vec hu = op.apply(u);
    Vec res(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) res[i] = pairs[1].mu * u[i] - hu[i] - r[i];
    EXPECT_LE(norm(res, h), 1e-8 * norm(rhs, h));
  }
}

TEST(BranchCsv, HeaderAndRows) {
  std::ostringstream os;
  write_branch_csv(os, {branch_row(Montgomery{0.0}, 1)}, true);
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "n,delta,nu,mu,dmu_dbeta,d2mu_dbeta2,grid_L,grid_N,status");
  EXPECT_NE(s.find("0.66798625915"), std::string::npos);
  EXPECT_NE(s.find(",ok"), std::string::npos);
}

TEST(DiagonalParts, FirstCorrectorIdentities) {
  for (auto [delta, beta, n] : {std::tuple{1.0, 0.5, 1}, {2.0, -0.8, 2}, {0.5, 1.0, 3}, {-1.5, 0.2, 1}}) {
    const auto r = diagonal_part_identities(delta, beta, n);
    EXPECT_NEAR(r.fh_derivative, r.fd_derivative, 1e-6) << delta << " " << beta << " " << n;
    EXPECT_LE(std::abs(r.x2_dpi - r.x2_dpi_expected), 1e-4);
    EXPECT_LE(std::abs(r.x1_dpi - r.x1_dpi_expected), 1e-4);
    EXPECT_LE(r.x2x3_commutator_defect, 1e-4);
    EXPECT_LE(r.x1x3_commutator_defect, 1e-4);
    EXPECT_GT(std::abs(r.x2_dpi), 1e-3);
  }
}
