#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "roadspeed/bvp.hpp"

using namespace roadspeed;

namespace {

ModelParams unit_params() {
  ModelParams p;
  p.d = 1.0;
  p.D = 4.0;
  p.a = 1.0;
  return p;
}

struct BoxCase {
  ModelParams p;
  double c, lambda, m, nh, aw;
};

/// Grid with spacing <= h_max, the box edges on nodes, and 12 decay lengths of padding.
GridSize oracle_grid(const BoxCase& bc, double h_max) {
  const double kappa = std::sqrt(p_coeff(bc.lambda, bc.c, bc.p) / bc.p.d);
  const double h = bc.aw / std::ceil(bc.aw / h_max);
  const double half = std::ceil((bc.aw + 12.0 / kappa) / h);
  return {half * h, static_cast<std::size_t>(2 * half) + 1};
}

struct Comparison {
  double phi_rel;
  double psi_rel;
};

Comparison compare_with_oracle(const BoxCase& bc, double h_max) {
  const GridSize g = oracle_grid(bc, h_max);
  const auto mu = ExchangeSpec::make(KernelShape::box, bc.aw, 2.0 * bc.aw * bc.m);
  const auto nu = ExchangeSpec::make(KernelShape::box, bc.aw, 2.0 * bc.aw * bc.nh);
  const BvpSolution num = solve_phi(bc.lambda, bc.c, bc.p, mu, nu, g.L, g.n);
  const BvpSolution ref = box_oracle_phi(bc.lambda, bc.c, bc.p, bc.m, bc.nh, bc.aw, g.L, g.n);
  double err = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) err = std::max(err, std::abs(num.phi[i] - ref.phi[i]));
  return {err / ref.phi.max_abs(), std::abs(num.psi2 - ref.psi2) / ref.psi2};
}

}  // namespace

TEST(SolvePhi, ZeroSourceGivesZeroProfile) {
  const ModelParams p = unit_params();
  const BvpSolution s = solve_phi(1.25, 2.5, p, ExchangeSpec::zero(), ExchangeSpec::make(KernelShape::box, 1, 1), 20, 401);
  for (double v : s.phi.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(s.psi2, 0.0);
}

TEST(SolvePhi, MatchesBoxOracleReferenceCase) {
  const BoxCase bc{unit_params(), 2.5, 1.25, 0.5, 0.5, 1.0};
  const Comparison c = compare_with_oracle(bc, 1e-3);
  EXPECT_LE(c.phi_rel, 1e-6);
  EXPECT_LE(c.psi_rel, 1e-6);
}

TEST(SolvePhi, OracleEquivalenceRandomTuples) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    BoxCase bc;
    bc.p = unit_params();
    bc.p.d = 0.5 + 1.5 * u(rng);
    bc.p.a = 0.5 + 1.5 * u(rng);
    bc.c = bc.p.c_kpp() * (1.05 + 0.6 * u(rng));
    const auto [lo, hi] = lambda2_pm(bc.c, bc.p);
    bc.lambda = lo + (hi - lo) * (0.2 + 0.6 * u(rng));
    bc.m = 0.1 + u(rng);
    bc.nh = 0.1 + u(rng);
    bc.aw = 0.3 + 1.7 * u(rng);
    const Comparison c = compare_with_oracle(bc, 1e-3);
    EXPECT_LE(c.phi_rel, 1e-5) << "tuple " << k;
    EXPECT_LE(c.psi_rel, 1e-6) << "tuple " << k;
  }
}

TEST(SolvePhi, LinearInSource) {
  const ModelParams p = unit_params();
  const auto nu = ExchangeSpec::make(KernelShape::triangle, 1.0, 1.0);
  const BvpSolution base = solve_phi(1.1, 2.5, p, ExchangeSpec::make(KernelShape::raised_cosine, 1.5, 1.0), nu, 20, 4001);
  for (double t : {0.25, 3.0}) {
    const BvpSolution s =
        solve_phi(1.1, 2.5, p, ExchangeSpec::make(KernelShape::raised_cosine, 1.5, t), nu, 20, 4001);
    EXPECT_NEAR(s.psi2, t * base.psi2, 1e-13 * t);
    for (std::size_t i = 0; i < s.phi.size(); ++i) ASSERT_NEAR(s.phi[i], t * base.phi[i], 1e-13 * t);
  }
}

TEST(SolvePhi, Errors) {
  const ModelParams p = unit_params();
  const auto k = ExchangeSpec::make(KernelShape::box, 1, 1);
  try {
    solve_phi(0.5, 2.5, p, k, k, 20, 401);  // lambda = lambda_2^-
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::domain);
  }
  EXPECT_THROW(solve_phi(1.0, 1.9, p, k, k, 20, 401), Error);  // subcritical speed, P < 0
  try {
    solve_phi(1.25, 2.5, p, k, k, 20, 63);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::resolution);
  }
  EXPECT_THROW(solve_phi(1.25, 2.5, p, k, rescale_long_range(k, 30), 20, 401), Error);
}

TEST(SolvePhi, DiscreteMassBalance) {
  // summing the discrete equation over the (exactly closed) infinite grid:
  // P int phi + Psi_2 = trapezoid mass of mu
  const ModelParams p = unit_params();
  const PhiSolver solver(p, ExchangeSpec::make(KernelShape::triangle, 2.0, 1.3),
                         ExchangeSpec::make(KernelShape::box, 1.0, 0.7), 6.0, 1201);
  for (double lambda : {0.6, 1.0, 1.25, 1.9}) {
    const BvpSolution s = solver.solve(lambda, 2.5);
    EXPECT_NEAR(p_coeff(lambda, 2.5, p) * s.integral_phi + s.psi2, solver.mu_mass(), 1e-10);
  }
}

TEST(SolvePhi, TruncationIndependent) {
  // the closure at +-L is exact for the discrete problem, so padding does not matter
  const ModelParams p = unit_params();
  const auto mu = ExchangeSpec::make(KernelShape::box, 1.0, 1.0);
  const auto nu = ExchangeSpec::make(KernelShape::triangle, 1.0, 1.0);
  const double h = 0.01;
  const double tight = PhiSolver(p, mu, nu, 100 * h, 201).psi2(1.3, 2.5);
  const double loose = PhiSolver(p, mu, nu, 3000 * h, 6001).psi2(1.3, 2.5);
  EXPECT_NEAR(tight, loose, 1e-13);
}

TEST(BoxOracle, DegenerateCases) {
  const ModelParams p = unit_params();
  const BvpSolution no_nu = box_oracle_phi(1.25, 2.5, p, 0.5, 0.0, 1.0, 10, 2001);
  EXPECT_EQ(no_nu.psi2, 0.0);
  // C^1 matching at y = a_w: one-sided difference quotients agree up to O(h)
  const std::size_t edge = 1100;  // y = 1
  ASSERT_NEAR(no_nu.phi.y(edge), 1.0, 1e-12);
  const double h = no_nu.phi.h();
  const double left = (no_nu.phi[edge] - no_nu.phi[edge - 1]) / h;
  const double right = (no_nu.phi[edge + 1] - no_nu.phi[edge]) / h;
  EXPECT_NEAR(left, right, 5.0 * h);

  const BvpSolution no_mu = box_oracle_phi(1.25, 2.5, p, 0.0, 0.7, 1.0, 10, 2001);
  for (double v : no_mu.phi.values()) EXPECT_EQ(v, 0.0);

  // wide box: interior plateau m / (P + n_h)
  const BvpSolution wide = box_oracle_phi(1.25, 2.5, p, 0.5, 0.5, 200.0, 220, 4401);
  EXPECT_NEAR(wide.phi[2200], 0.5 / (0.5625 + 0.5), 1e-12);

  EXPECT_THROW(box_oracle_phi(0.5, 2.5, p, 0.5, 0.5, 1.0, 10, 2001), Error);
}

TEST(SolvePhi, NonnegativeAndEven) {
  const ModelParams p = unit_params();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const KernelShape shapes[] = {KernelShape::box, KernelShape::triangle, KernelShape::raised_cosine};
  for (int k = 0; k < 30; ++k) {
    const auto mu = ExchangeSpec::make(shapes[k % 3], 0.2 + 3 * u(rng), 0.1 + 2 * u(rng));
    const auto nu = ExchangeSpec::make(shapes[(k / 3) % 3], 0.2 + 3 * u(rng), 0.1 + 2 * u(rng));
    const double c = 2.0 * (1.01 + u(rng));
    const auto [lo, hi] = lambda2_pm(c, p);
    const double lambda = lo + (hi - lo) * (0.001 + 0.998 * u(rng));
    const BvpSolution s = solve_phi(lambda, c, p, mu, nu, 4.0, 1601);
    const double mx = s.phi.max_abs();
    EXPECT_GT(s.psi2, 0.0);
    for (std::size_t i = 0; i < s.phi.size(); ++i) {
      ASSERT_GE(s.phi[i], -1e-12 * mx);
      ASSERT_LE(std::abs(s.phi[i] - s.phi[s.phi.size() - 1 - i]), 1e-12 * mx);
    }
  }
}

TEST(Psi2, ConvexAndSymmetricInLambda) {
  const ModelParams p = unit_params();
  const double c = 2.5;
  for (auto shape : {KernelShape::box, KernelShape::triangle, KernelShape::raised_cosine}) {
    const auto k = ExchangeSpec::make(shape, 1.0, 1.0);
    const GridSize g = make_phi_grid(p, k, k, c);
    const PhiSolver solver(p, k, k, g.L, g.n);
    const auto [lo, hi] = lambda2_pm(c, p);
    const double margin = 1e-3 * (hi - lo);
    std::vector<double> v(41);
    for (int i = 0; i < 41; ++i) v[i] = solver.psi2(lo + margin + (hi - lo - 2 * margin) * i / 40.0, c);
    for (int i = 1; i < 40; ++i) EXPECT_GE(v[i - 1] - 2 * v[i] + v[i + 1], -1e-8);
    for (int i = 0; i < 41; ++i) EXPECT_LE(std::abs(v[i] - v[40 - i]), 1e-8);
  }
}

TEST(Psi2, EndpointsExtrapolateToMuBar) {
  const ModelParams p = unit_params();
  const auto mu = ExchangeSpec::make(KernelShape::box, 1.0, 1.0);
  const auto nu = ExchangeSpec::make(KernelShape::triangle, 1.5, 1.0);
  const double c = 2.5;
  const GridSize g = make_phi_grid(p, mu, nu, c);
  const PhiSolver solver(p, mu, nu, g.L, g.n);
  const EndpointCheck e = psi2_endpoint_check(c, solver);
  EXPECT_NEAR(e.left, 1.0, 0.02);
  EXPECT_NEAR(e.right, 1.0, 0.02);
  EXPECT_TRUE(e.monotone_from_below);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(e.left_values[k], e.right_values[k], 1e-8);
  EXPECT_THROW(psi2_endpoint_check(c, solver, {1e-2, 1e-3, 0.0}), Error);
}

TEST(Psi2, MaximumPrincipleUnderLongRangeMu) {
  // With mu_R the coercive operator gives ||phi_R|| <= ||mu_R|| / P. The variant with an
  // extra 1/d is only recorded.
  ModelParams p = unit_params();
  p.d = 2.0;
  const double c = 1.2 * p.c_kpp();
  const auto [lo, hi] = lambda2_pm(c, p);
  const double lambda0 = 0.5 * (lo + hi);
  const double P = p_coeff(lambda0, c, p);
  const auto mu = ExchangeSpec::make(KernelShape::raised_cosine, 1.0, 1.0);
  const auto nu = ExchangeSpec::make(KernelShape::box, 1.0, 1.0);
  double prev = 1e300;
  for (double R : {1.0, 10.0, 100.0}) {
    const ExchangeSpec muR = rescale_long_range(mu, R);
    const GridSize g = make_phi_grid(p, muR, nu, c);
    const BvpSolution s = PhiSolver(p, muR, nu, g.L, g.n).solve(lambda0, c);
    const double bound = muR.peak() / P;
    const double with_d = mu.peak() / (R * p.d * P);
    EXPECT_LE(s.phi.max_abs(), bound * (1 + 1e-12));
    RecordProperty("R" + std::to_string(static_cast<int>(R)) + "_bound_with_d_holds",
                   s.phi.max_abs() <= with_d ? "yes" : "no");
    EXPECT_LE(s.psi2, p.nu_bar * bound * (1 + 1e-12));
    EXPECT_LT(s.psi2, prev);
    prev = s.psi2;
  }
  EXPECT_LT(prev, 0.02);
}

TEST(Psi2, SupersolutionUnderLongRangeNu) {
  const ModelParams p = unit_params();
  const double c = 2.5;
  const double lambda0 = 1.25;
  const auto mu = ExchangeSpec::make(KernelShape::triangle, 1.0, 1.0);
  const auto nu = ExchangeSpec::make(KernelShape::box, 1.0, 1.0);
  // phi-bar solves the nu-free problem
  const GridSize g0 = make_phi_grid(p, mu, nu, c);
  const BvpSolution bar = solve_phi(lambda0, c, p, mu, ExchangeSpec::zero(), g0.L, g0.n);
  for (double R : {1.0, 10.0, 100.0}) {
    const ExchangeSpec nuR = rescale_long_range(nu, R);
    const GridSize g = make_phi_grid(p, mu, nuR, c);
    const double psi = PhiSolver(p, mu, nuR, g.L, g.n).psi2(lambda0, c);
    EXPECT_LE(psi, nu.peak() / R * bar.integral_phi * (1 + 1e-9)) << "R = " << R;
  }
}

TEST(SolvePhi, SecondOrderMeshConvergence) {
  const ModelParams p = unit_params();
  const auto mu = ExchangeSpec::make(KernelShape::triangle, 1.0, 1.0);
  const auto nu = ExchangeSpec::make(KernelShape::raised_cosine, 1.0, 1.0);
  std::vector<double> psi;
  for (std::size_t n : {81u, 161u, 321u, 641u}) psi.push_back(PhiSolver(p, mu, nu, 4.0, n).psi2(1.25, 2.5));
  const double d1 = std::abs(psi[1] - psi[0]);
  const double d2 = std::abs(psi[2] - psi[1]);
  const double d3 = std::abs(psi[3] - psi[2]);
  EXPECT_GE(d1 / d2, 3.5);
  EXPECT_GE(d2 / d3, 3.5);
}
