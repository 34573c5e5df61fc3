#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "bsflow/bubble.hpp"

using namespace bsflow;

namespace {

// p_A = rho^1.4 (Pi_A = 0.4 rho^1.4), p_S = -rho^2 (Pi_S = -rho^2, tension).
BubbleParams soap(double mu = 0, double lambda = 0) {
  BubbleParams p;
  p.p_A = BarotropicLaw::parse("rho^1.4");
  p.p_S = BarotropicLaw::parse("-rho^2");
  p.mu_A = p.mu_S = mu;
  p.lambda_A = p.lambda_S = lambda;
  p.pi_inf = 1.0;
  return p;
}

// Young-Laplace balance at R = 1, rho_S = 1: 0.4 rho_A^1.4 = 1 + 2 = 3.
BubbleState equilibrium() { return {1.0, 0.0, std::pow(7.5, 1 / 1.4), 1.0}; }

}  // namespace

TEST(Bubble, RhsAtEquilibrium) {
  const BubbleModel m(soap(0.3, 0.1));
  const BubbleState d = m.rhs(equilibrium());
  EXPECT_EQ(d.R, 0.0);
  EXPECT_NEAR(d.U, 0.0, 1e-14);
  EXPECT_EQ(d.rho_A, 0.0);
  EXPECT_EQ(d.rho_S, 0.0);
}

TEST(Bubble, RhsHandValue) {
  // Pi_A = 0.4 * 2^1.4, Pi_S = -0.25, R = 2, U = 0.5, rho_S = 0.5.
  BubbleParams p = soap();
  p.mu_A = 0.2;
  p.lambda_A = 0.1;
  p.mu_S = 0.3;
  p.lambda_S = 0.05;
  const BubbleModel m(p);
  const BubbleState s{2.0, 0.5, 2.0, 0.5};
  const double force = -(2 / 2.0) * (0.4 * 0.25 + 0.25) - 1.0 - 0.5 * 0.25 + 0.4 * std::pow(2.0, 1.4);
  const BubbleState d = m.rhs(s);
  EXPECT_NEAR(d.U, force / 0.5, 1e-14);
  EXPECT_DOUBLE_EQ(d.R, 0.5);
  EXPECT_DOUBLE_EQ(d.rho_A, -3 * 0.25 * 2.0);
  EXPECT_DOUBLE_EQ(d.rho_S, -2 * 0.25 * 0.5);
}

TEST(Bubble, InviscidBalancedForcesAnyRadius) {
  // p = rho^2 gives Pi_A = rho_A^2 = pi_inf at rho_A = 1; a linear law gives Pi_S = 0.
  BubbleParams p;
  p.p_A = BarotropicLaw::parse("rho^2");
  p.p_S = BarotropicLaw::parse("3*rho");
  p.pi_inf = 1.0;
  const BubbleModel m(p);
  for (double R : {0.3, 1.0, 7.0}) EXPECT_EQ(m.rhs({R, 0.0, 1.0, 2.0}).U, 0.0);
}

TEST(Bubble, MassInvariantsOfRhs) {
  const BubbleModel m(soap(0.1, 0.1));
  const BubbleState s{1.3, -0.4, 2.0, 0.7};
  const BubbleState d = m.rhs(s);
  EXPECT_NEAR(d.rho_A * s.R * s.R * s.R + 3 * s.rho_A * s.R * s.R * d.R, 0.0, 1e-14);
  EXPECT_NEAR(d.rho_S * s.R * s.R + 2 * s.rho_S * s.R * d.R, 0.0, 1e-14);
}

TEST(Bubble, EquilibriumIsStationary) {
  const BubbleModel m(soap());
  const BubbleState s0 = equilibrium();
  const double dt = 1e-3 * m.natural_period(s0);
  const Trajectory tr = integrate(m, s0, 1e4 * dt, dt);
  ASSERT_FALSE(tr.halted) << tr.diagnostic;
  EXPECT_EQ(tr.records.size(), 10001u);
  double worst = 0;
  for (const auto& r : tr.records) worst = std::max(worst, std::abs(r.s.R - 1.0));
  EXPECT_LE(worst, 1e-10);
}

TEST(Bubble, EquilibriumRadiusSolve) {
  const BubbleModel m(soap());
  const BubbleState s = equilibrium();
  const double R = m.equilibrium_radius(s.rho_A, s.rho_S, 0.8, 2.0);
  EXPECT_NEAR(R, 1.0, 1e-13);
  EXPECT_THROW(m.equilibrium_radius(s.rho_A, s.rho_S, 1.5, 2.0), BubbleError);
}

TEST(Bubble, BalancingDensity) {
  const BubbleModel m(soap());
  EXPECT_NEAR(m.balancing_density(1.0, 1.0), equilibrium().rho_A, 1e-12);
  BubbleParams p = soap();
  p.pi_inf = -5.0;  // Pi_A would have to be negative
  EXPECT_THROW(BubbleModel(p).balancing_density(1.0, 1.0), BubbleError);
}

TEST(Bubble, NaturalPeriodMatchesLinearization) {
  // F'(1) = -1.4 * 3 * 3 + 10 = -2.6 along the invariants.
  const BubbleModel m(soap());
  EXPECT_NEAR(m.natural_period(equilibrium()), 2 * std::numbers::pi / std::sqrt(2.6), 1e-8);
}

TEST(Bubble, InvariantsAndLedgerOnOscillation) {
  const BubbleModel m(soap(0.05, 0.02));
  BubbleState s0 = equilibrium();
  s0.U = 0.2;
  const double T = m.natural_period(s0);
  const Trajectory tr = integrate(m, s0, 3 * T, T / 1000);
  ASSERT_FALSE(tr.halted);
  const BubbleConsistency c = consistency_check(m, tr, 6, 8);
  EXPECT_LE(c.invariant_drift, 1e-10);
  EXPECT_LE(c.mass_gap, 1e-8);
  EXPECT_LE(c.energy_gap, 1e-6);
  EXPECT_LE(c.rate_gap, 1e-10);
  EXPECT_LE(c.surface_momentum, 1e-8);
  EXPECT_GT(c.bulk_momentum, 1e-3);
  EXPECT_EQ(c.samples, 6);
}

TEST(Bubble, SlipAndNoSlipAgree) {
  const BubbleModel m(soap(0.2, 0.1));
  BubbleState s0 = equilibrium();
  s0.U = -0.3;
  const Trajectory tr = integrate(m, s0, 0.5, 0.01);
  const BubbleConsistency c0 = consistency_check(m, tr, 3, 6, 0);
  const BubbleConsistency c1 = consistency_check(m, tr, 3, 6, 1);
  EXPECT_LE(c0.surface_momentum, 1e-8);
  EXPECT_LE(c1.surface_momentum, 1e-8);
}

TEST(Bubble, ViscousDecayToEquilibrium) {
  const BubbleModel m(soap(0.5, 0.2));
  BubbleState s0 = equilibrium();
  s0.R = 1.01;
  s0.rho_A *= std::pow(1.01, -3);
  s0.rho_S *= std::pow(1.01, -2);
  const double R_eq = m.equilibrium_radius(s0.rho_A * std::pow(s0.R, 3), s0.rho_S * s0.R * s0.R, 0.8, 2.0);
  const Trajectory tr = integrate(m, s0, 60.0, 1e-2);
  ASSERT_FALSE(tr.halted);
  EXPECT_LE(std::abs(tr.records.back().s.R - R_eq), 1e-6);
  // Envelope: the deviation never grows back above an earlier peak.
  double prev_peak = INFINITY;
  for (std::size_t i = 1; i + 1 < tr.records.size(); ++i) {
    const double d = std::abs(tr.records[i].s.R - R_eq);
    if (d >= std::abs(tr.records[i - 1].s.R - R_eq) && d >= std::abs(tr.records[i + 1].s.R - R_eq) && d > 1e-12) {
      EXPECT_LE(d, prev_peak * (1 + 1e-9));
      prev_peak = d;
    }
  }
}

TEST(Bubble, InviscidEnergyDriftPerPeriod) {
  BubbleParams p;
  p.p_A = BarotropicLaw::parse("2*rho^1.4");
  p.p_S = BarotropicLaw::parse("-0.5*rho^2");
  p.pi_inf = 1.0;
  const BubbleModel m(p);
  const double rhoS = 1.0, R = 1.0;
  // 0.8 rho_A^1.4 = 1 + 2 * 0.5 = 2.
  BubbleState s0{R, 0.05, std::pow(2.5, 1 / 1.4), rhoS};
  const double T = m.natural_period(s0);
  const Trajectory tr = integrate(m, s0, 5 * T, T / 1000);
  const BubbleConsistency c = consistency_check(m, tr, 2, 4);
  EXPECT_LE(c.energy_gap / 5, 1e-6);
}

TEST(Bubble, HaltsOnCollapse) {
  // No interior or surface pressure: the ambient crushes the bubble.
  BubbleParams p;
  p.p_A = BarotropicLaw::parse("rho");
  p.p_S = BarotropicLaw::parse("rho");
  p.pi_inf = 1.0;
  const BubbleModel m(p);
  const Trajectory tr = integrate(m, {1.0, 0.0, 1.0, 1.0}, 100.0, 0.05);
  EXPECT_TRUE(tr.halted);
  EXPECT_FALSE(tr.diagnostic.empty());
  ASSERT_FALSE(tr.records.empty());
  EXPECT_LT(tr.records.back().t, 100.0);
  for (const auto& r : tr.records) {
    EXPECT_GT(r.s.R, 0.0);
    EXPECT_GT(r.s.rho_A, 0.0);
    EXPECT_TRUE(std::isfinite(r.s.U));
  }
  EXPECT_THROW(m.rhs({-1.0, 0.0, 1.0, 1.0}), BubbleError);
  EXPECT_THROW(m.rhs({1.0, 0.0, 0.0, 1.0}), BubbleError);
  EXPECT_THROW(integrate(m, {1.0, 0.0, 1.0, 1.0}, 1.0, 0.0), std::invalid_argument);
}

TEST(Bubble, Csv) {
  const BubbleModel m(soap());
  const Trajectory tr = integrate(m, equilibrium(), 0.1, 0.01);
  std::ostringstream os;
  write_trajectory_csv(os, tr, 5);
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "t,R,U,rho_A,rho_S,mass_A,mass_S,kinetic,dissipated,work,gap_1_14");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 4);  // header, steps 0, 5, 10
}
