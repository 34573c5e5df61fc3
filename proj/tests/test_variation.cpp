#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "bsflow/fixtures.hpp"
#include "bsflow/variation.hpp"

using namespace bsflow;
using expr::parse;

namespace {

constexpr double pi = std::numbers::pi;

DomainConfig unit_sphere(int r = 0) { return DomainConfig{SurfaceChart::sphere(Expr(1.0)), 3.0, r}; }

std::vector<DomainConfig> charts(int r) {
  return {DomainConfig{SurfaceChart::sphere(parse("1 + 0.2*t")), 3.0, r},
          DomainConfig{SurfaceChart::ellipsoid(1.2, 0.9, 0.8), 3.0, r},
          DomainConfig{SurfaceChart::perturbed_sphere(Expr(1.0), 0.15), 3.0, r}};
}

// v = 0, given pressures and temperatures, given coefficients.
SystemState quiet_state(const DomainConfig& d, std::array<double, 3> pis, std::array<Expr, 3> thetas,
                        std::array<double, 3> kappas) {
  std::array<PhaseMaterial, 3> mats;
  std::array<PhaseState, 3> st;
  for (int k = 0; k < 3; ++k) {
    mats[k].phase = static_cast<Phase>(k);
    mats[k].mu = 0.3 + 0.1 * k;
    mats[k].lambda = 0.2;
    mats[k].kappa = kappas[k];
    st[k].rho = Expr(1.0);
    st[k].v = constant_vector(0, 0, 0);
    st[k].theta = thetas[k];
    st[k].pi = Expr(pis[k]);
    st[k].e = Expr(0.0);
  }
  return SystemState::make(mats, st, d);
}

}  // namespace

TEST(MakeAdmissible, RandomSeedsOnAllCharts) {
  Rng rng(11);
  for (int r : {0, 1}) {
    for (const auto& d : charts(r)) {
      const auto var = make_admissible(random_seeds(rng), r, d, 0.4);
      const auto res = admissibility_residual(var, d, QuadratureRule{16});
      EXPECT_EQ(res.size(), 8u);
      for (const auto& c : res) EXPECT_LE(c.max_abs, 1e-10) << d.surface.describe() << " r=" << r << " " << c.name;
    }
  }
}

TEST(MakeAdmissible, NormalSeedPassesThrough) {
  const DomainConfig d = charts(0)[1];
  Rng rng(2);
  VariationSeeds s = random_seeds(rng);
  s.phi_S = d.surface.normal_field();
  const auto var = make_admissible(s, 0, d, 0.0);
  double worst = 0;
  for (const auto& nd : surface_nodes(d.surface, QuadratureRule{12}, 0.0)) {
    worst = std::max(worst, (eval(var.phi_A, nd.p()) - nd.n).norm());
    worst = std::max(worst, (eval(var.phi_B, nd.p()) - nd.n).norm());
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(MakeAdmissible, TangentialSeedVanishesForNoSlip) {
  const DomainConfig d = unit_sphere(0);
  Rng rng(3);
  VariationSeeds s = random_seeds(rng);
  s.phi_S = VectorField{parse("-x2"), parse("x1"), Expr(0.0)};
  const auto var = make_admissible(s, 0, d, 0.0);
  double worst = 0;
  for (const auto& nd : surface_nodes(d.surface, QuadratureRule{12}, 0.0)) {
    worst = std::max(worst, eval(var.phi_A, nd.p()).norm());
    worst = std::max(worst, eval(var.phi_B, nd.p()).norm());
  }
  EXPECT_LE(worst, 1e-12);
  const auto slip = make_admissible(s, 1, DomainConfig{d.surface, 3.0, 1}, 0.0);
  const Point p = point(Eigen::Vector3d(1, 0, 0), 0.0);
  EXPECT_NEAR(eval(slip.phi_A, p)[1], 1.0, 1e-12);
}

TEST(MakeAdmissible, WidthLimits) {
  Rng rng(4);
  const auto s = random_seeds(rng);
  EXPECT_THROW(make_admissible(s, 0, unit_sphere(), 0.0, 2.5), std::invalid_argument);
  EXPECT_THROW(make_admissible(s, 0, unit_sphere(), 0.0, 1.5), std::invalid_argument);
  EXPECT_THROW(make_admissible(s, 2, unit_sphere(), 0.0), std::invalid_argument);
  EXPECT_NO_THROW(make_admissible(s, 0, unit_sphere(), 0.0, 0.5));
}

TEST(Functional, Signs) {
  Rng rng(5);
  const SystemState sys = fixtures::random_smooth_state(rng, charts(0)[2]);
  const QuadratureRule q{12};
  EXPECT_LT(functional(sys, Functional::D, q, 0.3), 0.0);
  EXPECT_LT(functional(sys, Functional::TD, q, 0.3), 0.0);
  EXPECT_NEAR(functional(sys, Functional::DW, q, 0.3),
              functional(sys, Functional::D, q, 0.3) + functional(sys, Functional::W, q, 0.3), 1e-12);
}

TEST(Functional, WorkOfUniformExpansion) {
  // v = x, pi = 1 everywhere: div v = 3 in the bulk, div_Gamma v = 2 on the unit sphere.
  SystemState sys = quiet_state(unit_sphere(), {1, 1, 1}, {Expr(1.0), Expr(1.0), Expr(1.0)}, {1, 1, 1});
  for (auto& s : sys.states) s.v = position();
  const double ball = 4 * pi / 3 * 27;
  EXPECT_NEAR(functional(sys, Functional::W, QuadratureRule{12}, 0.0), 3 * ball + 2 * 4 * pi, 1e-10);
}

TEST(GateauxVelocity, ZeroState) {
  const DomainConfig d = unit_sphere();
  const SystemState sys = quiet_state(d, {0, 0, 0}, {Expr(1.0), Expr(1.0), Expr(1.0)}, {1, 1, 1});
  Rng rng(6);
  const auto res = gateaux_gap_velocity(sys, make_admissible(random_seeds(rng), 0, d, 0.0), {QuadratureRule{12}});
  EXPECT_LE(std::abs(res.side_a), 1e-13);
  EXPECT_LE(std::abs(res.side_b), 1e-13);
}

TEST(GateauxVelocity, ConstantPressures) {
  for (int r : {0, 1}) {
    for (const auto& d : {charts(r)[2 * r], charts(r)[1]}) {
      const SystemState sys = quiet_state(d, {2.0, 1.0, 0.5}, {Expr(1.0), Expr(1.0), Expr(1.0)}, {1, 1, 1});
      Rng rng(7);
      const auto res = gateaux_gap_velocity(sys, make_admissible(random_seeds(rng), r, d, 0.0), {QuadratureRule{24}});
      EXPECT_GT(std::abs(res.side_a), 1e-2);
      EXPECT_LE(res.gap, 1e-8) << d.surface.describe() << " r=" << r;
    }
  }
}

TEST(GateauxVelocity, RandomStates) {
  for (int r : {0, 1}) {
    {
      const DomainConfig d = charts(r)[1 + r];
      Rng rng(100 + r);
      const SystemState sys = fixtures::random_smooth_state(rng, d);
      const auto var = make_admissible(random_seeds(rng), r, d, 0.25);
      const auto res = gateaux_gap_velocity(sys, var, {QuadratureRule{24}});
      const double scale = std::max({1.0, std::abs(res.side_a), std::abs(res.side_b)});
      EXPECT_LE(res.gap / scale, 1e-8) << d.surface.describe() << " r=" << r << " a=" << res.side_a
                                       << " b=" << res.side_b;
      // E_{D+W} is quadratic in eps, so the two steps agree to roundoff.
      EXPECT_LE(std::abs(res.side_a - res.side_a_coarse) / scale, 1e-11);
    }
  }
}

TEST(GateauxVelocity, Linearity) {
  const DomainConfig d = charts(1)[0];
  Rng rng(8);
  const SystemState sys = fixtures::random_smooth_state(rng, d);
  const auto var = make_admissible(random_seeds(rng), 1, d, 0.1);
  const GateauxOptions opt{QuadratureRule{16}};
  const auto base = gateaux_gap_velocity(sys, var, opt);
  for (double s : {0.5, 3.0}) {
    const auto sc = gateaux_gap_velocity(sys, var.scaled(s), opt);
    EXPECT_NEAR(sc.side_a / s, base.side_a, 1e-12 * std::max(1.0, std::abs(base.side_a)));
    EXPECT_NEAR(sc.side_b / s, base.side_b, 1e-12 * std::max(1.0, std::abs(base.side_b)));
    EXPECT_NEAR(sc.gap / s, base.gap, 1e-12);
  }
}

TEST(GateauxVelocity, RejectsInadmissible) {
  const DomainConfig d = unit_sphere(0);
  const SystemState sys = quiet_state(d, {1, 1, 1}, {Expr(1.0), Expr(1.0), Expr(1.0)}, {1, 1, 1});
  Rng rng(9);
  auto var = make_admissible(random_seeds(rng), 0, d, 0.0);
  auto bad = var;
  bad.phi_B = constant_vector(1, 0, 0);
  EXPECT_THROW(gateaux_gap_velocity(sys, bad, {QuadratureRule{8}}), AdmissibilityError);
  try {
    gateaux_gap_velocity(sys, bad, {QuadratureRule{8}});
  } catch (const AdmissibilityError& e) {
    EXPECT_NE(std::string(e.what()).find("phiB_outer"), std::string::npos);
  }
  auto other_r = make_admissible(random_seeds(rng), 1, DomainConfig{d.surface, 3.0, 1}, 0.0);
  EXPECT_THROW(gateaux_gap_velocity(sys, other_r, {QuadratureRule{8}}), AdmissibilityError);
  // A broken psi does not matter for the velocity check.
  bad = var;
  bad.psi_B = Expr(5.0);
  EXPECT_NO_THROW(gateaux_gap_velocity(sys, bad, {QuadratureRule{8}}));
  EXPECT_THROW(gateaux_gap_temperature(sys, bad, {QuadratureRule{8}}), AdmissibilityError);
}

TEST(GateauxTemperature, UniformTemperature) {
  const DomainConfig d = unit_sphere();
  const SystemState sys = quiet_state(d, {0, 0, 0}, {Expr(2.0), Expr(2.0), Expr(2.0)}, {1, 2, 3});
  Rng rng(10);
  const auto res = gateaux_gap_temperature(sys, make_admissible(random_seeds(rng), 0, d, 0.0), {QuadratureRule{12}});
  EXPECT_LE(std::abs(res.side_a), 1e-14);
  EXPECT_LE(std::abs(res.side_b), 1e-14);
}

TEST(GateauxTemperature, LinearProfileEqualConductivities) {
  for (const auto& d : charts(0)) {
    const Expr th = parse("x3");
    const SystemState sys = quiet_state(d, {0, 0, 0}, {th, th, th}, {0.7, 0.7, 0.4});
    Rng rng(12);
    const auto res = gateaux_gap_temperature(sys, make_admissible(random_seeds(rng), 0, d, 0.0), {QuadratureRule{20}});
    EXPECT_GT(std::abs(res.side_a), 1e-3);
    EXPECT_LE(res.gap, 1e-8) << d.surface.describe();
  }
}

TEST(GateauxTemperature, QuadraticProfileJump) {
  const double R = 1.3;
  const DomainConfig d{SurfaceChart::sphere(Expr(R)), 3.0, 0};
  const Expr th = parse("x1^2 + x2^2 + x3^2");
  const SystemState sys = quiet_state(d, {0, 0, 0}, {th, th, th}, {1.0, 2.0, 0.5});
  // psi = 1 near Gamma and in A: side (b) = 6 kA |A| + 6 kB int_B om^2 + (kB - kA) 2R |Gamma|.
  VariationSeeds s;
  s.phi_S = s.phi_A_free = s.phi_B_free = constant_vector(0, 0, 0);
  s.psi_S = Expr(1.0);
  s.psi_A_free = s.psi_B_free = Expr(0.0);
  const auto var = make_admissible(s, 0, d, 0.0);
  const auto res = gateaux_gap_temperature(sys, var, {QuadratureRule{24}});
  EXPECT_LE(res.gap, 1e-7);
  // int_B om^2 on the sphere: om = (Ro^2 - r^2)/(Ro^2 - r^2 + r - R), radial quadrature.
  const auto gl = gauss_legendre(200, R, 3.0);
  double omB = 0;
  for (std::size_t k = 0; k < gl.x.size(); ++k) {
    const double r = gl.x[k], a = 9 - r * r, om = a / (a + r - R);
    omB += gl.w[k] * 4 * pi * r * r * om * om;
  }
  const double expected = 6 * 1.0 * 4 * pi / 3 * R * R * R + 6 * 2.0 * omB + (2.0 - 1.0) * 2 * R * 4 * pi * R * R;
  EXPECT_NEAR(res.side_b, expected, 1e-8 * expected);
}

TEST(GateauxTemperature, RandomStates) {
  for (const auto& d : charts(0)) {
    Rng rng(200);
    const SystemState sys = fixtures::random_smooth_state(rng, d);
    const auto res = gateaux_gap_temperature(sys, make_admissible(random_seeds(rng), 0, d, 0.25), {QuadratureRule{24}});
    const double scale = std::max({1.0, std::abs(res.side_a), std::abs(res.side_b)});
    EXPECT_LE(res.gap / scale, 1e-8) << d.surface.describe();
  }
}

TEST(Gateaux, Csv) {
  std::ostringstream os;
  write_gateaux_csv(os, {GateauxRecord{"velocity", 1, 3, GateauxResult{1.5, 1.5, 0.0, 1.5}, true}});
  EXPECT_EQ(os.str(), "theorem,r,variation_id,side_a,side_b,gap,pass\nvelocity,1,3,1.5,1.5,0,true\n");
}
