#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "bsflow/fixtures.hpp"
#include "bsflow/verify_integral.hpp"

using namespace bsflow;
using expr::parse;

namespace {

constexpr double pi = std::numbers::pi;

DomainConfig growing_sphere() { return DomainConfig{SurfaceChart::sphere(parse("1 + t")), 3.0, 0}; }

}  // namespace

TEST(Transport, SphereAreaGrowth) {
  const DomainConfig d = growing_sphere();
  const TransportResult r =
      transport_check(d, Moving::Gamma, Expr(1.0), d.surface.normal_field(), QuadratureRule{24}, 0.5, 1e-3);
  EXPECT_NEAR(r.lhs, 8 * pi * 1.5, 1e-8);
  EXPECT_NEAR(r.rhs, 8 * pi * 1.5, 1e-10);
  EXPECT_LE(r.gap, 1e-8);
}

TEST(Transport, BallVolumeGrowth) {
  const DomainConfig d = growing_sphere();
  const VectorField v = Expr(1.0) / parse("1 + t") * position();
  const TransportResult r = transport_check(d, Moving::A, Expr(1.0), v, QuadratureRule{24}, 0.5, 1e-3);
  EXPECT_NEAR(r.rhs, 4 * pi * 1.5 * 1.5, 1e-10);
  EXPECT_LE(r.gap, 1e-8);
}

TEST(Transport, StaticGeometry) {
  const DomainConfig d{SurfaceChart::sphere(Expr(1.0)), 3.0, 0};
  const VectorField zero = constant_vector(0, 0, 0);
  for (Moving m : {Moving::A, Moving::B, Moving::Gamma}) {
    const TransportResult r = transport_check(d, m, parse("x1^2 + x2*x3"), zero, QuadratureRule{16}, 0.0, 1e-3);
    EXPECT_LE(r.gap, 1e-12) << to_string(m);
  }
}

TEST(Transport, TimeDependentIntegrandsAllRegions) {
  const SystemState sys = fixtures::expanding_bubble();
  const Expr f = parse("(1 + x1^2) * exp(0.3*t) + x2*x3*t");
  const QuadratureRule q{24};
  for (Phase ph : {Phase::A, Phase::B, Phase::S}) {
    const Moving m = ph == Phase::A ? Moving::A : ph == Phase::B ? Moving::B : Moving::Gamma;
    const TransportResult r = transport_check(sys.domain, m, f, sys.state(ph).v, q, 0.7, 1e-3);
    EXPECT_LE(r.gap, 1e-7) << to_string(m);
    EXPECT_LE(r.motion_mismatch, 1e-12);
  }
}

TEST(Transport, CapsWithSwirl) {
  Rng rng(11);
  const SystemState sys = fixtures::random_lagrangian(rng, 1);
  const Expr f = parse("1 + x3^2 + sin(x1 + t)");
  for (double cap : {pi / 3, 2 * pi / 3}) {
    const QuadratureRule q{24, cap};
    const TransportResult a = transport_check(sys.domain, Moving::A, f, sys.state(Phase::A).v, q, 0.4, 1e-3);
    const TransportResult s = transport_check(sys.domain, Moving::Gamma, f, sys.state(Phase::S).v, q, 0.4, 1e-3);
    const TransportResult b = transport_check(sys.domain, Moving::B, f, sys.state(Phase::B).v, q, 0.4, 1e-3);
    EXPECT_LE(a.gap, 1e-7);
    EXPECT_LE(s.gap, 1e-7);
    EXPECT_LE(b.gap, 1e-7);
  }
}

TEST(Transport, FourthOrderInStep) {
  const DomainConfig d = growing_sphere();
  const Expr f = parse("exp(t) * (1 + x1^2)");
  const VectorField& v = d.surface.normal_field();
  const double g1 = transport_check(d, Moving::Gamma, f, v, QuadratureRule{24}, 0.5, 0.1).gap;
  const double g2 = transport_check(d, Moving::Gamma, f, v, QuadratureRule{24}, 0.5, 0.05).gap;
  const double order = std::log2(g1 / g2);
  EXPECT_NEAR(order, 4.0, 0.2);
}

TEST(Transport, RejectsInconsistentMotion) {
  const DomainConfig d = growing_sphere();
  EXPECT_THROW(transport_check(d, Moving::Gamma, Expr(1.0), constant_vector(0, 0, 0), QuadratureRule{12}, 0.5,
                               1e-3),
               PreconditionError);
  // Tangential drift across the cone boundary.
  const VectorField v = d.surface.normal_field() + VectorField{parse("x3"), Expr(0.0), parse("-x1")};
  EXPECT_NO_THROW(transport_check(d, Moving::Gamma, Expr(1.0), v, QuadratureRule{12}, 0.5, 1e-3));
  EXPECT_THROW(transport_check(d, Moving::Gamma, Expr(1.0), v, QuadratureRule{12, pi / 2}, 0.5, 1e-3),
               PreconditionError);
}

TEST(Ibp, Examples) {
  const DomainConfig unit{SurfaceChart::sphere(Expr(1.0)), 3.0, 0};
  const QuadratureRule q{24};
  for (int j = 1; j <= 3; ++j)
    EXPECT_LE(ibp_check(unit, IbpKind::Surface, Expr(1.0), Expr(1.0), j, q, 0).gap, 1e-8);
  const IbpResult a = ibp_check(unit, IbpKind::BulkA, parse("x1"), Expr(1.0), 1, q, 0);
  EXPECT_NEAR(a.lhs, 4 * pi / 3, 1e-12);
  EXPECT_NEAR(a.rhs, 4 * pi / 3, 1e-12);
  EXPECT_LE(a.gap, 1e-9);
  const IbpResult s = ibp_check(unit, IbpKind::Surface, parse("x3"), parse("x3"), 3, q, 0);
  // 2 * int x3 (1 - x3^2) = 0 by symmetry on the left; both sides independent.
  EXPECT_LE(s.gap, 1e-8);
}

TEST(Ibp, CorpusOnThreeCharts) {
  const std::vector<DomainConfig> charts{
      {SurfaceChart::sphere(Expr(1.0)), 3.0, 0},
      {SurfaceChart::ellipsoid(1.3, 0.9, 0.7), 3.0, 0},
      {SurfaceChart::perturbed_sphere(parse("1 + 0.2*t"), 0.15), 3.0, 0},
  };
  const QuadratureRule q{24};
  for (const DomainConfig& d : charts) {
    for (const IbpCase& c : ibp_corpus()) {
      for (IbpKind k : {IbpKind::BulkA, IbpKind::BulkB, IbpKind::Surface}) {
        const IbpResult r = ibp_check(d, k, parse(c.f), parse(c.g), c.j, q, 0.5);
        EXPECT_LE(r.gap, 1e-8) << d.surface.describe() << " " << to_string(k) << " f=" << c.f << " g=" << c.g;
      }
    }
  }
}

TEST(Ibp, SurfaceCurvatureTermMatters) {
  // f = x1, g = 1, j = 1 on the unit sphere: left side 8 pi / 3 comes
  // entirely from the curvature term.
  const DomainConfig unit{SurfaceChart::sphere(Expr(1.0)), 3.0, 0};
  const IbpResult r = ibp_check(unit, IbpKind::Surface, parse("x1"), Expr(1.0), 1, QuadratureRule{24}, 0);
  EXPECT_NEAR(r.lhs, 8 * pi / 3, 1e-12);
  EXPECT_LE(r.gap, 1e-10);
}

TEST(FirstLaw, BarotropicExpansion) {
  const SystemState sys = fixtures::barotropic_expansion();
  const auto bar = first_law_check(sys, FirstLawForm::Barotropic, QuadratureRule{16}, 0.5, 1e-3, 1e-9,
                                   {Phase::A, Phase::S});
  ASSERT_EQ(bar.size(), 2u);
  for (const FirstLawResult& r : bar) {
    EXPECT_LE(r.gap, 1e-7) << to_string(r.phase);
    EXPECT_GT(std::abs(r.lhs), 1e-2);
  }
  EXPECT_THROW(first_law_check(sys, FirstLawForm::Barotropic, QuadratureRule{8}, 0.5, 1e-3), PreconditionError);
  for (const FirstLawResult& r : first_law_check(sys, FirstLawForm::Internal, QuadratureRule{16}, 0.5, 1e-3))
    EXPECT_LE(r.gap, 1e-7) << to_string(r.phase);
}

TEST(FirstLaw, ExpandingBubbleWithCaps) {
  const SystemState sys = fixtures::expanding_bubble();
  for (double cap : {pi, pi / 4}) {
    for (const FirstLawResult& r :
         first_law_check(sys, FirstLawForm::Internal, QuadratureRule{20, cap}, 0.6, 1e-3)) {
      EXPECT_LE(r.gap, 1e-7) << to_string(r.phase) << " cap " << cap;
      if (r.phase != Phase::B) EXPECT_GT(std::abs(r.lhs), 1e-3);
    }
  }
}

TEST(FirstLaw, StaticAdiabatic) {
  const SystemState sys = fixtures::young_laplace(1.0, 1.0, 0.5);
  for (const FirstLawResult& r : first_law_check(sys, FirstLawForm::Internal, QuadratureRule{12}, 0.0, 1e-3)) {
    EXPECT_LE(std::abs(r.lhs), 1e-12);
    EXPECT_LE(std::abs(r.rhs), 1e-12);
  }
}

TEST(FirstLaw, Preconditions) {
  SystemState sys = fixtures::expanding_bubble();
  EXPECT_THROW(first_law_check(sys, FirstLawForm::Barotropic, QuadratureRule{8}, 0.5, 1e-3), PreconditionError);
  sys.states[0].rho = sys.states[0].rho * parse("1 + 0.1*x1");
  EXPECT_THROW(first_law_check(sys, FirstLawForm::Internal, QuadratureRule{8}, 0.5, 1e-3), PreconditionError);
}

TEST(FirstLaw, SourcedRandomState) {
  Rng rng(5);
  const SystemState sys = with_manufactured_sources(fixtures::random_lagrangian(rng, 1));
  for (const FirstLawResult& r : first_law_check(sys, FirstLawForm::Internal, QuadratureRule{16}, 0.3, 1e-3))
    EXPECT_LE(r.gap, 1e-6 * std::max(1.0, std::abs(r.lhs))) << to_string(r.phase);
}

TEST(Audit, MassOnContinuityFixture) {
  const SystemState sys = fixtures::continuity_fixture();
  const AuditResult a = conservation_audit(sys, Law::Mass, 0.0, 1.0, {QuadratureRule{16}, 6, 1e-8});
  EXPECT_TRUE(a.pass) << a.gap;
  // 4 pi / 3 + 4 pi + (4 pi / 3) (27 - 1).
  EXPECT_NEAR(a.lhs, 4 * pi / 3 + 4 * pi + 4 * pi / 3 * 26, 1e-9);
}

TEST(Audit, MassPropertyOverRandomStates) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Rng rng(seed);
    const SystemState sys = fixtures::random_lagrangian(rng, static_cast<int>(seed % 2));
    const AuditResult a = conservation_audit(sys, Law::Mass, 0.1, 0.6, {QuadratureRule{16}, 6, 1e-8});
    EXPECT_TRUE(a.pass) << "seed " << seed << " gap " << a.gap;
  }
}

TEST(Audit, ExpandingBubbleLaws) {
  for (int r : {0, 1}) {
    fixtures::ExpandingBubble p;
    p.r = r;
    const SystemState sys = fixtures::expanding_bubble(p);
    const AuditOptions opt{QuadratureRule{16}, 8, 1e-8};
    for (Law law : {Law::Mass, Law::Energy, Law::Kinetic}) {
      const AuditResult a = conservation_audit(sys, law, 0.0, 1.0, opt);
      EXPECT_TRUE(a.pass) << to_string(law) << " r=" << r << " gap " << a.gap;
    }
    if (r == 1) {
      const AuditResult a = conservation_audit(sys, Law::Momentum, 0.0, 1.0, opt);
      EXPECT_TRUE(a.pass) << a.gap;
    } else {
      EXPECT_THROW(conservation_audit(sys, Law::Momentum, 0.0, 1.0, opt), PreconditionError);
    }
  }
}

TEST(Audit, KineticLawIsNontrivial) {
  const SystemState sys = fixtures::expanding_bubble();
  const AuditResult a = conservation_audit(sys, Law::Kinetic, 0.0, 1.0, {QuadratureRule{16}, 8, 1e-8});
  double dissipation = 0;
  for (const std::string& n : a.notes)
    if (n.rfind("dissipation = ", 0) == 0) dissipation = std::stod(n.substr(14));
  EXPECT_GT(dissipation, 1e-3);
}

TEST(Audit, SourcedRandomStateAllLaws) {
  Rng rng(3);
  const SystemState sys = with_manufactured_sources(fixtures::random_lagrangian(rng, 1));
  AuditOptions opt{QuadratureRule{16}, 10, 1e-7};
  opt.relative = true;
  for (Law law : {Law::Mass, Law::Energy, Law::Kinetic, Law::Momentum}) {
    const AuditResult a = conservation_audit(sys, law, 0.2, 0.5, opt);
    EXPECT_TRUE(a.pass) << to_string(law) << " gap " << a.gap << " lhs " << a.lhs;
    EXPECT_GT(std::abs(a.lhs), 1e-2) << to_string(law);
  }
}

TEST(Audit, ItemizedPreconditions) {
  fixtures::ExpandingBubble p;
  SystemState sys = fixtures::expanding_bubble(p);
  sys.states[1].theta = sys.states[1].theta + parse("0.01*x1^2");
  try {
    conservation_audit(sys, Law::Energy, 0.0, 0.5, {QuadratureRule{8}, 3, 1e-8});
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("neumann_thetaB"), std::string::npos) << msg;
    EXPECT_NE(msg.find("energy residual"), std::string::npos) << msg;
  }
}

TEST(Audit, Csv) {
  std::ostringstream os;
  AuditResult a{Law::Mass, 0, 1, 2, 2, 0, 1e-8, true};
  write_audit_csv(os, {a});
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "law,t1,t2,lhs,rhs,gap,tol,pass");
  EXPECT_NE(os.str().find("mass,0,1,2,2,0,1e-08,true"), std::string::npos);
}
