#include "bsflow/fixtures.hpp"

#include <cmath>
#include <numbers>

namespace bsflow::fixtures {

using expr::pow;
using expr::sqrt;
using std::numbers::pi;

namespace {

PhaseMaterial material(double mu, double lambda, double kappa) {
  PhaseMaterial m;
  m.mu = mu;
  m.lambda = lambda;
  m.kappa = kappa;
  return m;
}

Expr C(double v) { return Expr(v); }

const Expr& T() {
  static const Expr t = expr::t();
  return t;
}

Expr radius_sq() { return dot(position(), position()); }

}  // namespace

SystemState expanding_bubble(const ExpandingBubble& p) {
  const Expr t = T();
  const Expr R = C(1.0) + C(p.alpha) * t;
  const double Ro = p.outer_radius;
  const double Ro3 = Ro * Ro * Ro;
  const VectorField x = position();
  const Expr r = sqrt(radius_sq());

  // A: uniform expansion, constant pressure.
  PhaseState A;
  A.v = (C(p.alpha) / R) * x;
  A.rho = C(p.rho_A0) * pow(R, -3);
  A.pi = C(p.pi_A);
  A.e = (C((3 * p.mu_A + 9 * p.lambda_A) * p.alpha / 2) * R * R - C(p.pi_A) * pow(R, 3)) / C(p.rho_A0) + C(1.0);

  // B: potential flow v = grad Phi, Phi = c (-Ro^3/r - r^2/2), vanishing at Ro.
  const Expr D = C(Ro3) - pow(R, 3);
  const Expr c = R * R * C(p.alpha) / D;
  const Expr cdot = expr::derivative(c, Var::T);
  const Expr rhoB = C(p.rho_BK) / D;
  PhaseState B;
  B.v = c * (C(Ro3) * pow(radius_sq(), -1.5) * x - x);
  B.rho = rhoB;
  B.e = C(p.e_B);
  // Bernoulli: pi = pi_B0 - rho (d_t Phi + |v|^2/2), written in powers of r.
  const Expr b_m1 = rhoB * C(Ro3) * (cdot + c * c);
  const Expr b_2 = rhoB * (cdot - c * c) / C(2.0);
  const Expr b_m4 = C(-Ro3 * Ro3 / 2) * rhoB * c * c;
  auto pressure_B = [&](const Expr& s) { return C(p.pi_B0) + b_m1 / s + b_2 * s * s + b_m4 * pow(s, -4); };
  B.pi = pressure_B(r);

  // kappa_B lap(theta_B) = div(v_B) pi_B - e_D(B) = sum_k s_k r^k.
  struct Term {
    int k;
    Expr s;
  };
  const std::vector<Term> source{
      {-1, C(-3.0) * c * b_m1},
      {2, C(-3.0) * c * b_2},
      {-4, C(-3.0) * c * b_m4},
      {-6, C(-6.0 * p.mu_B * Ro3 * Ro3) * c * c},
      {0, C(-(3 * p.mu_B + 9 * p.lambda_B)) * c * c - C(3.0 * p.pi_B0) * c},
  };
  const double kB = p.kappa_B;
  // Neumann at Ro fixes the 1/r coefficient; the flux at Gamma then matches
  // the surface energy balance because e_S is taken from total-energy
  // conservation below.
  Expr slope_at_Ro;
  for (const Term& s : source) slope_at_Ro = slope_at_Ro + s.s * C(std::pow(Ro, s.k + 1) / (kB * (s.k + 3)));
  const Expr b = C(Ro * Ro) * slope_at_Ro;
  auto theta_B = [&](const Expr& s) {
    Expr th = C(p.theta0) + b / s;
    for (const Term& src : source)
      th = th + src.s * pow(s, src.k + 2) / C(kB * (src.k + 2) * (src.k + 3));
    return th;
  };
  B.theta = theta_B(r);
  const Expr theta_Gamma = theta_B(R);
  A.theta = theta_Gamma;

  // S: pressure that balances the normal stresses.
  PhaseState S;
  S.v = A.v;
  S.rho = C(p.rho_S0) * pow(R, -2);
  S.theta = theta_Gamma;
  const Expr gprime = c * (C(-2 * Ro3) * pow(R, -3) - C(1.0));
  const Expr tB = C(p.mu_B) * gprime - C(3 * p.lambda_B) * c - pressure_B(R);
  const Expr tA = C((p.mu_A + 3 * p.lambda_A) * p.alpha) / R - C(p.pi_A);
  S.pi = C((p.mu_S + 2 * p.lambda_S) * p.alpha) / R - R / C(2.0) * (tB - tA);
  // Total energy is conserved; with e_B fixed and KE_A, KE_S constant,
  // M_A e_A + M_S e_S + KE_B is constant.
  const double MA = 4 * pi * p.rho_A0 / 3, MS = 4 * pi * p.rho_S0;
  const Expr KEB = C(2 * pi) * rhoB * c * c *
                   (C(Ro3 * Ro3) * (C(1.0) / R - C(1.0 / Ro)) - C(Ro3) * (C(Ro * Ro) - R * R) +
                    (C(Ro3 * Ro * Ro) - pow(R, 5)) / C(5.0));
  S.e = C(5.0) - (C(MA) * A.e + KEB) / C(MS);

  std::array<PhaseMaterial, 3> mats{material(p.mu_A, p.lambda_A, p.kappa_A), material(p.mu_B, p.lambda_B, p.kappa_B),
                                    material(p.mu_S, p.lambda_S, p.kappa_S)};
  return SystemState::make(mats, {A, B, S}, DomainConfig{SurfaceChart::sphere(R), Ro, p.r});
}

SystemState continuity_fixture(double outer_radius) {
  const Expr s = C(1.0) + T();
  const VectorField v = (C(1.0) / s) * position();
  const PhaseState A{pow(s, -3), v, C(1.0), C(0.0), C(0.0)};
  // B: potential flow matching the interface speed and vanishing on the
  // outer sphere; uniform density compressed with the shell volume.
  const double Ro3 = outer_radius * outer_radius * outer_radius;
  const Expr D = C(Ro3) - pow(s, 3);
  const VectorField vB = (s * s / D) * (C(Ro3) * pow(radius_sq(), -1.5) * position() - position());
  const PhaseState B{C(Ro3 - 1.0) / D, vB, C(1.0), C(0.0), C(0.0)};
  const PhaseState S{pow(s, -2), v, C(1.0), C(0.0), C(0.0)};
  std::array<PhaseMaterial, 3> mats{material(0, 0, 0), material(0, 0, 0), material(0, 0, 0)};
  return SystemState::make(mats, {A, B, S}, DomainConfig{SurfaceChart::sphere(s), outer_radius, 0});
}

SystemState barotropic_expansion(const BarotropicExpansion& p) {
  const Expr s = C(1.0) + T();
  const VectorField v = (C(1.0) / s) * position();
  PhaseState A{pow(s, -3), v, C(1.0), Expr(), C((3 * p.mu_A + 9 * p.lambda_A) / 2) * s * s + pow(s, -3)};
  PhaseState B{C(1.0), constant_vector(0, 0, 0), C(1.0), C(0.0), C(0.0)};
  PhaseState S{pow(s, -2), v, C(1.0), Expr(), C(2 * p.mu_S + 4 * p.lambda_S) * T() + pow(s, -2)};
  PhaseMaterial mA = material(p.mu_A, p.lambda_A, 1.0), mS = material(p.mu_S, p.lambda_S, 1.0);
  mA.eos = BarotropicLaw::parse("rho^2");
  mS.eos = BarotropicLaw::parse("rho^2");
  return SystemState::make({mA, material(0, 0, 1.0), mS}, {A, B, S},
                           DomainConfig{SurfaceChart::sphere(s), 4.0, 0});
}

SystemState ideal_expansion(const IdealExpansion& p) {
  const Expr R = C(1.0) + C(p.alpha) * T();
  const VectorField v = (C(p.alpha) / R) * position();
  const double gA = 3 * p.Rgas / p.cv, gS = 2 * p.Rgas / p.cv;
  const double KA = (3 * p.mu_A + 9 * p.lambda_A) / (p.rho_A0 * p.cv);
  const double KS = (2 * p.mu_S + 4 * p.lambda_S) / (p.rho_S0 * p.cv);
  PhaseState A{C(p.rho_A0) * pow(R, -3), v, C(p.C_A) * pow(R, -gA) + C(KA * p.alpha / (gA + 2)) * R * R, {}, {}};
  PhaseState B{C(1.0), constant_vector(0, 0, 0), C(1.0), {}, {}};
  PhaseState S{C(p.rho_S0) * pow(R, -2), v, C(p.C_S) * pow(R, -gS) + C(KS * p.alpha / (gS + 1)) * R, {}, {}};
  PhaseMaterial mA = material(p.mu_A, p.lambda_A, 1.0), mB = material(0.1, 0.1, 1.0),
                mS = material(p.mu_S, p.lambda_S, 1.0);
  for (PhaseMaterial* m : {&mA, &mB, &mS}) m->eos = IdealGas{p.cv, p.Rgas};
  return SystemState::make({mA, mB, mS}, {A, B, S}, DomainConfig{SurfaceChart::sphere(R), 3.0, 0});
}

SystemState young_laplace(double R, double pi_B, double pi_S, int r) {
  const VectorField zero = constant_vector(0, 0, 0);
  const PhaseState A{C(1.0), zero, C(1.0), C(pi_B - 2 * pi_S / R), C(1.0)};
  const PhaseState B{C(1.0), zero, C(1.0), C(pi_B), C(1.0)};
  const PhaseState S{C(1.0), zero, C(1.0), C(pi_S), C(1.0)};
  std::array<PhaseMaterial, 3> mats{material(0.3, 0.1, 1), material(0.2, 0.1, 1), material(0.1, 0.1, 1)};
  return SystemState::make(mats, {A, B, S}, DomainConfig{SurfaceChart::sphere(R), 3 * R, r});
}

Expr random_smooth(Rng& rng, double base, double amplitude, int modes) {
  Expr e = C(base);
  for (int k = 0; k < modes; ++k) {
    // Draws are sequenced explicitly so the stream does not depend on
    // operand evaluation order.
    double c[6];
    for (double& ci : c) ci = rng.uniform(-1, 1);
    const Expr arg = C(c[0]) * expr::x1() + C(c[1]) * expr::x2() + C(c[2]) * expr::x3() + C(c[3]) * T() +
                     C(3.14 * (c[4] + 1));
    e = e + C(amplitude * c[5]) * expr::sin(arg);
  }
  return e;
}

VectorField random_smooth_vector(Rng& rng, double amplitude, int modes) {
  return {random_smooth(rng, 0, amplitude, modes), random_smooth(rng, 0, amplitude, modes),
          random_smooth(rng, 0, amplitude, modes)};
}

SystemState random_lagrangian(Rng& rng, int r) {
  const double alpha = rng.uniform(0.1, 0.3), omega = rng.uniform(-1, 1), Ro = 3.0;
  const Expr t = T();
  const Expr R = C(1.0) + C(alpha) * t;
  const VectorField x = position();
  // Lagrangian coordinates: xi = Rot_z(-omega t) x.
  const Expr cw = expr::cos(C(omega) * t), sw = expr::sin(C(omega) * t);
  const VectorField xi{cw * x[0] + sw * x[1], C(0.0) - sw * x[0] + cw * x[1], x[2]};
  const VectorField swirl{C(-omega) * x[1], C(omega) * x[0], C(0.0)};
  const VectorField v_in = (C(alpha) / R) * x + swirl;

  auto profile = [&](const VectorField& y) {
    // Time-independent random function, positive.
    Expr f = C(2.0);
    for (int k = 0; k < 3; ++k) {
      double c[5];
      for (double& ci : c) ci = rng.uniform(-1, 1);
      const Expr arg = C(1.5 * c[0]) * y[0] + C(1.5 * c[1]) * y[1] + C(1.5 * c[2]) * y[2] + C(3.14 * (c[3] + 1));
      f = f + C(0.3 * c[4]) * expr::sin(arg);
    }
    return f;
  };
  const VectorField on_unit = (C(1.0) / R) * xi;
  PhaseState A;
  A.rho = profile(on_unit) * pow(R, -3);
  A.v = v_in;
  PhaseState S;
  S.rho = profile(on_unit) * pow(R, -2);
  S.v = v_in;

  // B: radial potential flow plus swirl; s = (Ro^3 - r^3)/(Ro^3 - R^3) is
  // conserved along paths, and so is the direction xi/r.
  const Expr r2 = radius_sq();
  const Expr D = C(Ro * Ro * Ro) - pow(R, 3);
  const Expr c = R * R * C(alpha) / D;
  const Expr s = (C(Ro * Ro * Ro) - pow(r2, 1.5)) / D;
  PhaseState B;
  B.v = c * (C(Ro * Ro * Ro) * pow(r2, -1.5) * x - x) + swirl;
  B.rho = profile((C(1.0) + C(0.5) * s) * ((C(1.0) / sqrt(r2)) * xi)) / D;

  for (PhaseState* ph : {&A, &B, &S}) {
    ph->theta = random_smooth(rng, 2.0, 0.3);
    ph->pi = random_smooth(rng, 1.0, 0.5);
    ph->e = random_smooth(rng, 1.0, 0.5);
  }
  std::array<PhaseMaterial, 3> mats;
  for (auto& m : mats) {
    m.mu = rng.uniform(0, 1);
    m.lambda = rng.uniform(0, 1);
    m.kappa = rng.uniform(0, 1);
  }
  return SystemState::make(mats, {A, B, S}, DomainConfig{SurfaceChart::sphere(R), Ro, r});
}

SystemState random_smooth_state(Rng& rng, const DomainConfig& domain) {
  std::array<PhaseState, 3> st;
  std::array<PhaseMaterial, 3> mats;
  for (int k = 0; k < 3; ++k) {
    st[k].rho = random_smooth(rng, 2.0, 0.3);
    st[k].v = random_smooth_vector(rng, 0.5);
    st[k].theta = random_smooth(rng, 2.0, 0.3);
    st[k].pi = random_smooth(rng, 1.0, 0.5);
    st[k].e = random_smooth(rng, 1.0, 0.5);
    mats[k].phase = static_cast<Phase>(k);
    mats[k].mu = rng.uniform(0.1, 1);
    mats[k].lambda = rng.uniform(0, 1);
    mats[k].kappa = rng.uniform(0.1, 1);
  }
  return SystemState::make(mats, st, domain);
}

PhaseState random_continuity_exact_bulk(Rng& rng) {
  const VectorField G = random_smooth_vector(rng, 0.3);
  const VectorField Apot = random_smooth_vector(rng, 0.5);
  PhaseState s;
  s.rho = C(3.0) + div(G);
  const VectorField cA{expr::derivative(Apot[2], Var::X2) - expr::derivative(Apot[1], Var::X3),
                       expr::derivative(Apot[0], Var::X3) - expr::derivative(Apot[2], Var::X1),
                       expr::derivative(Apot[1], Var::X1) - expr::derivative(Apot[0], Var::X2)};
  const VectorField J = cA - time_derivative(G);
  s.v = (C(1.0) / s.rho) * J;
  s.theta = random_smooth(rng, 2.0, 0.3);
  s.pi = random_smooth(rng, 1.0, 0.5);
  s.e = random_smooth(rng, 1.0, 0.5);
  return s;
}

}  // namespace bsflow::fixtures
