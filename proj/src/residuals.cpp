#include "bsflow/residuals.hpp"

#include <cmath>
#include <cstdio>

namespace bsflow {

using namespace calculus;
using namespace constitutive;

const char* to_string(Equation e) {
  switch (e) {
    case Equation::Continuity: return "continuity";
    case Equation::Energy: return "energy";
    case Equation::Momentum: return "momentum";
    case Equation::ConservativeMass: return "conservative_mass";
    case Equation::ConservativeEnergy: return "conservative_energy";
    case Equation::ConservativeMomentum: return "conservative_momentum";
  }
  return "?";
}

SystemState SystemState::make(const std::array<PhaseMaterial, 3>& materials, const std::array<PhaseState, 3>& raw,
                              const DomainConfig& domain) {
  SystemState s;
  s.materials = materials;
  s.domain = domain;
  for (int k = 0; k < 3; ++k) {
    s.materials[k].phase = static_cast<Phase>(k);
    s.materials[k].validate();
    s.states[k] = resolve(s.materials[k], raw[k]);
  }
  return s;
}

namespace {

ResidualFields bulk_fields(const SystemState& sys, Phase ph) {
  const PhaseMaterial& m = sys.material(ph);
  const PhaseState& s = sys.state(ph);
  const Expr dv = div(s.v);
  const TensorField T = stress(m, s);
  const VectorField q = heat_flux(m, s);
  ResidualFields f;
  f.continuity = material_derivative(s.rho, s.v) + s.rho * dv;
  f.energy = s.rho * material_derivative(s.e, s.v) + dv * s.pi - div(q) - dissipation_density(m, s);
  f.momentum = s.rho * material_derivative(s.v, s.v) - div_tensor(T);

  const Expr E = total_energy_density(s);
  f.cons_mass = time_derivative(s.rho) + div(s.rho * s.v);
  f.cons_energy = time_derivative(E) + div(E * s.v - q - matvec(T, s.v));
  f.cons_momentum = time_derivative(s.rho * s.v) + div_tensor(s.rho * outer(s.v, s.v) - T);
  return f;
}

ResidualFields surface_fields(const SystemState& sys) {
  const VectorField& n = sys.normal();
  const PhaseMaterial& m = sys.material(Phase::S);
  const PhaseState& s = sys.state(Phase::S);
  const PhaseMaterial& mA = sys.material(Phase::A);
  const PhaseMaterial& mB = sys.material(Phase::B);
  const PhaseState& A = sys.state(Phase::A);
  const PhaseState& B = sys.state(Phase::B);
  const int r = sys.r();

  const Expr dv = surface_divergence(s.v, n);
  const TensorField T = stress_surface(m, s, n);
  const VectorField q = heat_flux_surface(m, s, n);
  const Expr heat_jump = dot(heat_flux(mB, B), n) - dot(heat_flux(mA, A), n);
  const VectorField traction_jump = jump_traction(mB, B, n, r) - jump_traction(mA, A, n, r);

  ResidualFields f;
  f.continuity = material_derivative(s.rho, s.v) + s.rho * dv;
  f.energy = s.rho * material_derivative(s.e, s.v) + dv * s.pi - surface_divergence(q, n) -
             dissipation_density_surface(m, s, n) - heat_jump;
  f.momentum = s.rho * material_derivative(s.v, s.v) - surface_div_tensor(T, n) - traction_jump;

  const Expr E = total_energy_density(s);
  f.cons_mass = normal_time_derivative(s.rho, s.v, n) + surface_divergence(s.rho * s.v, n);
  f.cons_energy = normal_time_derivative(E, s.v, n) + surface_divergence(E * s.v - q - matvec(T, s.v), n) -
                  energy_jump(mA, A, mB, B, s, n, r);
  f.cons_momentum = normal_time_derivative(s.rho * s.v, s.v, n) +
                    surface_div_tensor(s.rho * outer(s.v, s.v) - T, n) - traction_jump;
  return f;
}

void fill_expected(ResidualFields& f, const PhaseState& s) {
  const Expr spec = Expr(0.5) * dot(s.v, s.v) + s.e;
  f.cons_energy_expected = dot(s.v, f.momentum) + f.energy + spec * f.continuity;
  f.cons_momentum_expected = f.momentum + f.continuity * s.v;
}

}  // namespace

ResidualFields raw_residual_fields(const SystemState& sys, Phase phase) {
  ResidualFields f = is_surface(phase) ? surface_fields(sys) : bulk_fields(sys, phase);
  fill_expected(f, sys.state(phase));
  return f;
}

ResidualFields residual_fields(const SystemState& sys, Phase phase) {
  ResidualFields f = is_surface(phase) ? surface_fields(sys) : bulk_fields(sys, phase);
  const PhaseState& s = sys.state(phase);
  if (sys.sources) {
    const PhaseSources& src = (*sys.sources)[static_cast<int>(phase)];
    const Expr spec = Expr(0.5) * dot(s.v, s.v) + s.e;
    f.continuity = f.continuity - src.continuity;
    f.energy = f.energy - src.energy;
    f.momentum = f.momentum - src.momentum;
    f.cons_mass = f.cons_mass - src.continuity;
    f.cons_energy = f.cons_energy - (dot(s.v, src.momentum) + src.energy + spec * src.continuity);
    f.cons_momentum = f.cons_momentum - (src.momentum + src.continuity * s.v);
  }
  fill_expected(f, s);
  return f;
}

SystemState with_manufactured_sources(SystemState sys) {
  sys.sources.reset();
  std::array<PhaseSources, 3> src;
  for (int k = 0; k < 3; ++k) {
    const ResidualFields f = raw_residual_fields(sys, static_cast<Phase>(k));
    src[k] = {f.continuity, f.energy, f.momentum};
  }
  sys.sources = src;
  return sys;
}

void require_in_region(const SystemState& sys, Phase phase, const Point& p, double tol) {
  const double phi = expr::eval(sys.domain.surface.level_set(), p);
  const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  bool ok = true;
  switch (phase) {
    case Phase::A: ok = phi <= tol; break;
    case Phase::B: ok = phi >= -tol && r <= sys.domain.outer_radius + tol; break;
    case Phase::S: ok = std::abs(phi) <= tol; break;
  }
  if (!ok) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "point (%.6g, %.6g, %.6g) at t=%.6g is outside the region of phase %s", p[0],
                  p[1], p[2], p[3], to_string(phase));
    throw RegionError(buf);
  }
}

double continuity_residual(const SystemState& sys, Phase phase, const Point& p) {
  require_in_region(sys, phase, p);
  return expr::eval(residual_fields(sys, phase).continuity, p);
}

double energy_residual(const SystemState& sys, Phase phase, const Point& p) {
  require_in_region(sys, phase, p);
  return expr::eval(residual_fields(sys, phase).energy, p);
}

Eigen::Vector3d momentum_residual(const SystemState& sys, Phase phase, const Point& p) {
  require_in_region(sys, phase, p);
  return eval(residual_fields(sys, phase).momentum, p);
}

ConservativeResidual conservative_residual(const SystemState& sys, Phase phase, const Point& p) {
  require_in_region(sys, phase, p);
  const ResidualFields f = residual_fields(sys, phase);
  return {expr::eval(f.cons_mass, p), expr::eval(f.cons_energy, p), eval(f.cons_momentum, p)};
}

ResidualEvaluator::ResidualEvaluator(const SystemState& sys, Phase phase) : sys_(sys), phase_(phase) {
  const ResidualFields f = residual_fields(sys, phase);
  batch_.add(f.continuity);
  batch_.add(f.energy);
  batch_.add(f.momentum);
  batch_.add(f.cons_mass);
  batch_.add(f.cons_energy);
  batch_.add(f.cons_momentum);
  batch_.add(f.cons_energy - f.cons_energy_expected);
  batch_.add(f.cons_momentum - f.cons_momentum_expected);
  batch_.compile();
}

ResidualEvaluator::Values ResidualEvaluator::operator()(const Point& p) const {
  require_in_region(sys_, phase_, p);
  std::vector<double> out, scratch;
  batch_.evaluate(p, out, scratch);
  return {out[0], out[1], Batch::vec(out, 2), out[5], out[6], Batch::vec(out, 7), out[10], Batch::vec(out, 11)};
}

namespace {

std::vector<Expr> components(const ResidualFields& f, Equation eq) {
  switch (eq) {
    case Equation::Continuity: return {f.continuity};
    case Equation::Energy: return {f.energy};
    case Equation::Momentum: return {f.momentum.begin(), f.momentum.end()};
    case Equation::ConservativeMass: return {f.cons_mass};
    case Equation::ConservativeEnergy: return {f.cons_energy};
    case Equation::ConservativeMomentum: return {f.cons_momentum.begin(), f.cons_momentum.end()};
  }
  return {};
}

template <class Node>
void accumulate(const std::vector<Node>& nodes, const expr::Program& prog, ResidualReport& rep) {
  std::vector<double> out(prog.num_outputs()), scratch;
  CompensatedSum l2;
  for (const Node& nd : nodes) {
    prog.evaluate(nd.p(), out, scratch);
    double sq = 0;
    for (double y : out) sq += y * y;
    if (!std::isfinite(sq)) throw_nonfinite(sq, nd.x, nd.t);
    const double mag = std::sqrt(sq);
    if (mag > rep.norm_inf) {
      rep.norm_inf = mag;
      rep.node_u = nd.u;
      rep.node_v = nd.v;
    }
    l2.add(nd.w * sq);
  }
  rep.norm_l2 = std::sqrt(std::max(0.0, l2.value()));
}

}  // namespace

ResidualReport residual_report(const SystemState& sys, Equation eq, Phase phase, const QuadratureRule& q,
                               double t) {
  const ResidualFields f = residual_fields(sys, phase);
  const expr::Program prog(components(f, eq));
  ResidualReport rep{eq, phase};
  rep.t = t;
  if (is_surface(phase)) {
    accumulate(surface_nodes(sys.domain.surface, q, t), prog, rep);
  } else {
    accumulate(volume_nodes(sys.domain, phase == Phase::A ? Region::A : Region::B, q, t), prog, rep);
  }
  return rep;
}

std::vector<ResidualReport> residual_reports(const SystemState& sys, const QuadratureRule& q, double t) {
  std::vector<ResidualReport> out;
  for (Phase ph : {Phase::A, Phase::B, Phase::S})
    for (Equation eq : {Equation::Continuity, Equation::Energy, Equation::Momentum, Equation::ConservativeMass,
                        Equation::ConservativeEnergy, Equation::ConservativeMomentum})
      out.push_back(residual_report(sys, eq, ph, q, t));
  return out;
}

void write_residual_csv(std::ostream& os, const std::vector<ResidualReport>& reports) {
  os << "equation,phase,norm_inf,norm_l2,node_u,node_v,t\n";
  char buf[256];
  for (const ResidualReport& r : reports) {
    std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%.17g,%.17g,%.17g\n", to_string(r.equation),
                  to_string(r.phase), r.norm_inf, r.norm_l2, r.node_u, r.node_v, r.t);
    os << buf;
  }
}

std::vector<BoundaryCondition> boundary_residual(const SystemState& sys, const QuadratureRule& q, double t) {
  const PhaseState& A = sys.state(Phase::A);
  const PhaseState& B = sys.state(Phase::B);
  const PhaseState& S = sys.state(Phase::S);
  const double r = sys.r();

  Batch gamma;
  const auto ivA = gamma.add(A.v), ivB = gamma.add(B.v), ivS = gamma.add(S.v);
  const auto itA = gamma.add(A.theta), itB = gamma.add(B.theta), itS = gamma.add(S.theta);
  gamma.compile();
  double nA = 0, nB = 0, tA = 0, tB = 0, tAB = 0, thA = 0, thB = 0;
  std::vector<double> out, scratch;
  for (const SurfaceNode& nd : surface_nodes(sys.domain.surface, q, t)) {
    gamma.evaluate(nd.p(), out, scratch);
    const Eigen::Matrix3d P = Eigen::Matrix3d::Identity() - nd.n * nd.n.transpose();
    const Eigen::Vector3d vA = Batch::vec(out, ivA), vB = Batch::vec(out, ivB), vS = Batch::vec(out, ivS);
    nA = std::max(nA, std::abs((vA - vS).dot(nd.n)));
    nB = std::max(nB, std::abs((vB - vS).dot(nd.n)));
    tA = std::max(tA, (P * (vA - r * vS)).norm());
    tB = std::max(tB, (P * (vB - r * vS)).norm());
    tAB = std::max(tAB, (P * (vA - vB)).norm());
    thA = std::max(thA, std::abs(out[itA] - out[itS]));
    thB = std::max(thB, std::abs(out[itB] - out[itS]));
  }

  Batch outer_b;
  const auto ov = outer_b.add(B.v);
  const auto og = outer_b.add(grad(B.theta));
  outer_b.compile();
  double vOut = 0, neumann = 0;
  for (const SurfaceNode& nd : outer_nodes(sys.domain, q, t)) {
    outer_b.evaluate(nd.p(), out, scratch);
    vOut = std::max(vOut, Batch::vec(out, ov).norm());
    neumann = std::max(neumann, std::abs(Batch::vec(out, og).dot(nd.n)));
  }
  return {{"vB_outer", vOut},       {"normal_AS", nA},       {"normal_BS", nB},
          {"tangential_AS", tA},    {"tangential_BS", tB},   {"tangential_AB", tAB},
          {"neumann_thetaB", neumann}, {"theta_AS", thA},    {"theta_BS", thB}};
}

}  // namespace bsflow
