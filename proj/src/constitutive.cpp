#include "bsflow/constitutive.hpp"

#include <cstdio>
#include <stdexcept>

namespace bsflow {

using namespace calculus;

const char* to_string(Phase p) {
  switch (p) {
    case Phase::A: return "A";
    case Phase::B: return "B";
    case Phase::S: return "S";
  }
  return "?";
}

BarotropicLaw BarotropicLaw::parse(std::string_view src) {
  return {expr::parse(src, {{"rho", Var::X1}})};
}

void PhaseMaterial::validate() const {
  const char* ph = to_string(phase);
  if (!(mu >= 0)) throw std::invalid_argument(std::string("material.") + ph + ".mu must be nonnegative");
  if (!(lambda >= 0))
    throw std::invalid_argument(std::string("material.") + ph + ".lambda must be nonnegative");
  if (!(kappa >= 0)) throw std::invalid_argument(std::string("material.") + ph + ".kappa must be nonnegative");
  if (const auto* g = std::get_if<IdealGas>(&eos)) {
    if (!(g->cv > 0 && g->R > 0))
      throw std::invalid_argument(std::string("material.") + ph + ": ideal gas needs cv > 0 and R > 0");
  }
}

PhaseState resolve(const PhaseMaterial& m, PhaseState s) {
  if (const auto* g = std::get_if<IdealGas>(&m.eos)) {
    s.e = Expr(g->cv) * s.theta;
    s.pi = Expr(g->R) * s.rho * s.theta;
  } else if (const auto* law = std::get_if<BarotropicLaw>(&m.eos)) {
    s.pi = constitutive::barotropic_pressure(*law, s.rho);
  }
  return s;
}

namespace constitutive {

VectorField heat_flux(const PhaseMaterial& m, const PhaseState& s) { return Expr(m.kappa) * grad(s.theta); }

VectorField heat_flux_surface(const PhaseMaterial& m, const PhaseState& s, const VectorField& n) {
  return Expr(m.kappa) * tangential_grad(s.theta, n);
}

Expr dissipation_density(const PhaseMaterial& m, const PhaseState& s) {
  const TensorField D = strain_bulk(s.v);
  const Expr dv = div(s.v);
  return Expr(m.mu) * frobenius(D, D) + Expr(m.lambda) * dv * dv;
}

Expr dissipation_density_surface(const PhaseMaterial& m, const PhaseState& s, const VectorField& n) {
  const TensorField D = strain_surface(s.v, n);
  const Expr dv = surface_divergence(s.v, n);
  return Expr(m.mu) * frobenius(D, D) + Expr(m.lambda) * dv * dv;
}

Expr kinetic_density(const PhaseState& s) { return Expr(0.5) * s.rho * dot(s.v, s.v); }

Expr work_density(const PhaseState& s) { return div(s.v) * s.pi; }

Expr work_density_surface(const PhaseState& s, const VectorField& n) {
  return surface_divergence(s.v, n) * s.pi;
}

Expr thermal_density(const PhaseMaterial& m, const PhaseState& s) {
  const VectorField g = grad(s.theta);
  return Expr(m.kappa) * dot(g, g);
}

Expr thermal_density_surface(const PhaseMaterial& m, const PhaseState& s, const VectorField& n) {
  const VectorField g = tangential_grad(s.theta, n);
  return Expr(m.kappa) * dot(g, g);
}

TensorField stress(const PhaseMaterial& m, const PhaseState& s) {
  return Expr(m.mu) * strain_bulk(s.v) + (Expr(m.lambda) * div(s.v) - s.pi) * identity_tensor();
}

TensorField stress_surface(const PhaseMaterial& m, const PhaseState& s, const VectorField& n) {
  return Expr(m.mu) * strain_surface(s.v, n) +
         (Expr(m.lambda) * surface_divergence(s.v, n) - s.pi) * projection(n);
}

Expr jump_traction_scalar(const PhaseMaterial& m, const PhaseState& s, const VectorField& n) {
  return Expr(m.mu) * dot(n, directional(n, s.v)) + Expr(m.lambda) * div(s.v) - s.pi;
}

VectorField jump_traction(const PhaseMaterial& m, const PhaseState& s, const VectorField& n, int r) {
  if (r == 0) return jump_traction_scalar(m, s, n) * n;
  if (r == 1) return matvec(stress(m, s), n);
  throw std::invalid_argument("slip flag r must be 0 or 1, got " + std::to_string(r));
}

double barotropic_pressure(const BarotropicLaw& law, double rho) {
  if (!(rho > 0)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", rho);
    throw std::domain_error(std::string("barotropic pressure needs a positive density, got ") + buf);
  }
  const expr::Point p{rho, 0, 0, 0};
  return rho * expr::eval(expr::derivative(law.p, Var::X1), p) - expr::eval(law.p, p);
}

double barotropic_pressure(const PhaseMaterial& m, double rho) {
  const auto* law = std::get_if<BarotropicLaw>(&m.eos);
  if (!law) throw std::invalid_argument(std::string("material ") + to_string(m.phase) + " is not barotropic");
  return barotropic_pressure(*law, rho);
}

Expr barotropic_potential(const BarotropicLaw& law, const Expr& rho) {
  return expr::substitute(law.p, {{Var::X1, rho}});
}

Expr barotropic_pressure(const BarotropicLaw& law, const Expr& rho) {
  const Expr dp = expr::substitute(expr::derivative(law.p, Var::X1), {{Var::X1, rho}});
  return rho * dp - barotropic_potential(law, rho);
}

Expr total_energy_density(const PhaseState& s) { return kinetic_density(s) + s.rho * s.e; }

Expr energy_jump(const PhaseMaterial& mA, const PhaseState& A, const PhaseMaterial& mB, const PhaseState& B,
                 const PhaseState& S, const VectorField& n, int r) {
  const VectorField tB = jump_traction(mB, B, n, r);
  const VectorField tA = jump_traction(mA, A, n, r);
  return dot(tB, S.v) - dot(tA, S.v) + dot(heat_flux(mB, B), n) - dot(heat_flux(mA, A), n);
}

EnergyJumpAtNode energy_jump(const PhaseMaterial& mA, const PhaseState& A, const PhaseMaterial& mB,
                             const PhaseState& B, const PhaseState& S, const SurfaceChart& chart, double u,
                             double v, double t, int r, double tol) {
  const ChartFrame fr = chart.frame(u, v, t);
  const VectorField n = constant_vector(fr.n[0], fr.n[1], fr.n[2]);
  Batch b;
  const auto iJ = b.add(energy_jump(mA, A, mB, B, S, n, r));
  const auto ivA = b.add(A.v);
  const auto ivB = b.add(B.v);
  const auto ivS = b.add(S.v);
  const auto itA = b.add(A.theta);
  const auto itB = b.add(B.theta);
  const auto itS = b.add(S.theta);
  b.compile();
  std::vector<double> out, scratch;
  b.evaluate(point(fr.x, t), out, scratch);
  const Eigen::Matrix3d P = Eigen::Matrix3d::Identity() - fr.n * fr.n.transpose();
  const Eigen::Vector3d vA = Batch::vec(out, ivA), vB = Batch::vec(out, ivB), vS = Batch::vec(out, ivS);
  double res = 0;
  res = std::max(res, std::abs((vA - vS).dot(fr.n)));
  res = std::max(res, std::abs((vB - vS).dot(fr.n)));
  res = std::max(res, (P * (vA - r * vS)).norm());
  res = std::max(res, (P * (vB - r * vS)).norm());
  res = std::max(res, std::abs(out[itA] - out[itS]));
  res = std::max(res, std::abs(out[itB] - out[itS]));
  if (res > tol) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "interface coupling violated at u=%.6g v=%.6g t=%.6g (residual %.3e)", u, v, t,
                  res);
    throw std::runtime_error(buf);
  }
  return {out[iJ], res};
}

}  // namespace constitutive
}  // namespace bsflow
