#include "bsflow/variation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "bsflow/fixtures.hpp"
#include "bsflow/verify_integral.hpp"

namespace bsflow {

using calculus::surface_div_tensor;
using calculus::surface_divergence;
using calculus::tangential_grad;
using constitutive::dissipation_density;
using constitutive::dissipation_density_surface;
using constitutive::jump_traction;
using constitutive::stress;
using constitutive::stress_surface;
using constitutive::thermal_density;
using constitutive::thermal_density_surface;
using constitutive::work_density;
using constitutive::work_density_surface;

namespace {

Expr C(double c) { return Expr(c); }

Expr freeze(const Expr& e, double t) { return expr::substitute(e, {{Var::T, Expr(t)}}); }

VectorField freeze(const VectorField& v, double t) { return {freeze(v[0], t), freeze(v[1], t), freeze(v[2], t)}; }

struct Regions {
  std::vector<VolumeNode> A, B;
  std::vector<SurfaceNode> S;
  Regions(const DomainConfig& d, const QuadratureRule& q, double t)
      : A(volume_nodes(d, Region::A, q, t)), B(volume_nodes(d, Region::B, q, t)), S(surface_nodes(d.surface, q, t)) {}
};

// Integrand lists per region; returns the sum over regions for each slot.
std::vector<double> integrate_regions(const Regions& g, const std::vector<Expr>& fa, const std::vector<Expr>& fb,
                                      const std::vector<Expr>& fs) {
  const auto a = integrate_many(g.A, std::span<const Expr>(fa));
  const auto b = integrate_many(g.B, std::span<const Expr>(fb));
  const auto s = integrate_many(g.S, std::span<const Expr>(fs));
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    CompensatedSum c;
    c.add(a[k]);
    c.add(b[k]);
    c.add(s[k]);
    out[k] = c.value();
  }
  return out;
}

Expr bulk_integrand(Functional f, const PhaseMaterial& m, const PhaseState& s) {
  switch (f) {
    case Functional::D:
      return C(-0.5) * dissipation_density(m, s);
    case Functional::W:
      return work_density(s);
    case Functional::TD:
      return C(-0.5) * thermal_density(m, s);
    case Functional::DW:
      return C(-0.5) * dissipation_density(m, s) + work_density(s);
  }
  throw std::logic_error("functional");
}

Expr surface_integrand(Functional f, const PhaseMaterial& m, const PhaseState& s, const VectorField& n) {
  switch (f) {
    case Functional::D:
      return C(-0.5) * dissipation_density_surface(m, s, n);
    case Functional::W:
      return work_density_surface(s, n);
    case Functional::TD:
      return C(-0.5) * thermal_density_surface(m, s, n);
    case Functional::DW:
      return C(-0.5) * dissipation_density_surface(m, s, n) + work_density_surface(s, n);
  }
  throw std::logic_error("functional");
}

void require_admissible(const SystemState& sys, const AdmissibleVariation& var, const GateauxOptions& opt,
                        bool velocity) {
  if (var.r != sys.r()) throw AdmissibilityError("variation slip flag differs from the state's");
  std::string failed;
  for (const auto& c : admissibility_residual(var, sys.domain, opt.q)) {
    const bool mine = velocity == (c.name.rfind("phi", 0) == 0);
    if (mine && !(c.max_abs <= opt.admissibility_tol)) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%s%s = %.3g", failed.empty() ? "" : "; ", c.name.c_str(), c.max_abs);
      failed += buf;
    }
  }
  if (!failed.empty()) throw AdmissibilityError("variation not admissible: " + failed);
}

// Evaluates the functional at eps = +-h, +-2h, +-4h and returns the fourth
// order difference quotients at steps h and 2h.
template <class Perturb>
std::pair<double, double> eps_derivative(const SystemState& sys, Functional f, const Regions& g, double h,
                                         Perturb&& perturb) {
  const double steps[] = {-4 * h, -2 * h, -h, h, 2 * h, 4 * h};
  const VectorField& n = sys.normal();
  std::vector<Expr> fa, fb, fs;
  for (double e : steps) {
    fa.push_back(bulk_integrand(f, sys.material(Phase::A), perturb(Phase::A, e)));
    fb.push_back(bulk_integrand(f, sys.material(Phase::B), perturb(Phase::B, e)));
    fs.push_back(surface_integrand(f, sys.material(Phase::S), perturb(Phase::S, e), n));
  }
  const auto vals = integrate_regions(g, fa, fb, fs);
  std::map<double, double> E;
  for (std::size_t k = 0; k < vals.size(); ++k) E[steps[k]] = vals[k];
  auto at = [&](double e) { return E.at(e); };
  return {central_difference(at, 0.0, h), central_difference(at, 0.0, 2 * h)};
}

}  // namespace

const char* to_string(Functional f) {
  switch (f) {
    case Functional::D:
      return "E_D";
    case Functional::W:
      return "E_W";
    case Functional::TD:
      return "E_TD";
    case Functional::DW:
      return "E_D+W";
  }
  return "?";
}

AdmissibleVariation AdmissibleVariation::scaled(double s) const {
  AdmissibleVariation out = *this;
  const Expr k(s);
  out.phi_A = k * phi_A;
  out.phi_B = k * phi_B;
  out.phi_S = k * phi_S;
  out.psi_A = k * psi_A;
  out.psi_B = k * psi_B;
  out.psi_S = k * psi_S;
  return out;
}

VariationSeeds random_seeds(Rng& rng, double amplitude) {
  VariationSeeds s;
  s.phi_S = fixtures::random_smooth_vector(rng, amplitude);
  s.phi_A_free = fixtures::random_smooth_vector(rng, amplitude);
  s.phi_B_free = fixtures::random_smooth_vector(rng, amplitude);
  s.psi_S = fixtures::random_smooth(rng, 0.0, amplitude);
  s.psi_A_free = fixtures::random_smooth(rng, 0.0, amplitude);
  s.psi_B_free = fixtures::random_smooth(rng, 0.0, amplitude);
  return s;
}

AdmissibleVariation make_admissible(const VariationSeeds& seeds, int r, const DomainConfig& d, double t,
                                    double width) {
  if (r != 0 && r != 1) throw std::invalid_argument("slip flag must be 0 or 1");
  double inner = INFINITY, shell = INFINITY;
  for (const auto& nd : surface_nodes(d.surface, QuadratureRule{24}, t)) {
    inner = std::min(inner, nd.x.norm());
    shell = std::min(shell, d.outer_radius - nd.x.norm());
  }
  if (!(shell > 0)) throw std::invalid_argument("surface is not inside the outer sphere");
  if (width <= 0) width = 0.3 * std::min(shell, inner);
  if (width > shell) throw std::invalid_argument("blending width exceeds shell thickness");
  if (width > inner) throw std::invalid_argument("blending width exceeds inner radius");

  const Expr l = freeze(d.surface.level_set(), t);
  const VectorField n = freeze(d.surface.normal_field(), t);
  const VectorField phiS = freeze(seeds.phi_S, t);
  const Expr psiS = freeze(seeds.psi_S, t);

  // Value transmitted to the bulk at Gamma.
  const VectorField m = r == 1 ? phiS : dot(phiS, n) * n;
  const Expr chi = expr::exp(C(-1.0 / (width * width)) * l * l);
  const Expr ro2 = C(d.outer_radius * d.outer_radius) - dot(position(), position());
  const Expr om = ro2 / (ro2 + l);

  AdmissibleVariation var;
  var.r = r;
  var.t = t;
  var.phi_S = phiS;
  var.phi_A = chi * m + l * freeze(seeds.phi_A_free, t);
  var.phi_B = om * (m + l * freeze(seeds.phi_B_free, t));
  var.psi_S = psiS;
  var.psi_A = psiS + l * freeze(seeds.psi_A_free, t);
  var.psi_B = om * om * (psiS + l * freeze(seeds.psi_B_free, t));
  return var;
}

std::vector<BoundaryCondition> admissibility_residual(const AdmissibleVariation& var, const DomainConfig& d,
                                                      const QuadratureRule& q) {
  const double r = var.r;
  double nAS = 0, nBS = 0, tAS = 0, tBS = 0, pAS = 0, pBS = 0;
  {
    expr::Program prog{var.phi_A[0], var.phi_A[1], var.phi_A[2], var.phi_B[0], var.phi_B[1], var.phi_B[2],
                       var.phi_S[0], var.phi_S[1], var.phi_S[2], var.psi_A,    var.psi_B,    var.psi_S};
    std::vector<double> out(12), scratch;
    for (const auto& nd : surface_nodes(d.surface, q, var.t)) {
      prog.evaluate(nd.p(), out, scratch);
      const Eigen::Vector3d a(out[0], out[1], out[2]), b(out[3], out[4], out[5]), s(out[6], out[7], out[8]);
      const Eigen::Matrix3d P = Eigen::Matrix3d::Identity() - nd.n * nd.n.transpose();
      nAS = std::max(nAS, std::abs((a - s).dot(nd.n)));
      nBS = std::max(nBS, std::abs((b - s).dot(nd.n)));
      tAS = std::max(tAS, (P * (a - r * s)).norm());
      tBS = std::max(tBS, (P * (b - r * s)).norm());
      pAS = std::max(pAS, std::abs(out[9] - out[11]));
      pBS = std::max(pBS, std::abs(out[10] - out[11]));
    }
  }
  double phiB = 0, dpsiB = 0;
  {
    const VectorField gpsi = grad(var.psi_B);
    expr::Program prog{var.phi_B[0], var.phi_B[1], var.phi_B[2], gpsi[0], gpsi[1], gpsi[2]};
    std::vector<double> out(6), scratch;
    for (const auto& nd : outer_nodes(d, q, var.t)) {
      prog.evaluate(nd.p(), out, scratch);
      phiB = std::max(phiB, Eigen::Vector3d(out[0], out[1], out[2]).norm());
      dpsiB = std::max(dpsiB, std::abs(Eigen::Vector3d(out[3], out[4], out[5]).dot(nd.n)));
    }
  }
  return {{"phiB_outer", phiB},  {"phi_normal_AS", nAS}, {"phi_normal_BS", nBS},
          {"phi_tangential_AS", tAS}, {"phi_tangential_BS", tBS}, {"psiB_outer_dn", dpsiB},
          {"psi_AS", pAS},       {"psi_BS", pBS}};
}

double functional(const SystemState& sys, Functional f, const QuadratureRule& q, double t) {
  const Regions g(sys.domain, q, t);
  const auto v = integrate_regions(g, {bulk_integrand(f, sys.material(Phase::A), sys.state(Phase::A))},
                                   {bulk_integrand(f, sys.material(Phase::B), sys.state(Phase::B))},
                                   {surface_integrand(f, sys.material(Phase::S), sys.state(Phase::S), sys.normal())});
  return v[0];
}

GateauxResult gateaux_gap_velocity(const SystemState& sys, const AdmissibleVariation& var,
                                   const GateauxOptions& opt) {
  require_admissible(sys, var, opt, true);
  const Regions g(sys.domain, opt.q, var.t);
  const VectorField* phi[3] = {&var.phi_A, &var.phi_B, &var.phi_S};
  auto perturb = [&](Phase p, double e) {
    PhaseState s = sys.state(p);
    s.v = s.v + Expr(e) * *phi[static_cast<int>(p)];
    return s;
  };
  GateauxResult res;
  std::tie(res.side_a, res.side_a_coarse) = eps_derivative(sys, Functional::DW, g, opt.eps_step, perturb);

  const VectorField& n = sys.normal();
  const auto& mA = sys.material(Phase::A);
  const auto& mB = sys.material(Phase::B);
  const auto& mS = sys.material(Phase::S);
  const auto& A = sys.state(Phase::A);
  const auto& B = sys.state(Phase::B);
  const auto& S = sys.state(Phase::S);
  const VectorField FA = div_tensor(stress(mA, A));
  const VectorField FB = div_tensor(stress(mB, B));
  const VectorField FS = surface_div_tensor(stress_surface(mS, S, n), n) + jump_traction(mB, B, n, sys.r()) -
                         jump_traction(mA, A, n, sys.r());
  res.side_b = integrate_regions(g, {dot(FA, var.phi_A)}, {dot(FB, var.phi_B)}, {dot(FS, var.phi_S)})[0];
  res.gap = std::abs(res.side_a - res.side_b);
  return res;
}

GateauxResult gateaux_gap_temperature(const SystemState& sys, const AdmissibleVariation& var,
                                      const GateauxOptions& opt) {
  require_admissible(sys, var, opt, false);
  const Regions g(sys.domain, opt.q, var.t);
  const Expr* psi[3] = {&var.psi_A, &var.psi_B, &var.psi_S};
  auto perturb = [&](Phase p, double e) {
    PhaseState s = sys.state(p);
    s.theta = s.theta + Expr(e) * *psi[static_cast<int>(p)];
    return s;
  };
  GateauxResult res;
  std::tie(res.side_a, res.side_a_coarse) = eps_derivative(sys, Functional::TD, g, opt.eps_step, perturb);

  const VectorField& n = sys.normal();
  const double kA = sys.material(Phase::A).kappa, kB = sys.material(Phase::B).kappa;
  const double kS = sys.material(Phase::S).kappa;
  const Expr& thA = sys.state(Phase::A).theta;
  const Expr& thB = sys.state(Phase::B).theta;
  const Expr& thS = sys.state(Phase::S).theta;
  const Expr QA = div(C(kA) * grad(thA));
  const Expr QB = div(C(kB) * grad(thB));
  const Expr QS = surface_divergence(C(kS) * tangential_grad(thS, n), n) + C(kB) * dot(n, grad(thB)) -
                  C(kA) * dot(n, grad(thA));
  res.side_b = integrate_regions(g, {QA * var.psi_A}, {QB * var.psi_B}, {QS * var.psi_S})[0];
  res.gap = std::abs(res.side_a - res.side_b);
  return res;
}

void write_gateaux_csv(std::ostream& os, const std::vector<GateauxRecord>& records) {
  os << "theorem,r,variation_id,side_a,side_b,gap,pass\n";
  char buf[256];
  for (const auto& rec : records) {
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%.17g,%.17g,%.17g,%s\n", rec.theorem.c_str(), rec.r,
                  rec.variation_id, rec.result.side_a, rec.result.side_b, rec.result.gap,
                  rec.pass ? "true" : "false");
    os << buf;
  }
}

}  // namespace bsflow
