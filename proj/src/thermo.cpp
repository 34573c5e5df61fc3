#include "bsflow/thermo.hpp"

#include <cmath>
#include <cstdio>

#include "bsflow/verify_integral.hpp"

namespace bsflow {

using namespace calculus;
using namespace constitutive;

namespace {

enum Slot {
  kRho, kTheta, kPi, kE, kS, kH, kFH, kFG,
  kDe, kDs, kDvol, kDh, kDFH, kDFG, kDtheta, kDpi,
  kDiv, kED, kJump, kQGrad, kConsH, kConsS, kTD, kTrace,
  kCont, kEnergy, kSc, kSe,
  kSlots
};

Expr C(double c) { return Expr(c); }

std::vector<Expr> phase_program(const SystemState& sys, Phase p, const ThermoFields& f) {
  const PhaseMaterial& m = sys.material(p);
  const PhaseState& s = sys.state(p);
  const VectorField& n = sys.normal();
  const bool surf = is_surface(p);
  auto Dt = [&](const Expr& g) { return material_derivative(g, s.v); };
  auto flux_div = [&](const Expr& density, const VectorField& q) {
    const VectorField F = density * s.v - q;
    return surf ? normal_time_derivative(density, s.v, n) + surface_divergence(F, n)
                : time_derivative(density) + div(F);
  };

  const VectorField q = surf ? heat_flux_surface(m, s, n) : heat_flux(m, s);
  const TensorField D = surf ? strain_surface(s.v, n) : strain_bulk(s.v);
  const TensorField T = surf ? stress_surface(m, s, n) : stress(m, s);
  const VectorField gth = surf ? tangential_grad(s.theta, n) : grad(s.theta);

  std::vector<Expr> out(kSlots, C(0.0));
  out[kRho] = s.rho;
  out[kTheta] = s.theta;
  out[kPi] = s.pi;
  out[kE] = f.e;
  out[kS] = f.entropy;
  out[kH] = f.h;
  out[kFH] = f.helmholtz;
  out[kFG] = f.gibbs;
  out[kDe] = Dt(f.e);
  out[kDs] = Dt(f.entropy);
  out[kDvol] = Dt(C(1.0) / s.rho);
  out[kDh] = Dt(f.h);
  out[kDFH] = Dt(f.helmholtz);
  out[kDFG] = Dt(f.gibbs);
  out[kDtheta] = Dt(s.theta);
  out[kDpi] = Dt(s.pi);
  out[kDiv] = surf ? surface_divergence(s.v, n) : div(s.v);
  out[kED] = surf ? dissipation_density_surface(m, s, n) : dissipation_density(m, s);
  if (surf) {
    out[kJump] = dot(heat_flux(sys.material(Phase::B), sys.state(Phase::B)), n) -
                 dot(heat_flux(sys.material(Phase::A), sys.state(Phase::A)), n);
  }
  out[kQGrad] = dot(q, gth);
  out[kConsH] = flux_div(s.rho * f.h, q);
  out[kConsS] = flux_div(s.rho * f.entropy, (C(1.0) / s.theta) * q);
  out[kTD] = frobenius(T, D);
  out[kTrace] = surf ? frobenius(projection(n), D) : trace(D);
  const ResidualFields r = residual_fields(sys, p);
  out[kCont] = r.continuity;
  out[kEnergy] = r.energy;
  if (sys.sources) {
    const PhaseSources& src = (*sys.sources)[static_cast<int>(p)];
    out[kSc] = src.continuity;
    out[kSe] = src.energy;
  }
  return out;
}

double gibbs_of(const std::vector<double>& y) { return y[kDe] - y[kTheta] * y[kDs] + y[kPi] * y[kDvol]; }

double residual_of(Potential which, const std::vector<double>& y) {
  const double rho = y[kRho], th = y[kTheta], pi = y[kPi], sc = y[kSc], se = y[kSe];
  switch (which) {
    case Potential::Enthalpy:
      return y[kConsH] - y[kED] - y[kDpi] - y[kJump] - (se + y[kE] * sc);
    case Potential::Entropy:
      return y[kConsS] - y[kED] / th - y[kQGrad] / (th * th) - y[kJump] / th -
             ((se - pi * sc / rho) / th + y[kS] * sc);
    case Potential::Helmholtz:
      return rho * y[kDFH] + rho * y[kS] * y[kDtheta] + y[kDiv] * pi - pi * sc / rho;
    case Potential::Gibbs:
      return rho * y[kDFG] + rho * y[kS] * y[kDtheta] - y[kDpi];
  }
  return 0;
}

std::array<double, kMaterialIdentities> material_gaps(const std::vector<double>& y) {
  const double rho = y[kRho], th = y[kTheta], pi = y[kPi], s = y[kS], sc = y[kSc];
  std::array<double, kMaterialIdentities> g{};
  g[0] = rho * y[kDe] - (th * rho * y[kDs] - pi * rho * y[kDvol]);
  g[1] = rho * y[kDh] - (th * rho * y[kDs] + y[kDpi]);
  g[2] = rho * y[kDFH] - (-s * rho * y[kDtheta] - pi * rho * y[kDvol]);
  g[3] = rho * y[kDFG] - (-s * rho * y[kDtheta] + y[kDpi]);
  g[4] = y[kTD] - (y[kED] - y[kDiv] * pi);
  g[5] = rho * y[kDFH] + rho * s * y[kDtheta] - y[kTD] + y[kED] - pi * sc / rho;
  g[6] = y[kTrace] - y[kDiv];
  g[7] = rho * y[kDvol] - y[kDiv] + sc / rho;
  for (double& v : g) v = std::abs(v);
  return g;
}

double production_of(const std::vector<double>& y) {
  const double th = y[kTheta];
  return y[kED] / th + y[kQGrad] / (th * th);
}

}  // namespace

const char* to_string(Potential p) {
  switch (p) {
    case Potential::Enthalpy: return "enthalpy";
    case Potential::Entropy: return "entropy";
    case Potential::Helmholtz: return "helmholtz";
    case Potential::Gibbs: return "gibbs";
  }
  return "?";
}

const char* to_string(MaterialIdentity m) {
  switch (m) {
    case MaterialIdentity::Energy: return "material_e";
    case MaterialIdentity::Enthalpy: return "material_h";
    case MaterialIdentity::Helmholtz: return "material_FH";
    case MaterialIdentity::Gibbs: return "material_FG";
    case MaterialIdentity::StressPower: return "stress_power";
    case MaterialIdentity::HelmholtzDissipation: return "helmholtz_dissipation";
    case MaterialIdentity::Trace: return "trace";
    case MaterialIdentity::SpecificVolume: return "specific_volume";
  }
  return "?";
}

ThermoFields thermo_fields(const PhaseMaterial& m, const PhaseState& s, const std::optional<Expr>& entropy) {
  ThermoFields f;
  f.e = s.e;
  f.h = s.e + s.pi / s.rho;
  if (entropy) {
    f.entropy = *entropy;
  } else if (const auto* g = std::get_if<IdealGas>(&m.eos)) {
    f.entropy = C(g->cv) * expr::log(s.theta) - C(g->R) * expr::log(s.rho);
  } else {
    throw ThermoError(std::string("phase ") + to_string(m.phase) + ": entropy must be supplied for this EOS");
  }
  f.helmholtz = f.e - s.theta * f.entropy;
  f.gibbs = f.h - s.theta * f.entropy;
  return f;
}

ThermoModel::ThermoModel(const SystemState& sys, const std::array<std::optional<Expr>, 3>& entropy) : sys_(sys) {
  for (int k = 0; k < 3; ++k) {
    const Phase p = static_cast<Phase>(k);
    fields_[k] = thermo_fields(sys.material(p), sys.state(p), entropy[k]);
    const std::vector<Expr> roots = phase_program(sys_, p, fields_[k]);
    programs_[k] = expr::Program(std::span<const Expr>(roots));
  }
}

std::vector<double> ThermoModel::values(Phase p, const Point& x) const {
  require_in_region(sys_, p, x);
  std::vector<double> y(kSlots), scratch;
  programs_[static_cast<int>(p)].evaluate(x, y, scratch);
  if (!(y[kRho] > 0) || !(y[kTheta] > 0)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "phase %s: rho = %.6g, theta = %.6g at (%.6g, %.6g, %.6g, t=%.6g); both must be positive",
                  to_string(p), y[kRho], y[kTheta], x[0], x[1], x[2], x[3]);
    throw ThermoError(buf);
  }
  return y;
}

double ThermoModel::gibbs_residual(Phase p, const Point& x) const { return gibbs_of(values(p, x)); }

double ThermoModel::identity_gap(Phase p, const Point& x) const { return std::abs(gibbs_residual(p, x)); }

double ThermoModel::continuity_residual(Phase p, const Point& x) const { return values(p, x)[kCont]; }

double ThermoModel::energy_residual(Phase p, const Point& x) const { return values(p, x)[kEnergy]; }

double ThermoModel::potential_residual(Potential which, Phase p, const Point& x, const ThermoOptions& opt) const {
  const std::vector<double> y = values(p, x);
  if (opt.check_preconditions) {
    std::string failed;
    auto check = [&](const char* name, double v) {
      if (std::abs(v) <= opt.tol) return;
      char buf[96];
      std::snprintf(buf, sizeof buf, "%s%s = %.3g", failed.empty() ? "" : "; ", name, v);
      failed += buf;
    };
    check("continuity residual", y[kCont]);
    check("energy residual", y[kEnergy]);
    check("gibbs relation gap", gibbs_of(y));
    if (!failed.empty()) {
      throw PreconditionError(std::string(to_string(which)) + " equation, phase " + to_string(p) + ": " + failed);
    }
  }
  return residual_of(which, y);
}

double ThermoModel::potential_gap(Potential which, Phase p, const Point& x, const ThermoOptions& opt) const {
  return std::abs(potential_residual(which, p, x, opt));
}

double ThermoModel::entropy_production(Phase p, const Point& x) const {
  return production_of(values(p, x));
}

std::array<double, kMaterialIdentities> ThermoModel::material_identities(Phase p, const Point& x) const {
  return material_gaps(values(p, x));
}


std::array<double, 3> ThermoModel::construction_gaps(Phase p, const Point& x) const {
  const std::vector<double> y = values(p, x);
  return {std::abs(y[kH] - y[kE] - y[kPi] / y[kRho]), std::abs(y[kFH] - y[kE] + y[kTheta] * y[kS]),
          std::abs(y[kFG] - y[kH] + y[kTheta] * y[kS])};
}

std::vector<ThermoRecord> thermo_report(const ThermoModel& model, const QuadratureRule& q, double t, double tol) {
  const SystemState& sys = model.system();
  std::vector<ThermoRecord> out;
  for (Phase p : {Phase::A, Phase::B, Phase::S}) {
    struct Node {
      double u, v;
      Point x;
    };
    std::vector<Node> nodes;
    if (is_surface(p)) {
      for (const auto& nd : surface_nodes(sys.domain.surface, q, t)) nodes.push_back({nd.u, nd.v, nd.p()});
    } else {
      for (const auto& nd : volume_nodes(sys.domain, p == Phase::A ? Region::A : Region::B, q, t))
        nodes.push_back({nd.u, nd.v, nd.p()});
    }
    std::vector<std::string> names = {"construct_h", "construct_FH", "construct_FG", "gibbs_relation",
                                      "continuity", "energy"};
    for (Potential w : {Potential::Enthalpy, Potential::Entropy, Potential::Helmholtz, Potential::Gibbs})
      names.push_back(std::string(to_string(w)) + "_equation");
    for (int k = 0; k < kMaterialIdentities; ++k) names.push_back(to_string(static_cast<MaterialIdentity>(k)));
    names.push_back("entropy_production");

    std::vector<ThermoRecord> rec(names.size());
    for (std::size_t k = 0; k < names.size(); ++k) rec[k] = {names[k], p, 0, 0, t, 0.0, false};
    for (const Node& nd : nodes) {
      const std::vector<double> y = model.values(p, nd.x);
      std::vector<double> g = {std::abs(y[kH] - y[kE] - y[kPi] / y[kRho]),
                               std::abs(y[kFH] - y[kE] + y[kTheta] * y[kS]),
                               std::abs(y[kFG] - y[kH] + y[kTheta] * y[kS]),
                               std::abs(gibbs_of(y)),
                               std::abs(y[kCont]),
                               std::abs(y[kEnergy])};
      for (Potential w : {Potential::Enthalpy, Potential::Entropy, Potential::Helmholtz, Potential::Gibbs})
        g.push_back(std::abs(residual_of(w, y)));
      const auto m = material_gaps(y);
      g.insert(g.end(), m.begin(), m.end());
      g.push_back(std::max(0.0, -production_of(y)));
      for (std::size_t k = 0; k < g.size(); ++k) {
        if (!(g[k] <= rec[k].gap)) {
          rec[k].gap = g[k];
          rec[k].node_u = nd.u;
          rec[k].node_v = nd.v;
        }
      }
    }
    for (auto& r : rec) r.pass = r.gap <= tol;
    out.insert(out.end(), rec.begin(), rec.end());
  }
  return out;
}

void write_thermo_csv(std::ostream& os, const std::vector<ThermoRecord>& records) {
  os << "identity,phase,node_u,node_v,t,gap,pass\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%.17g,%.17g,%s\n", r.identity.c_str(), to_string(r.phase),
                  r.node_u, r.node_v, r.t, r.gap, r.pass ? "true" : "false");
    os << buf;
  }
}

}  // namespace bsflow
