#include "bsflow/verify_integral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

#include "bsflow/calculus.hpp"

namespace bsflow {

using namespace calculus;
using namespace constitutive;

const char* to_string(Moving m) {
  switch (m) {
    case Moving::A: return "A";
    case Moving::B: return "B";
    case Moving::Gamma: return "Gamma";
  }
  return "?";
}

const char* to_string(IbpKind k) {
  switch (k) {
    case IbpKind::BulkA: return "bulkA";
    case IbpKind::BulkB: return "bulkB";
    case IbpKind::Surface: return "surface";
  }
  return "?";
}

const char* to_string(Law l) {
  switch (l) {
    case Law::Mass: return "mass";
    case Law::Energy: return "energy";
    case Law::Kinetic: return "kinetic";
    case Law::Momentum: return "momentum";
  }
  return "?";
}

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

/// Integrates a fixed list of expressions over one kind of node set with a
/// program compiled once.
class NodeIntegrator {
 public:
  enum class Set { A, B, Gamma, Outer };
  NodeIntegrator(Set set, std::vector<Expr> integrands) : set_(set), n_(integrands.size()) {
    if (n_) prog_ = expr::Program(std::span<const Expr>(integrands));
  }

  std::vector<double> operator()(const DomainConfig& d, const QuadratureRule& q, double t) const {
    std::vector<double> r(n_, 0.0);
    if (!n_) return r;
    switch (set_) {
      case Set::A: return run(volume_nodes(d, Region::A, q, t));
      case Set::B: return run(volume_nodes(d, Region::B, q, t));
      case Set::Gamma: return run(surface_nodes(d.surface, q, t));
      case Set::Outer: return run(outer_nodes(d, q, t));
    }
    return r;
  }

 private:
  template <class Node>
  std::vector<double> run(const std::vector<Node>& nodes) const {
    std::vector<CompensatedSum> acc(n_);
    std::vector<double> out(n_), scratch;
    for (const Node& nd : nodes) {
      prog_.evaluate(nd.p(), out, scratch);
      for (std::size_t k = 0; k < n_; ++k) {
        if (!std::isfinite(out[k])) throw_nonfinite(out[k], nd.x, nd.t);
        acc[k].add(nd.w * out[k]);
      }
    }
    std::vector<double> r(n_);
    for (std::size_t k = 0; k < n_; ++k) r[k] = acc[k].value();
    return r;
  }

  Set set_;
  std::size_t n_;
  expr::Program prog_;
};

NodeIntegrator::Set set_of(Moving m) {
  switch (m) {
    case Moving::A: return NodeIntegrator::Set::A;
    case Moving::B: return NodeIntegrator::Set::B;
    case Moving::Gamma: return NodeIntegrator::Set::Gamma;
  }
  return NodeIntegrator::Set::A;
}

NodeIntegrator::Set set_of(Phase p) {
  switch (p) {
    case Phase::A: return NodeIntegrator::Set::A;
    case Phase::B: return NodeIntegrator::Set::B;
    case Phase::S: return NodeIntegrator::Set::Gamma;
  }
  return NodeIntegrator::Set::A;
}

/// max |V_Gamma - v.n| over surface nodes.
double surface_motion_mismatch(const SurfaceChart& chart, const VectorField& v, const QuadratureRule& q, double t) {
  Batch b;
  const auto iv = b.add(v);
  b.compile();
  std::vector<double> out, scratch;
  double worst = 0;
  for (const SurfaceNode& nd : surface_nodes(chart, q, t)) {
    b.evaluate(nd.p(), out, scratch);
    const double V = chart.normal_speed(nd.u, nd.v, t);
    worst = std::max(worst, std::abs(V - Batch::vec(out, iv).dot(nd.n)));
  }
  return worst;
}

/// max |v . nu| on the lateral wall u = cap of the cap region, nu the wall
/// normal, sampled along the part of each coordinate line that lies in the
/// region.
double cone_crossing(const DomainConfig& d, Moving region, const VectorField& v, const QuadratureRule& q, double t) {
  Batch b;
  const auto iv = b.add(v);
  b.compile();
  std::vector<double> out, scratch;
  const int nv = 2 * q.N;
  std::vector<double> ss{1.0};
  if (region != Moving::Gamma) ss = gauss_legendre(q.N, 0.0, 1.0).x;
  const Region reg = region == Moving::B ? Region::B : Region::A;
  double worst = 0;
  for (int k = 0; k < nv; ++k) {
    const double az = 2 * std::numbers::pi * k / nv;
    for (double s : ss) {
      const VolumeFrame f = volume_frame(d, reg, s, q.cap, az, t);
      const Eigen::Vector3d nu = f.xs.cross(f.xv).normalized();
      b.evaluate(point(f.x, t), out, scratch);
      worst = std::max(worst, std::abs(Batch::vec(out, iv).dot(nu)));
    }
  }
  return worst;
}

}  // namespace

double region_integral(const DomainConfig& d, Moving region, const Expr& f, const QuadratureRule& q, double t) {
  return region_integrals(d, region, std::span<const Expr>(&f, 1), q, t)[0];
}

std::vector<double> region_integrals(const DomainConfig& d, Moving region, std::span<const Expr> f,
                                     const QuadratureRule& q, double t) {
  return NodeIntegrator(set_of(region), std::vector<Expr>(f.begin(), f.end()))(d, q, t);
}

TransportResult transport_check(const DomainConfig& d, Moving region, const Expr& f, const VectorField& v,
                                const QuadratureRule& q, double t, double h, double motion_tol) {
  TransportResult res;
  res.motion_mismatch = surface_motion_mismatch(d.surface, v, q, t);
  if (region == Moving::B) {
    Batch b;
    const auto iv = b.add(v);
    b.compile();
    std::vector<double> out, scratch;
    for (const SurfaceNode& nd : outer_nodes(d, q, t)) {
      b.evaluate(nd.p(), out, scratch);
      res.motion_mismatch = std::max(res.motion_mismatch, std::abs(Batch::vec(out, iv).dot(nd.n)));
    }
  }
  if (res.motion_mismatch > motion_tol)
    throw PreconditionError("chart motion inconsistent with v.n on " + std::string(to_string(region)) +
                            ": max normal-speed mismatch " + fmt(res.motion_mismatch));
  if (q.cap < std::numbers::pi) {
    const double cross = cone_crossing(d, region, v, q, t);
    if (cross > motion_tol)
      throw PreconditionError("velocity crosses the cone boundary of the cap: max |v.nu| " + fmt(cross));
  }

  const NodeIntegrator value(set_of(region), {f});
  res.lhs = central_difference([&](double s) { return value(d, q, s)[0]; }, t, h);

  Expr rate;
  if (region == Moving::Gamma) {
    rate = material_derivative(f, v) + f * surface_divergence(v, d.surface.normal_field());
  } else {
    rate = material_derivative(f, v) + f * div(v);
  }
  res.rhs = NodeIntegrator(set_of(region), {rate})(d, q, t)[0];
  res.gap = std::abs(res.lhs - res.rhs);
  return res;
}

IbpResult ibp_check(const DomainConfig& d, IbpKind kind, const Expr& f, const Expr& g, int j,
                    const QuadratureRule& q, double t) {
  if (j < 1 || j > 3) throw std::invalid_argument("ibp_check: j must be 1, 2 or 3");
  const int c = j - 1;
  const Var xj = static_cast<Var>(c);
  const Expr fg = f * g;

  // Integral of f g n_j over a surface node set; each side is accumulated
  // separately.
  auto flux = [&](const std::vector<SurfaceNode>& nodes) {
    const expr::Program prog{fg};
    std::vector<double> out(1), scratch;
    return integrate(nodes, [&](const SurfaceNode& nd) {
      prog.evaluate(nd.p(), out, scratch);
      return out[0] * nd.n[c];
    });
  };

  IbpResult r;
  switch (kind) {
    case IbpKind::BulkA:
    case IbpKind::BulkB: {
      const Region reg = kind == IbpKind::BulkA ? Region::A : Region::B;
      const auto nodes = volume_nodes(d, reg, q, t);
      const Expr l = expr::derivative(f, xj) * g;
      const Expr m = f * expr::derivative(g, xj);
      r.lhs = integrate_many(nodes, std::span<const Expr>(&l, 1))[0];
      const double vol = integrate_many(nodes, std::span<const Expr>(&m, 1))[0];
      const double gamma = flux(surface_nodes(d.surface, q, t));
      if (kind == IbpKind::BulkA) {
        r.rhs = -vol + gamma;
      } else {
        r.rhs = -vol + flux(outer_nodes(d, q, t)) - gamma;
      }
      break;
    }
    case IbpKind::Surface: {
      const VectorField& n = d.surface.normal_field();
      const auto nodes = surface_nodes(d.surface, q, t);
      const Expr l = tangential_grad(f, n)[c] * g;
      const Expr m = f * tangential_grad(g, n)[c];
      const Expr H = -surface_divergence(n, n);
      const Expr hfg = H * fg * n[c];
      r.lhs = integrate_many(nodes, std::span<const Expr>(&l, 1))[0];
      r.rhs = -integrate_many(nodes, std::span<const Expr>(&m, 1))[0] -
              integrate_many(nodes, std::span<const Expr>(&hfg, 1))[0];
      break;
    }
  }
  r.gap = std::abs(r.lhs - r.rhs);
  return r;
}

const std::vector<IbpCase>& ibp_corpus() {
  static const std::vector<IbpCase> corpus{
      {"1", "1", 1},
      {"x1", "1", 1},
      {"x1*x2", "x3", 3},
      {"x1^2", "x2 + 1", 1},
      {"x3^3", "x1*x3", 3},
      {"x1*x2*x3", "x2", 2},
      {"x2^4", "1 + x1", 2},
      {"x1^2*x2^2", "x3^2", 1},
      {"sin(x1)", "cos(x2)", 1},
      {"exp(0.3*x3)", "x1^2", 3},
      {"cos(x1 + x2)", "sin(x3)", 2},
      {"sin(2*x2)*x3", "exp(x1/4)", 3},
  };
  return corpus;
}

// ---------------------------------------------------------------------------
// First law

std::vector<FirstLawResult> first_law_check(const SystemState& sys, FirstLawForm form, const QuadratureRule& q,
                                            double t, double h, double continuity_tol,
                                            const std::vector<Phase>& phases) {
  const VectorField& n = sys.normal();
  std::vector<FirstLawResult> results;
  for (Phase ph : phases) {
    const PhaseMaterial& m = sys.material(ph);
    const PhaseState& s = sys.state(ph);
    const bool surf = is_surface(ph);

    const ResidualFields rf = residual_fields(sys, ph);
    {
      const expr::Program prog{rf.continuity};
      std::vector<double> out(1), scratch;
      double worst = 0;
      auto scan = [&](const auto& nodes) {
        for (const auto& nd : nodes) {
          prog.evaluate(nd.p(), out, scratch);
          worst = std::max(worst, std::abs(out[0]));
        }
      };
      if (surf) {
        scan(surface_nodes(sys.domain.surface, q, t));
      } else {
        scan(volume_nodes(sys.domain, ph == Phase::A ? Region::A : Region::B, q, t));
      }
      if (!(worst <= continuity_tol))
        throw PreconditionError(std::string("continuity residual of phase ") + to_string(ph) + " is " +
                                fmt(worst) + ", above " + fmt(continuity_tol));
    }

    Expr heat, dv, eD;
    if (surf) {
      heat = surface_divergence(heat_flux_surface(m, s, n), n) +
             dot(heat_flux(sys.material(Phase::B), sys.state(Phase::B)), n) -
             dot(heat_flux(sys.material(Phase::A), sys.state(Phase::A)), n);
      dv = surface_divergence(s.v, n);
      eD = dissipation_density_surface(m, s, n);
    } else {
      heat = div(heat_flux(m, s));
      dv = div(s.v);
      eD = dissipation_density(m, s);
    }
    const Expr Qt = heat + eD;

    Expr density, rate;
    Expr source_rate(0.0);
    if (form == FirstLawForm::Internal) {
      density = s.rho * s.e;
      rate = Qt - dv * s.pi;
      if (sys.sources) {
        const PhaseSources& src = (*sys.sources)[static_cast<int>(ph)];
        source_rate = src.energy + s.e * src.continuity;
      }
    } else {
      const auto* law = std::get_if<BarotropicLaw>(&m.eos);
      if (!law)
        throw PreconditionError(std::string("barotropic form needs a barotropic law for phase ") + to_string(ph));
      density = s.rho * s.e - barotropic_potential(*law, s.rho);
      rate = Qt;
      if (sys.sources) {
        const PhaseSources& src = (*sys.sources)[static_cast<int>(ph)];
        const Expr dp = expr::substitute(expr::derivative(law->p, Var::X1), {{Var::X1, s.rho}});
        source_rate = src.energy + (s.e - dp) * src.continuity;
      }
    }

    const NodeIntegrator value(set_of(ph), {density});
    FirstLawResult r{ph};
    r.lhs = central_difference([&](double s_) { return value(sys.domain, q, s_)[0]; }, t, h);
    r.rhs = NodeIntegrator(set_of(ph), {rate + source_rate})(sys.domain, q, t)[0];
    r.gap = std::abs(r.lhs - r.rhs);
    results.push_back(r);
  }
  return results;
}

// ---------------------------------------------------------------------------
// Conservation audits

namespace {

constexpr int kPhases = 3;
constexpr Phase kAll[kPhases] = {Phase::A, Phase::B, Phase::S};

struct LawTerms {
  int dim = 1;
  std::array<std::vector<Expr>, kPhases> density;  // dim entries
  std::array<std::vector<Expr>, kPhases> rate;     // dim entries: sources [+ work - dissipation]
  std::vector<Expr> outer;                         // dim entries
  // Kinetic law only: dissipation and pressure work per phase.
  std::array<std::vector<Expr>, kPhases> dissipation, work;
};

LawTerms law_terms(const SystemState& sys, Law law) {
  const VectorField& n = sys.normal();
  const VectorField x = position();
  const VectorField nO = Expr(1.0 / sys.domain.outer_radius) * x;
  LawTerms L;
  L.dim = law == Law::Momentum ? 3 : 1;
  for (int k = 0; k < kPhases; ++k) {
    const Phase ph = kAll[k];
    const PhaseState& s = sys.state(ph);
    const PhaseMaterial& m = sys.material(ph);
    const bool surf = is_surface(ph);
    const PhaseSources* src = sys.sources ? &(*sys.sources)[k] : nullptr;
    switch (law) {
      case Law::Mass:
        L.density[k] = {s.rho};
        L.rate[k] = {src ? src->continuity : Expr(0.0)};
        break;
      case Law::Energy:
        L.density[k] = {total_energy_density(s)};
        L.rate[k] = {src ? dot(s.v, src->momentum) + src->energy +
                               (Expr(0.5) * dot(s.v, s.v) + s.e) * src->continuity
                         : Expr(0.0)};
        break;
      case Law::Kinetic:
        L.density[k] = {kinetic_density(s)};
        L.rate[k] = {src ? dot(s.v, src->momentum) + Expr(0.5) * dot(s.v, s.v) * src->continuity : Expr(0.0)};
        L.dissipation[k] = {surf ? dissipation_density_surface(m, s, n) : dissipation_density(m, s)};
        L.work[k] = {s.pi * (surf ? surface_divergence(s.v, n) : div(s.v))};
        break;
      case Law::Momentum:
        L.density[k] = {s.rho * s.v[0], s.rho * s.v[1], s.rho * s.v[2]};
        if (src) {
          L.rate[k] = {src->momentum[0] + s.v[0] * src->continuity, src->momentum[1] + s.v[1] * src->continuity,
                       src->momentum[2] + s.v[2] * src->continuity};
        } else {
          L.rate[k] = {Expr(0.0), Expr(0.0), Expr(0.0)};
        }
        break;
    }
  }

  const PhaseState& B = sys.state(Phase::B);
  const PhaseMaterial& mB = sys.material(Phase::B);
  const Expr vn = dot(B.v, nO);
  switch (law) {
    case Law::Mass: L.outer = {-(B.rho * vn)}; break;
    case Law::Energy:
      L.outer = {dot(heat_flux(mB, B) + matvec(stress(mB, B), B.v), nO) - total_energy_density(B) * vn};
      break;
    case Law::Kinetic: L.outer = {dot(matvec(stress(mB, B), B.v), nO) - kinetic_density(B) * vn}; break;
    case Law::Momentum: {
      const VectorField Tn = matvec(stress(mB, B), nO);
      L.outer = {Tn[0] - B.rho * B.v[0] * vn, Tn[1] - B.rho * B.v[1] * vn, Tn[2] - B.rho * B.v[2] * vn};
      break;
    }
  }
  return L;
}

struct Summed {
  std::vector<NodeIntegrator> parts;
  std::vector<double> operator()(const DomainConfig& d, const QuadratureRule& q, double t, int dim) const {
    std::vector<double> s(dim, 0.0);
    for (const NodeIntegrator& p : parts) {
      const auto v = p(d, q, t);
      for (int i = 0; i < dim && i < static_cast<int>(v.size()); ++i) s[i] += v[i];
    }
    return s;
  }
};

Summed phases(const std::array<std::vector<Expr>, kPhases>& e) {
  Summed s;
  for (int k = 0; k < kPhases; ++k)
    if (!e[k].empty()) s.parts.emplace_back(set_of(kAll[k]), e[k]);
  return s;
}

/// Itemized precondition failures at time t.
void check_preconditions(const SystemState& sys, Law law, const AuditOptions& opt, double t,
                         const std::array<ResidualEvaluator*, kPhases>& ev, std::vector<std::string>& fails,
                         double& worst_residual) {
  const double tol = opt.precondition_tol;
  const QuadratureRule& q = opt.q;
  auto fail = [&](const std::string& what, double value) {
    fails.push_back(what + " = " + fmt(value) + " at t = " + fmt(t));
  };

  const double motion = surface_motion_mismatch(sys.domain.surface, sys.state(Phase::S).v, q, t);
  if (motion > tol) fail("surface motion vs v_S.n", motion);

  std::vector<std::string> needed{"normal_AS", "normal_BS"};
  if (law != Law::Mass) {
    needed.insert(needed.end(), {"tangential_AS", "tangential_BS"});
    if (sys.r() == 1) needed.push_back("tangential_AB");
  }
  if (!sys.sources) {
    if (law != Law::Mass) needed.push_back("vB_outer");
    if (law == Law::Energy) needed.push_back("neumann_thetaB");
  }
  for (const BoundaryCondition& bc : boundary_residual(sys, q, t)) {
    if (std::find(needed.begin(), needed.end(), bc.name) != needed.end() && bc.max_abs > tol)
      fail(bc.name, bc.max_abs);
  }

  if (!sys.sources) {
    for (int k = 0; k < kPhases; ++k) {
      const Phase ph = kAll[k];
      double c = 0, e = 0, mo = 0;
      auto scan = [&](const auto& nodes) {
        for (const auto& nd : nodes) {
          const ResidualEvaluator::Values v = (*ev[k])(nd.p());
          c = std::max(c, std::abs(v.continuity));
          e = std::max(e, std::abs(v.energy));
          mo = std::max(mo, v.momentum.lpNorm<Eigen::Infinity>());
        }
      };
      if (is_surface(ph)) {
        scan(surface_nodes(sys.domain.surface, q, t));
      } else {
        scan(volume_nodes(sys.domain, ph == Phase::A ? Region::A : Region::B, q, t));
      }
      const std::string tag = std::string(" residual of phase ") + to_string(ph);
      worst_residual = std::max(worst_residual, c);
      if (c > tol) fail("continuity" + tag, c);
      if (law == Law::Energy) {
        worst_residual = std::max(worst_residual, e);
        if (e > tol) fail("energy" + tag, e);
      }
      if (law != Law::Mass) {
        worst_residual = std::max(worst_residual, mo);
        if (mo > tol) fail("momentum" + tag, mo);
      }
    }
  }

  if (law == Law::Momentum && !sys.sources) {
    const VectorField Tn = matvec(stress(sys.material(Phase::B), sys.state(Phase::B)),
                                  Expr(1.0 / sys.domain.outer_radius) * position());
    const NodeIntegrator traction(NodeIntegrator::Set::Outer, {Tn[0], Tn[1], Tn[2]});
    const auto f = traction(sys.domain, q, t);
    const double norm = std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]);
    if (norm > tol) fail("outer traction balance", norm);
  }
}

}  // namespace

AuditResult conservation_audit(const SystemState& sys, Law law, double t1, double t2, const AuditOptions& opt) {
  if (!(t2 > t1)) throw std::invalid_argument("conservation_audit: need t2 > t1");
  if (opt.time_nodes < 3) throw std::invalid_argument("conservation_audit: need at least 3 time nodes");

  AuditResult res{law, t1, t2};
  const GaussRule gl = gauss_legendre(opt.time_nodes, t1, t2);

  // Preconditions.
  std::vector<std::string> fails;
  if (law == Law::Momentum && sys.r() != 1) fails.push_back("momentum conservation needs r = 1, got r = " +
                                                            std::to_string(sys.r()));
  double worst_residual = 0;
  {
    std::vector<std::unique_ptr<ResidualEvaluator>> owned;
    std::array<ResidualEvaluator*, kPhases> ev{};
    if (!sys.sources) {
      for (int k = 0; k < kPhases; ++k) {
        owned.push_back(std::make_unique<ResidualEvaluator>(sys, kAll[k]));
        ev[k] = owned.back().get();
      }
    }
    std::vector<double> times{t1, t2};
    times.insert(times.end(), gl.x.begin(), gl.x.end());
    for (double t : times) check_preconditions(sys, law, opt, t, ev, fails, worst_residual);
  }
  if (!fails.empty()) {
    std::ostringstream os;
    os << to_string(law) << " audit preconditions failed:";
    for (const std::string& f : fails) os << "\n  " << f;
    throw PreconditionError(os.str());
  }

  const LawTerms L = law_terms(sys, law);
  const int dim = L.dim;
  const Summed value = phases(L.density);
  const Summed rate = phases(L.rate);
  const NodeIntegrator outer(NodeIntegrator::Set::Outer, L.outer);
  const Summed dissipation = phases(L.dissipation);
  const Summed work = phases(L.work);

  const auto v1 = value(sys.domain, opt.q, t1, dim);
  const auto v2 = value(sys.domain, opt.q, t2, dim);
  std::vector<double> src(dim, 0.0), flux(dim, 0.0), dis(dim, 0.0), wrk(dim, 0.0);
  for (std::size_t i = 0; i < gl.x.size(); ++i) {
    const double t = gl.x[i], w = gl.w[i];
    const auto s = rate(sys.domain, opt.q, t, dim);
    const auto f = outer(sys.domain, opt.q, t);
    for (int c = 0; c < dim; ++c) {
      src[c] += w * s[c];
      flux[c] += w * f[c];
    }
    if (law == Law::Kinetic) {
      dis[0] += w * dissipation(sys.domain, opt.q, t, 1)[0];
      wrk[0] += w * work(sys.domain, opt.q, t, 1)[0];
    }
  }

  int worst = 0;
  double worst_gap = -1;
  std::vector<double> lhs(dim), rhs(dim);
  for (int c = 0; c < dim; ++c) {
    lhs[c] = v2[c] + dis[c];
    rhs[c] = v1[c] + wrk[c] + flux[c] + src[c];
    const double g = std::abs(lhs[c] - rhs[c]);
    if (g > worst_gap) {
      worst_gap = g;
      worst = c;
    }
  }
  res.lhs = lhs[worst];
  res.rhs = rhs[worst];
  res.gap = worst_gap;
  res.tol = opt.relative ? opt.tol * std::max({1.0, std::abs(res.lhs), std::abs(res.rhs)}) : opt.tol;
  res.pass = res.gap <= res.tol;

  for (int c = 0; c < dim; ++c) {
    const std::string tag = dim > 1 ? "[" + std::to_string(c + 1) + "]" : "";
    res.notes.push_back("value(t1)" + tag + " = " + fmt(v1[c]));
    res.notes.push_back("value(t2)" + tag + " = " + fmt(v2[c]));
    res.notes.push_back("outer flux" + tag + " = " + fmt(flux[c]));
    if (sys.sources) res.notes.push_back("sources" + tag + " = " + fmt(src[c]));
  }
  if (law == Law::Kinetic) {
    res.notes.push_back("dissipation = " + fmt(dis[0]));
    res.notes.push_back("pressure work = " + fmt(wrk[0]));
  }
  if (!sys.sources) {
    res.notes.push_back("max governing residual = " + fmt(worst_residual));
    if (worst_residual > 0)
      res.notes.push_back("gap / (residual * window) = " + fmt(res.gap / (worst_residual * (t2 - t1))));
  }
  return res;
}

void write_audit_csv(std::ostream& os, const std::vector<AuditResult>& audits) {
  os << "law,t1,t2,lhs,rhs,gap,tol,pass\n";
  char buf[256];
  for (const AuditResult& a : audits) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", to_string(a.law), a.t1, a.t2,
                  a.lhs, a.rhs, a.gap, a.tol, a.pass ? "true" : "false");
    os << buf;
  }
}

}  // namespace bsflow
