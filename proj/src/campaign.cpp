#include "bsflow/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bsflow/bubble.hpp"
#include "bsflow/fixtures.hpp"
#include "bsflow/thermo.hpp"
#include "bsflow/variation.hpp"
#include "bsflow/verify_integral.hpp"

namespace bsflow {

namespace {

// ---------------------------------------------------------------------------
// Schema

enum class Type { Real, Pos, NonNeg, Int, Count, U64, Str, Expression, Law, Vector, Axes, Choice, Bool, Angle };

struct KeySpec {
  Type type;
  std::vector<std::string> choices{};
};

const std::vector<std::string> kKinds = {"verify-geometry",  "verify-ibp",       "verify-transport", "verify-residuals",
                                         "verify-variation", "verify-thermo",    "bubble"};
const std::vector<std::string> kFixtures = {"expanding_bubble", "young_laplace",     "barotropic_expansion",
                                            "ideal_expansion",  "continuity",        "random_lagrangian",
                                            "custom"};
const std::vector<std::string> kToleranceKeys = {
    "projection", "normal",   "curvature",    "hn_integral", "ibp",          "transport",
    "residual",   "boundary", "conservative", "audit",       "first_law",    "gateaux",
    "thermo",     "entropy_production",       "stationary",  "invariant",    "mass",
    "surface_momentum",       "energy_ledger", "rate"};

using SectionSchema = std::map<std::string, KeySpec>;

const std::map<std::string, SectionSchema>& schema() {
  static const std::map<std::string, SectionSchema> s = [] {
    std::map<std::string, SectionSchema> m;
    m["scenario"] = {
        {"kind", {Type::Choice, kKinds}},
        {"name", {Type::Str}},
        {"seed", {Type::U64}},
        {"fixture", {Type::Choice, kFixtures}},
        {"charts", {Type::Choice, {"configured", "standard"}}},
        {"checks", {Type::Str}},
        {"theorems", {Type::Choice, {"velocity", "temperature", "both"}}},
        {"manufactured", {Type::Bool}},
        {"start", {Type::Choice, {"given", "equilibrium"}}},
        {"t", {Type::Real}},
        {"t1", {Type::Real}},
        {"t2", {Type::Real}},
        {"h", {Type::Pos}},
        {"samples", {Type::Count}},
        {"r", {Type::Int}},
        {"t_end", {Type::Pos}},
        {"periods", {Type::Pos}},
        {"dt", {Type::Pos}},
        {"pi_inf", {Type::Real}},
        {"pi_b", {Type::Real}},
        {"pi_s", {Type::Real}},
        {"r0", {Type::Pos}},
        {"u0", {Type::Real}},
        {"rho_a0", {Type::Pos}},
        {"rho_s0", {Type::Pos}},
        {"stride", {Type::Count}},
        {"consistency_samples", {Type::Count}},
        {"eps_step", {Type::Pos}},
    };
    m["surface"] = {
        {"kind", {Type::Choice, {"sphere", "ellipsoid", "perturbed_sphere"}}},
        {"radius", {Type::Expression}},
        {"scale", {Type::Expression}},
        {"axes", {Type::Axes}},
        {"eps", {Type::Real}},
        {"outer_radius", {Type::Pos}},
    };
    for (const char* ph : {"material.a", "material.b", "material.s"})
      m[ph] = {
          {"mu", {Type::NonNeg}},     {"lambda", {Type::NonNeg}}, {"kappa", {Type::NonNeg}},
          {"eos", {Type::Choice, {"none", "ideal", "barotropic"}}},
          {"cv", {Type::Pos}},        {"rgas", {Type::Pos}},      {"p", {Type::Law}},
      };
    SectionSchema fields{{"f", {Type::Expression}}};
    for (const char* ph : {"a", "b", "s"}) {
      for (const char* k : {"rho", "theta", "pi", "e"}) fields[std::string(k) + "_" + ph] = {Type::Expression};
      fields[std::string("v_") + ph] = {Type::Vector};
    }
    m["fields"] = fields;
    m["quadrature"] = {{"n", {Type::Count}}, {"time_nodes", {Type::Count}}, {"cap", {Type::Angle}}};
    SectionSchema tol;
    for (const std::string& k : kToleranceKeys) tol[k] = {Type::Pos};
    m["tolerances"] = tol;
    return m;
  }();
  return s;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size() && std::isfinite(out);
  } catch (...) {
    return false;
  }
}

std::string fmt(double v, const char* f = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const expr::Aliases& rho_alias() {
  static const expr::Aliases a{{"rho", Var::X1}};
  return a;
}

// Line of each (section, key) in the text, for messages.
std::map<std::pair<std::string, std::string>, int> key_lines(const std::string& text) {
  std::map<std::pair<std::string, std::string>, int> out;
  std::istringstream is(text);
  std::string line, section;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    const std::string l = trim(line);
    if (l.empty() || l[0] == ';' || l[0] == '#') continue;
    if (l[0] == '[') {
      section = lower(trim(l.substr(1, l.find(']') - 1)));
      continue;
    }
    const auto eq = l.find('=');
    if (eq != std::string::npos) out.emplace(std::make_pair(section, lower(trim(l.substr(0, eq)))), n);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Building blocks from a scenario

SurfaceChart chart_of(const Scenario& s) {
  const std::string kind = s.get("surface", "kind", std::string("sphere"));
  if (kind == "ellipsoid") {
    const auto ax = split(s.get("surface", "axes", std::string("1,1,1")), ',');
    return SurfaceChart::ellipsoid(std::stod(ax[0]), std::stod(ax[1]), std::stod(ax[2]),
                                   expr::parse(s.get("surface", "scale", std::string("1"))));
  }
  const Expr R = expr::parse(s.get("surface", "radius", std::string("1")));
  if (kind == "perturbed_sphere") return SurfaceChart::perturbed_sphere(R, s.get("surface", "eps", 0.1));
  return SurfaceChart::sphere(R);
}

DomainConfig domain_of(const Scenario& s, int r) {
  return DomainConfig{chart_of(s), s.get("surface", "outer_radius", 3.0), r};
}

PhaseMaterial material_of(const Scenario& s, Phase p) {
  const std::string sec = std::string("material.") + lower(to_string(p));
  PhaseMaterial m;
  m.phase = p;
  m.mu = s.get(sec, "mu", 0.0);
  m.lambda = s.get(sec, "lambda", 0.0);
  m.kappa = s.get(sec, "kappa", 0.0);
  const std::string eos = s.get(sec, "eos", std::string(s.has(sec, "p") ? "barotropic" : "none"));
  if (eos == "ideal") m.eos = IdealGas{s.get(sec, "cv", 1.0), s.get(sec, "rgas", 1.0)};
  if (eos == "barotropic") m.eos = BarotropicLaw::parse(s.get(sec, "p", std::string("rho")));
  return m;
}

SystemState custom_state(const Scenario& s, int r) {
  std::array<PhaseMaterial, 3> mats;
  std::array<PhaseState, 3> st;
  for (Phase p : {Phase::A, Phase::B, Phase::S}) {
    const int k = static_cast<int>(p);
    const std::string sfx = std::string("_") + lower(to_string(p));
    mats[k] = material_of(s, p);
    auto field = [&](const char* key, const char* fallback) {
      const std::string v = s.get("fields", key + sfx, std::string(fallback));
      return v.empty() ? Expr() : expr::parse(v);
    };
    st[k].rho = field("rho", "1");
    st[k].theta = field("theta", "1");
    st[k].pi = field("pi", mats[k].eos.index() == 0 ? "0" : "");
    st[k].e = field("e", mats[k].is_ideal() ? "" : "0");
    const auto v = split(s.get("fields", "v" + sfx, std::string("0;0;0")), ';');
    st[k].v = {expr::parse(v[0]), expr::parse(v[1]), expr::parse(v[2])};
  }
  return SystemState::make(mats, st, domain_of(s, r));
}

SystemState fixture_state(const Scenario& s, const std::string& fallback) {
  const std::string f = s.get("scenario", "fixture", fallback);
  const int r = s.get("scenario", "r", 0);
  if (f == "expanding_bubble") {
    fixtures::ExpandingBubble p;
    p.r = r;
    return fixtures::expanding_bubble(p);
  }
  if (f == "young_laplace")
    return fixtures::young_laplace(s.get("scenario", "r0", 1.0), s.get("scenario", "pi_b", 1.0),
                                   s.get("scenario", "pi_s", -0.2), r);
  if (f == "barotropic_expansion") return fixtures::barotropic_expansion();
  if (f == "ideal_expansion") return fixtures::ideal_expansion();
  if (f == "continuity") return fixtures::continuity_fixture();
  if (f == "random_lagrangian") {
    Rng rng(s.seed());
    return fixtures::random_lagrangian(rng, r);
  }
  return custom_state(s, r);
}

std::vector<DomainConfig> charts_for(const Scenario& s, ScenarioKind k, int r) {
  if (s.get("scenario", "charts", std::string("standard")) == "configured") return {domain_of(s, r)};
  using expr::parse;
  switch (k) {
    case ScenarioKind::Geometry:
      return {{SurfaceChart::sphere(Expr(1.0)), 3.0, r},
              {SurfaceChart::ellipsoid(1, 1, 2), 3.0, r},
              {SurfaceChart::perturbed_sphere(parse("1 + 0.3*t"), 0.2), 3.0, r}};
    case ScenarioKind::Ibp:
      return {{SurfaceChart::sphere(Expr(1.0)), 3.0, r},
              {SurfaceChart::ellipsoid(1.3, 0.9, 0.7), 3.0, r},
              {SurfaceChart::perturbed_sphere(parse("1 + 0.2*t"), 0.15), 3.0, r}};
    default:
      return {{SurfaceChart::sphere(parse("1 + 0.2*t")), 3.0, r},
              {SurfaceChart::perturbed_sphere(Expr(1.0), 0.15), 3.0, r}};
  }
}

std::set<std::string> selected_checks(const Scenario& s, const std::set<std::string>& defaults) {
  if (!s.has("scenario", "checks")) return defaults;
  std::set<std::string> out;
  for (const std::string& c : split(s.get("scenario", "checks", std::string()), ','))
    if (!c.empty()) out.insert(c);
  return out;
}

// ---------------------------------------------------------------------------
// Runners

class Recorder {
 public:
  explicit Recorder(ScenarioResult& r) : r_(r) {}
  void add(const std::string& check, const std::string& label, double gap, double tol) {
    const bool pass = std::isfinite(gap) && gap <= tol;
    r_.rows.push_back({check, label, gap, tol, pass});
  }

 private:
  ScenarioResult& r_;
};

void run_geometry(const Scenario& s, ScenarioResult& res) {
  Recorder rec(res);
  const QuadratureRule q{s.get("quadrature", "n", 24)};
  const double t = s.get("scenario", "t", 0.0);
  for (const DomainConfig& d : charts_for(s, ScenarioKind::Geometry, 0)) {
    const SurfaceChart& c = d.surface;
    double idem = 0, pn = 0, unit = 0, curv = 0;
    const bool sphere = c.kind() == SurfaceKind::Sphere;
    Eigen::Vector3d hn = Eigen::Vector3d::Zero();
    std::array<CompensatedSum, 3> acc;
    for (const SurfaceNode& nd : surface_nodes(c, q, t)) {
      const Eigen::Matrix3d P = c.projection(nd.u, nd.v, t);
      idem = std::max(idem, (P * P - P).cwiseAbs().maxCoeff());
      pn = std::max(pn, (P * nd.n).cwiseAbs().maxCoeff());
      unit = std::max(unit, std::abs(nd.n.norm() - 1));
      const double H = c.mean_curvature(nd.u, nd.v, t);
      if (sphere) curv = std::max(curv, std::abs(H + 2 / nd.x.norm()));
      for (int j = 0; j < 3; ++j) acc[j].add(nd.w * H * nd.n[j]);
    }
    for (int j = 0; j < 3; ++j) hn[j] = acc[j].value();
    const std::string label = c.describe();
    rec.add("projection_idempotent", label, idem, s.tol("projection", 1e-12));
    rec.add("projection_normal", label, pn, s.tol("projection", 1e-12));
    rec.add("normal_unit", label, unit, s.tol("normal", 1e-12));
    if (sphere) rec.add("curvature_sphere", label, curv, s.tol("curvature", 1e-9));
    rec.add("hn_integral", label, hn.norm(), s.tol("hn_integral", 1e-8));
  }
}

void run_ibp(const Scenario& s, ScenarioResult& res) {
  Recorder rec(res);
  const QuadratureRule q{s.get("quadrature", "n", 24)};
  const double t = s.get("scenario", "t", 0.5);
  const double tol = s.tol("ibp", 1e-8);
  std::ostringstream csv;
  csv << "chart,kind,f,g,j,lhs,rhs,gap\n";
  for (const DomainConfig& d : charts_for(s, ScenarioKind::Ibp, 0)) {
    for (const IbpCase& c : ibp_corpus()) {
      for (IbpKind k : {IbpKind::BulkA, IbpKind::BulkB, IbpKind::Surface}) {
        const IbpResult r = ibp_check(d, k, expr::parse(c.f), expr::parse(c.g), c.j, q, t);
        rec.add(std::string("ibp_") + to_string(k), d.surface.describe() + " f=" + c.f + " g=" + c.g +
                                                        " j=" + std::to_string(c.j),
                r.gap, tol);
        csv << '"' << d.surface.describe() << "\"," << to_string(k) << ",\"" << c.f << "\",\"" << c.g << "\","
            << c.j << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << ',' << fmt(r.gap) << '\n';
      }
    }
  }
  res.files.emplace_back("ibp.csv", csv.str());
}

void run_transport(const Scenario& s, ScenarioResult& res) {
  Recorder rec(res);
  const SystemState sys = fixture_state(s, "expanding_bubble");
  const QuadratureRule q{s.get("quadrature", "n", 24), s.get("quadrature", "cap", std::numbers::pi)};
  const double t = s.get("scenario", "t", 0.7), h = s.get("scenario", "h", 1e-3);
  const Expr f = expr::parse(s.get("fields", "f", std::string("(1 + x1^2) * exp(0.3*t) + x2*x3*t")));
  std::ostringstream csv;
  csv << "region,h,lhs,rhs,gap,motion_mismatch\n";
  for (Phase ph : {Phase::A, Phase::B, Phase::S}) {
    const Moving m = ph == Phase::A ? Moving::A : ph == Phase::B ? Moving::B : Moving::Gamma;
    for (double step : {h, h / 2}) {
      const TransportResult r = transport_check(sys.domain, m, f, sys.state(ph).v, q, t, step);
      if (step == h) rec.add("transport", to_string(m), r.gap, s.tol("transport", 1e-7));
      csv << to_string(m) << ',' << fmt(step) << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << ',' << fmt(r.gap) << ','
          << fmt(r.motion_mismatch) << '\n';
    }
  }
  res.files.emplace_back("transport.csv", csv.str());
}

void run_residuals(const Scenario& s, ScenarioResult& res) {
  Recorder rec(res);
  SystemState sys = fixture_state(s, "expanding_bubble");
  if (s.get("scenario", "manufactured", std::string("false")) == "true") sys = with_manufactured_sources(sys);
  const QuadratureRule q{s.get("quadrature", "n", 16), s.get("quadrature", "cap", std::numbers::pi)};
  const double t = s.get("scenario", "t", 0.5);
  const auto checks = selected_checks(s, {"residual", "boundary", "conservative", "audit", "first_law"});

  if (checks.count("residual")) {
    const auto reports = residual_reports(sys, q, t);
    for (const ResidualReport& r : reports)
      rec.add("residual", std::string(to_string(r.equation)) + "/" + to_string(r.phase), r.norm_inf,
              s.tol("residual", 1e-9));
    std::ostringstream os;
    write_residual_csv(os, reports);
    res.files.emplace_back("residuals.csv", os.str());
  }
  if (checks.count("boundary"))
    for (const BoundaryCondition& b : boundary_residual(sys, q, t))
      rec.add("boundary", b.name, b.max_abs, s.tol("boundary", 1e-9));
  if (checks.count("conservative")) {
    for (Phase p : {Phase::A, Phase::B}) {
      const ResidualEvaluator ev(sys, p);
      double eg = 0, mg = 0;
      for (const VolumeNode& nd : volume_nodes(sys.domain, p == Phase::A ? Region::A : Region::B, q, t)) {
        const auto v = ev(nd.p());
        eg = std::max(eg, std::abs(v.energy_form_gap));
        mg = std::max(mg, v.momentum_form_gap.cwiseAbs().maxCoeff());
      }
      rec.add("conservative", std::string("energy/") + to_string(p), eg, s.tol("conservative", 1e-9));
      rec.add("conservative", std::string("momentum/") + to_string(p), mg, s.tol("conservative", 1e-9));
    }
  }
  if (checks.count("audit")) {
    AuditOptions opt{q, s.get("quadrature", "time_nodes", 8), s.tol("audit", 1e-7)};
    std::vector<AuditResult> audits;
    std::vector<Law> laws{Law::Mass, Law::Energy, Law::Kinetic};
    if (sys.r() == 1) laws.push_back(Law::Momentum);
    for (Law law : laws) {
      const AuditResult a = conservation_audit(sys, law, s.get("scenario", "t1", 0.0), s.get("scenario", "t2", 1.0), opt);
      rec.add("audit", to_string(law), a.gap, a.tol);
      audits.push_back(a);
    }
    std::ostringstream os;
    write_audit_csv(os, audits);
    res.files.emplace_back("audit.csv", os.str());
  }
  if (checks.count("first_law")) {
    const double h = s.get("scenario", "h", 1e-3), tol = s.tol("first_law", 1e-7);
    for (const FirstLawResult& r : first_law_check(sys, FirstLawForm::Internal, q, t, h))
      rec.add("first_law", std::string("internal/") + to_string(r.phase), r.gap, tol);
    std::vector<Phase> baro;
    for (Phase p : {Phase::A, Phase::B, Phase::S})
      if (sys.material(p).is_barotropic()) baro.push_back(p);
    if (!baro.empty())
      for (const FirstLawResult& r : first_law_check(sys, FirstLawForm::Barotropic, q, t, h, 1e-9, baro))
        rec.add("first_law", std::string("barotropic/") + to_string(r.phase), r.gap, tol);
  }
}

void run_variation(const Scenario& s, ScenarioResult& res) {
  Recorder rec(res);
  const GateauxOptions opt{QuadratureRule{s.get("quadrature", "n", 24)}, s.get("scenario", "eps_step", 1e-2)};
  const double t = s.get("scenario", "t", 0.25), tol = s.tol("gateaux", 1e-6);
  const int samples = s.get("scenario", "samples", 2);
  const std::string theorems = s.get("scenario", "theorems", std::string("both"));
  std::vector<int> rs{0, 1};
  if (s.has("scenario", "r")) rs = {s.get("scenario", "r", 0)};
  const Rng root(s.seed());
  std::vector<GateauxRecord> records;
  int id = 0;
  for (int r : rs) {
    const auto charts = charts_for(s, ScenarioKind::Variation, r);
    for (std::size_t c = 0; c < charts.size(); ++c) {
      for (int k = 0; k < samples; ++k, ++id) {
        Rng rng = root.split(static_cast<std::uint64_t>(id));
        const SystemState sys = fixtures::random_smooth_state(rng, charts[c]);
        const AdmissibleVariation var = make_admissible(random_seeds(rng), r, charts[c], t);
        const std::string label = charts[c].surface.describe() + " r=" + std::to_string(r) + " #" + std::to_string(id);
        auto record = [&](const char* theorem, const GateauxResult& g) {
          const double rel = g.gap / std::max({1.0, std::abs(g.side_a), std::abs(g.side_b)});
          rec.add(std::string("gateaux_") + theorem, label, rel, tol);
          records.push_back({theorem, r, id, g, rel <= tol});
        };
        if (theorems != "temperature") record("velocity", gateaux_gap_velocity(sys, var, opt));
        if (theorems != "velocity") record("temperature", gateaux_gap_temperature(sys, var, opt));
      }
    }
  }
  std::ostringstream os;
  write_gateaux_csv(os, records);
  res.files.emplace_back("gateaux.csv", os.str());
}

SystemState random_ideal_state(Rng& rng) {
  std::array<PhaseMaterial, 3> mats;
  std::array<PhaseState, 3> st;
  for (int k = 0; k < 3; ++k) {
    mats[k].phase = static_cast<Phase>(k);
    mats[k].mu = rng.uniform(0, 1);
    mats[k].lambda = rng.uniform(0, 1);
    mats[k].kappa = rng.uniform(0, 1);
    mats[k].eos = IdealGas{rng.uniform(1, 3), rng.uniform(0.5, 1.5)};
    st[k].rho = fixtures::random_smooth(rng, 2.0, 0.3);
    st[k].v = fixtures::random_smooth_vector(rng, 0.5);
    st[k].theta = fixtures::random_smooth(rng, 2.0, 0.3);
  }
  return SystemState::make(mats, st, DomainConfig{SurfaceChart::sphere(expr::parse("1 + 0.2*t")), 3.0, 1});
}

void run_thermo(const Scenario& s, ScenarioResult& res) {
  Recorder rec(res);
  SystemState sys = fixture_state(s, "ideal_expansion");
  if (s.get("scenario", "manufactured", std::string("true")) == "true") sys = with_manufactured_sources(sys);
  const ThermoModel model(sys);
  const double t = s.get("scenario", "t", 0.4), tol = s.tol("thermo", 1e-7);
  const auto records = thermo_report(model, QuadratureRule{s.get("quadrature", "n", 8)}, t, tol);
  for (const ThermoRecord& r : records) rec.add(r.identity, to_string(r.phase), r.gap, tol);
  std::ostringstream os;
  write_thermo_csv(os, records);
  res.files.emplace_back("thermo.csv", os.str());

  // Entropy production over random states with nonnegative coefficients.
  const int samples = s.get("scenario", "samples", 100);
  const Rng root(s.seed());
  double worst = 0;
  for (int k = 0; k < samples; ++k) {
    Rng rng = root.split(static_cast<std::uint64_t>(k));
    const ThermoModel m(random_ideal_state(rng));
    const double tk = rng.uniform(0, 1);
    const QuadratureRule q4{4};
    for (const VolumeNode& nd : volume_nodes(m.system().domain, Region::A, q4, tk))
      worst = std::min(worst, m.entropy_production(Phase::A, nd.p()));
    for (const VolumeNode& nd : volume_nodes(m.system().domain, Region::B, q4, tk))
      worst = std::min(worst, m.entropy_production(Phase::B, nd.p()));
    for (const SurfaceNode& nd : surface_nodes(m.system().domain.surface, q4, tk))
      worst = std::min(worst, m.entropy_production(Phase::S, nd.p()));
  }
  rec.add("entropy_production_sign", std::to_string(samples) + " random states", std::max(0.0, -worst),
          s.tol("entropy_production", 1e-12));
}

void run_bubble(const Scenario& s, ScenarioResult& res) {
  Recorder rec(res);
  BubbleParams p;
  const PhaseMaterial mA = material_of(s, Phase::A), mS = material_of(s, Phase::S);
  if (!mA.is_barotropic() || !mS.is_barotropic())
    throw ConfigError("bubble scenarios need barotropic laws p in [material.a] and [material.s]");
  p.p_A = std::get<BarotropicLaw>(mA.eos);
  p.p_S = std::get<BarotropicLaw>(mS.eos);
  p.mu_A = mA.mu;
  p.lambda_A = mA.lambda;
  p.mu_S = mS.mu;
  p.lambda_S = mS.lambda;
  p.pi_inf = s.get("scenario", "pi_inf", 1.0);
  const BubbleModel model(p);

  BubbleState s0;
  s0.R = s.get("scenario", "r0", 1.0);
  s0.rho_S = s.get("scenario", "rho_s0", 1.0);
  const bool equilibrium = s.get("scenario", "start", std::string("given")) == "equilibrium";
  s0.rho_A = equilibrium ? model.balancing_density(s0.R, s0.rho_S) : s.get("scenario", "rho_a0", 1.0);
  s0.U = equilibrium ? 0.0 : s.get("scenario", "u0", 0.0);

  const double period = model.natural_period(s0);
  const double dt = s.get("scenario", "dt", 1e-3 * period);
  const double t_end = s.get("scenario", "t_end", s.get("scenario", "periods", 10.0) * period);
  const Trajectory traj = integrate(model, s0, t_end, dt);
  const BubbleConsistency c = consistency_check(model, traj, s.get("scenario", "consistency_samples", 20),
                                                s.get("quadrature", "n", 8), s.get("scenario", "r", 0));

  rec.add("completed", traj.halted ? traj.diagnostic : "t_end reached", traj.halted ? 1.0 : 0.0, 0.5);
  if (equilibrium) {
    double worst = 0;
    for (const BubbleRecord& r : traj.records) worst = std::max(worst, std::abs(r.s.R - s0.R) / s0.R);
    rec.add("stationary", "max |R - R0| / R0", worst, s.tol("stationary", 1e-10));
  }
  rec.add("invariant", "rho_A R^3, rho_S R^2", c.invariant_drift, s.tol("invariant", 1e-10));
  rec.add("mass", "quadrature masses of A and S", c.mass_gap, s.tol("mass", 1e-8));
  rec.add("surface_momentum", "reconstructed fields", c.surface_momentum, s.tol("surface_momentum", 1e-8));
  rec.add("energy_ledger", "reduced kinetic-energy law", c.energy_gap, s.tol("energy_ledger", 1e-6));
  rec.add("rate", "quadrature vs closed-form rates", c.rate_gap, s.tol("rate", 1e-9));

  std::ostringstream os;
  write_trajectory_csv(os, traj, s.get("scenario", "stride", 1));
  res.files.emplace_back("trajectory.csv", os.str());

  std::ostringstream log;
  log << "  period " << fmt(period, "%.6g") << ", dt " << fmt(dt, "%.6g") << ", steps "
      << traj.records.size() - 1 << (traj.halted ? " (halted: " + traj.diagnostic + ")" : "") << "\n";
  log << "  invariant drift table\n";
  log << "    rho_A R^3, rho_S R^2  " << fmt(c.invariant_drift, "%.3e") << "\n";
  log << "    quadrature masses     " << fmt(c.mass_gap, "%.3e") << "\n";
  log << "    energy ledger         " << fmt(c.energy_gap, "%.3e") << "\n";
  log << "    surface momentum      " << fmt(c.surface_momentum, "%.3e") << "\n";
  log << "    bulk momentum (diagnostic, ansatz is not a bulk solution) " << fmt(c.bulk_momentum, "%.3e") << "\n";
  res.log += log.str();
}

std::string table(const ScenarioResult& r) {
  std::ostringstream os;
  os << "scenario " << r.scenario << " (" << to_string(r.kind) << ")\n";
  for (const SummaryRow& row : summarize({r}))
    os << "  " << (row.fail ? "FAIL" : "pass") << "  " << row.check << "  " << row.pass << "/" << row.pass + row.fail
       << "  max gap " << fmt(row.max_gap, "%.3e") << "\n";
  for (const CheckRow& c : r.rows)
    if (!c.pass)
      os << "  failing: " << c.check << " [" << c.label << "] gap " << fmt(c.gap, "%.3e") << " > tol "
         << fmt(c.tol, "%.1e") << "\n";
  if (!r.error.empty()) os << "  error: " << r.error << "\n";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

const char* to_string(ScenarioKind k) {
  return kKinds[static_cast<std::size_t>(k)].c_str();
}

Scenario Scenario::parse(const std::string& text, const std::string& source) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message(), static_cast<int>(e.line()));
  }
  const auto lines = key_lines(text);
  Scenario s;
  s.source_ = source;
  for (const auto& [sec_raw, sec] : tree) {
    const std::string section = lower(sec_raw);
    if (sec.empty()) {
      const auto it = lines.find({"", lower(sec_raw)});
      const int line = it == lines.end() ? 0 : it->second;
      throw ConfigError(source + ":" + std::to_string(line) + ": key '" + sec_raw + "' outside any section", line);
    }
    for (const auto& [key_raw, node] : sec) {
      const std::string key = lower(key_raw);
      const auto it = lines.find({section, key});
      s.values_[section][key] = {unquote(trim(node.data())), it == lines.end() ? 0 : it->second};
    }
  }
  s.validate();
  return s;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void Scenario::validate() {
  const auto& sch = schema();
  auto where = [&](int line) { return source_ + ":" + (line ? std::to_string(line) + ": " : std::string(" ")); };
  for (const auto& [section, keys] : values_) {
    const auto sit = sch.find(section);
    if (sit == sch.end()) {
      const int line = keys.empty() ? 0 : keys.begin()->second.line;
      throw ConfigError(where(line) + "unknown section [" + section + "]", line);
    }
    for (const auto& [key, val] : keys) {
      const auto kit = sit->second.find(key);
      if (kit == sit->second.end())
        throw ConfigError(where(val.line) + "unknown key '" + key + "' in [" + section + "]", val.line);
      const KeySpec& spec = kit->second;
      const std::string& v = val.text;
      auto bad = [&](const std::string& why) {
        throw ConfigError(where(val.line) + section + "." + key + " = '" + v + "': " + why, val.line);
      };
      double d = 0;
      switch (spec.type) {
        case Type::Real:
          if (!parse_double(v, d)) bad("expected a number");
          break;
        case Type::Pos:
          if (!parse_double(v, d) || !(d > 0)) bad("expected a positive number");
          break;
        case Type::NonNeg:
          if (!parse_double(v, d) || !(d >= 0)) bad("expected a nonnegative number");
          break;
        case Type::Angle:
          if (!parse_double(v, d) || !(d > 0) || d > std::numbers::pi) bad("expected an angle in (0, pi]");
          break;
        case Type::Int:
        case Type::Count:
          if (!parse_double(v, d) || d != std::floor(d)) bad("expected an integer");
          if (spec.type == Type::Count && d < 1) bad("expected a positive integer");
          break;
        case Type::U64:
          if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) bad("expected an unsigned integer");
          try {
            (void)std::stoull(v);
          } catch (...) {
            bad("out of range");
          }
          break;
        case Type::Str:
          break;
        case Type::Bool:
          if (v != "true" && v != "false") bad("expected true or false");
          break;
        case Type::Choice:
          if (std::find(spec.choices.begin(), spec.choices.end(), v) == spec.choices.end()) {
            std::string all;
            for (const auto& c : spec.choices) all += (all.empty() ? "" : ", ") + c;
            bad("expected one of " + all);
          }
          break;
        case Type::Expression:
        case Type::Law:
        case Type::Vector: {
          const auto parts = spec.type == Type::Vector ? split(v, ';') : std::vector<std::string>{v};
          if (spec.type == Type::Vector && parts.size() != 3) bad("expected three expressions separated by ';'");
          for (const auto& part : parts) {
            try {
              (void)expr::parse(part, spec.type == Type::Law ? rho_alias() : expr::Aliases{});
            } catch (const expr::ParseError& e) {
              bad(std::string("does not parse: ") + e.what());
            }
          }
          break;
        }
        case Type::Axes: {
          const auto parts = split(v, ',');
          if (parts.size() != 3) bad("expected three axes a,b,c");
          for (const auto& part : parts)
            if (!parse_double(part, d) || !(d > 0)) bad("axes must be positive numbers");
          break;
        }
      }
    }
  }
  if (!has("scenario", "kind")) throw ConfigError(source_ + ": [scenario] kind is required");
  const std::string k = get("scenario", "kind", std::string());
  kind_ = static_cast<ScenarioKind>(std::find(kKinds.begin(), kKinds.end(), k) - kKinds.begin());
  name_ = get("scenario", "name", k);
  if (name_.empty() || name_.find_first_of("/\\ ,\"") != std::string::npos)
    throw ConfigError(source_ + ": scenario name '" + name_ + "' must be nonempty without spaces, commas or slashes");
  if (has("quadrature", "n") && get("quadrature", "n", 0) < 8)
    throw ConfigError(where(values_["quadrature"]["n"].line) + "quadrature n must be at least 8",
                      values_["quadrature"]["n"].line);
  if (has("scenario", "r")) {
    const int r = get("scenario", "r", 0);
    if (r != 0 && r != 1) throw ConfigError(where(values_["scenario"]["r"].line) + "r must be 0 or 1");
  }
}

void Scenario::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
  std::string lhs = lower(trim(assignment.substr(0, eq)));
  const std::string value = unquote(trim(assignment.substr(eq + 1)));
  std::string section = "scenario", key = lhs;
  const auto dot = lhs.rfind('.');
  if (dot != std::string::npos) {
    section = lhs.substr(0, dot);
    key = lhs.substr(dot + 1);
  } else {
    std::vector<std::string> found;
    for (const auto& [sec, keys] : values_)
      if (keys.count(key)) found.push_back(sec);
    if (found.size() == 1) section = found[0];
  }
  Scenario next = *this;
  next.values_[section][key] = {value, 0};
  next.validate();
  *this = std::move(next);
}

std::uint64_t Scenario::seed() const {
  return has("scenario", "seed") ? std::stoull(get("scenario", "seed", std::string("1"))) : 1;
}

void Scenario::set_seed(std::uint64_t s) { values_["scenario"]["seed"] = {std::to_string(s), 0}; }

bool Scenario::has(const std::string& section, const std::string& key) const {
  const auto it = values_.find(section);
  return it != values_.end() && it->second.count(key);
}

std::string Scenario::get(const std::string& section, const std::string& key, const std::string& fallback) const {
  return has(section, key) ? values_.at(section).at(key).text : fallback;
}

double Scenario::get(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? std::stod(values_.at(section).at(key).text) : fallback;
}

int Scenario::get(const std::string& section, const std::string& key, int fallback) const {
  return has(section, key) ? static_cast<int>(std::stod(values_.at(section).at(key).text)) : fallback;
}

void Scenario::set(const std::string& section, const std::string& key, const std::string& value) {
  Scenario next = *this;
  next.values_[section][key] = {value, 0};
  next.validate();
  *this = std::move(next);
}

double Scenario::tol(const std::string& check, double fallback) const {
  return get("tolerances", check, fallback) * tol_scale;
}

bool ScenarioResult::passed() const {
  if (!error.empty()) return false;
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

std::vector<SummaryRow> summarize(const std::vector<ScenarioResult>& results) {
  std::vector<SummaryRow> out;
  for (const ScenarioResult& r : results) {
    std::vector<SummaryRow> local;
    for (const CheckRow& c : r.rows) {
      auto it = std::find_if(local.begin(), local.end(), [&](const SummaryRow& s) { return s.check == c.check; });
      if (it == local.end()) {
        local.push_back({r.scenario, c.check});
        it = std::prev(local.end());
      }
      (c.pass ? it->pass : it->fail) += 1;
      it->max_gap = std::isfinite(c.gap) ? std::max(it->max_gap, c.gap) : INFINITY;
    }
    if (!r.error.empty()) local.push_back({r.scenario, "run", 0, 1, 0});
    out.insert(out.end(), local.begin(), local.end());
  }
  return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows, const std::string& timestamp) {
  std::ostringstream os;
  if (!timestamp.empty()) os << "# generated " << timestamp << "\n";
  os << "scenario,check,pass,fail,max_gap\n";
  for (const SummaryRow& r : rows)
    os << r.scenario << ',' << r.check << ',' << r.pass << ',' << r.fail << ',' << fmt(r.max_gap) << '\n';
  return os.str();
}

std::string checks_csv(const ScenarioResult& r) {
  std::ostringstream os;
  os << "check,case,gap,tol,pass\n";
  for (const CheckRow& c : r.rows)
    os << c.check << ",\"" << c.label << "\"," << fmt(c.gap) << ',' << fmt(c.tol) << ',' << (c.pass ? "true" : "false")
       << '\n';
  return os.str();
}

ScenarioResult run_scenario(const Scenario& s) {
  ScenarioResult res;
  res.scenario = s.name();
  res.kind = s.kind();
  try {
    switch (s.kind()) {
      case ScenarioKind::Geometry: run_geometry(s, res); break;
      case ScenarioKind::Ibp: run_ibp(s, res); break;
      case ScenarioKind::Transport: run_transport(s, res); break;
      case ScenarioKind::Residuals: run_residuals(s, res); break;
      case ScenarioKind::Variation: run_variation(s, res); break;
      case ScenarioKind::Thermo: run_thermo(s, res); break;
      case ScenarioKind::Bubble: run_bubble(s, res); break;
    }
  } catch (const std::exception& e) {
    res.error = e.what();
  }
  res.files.insert(res.files.begin(), {"checks.csv", checks_csv(res)});
  res.log = table(res) + res.log;
  return res;
}

std::vector<ScenarioResult> run_campaign(const std::vector<Scenario>& scenarios, int jobs) {
  std::vector<ScenarioResult> out(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < scenarios.size();) out[i] = run_scenario(scenarios[i]);
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(scenarios.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return out;
}

std::vector<LadderRow> convergence_ladder(const Scenario& s, const std::vector<int>& Ns, int jobs) {
  if (s.kind() == ScenarioKind::Bubble) throw ConfigError("ladder needs a verify-* scenario");
  std::vector<Scenario> rungs;
  for (int N : Ns) {
    if (N < 8) throw ConfigError("ladder sizes must be at least 8");
    Scenario r = s;
    r.set("quadrature", "n", std::to_string(N));
    rungs.push_back(r);
  }
  const auto results = run_campaign(rungs, jobs);
  std::vector<LadderRow> rows;
  std::vector<std::string> order;
  for (std::size_t k = 0; k < results.size(); ++k) {
    if (!results[k].error.empty())
      throw std::runtime_error("N=" + std::to_string(Ns[k]) + ": " + results[k].error);
    for (const SummaryRow& sr : summarize({results[k]})) {
      if (std::find(order.begin(), order.end(), sr.check) == order.end()) order.push_back(sr.check);
      rows.push_back({sr.check, Ns[k], sr.max_gap, std::nullopt});
    }
  }
  std::vector<LadderRow> sorted;
  for (const std::string& c : order) {
    const LadderRow* prev = nullptr;
    for (const LadderRow& r : rows) {
      if (r.check != c) continue;
      LadderRow out = r;
      if (prev && prev->max_gap > 0 && r.max_gap > 0)
        out.order = std::log(prev->max_gap / r.max_gap) / std::log(static_cast<double>(r.N) / prev->N);
      if (r.max_gap <= 1e-13)
        out.regime = "roundoff";
      else if (prev)
        out.regime = out.order && *out.order > 0.5 ? "converging" : "plateau";
      sorted.push_back(out);
      prev = &r;
    }
  }
  return sorted;
}

std::string ladder_csv(const std::string& scenario, const std::vector<LadderRow>& rows) {
  std::ostringstream os;
  os << "scenario,check,N,max_gap,order,regime\n";
  for (const LadderRow& r : rows)
    os << scenario << ',' << r.check << ',' << r.N << ',' << fmt(r.max_gap) << ',' << (r.order ? fmt(*r.order) : "")
       << ',' << r.regime << '\n';
  return os.str();
}

}  // namespace bsflow
