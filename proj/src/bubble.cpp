#include "bsflow/bubble.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>

#include <boost/math/tools/toms748_solve.hpp>

#include "bsflow/calculus.hpp"

namespace bsflow {

using std::numbers::pi;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

expr::Program pressure_program(const BarotropicLaw& law) {
  return expr::Program{constitutive::barotropic_pressure(law, expr::x1())};
}

double run(const expr::Program& p, double rho, const char* what) {
  if (!(rho > 0) || !std::isfinite(rho)) throw BubbleError(std::string(what) + " must be positive, got " + fmt(rho));
  std::array<double, 1> out{};
  std::vector<double> scratch;
  p.evaluate(expr::Point{rho, 0, 0, 0}, out, scratch);
  return out[0];
}

void require_valid(const BubbleState& s) {
  const double v[] = {s.R, s.U, s.rho_A, s.rho_S};
  for (double x : v)
    if (!std::isfinite(x)) throw BubbleError("non-finite state");
  if (!(s.R > 0)) throw BubbleError("radius must be positive, got " + fmt(s.R));
  if (!(s.rho_A > 0)) throw BubbleError("rho_A must be positive, got " + fmt(s.rho_A));
  if (!(s.rho_S > 0)) throw BubbleError("rho_S must be positive, got " + fmt(s.rho_S));
}

// (R, U, rho_A, rho_S, dissipated, work)
using Aug = std::array<double, 6>;

Aug aug_rhs(const BubbleModel& m, const Aug& y) {
  const BubbleState s{y[0], y[1], y[2], y[3]};
  const BubbleState d = m.rhs(s);
  return {d.R, d.U, d.rho_A, d.rho_S, m.dissipation_rate(s), m.work_rate(s)};
}

Aug axpy(const Aug& y, double h, const Aug& k) {
  Aug r;
  for (int i = 0; i < 6; ++i) r[i] = y[i] + h * k[i];
  return r;
}

BubbleRecord record(const BubbleModel& m, double t, const Aug& y, double ke0) {
  BubbleRecord r;
  r.t = t;
  r.s = {y[0], y[1], y[2], y[3]};
  r.mass_A = y[2] * 4 * pi / 3 * y[0] * y[0] * y[0];
  r.mass_S = y[3] * 4 * pi * y[0] * y[0];
  r.kinetic = m.kinetic(r.s);
  r.dissipated = y[4];
  r.work = y[5];
  r.gap = r.kinetic + r.dissipated - ke0 - r.work;
  return r;
}

PhaseMaterial material(Phase p, double mu, double lambda) {
  PhaseMaterial m;
  m.phase = p;
  m.mu = mu;
  m.lambda = lambda;
  return m;
}

}  // namespace

BubbleModel::BubbleModel(BubbleParams params)
    : params_(std::move(params)), PiA_(pressure_program(params_.p_A)), PiS_(pressure_program(params_.p_S)) {
  const double c[] = {params_.mu_A, params_.lambda_A, params_.mu_S, params_.lambda_S};
  for (double x : c)
    if (!(x >= 0)) throw std::invalid_argument("bubble viscosities must be nonnegative");
  if (!std::isfinite(params_.pi_inf)) throw std::invalid_argument("ambient pressure must be finite");
}

double BubbleModel::Pi_A(double rho) const { return run(PiA_, rho, "rho_A"); }
double BubbleModel::Pi_S(double rho) const { return run(PiS_, rho, "rho_S"); }

BubbleState BubbleModel::rhs(const BubbleState& s) const {
  require_valid(s);
  const BubbleParams& p = params_;
  const double rate = s.U / s.R;
  const double force = -(2 / s.R) * ((p.mu_S + 2 * p.lambda_S) * rate - Pi_S(s.rho_S)) - p.pi_inf -
                       (p.mu_A + 3 * p.lambda_A) * rate + Pi_A(s.rho_A);
  BubbleState d{s.U, force / s.rho_S, -3 * rate * s.rho_A, -2 * rate * s.rho_S};
  const double v[] = {d.R, d.U, d.rho_A, d.rho_S};
  for (double x : v)
    if (!std::isfinite(x)) throw BubbleError("non-finite right-hand side at R = " + fmt(s.R));
  return d;
}

double BubbleModel::dissipation_rate(const BubbleState& s) const {
  const BubbleParams& p = params_;
  return 4 * pi * s.R * (p.mu_A + 3 * p.lambda_A) * s.U * s.U + 8 * pi * (p.mu_S + 2 * p.lambda_S) * s.U * s.U;
}

double BubbleModel::work_rate(const BubbleState& s) const {
  return 4 * pi * s.R * s.R * s.U * (Pi_A(s.rho_A) + 2 * Pi_S(s.rho_S) / s.R - params_.pi_inf);
}

double BubbleModel::kinetic(const BubbleState& s) const { return 2 * pi * s.R * s.R * s.rho_S * s.U * s.U; }

double BubbleModel::equilibrium_radius(double mA, double mS, double lo, double hi) const {
  if (!(lo > 0 && hi > lo)) throw BubbleError("equilibrium bracket must satisfy 0 < lo < hi");
  auto f = [&](double R) { return Pi_A(mA / (R * R * R)) - params_.pi_inf + 2 * Pi_S(mS / (R * R)) / R; };
  const double flo = f(lo), fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw BubbleError("no sign change of the static balance on [" + fmt(lo) + ", " + fmt(hi) + "]");
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2),
      iters);
  return 0.5 * (a + b);
}

double BubbleModel::balancing_density(double R, double rho_S) const {
  const double target = params_.pi_inf - 2 * Pi_S(rho_S) / R;
  auto f = [&](double rho) { return Pi_A(rho) - target; };
  double lo = 1e-12, flo = f(lo);
  for (double hi = 1e-11; hi <= 1e12; hi *= 10) {
    const double fhi = f(hi);
    if (fhi == 0) return hi;
    if ((flo > 0) != (fhi > 0)) {
      std::uintmax_t iters = 200;
      const auto [a, b] = boost::math::tools::toms748_solve(
          f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2),
          iters);
      return 0.5 * (a + b);
    }
    lo = hi;
    flo = fhi;
  }
  throw BubbleError("no interior density balances pi_inf - 2 Pi_S / R = " + fmt(target));
}

double BubbleModel::natural_period(const BubbleState& s) const {
  require_valid(s);
  const double mA = s.rho_A * s.R * s.R * s.R, mS = s.rho_S * s.R * s.R;
  auto f = [&](double R) { return Pi_A(mA / (R * R * R)) - params_.pi_inf + 2 * Pi_S(mS / (R * R)) / R; };
  const double h = 1e-5 * s.R;
  const double k = -(f(s.R + h) - f(s.R - h)) / (2 * h);
  if (k > 0) return 2 * pi * std::sqrt(s.rho_S / k);
  const double P = std::max({std::abs(Pi_A(s.rho_A)), std::abs(params_.pi_inf), std::abs(2 * Pi_S(s.rho_S) / s.R)});
  if (!(P > 0)) return 1.0;
  return 2 * pi * std::sqrt(s.rho_S * s.R / P);
}

Trajectory integrate(const BubbleModel& model, const BubbleState& s0, double t_end, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  if (!(t_end > 0)) throw std::invalid_argument("t_end must be positive");
  require_valid(s0);
  Trajectory traj;
  Aug y{s0.R, s0.U, s0.rho_A, s0.rho_S, 0, 0};
  const double ke0 = model.kinetic(s0);
  traj.records.push_back(record(model, 0, y, ke0));
  // A whole number of equal steps no longer than dt.
  const auto steps = static_cast<long>(std::ceil(t_end / dt * (1 - 1e-12)));
  const double h = t_end / static_cast<double>(steps);
  traj.records.reserve(steps + 1);
  for (long k = 0; k < steps; ++k) {
    const double t = h * static_cast<double>(k);
    try {
      const Aug k1 = aug_rhs(model, y);
      const Aug k2 = aug_rhs(model, axpy(y, h / 2, k1));
      const Aug k3 = aug_rhs(model, axpy(y, h / 2, k2));
      const Aug k4 = aug_rhs(model, axpy(y, h, k3));
      Aug next;
      for (int i = 0; i < 6; ++i) next[i] = y[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      require_valid({next[0], next[1], next[2], next[3]});
      y = next;
    } catch (const BubbleError& e) {
      traj.halted = true;
      traj.diagnostic = "halted in step from t = " + fmt(t) + ": " + e.what();
      return traj;
    }
    traj.records.push_back(record(model, h * static_cast<double>(k + 1), y, ke0));
  }
  return traj;
}

SystemState reconstruct(const BubbleModel& model, const BubbleRecord& rec, int r) {
  const BubbleParams& p = model.params();
  const BubbleState& s = rec.s;
  const double a = model.rhs(s).U;
  const Expr tau = expr::t() - Expr(rec.t);
  const Expr R = Expr(s.R) + Expr(s.U) * tau + Expr(0.5 * a) * tau * tau;
  const Expr U = Expr(s.U) + Expr(a) * tau;
  const VectorField v = (U / R) * position();
  const double mA = s.rho_A * s.R * s.R * s.R, mS = s.rho_S * s.R * s.R;

  PhaseMaterial A = material(Phase::A, p.mu_A, p.lambda_A), B = material(Phase::B, 0, 0),
                S = material(Phase::S, p.mu_S, p.lambda_S);
  A.eos = p.p_A;
  S.eos = p.p_S;
  const PhaseState sA{Expr(mA) / (R * R * R), v, Expr(1.0), Expr(), Expr(1.0)};
  const PhaseState sB{Expr(1.0), constant_vector(0, 0, 0), Expr(1.0), Expr(p.pi_inf), Expr(1.0)};
  const PhaseState sS{Expr(mS) / (R * R), v, Expr(1.0), Expr(), Expr(1.0)};
  return SystemState::make({A, B, S}, {sA, sB, sS}, DomainConfig{SurfaceChart::sphere(R), 4 * s.R, r});
}

BubbleConsistency consistency_check(const BubbleModel& model, const Trajectory& traj, int samples, int N, int r) {
  BubbleConsistency out;
  const auto& recs = traj.records;
  if (recs.empty()) return out;

  const double iA = recs.front().s.rho_A * std::pow(recs.front().s.R, 3);
  const double iS = recs.front().s.rho_S * std::pow(recs.front().s.R, 2);
  double scale = 0;
  for (const BubbleRecord& rec : recs) {
    out.invariant_drift = std::max({out.invariant_drift, std::abs(rec.s.rho_A * std::pow(rec.s.R, 3) - iA) / iA,
                                    std::abs(rec.s.rho_S * std::pow(rec.s.R, 2) - iS) / iS});
    scale = std::max({scale, rec.kinetic, rec.dissipated, std::abs(rec.work)});
  }
  if (scale > 0)
    for (const BubbleRecord& rec : recs) out.energy_gap = std::max(out.energy_gap, std::abs(rec.gap) / scale);

  samples = std::max(1, std::min<int>(samples, static_cast<int>(recs.size())));
  const QuadratureRule q{N};
  double massA0 = 0, massS0 = 0;
  for (int k = 0; k < samples; ++k) {
    const std::size_t idx = samples == 1 ? 0 : (recs.size() - 1) * static_cast<std::size_t>(k) / (samples - 1);
    const BubbleRecord& rec = recs[idx];
    const SystemState sys = reconstruct(model, rec, r);
    const PhaseMaterial& mA = sys.material(Phase::A);
    const PhaseMaterial& mS = sys.material(Phase::S);
    const PhaseState& A = sys.state(Phase::A);
    const PhaseState& S = sys.state(Phase::S);
    const VectorField& n = sys.normal();
    const double t = rec.t;

    const std::vector<VolumeNode> vol = volume_nodes(sys.domain, Region::A, q, t);
    const std::vector<SurfaceNode> surf = surface_nodes(sys.domain.surface, q, t);
    const Expr vol_f[] = {A.rho, constitutive::dissipation_density(mA, A), constitutive::work_density(A)};
    const Expr surf_f[] = {S.rho, constitutive::dissipation_density_surface(mS, S, n),
                           constitutive::work_density_surface(S, n), constitutive::kinetic_density(S),
                           Expr(-model.params().pi_inf) * dot(S.v, n)};
    const auto iv = integrate_many(vol, vol_f);
    const auto is = integrate_many(surf, surf_f);

    if (k == 0) {
      massA0 = iv[0];
      massS0 = is[0];
    }
    out.mass_gap = std::max({out.mass_gap, std::abs(iv[0] - massA0) / massA0, std::abs(is[0] - massS0) / massS0});

    const double quad_diss = iv[1] + is[1], quad_work = iv[2] + is[2] + is[4], quad_ke = is[3];
    const double diss = model.dissipation_rate(rec.s), work = model.work_rate(rec.s), ke = model.kinetic(rec.s);
    const double mag = std::abs(diss) + std::abs(work) + std::abs(ke);
    if (mag > 0)
      out.rate_gap = std::max(out.rate_gap, (std::abs(quad_diss - diss) + std::abs(quad_work - work) +
                                             std::abs(quad_ke - ke)) / mag);

    const ResidualEvaluator evS(sys, Phase::S), evA(sys, Phase::A);
    for (const SurfaceNode& nd : surf)
      out.surface_momentum = std::max(out.surface_momentum, evS(nd.p()).momentum.cwiseAbs().maxCoeff());
    for (const VolumeNode& nd : vol)
      out.bulk_momentum = std::max(out.bulk_momentum, evA(nd.p()).momentum.cwiseAbs().maxCoeff());
    ++out.samples;
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int stride) {
  os << "t,R,U,rho_A,rho_S,mass_A,mass_S,kinetic,dissipated,work,gap_1_14\n";
  stride = std::max(1, stride);
  char buf[512];
  const auto n = traj.records.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i % static_cast<std::size_t>(stride) != 0 && i + 1 != n) continue;
    const BubbleRecord& r = traj.records[i];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.s.R,
                  r.s.U, r.s.rho_A, r.s.rho_S, r.mass_A, r.mass_S, r.kinetic, r.dissipated, r.work, r.gap);
    os << buf;
  }
}

}  // namespace bsflow
