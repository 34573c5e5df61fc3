#pragma once

// Spherical bubble under uniform expansion: v_A = (U/R) x, v_S = U n on the
// sphere of radius R, uniform densities, and a constant ambient pressure in
// place of phase B. The normal surface momentum balance (no-slip jump form)
// becomes
//
//   rho_S U' = -(2/R) [(mu_S + 2 lambda_S) U/R - Pi_S(rho_S)] - pi_inf
//              - (mu_A + 3 lambda_A) U/R + Pi_A(rho_A),
//
// with R' = U, rho_A' = -3 (U/R) rho_A, rho_S' = -2 (U/R) rho_S and
// Pi = rho p'(rho) - p(rho) for the barotropic laws p_A, p_S. The interior
// momentum equation is not satisfied by the ansatz; consistency_check reports
// its residual.

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsflow/residuals.hpp"

namespace bsflow {

class BubbleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BubbleParams {
  BarotropicLaw p_A, p_S;
  double mu_A = 0, lambda_A = 0;
  double mu_S = 0, lambda_S = 0;
  double pi_inf = 1.0;
};

struct BubbleState {
  double R = 1, U = 0, rho_A = 1, rho_S = 1;
};

class BubbleModel {
 public:
  explicit BubbleModel(BubbleParams params);
  const BubbleParams& params() const { return params_; }

  double Pi_A(double rho) const;
  double Pi_S(double rho) const;

  /// Time derivative of (R, U, rho_A, rho_S). Throws BubbleError unless R,
  /// rho_A, rho_S are positive and all entries finite.
  BubbleState rhs(const BubbleState& s) const;

  /// Interior plus surface viscous dissipation rate:
  /// 4 pi R (mu_A + 3 lambda_A) U^2 + 8 pi (mu_S + 2 lambda_S) U^2.
  double dissipation_rate(const BubbleState& s) const;
  /// Pressure work rate of A and S plus the ambient work:
  /// 4 pi R^2 U (Pi_A + 2 Pi_S / R - pi_inf).
  double work_rate(const BubbleState& s) const;
  /// Surface kinetic energy 2 pi R^2 rho_S U^2.
  double kinetic(const BubbleState& s) const;

  /// Radius of the static balance Pi_A(mA / R^3) - pi_inf + (2/R) Pi_S(mS / R^2) = 0
  /// for the mass invariants mA = rho_A R^3, mS = rho_S R^2, inside [lo, hi]
  /// (TOMS 748). Throws BubbleError if the bracket has no sign change.
  double equilibrium_radius(double mA, double mS, double lo, double hi) const;
  /// Interior density balancing the surface and ambient pressures at radius
  /// R: Pi_A(rho_A) = pi_inf - 2 Pi_S(rho_S) / R. Searches rho_A in
  /// [1e-12, 1e12]; throws BubbleError when no root is bracketed there.
  double balancing_density(double R, double rho_S) const;
  /// Small-oscillation period about a static balance at s.R (U ignored);
  /// for non-oscillatory balances a pressure time scale 2 pi sqrt(rho_S R / P)
  /// with P the largest pressure magnitude.
  double natural_period(const BubbleState& s) const;

 private:
  BubbleParams params_;
  expr::Program PiA_, PiS_;
};

struct BubbleRecord {
  double t = 0;
  BubbleState s;
  double mass_A = 0, mass_S = 0;  // rho_A 4 pi R^3 / 3, rho_S 4 pi R^2
  double kinetic = 0;
  double dissipated = 0;  // time integral of dissipation_rate
  double work = 0;        // time integral of work_rate
  double gap = 0;         // kinetic + dissipated - kinetic(0) - work
};

struct Trajectory {
  std::vector<BubbleRecord> records;
  bool halted = false;
  std::string diagnostic;
};

/// Classical RK4 with fixed step dt on (R, U, rho_A, rho_S) and the two
/// ledger integrals. Records every step. On an invalid state the run stops
/// and the trajectory up to the last valid step is returned with halted set.
Trajectory integrate(const BubbleModel& model, const BubbleState& s0, double t_end, double dt);

/// Fields of the ansatz on the sphere at record time, as a SystemState whose
/// time dependence is the second-order Taylor expansion of the trajectory
/// about that time (exact for first time derivatives). Phase B is at rest
/// with pressure pi_inf and no viscosity.
SystemState reconstruct(const BubbleModel& model, const BubbleRecord& rec, int r = 0);

struct BubbleConsistency {
  double mass_gap = 0;              // max relative change of the quadrature masses of A and S
  double invariant_drift = 0;       // max relative drift of rho_A R^3 and rho_S R^2
  double surface_momentum = 0;      // max |surface momentum residual| at nodes over samples
  double bulk_momentum = 0;         // max |interior momentum residual| (diagnostic)
  double energy_gap = 0;            // max |gap| / ledger scale over all records
  double rate_gap = 0;              // 3-D quadrature rates vs closed-form rates, relative
  int samples = 0;
};

/// Rebuilds 3-D fields at `samples` evenly spaced records and checks them
/// against the residuals and quadrature; quadrature uses N nodes.
BubbleConsistency consistency_check(const BubbleModel& model, const Trajectory& traj, int samples = 20,
                                    int N = 8, int r = 0);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int stride = 1);

}  // namespace bsflow
