#pragma once

// Closed-form states used as oracles by tests, the acceptance suite and the
// CLI. Each builder returns a SystemState whose residuals vanish exactly
// (up to roundoff) unless stated otherwise. docs/fixtures.md has the
// derivations.

#include "bsflow/residuals.hpp"
#include "bsflow/rng.hpp"

namespace bsflow::fixtures {

/// Sphere R(t) = 1 + alpha t expanding inside a fixed ball. A expands
/// uniformly, B is the potential flow that vanishes on the outer sphere, S
/// carries the pressure that balances the radial stresses. Temperatures and
/// energies make the internal-energy equations and all coupling conditions
/// hold.
struct ExpandingBubble {
  double alpha = 0.2;
  double outer_radius = 3.0;
  double rho_A0 = 1.0;   // rho_A R^3
  double rho_S0 = 0.5;   // rho_S R^2
  double rho_BK = 40.0;  // rho_B (R_Omega^3 - R^3)
  double pi_A = 1.5;
  double pi_B0 = 1.0;    // additive pressure level in B
  double theta0 = 2.0;
  double e_B = 1.0;
  double mu_A = 0.3, lambda_A = 0.1, kappa_A = 0.4;
  double mu_B = 0.2, lambda_B = 0.05, kappa_B = 0.7;
  double mu_S = 0.1, lambda_S = 0.05, kappa_S = 0.3;
  int r = 0;
};
SystemState expanding_bubble(const ExpandingBubble& p = {});

/// A: rho = (1+t)^-3, v = x/(1+t) on the sphere R = 1+t; B: the potential
/// flow c (R_Omega^3 x / |x|^3 - x) with c = R^2 / (R_Omega^3 - R^3) and
/// density (R_Omega^3 - 1) / (R_Omega^3 - R^3); S: rho = (1+t)^-2,
/// v = x/(1+t). Only continuity and the normal velocity matching are exact.
SystemState continuity_fixture(double outer_radius = 3.0);

/// p(rho) = rho^2 on A and S with the continuity-fixture density and
/// velocity, and internal energies solving the barotropic first law with
/// zero heat flux. B is at rest with zero energy and has no barotropic law.
struct BarotropicExpansion {
  double mu_A = 0.3, lambda_A = 0.2;
  double mu_S = 0.15, lambda_S = 0.1;
};
SystemState barotropic_expansion(const BarotropicExpansion& p = {});

/// Ideal-gas uniform expansion on R = 1 + alpha t. Temperatures are uniform
/// and solve the internal-energy equation in A and S separately; B is at
/// rest. Coupling conditions are not imposed.
struct IdealExpansion {
  double alpha = 0.3;
  double rho_A0 = 1.2, rho_S0 = 0.7;
  double cv = 2.5, Rgas = 0.8;
  double C_A = 1.5, C_S = 2.0;
  double mu_A = 0.3, lambda_A = 0.1;
  double mu_S = 0.2, lambda_S = 0.1;
};
SystemState ideal_expansion(const IdealExpansion& p = {});

/// Static equilibrium on a sphere of radius R: v = 0, constant pressures
/// with pi_A = pi_B - 2 pi_S / R (pi_S < 0 is a positive tension) and uniform
/// temperature.
SystemState young_laplace(double R, double pi_B, double pi_S, int r = 0);

/// Random state with zero continuity residual in every phase, on a sphere
/// that expands and rotates with the material. The density profiles are
/// random functions of Lagrangian coordinates; velocities, temperatures and
/// the remaining fields are random smooth functions with the given slip
/// flag. Energies are supplied directly (no EOS).
SystemState random_lagrangian(Rng& rng, int r = 1);

/// Random smooth fields in every phase on the given domain: positive
/// densities and temperatures, random viscosities and conductivities, no EOS.
/// Residuals are not small.
SystemState random_smooth_state(Rng& rng, const DomainConfig& domain);

/// Random smooth scalar field: a constant plus a few modes sin(k.x + w t + c).
Expr random_smooth(Rng& rng, double base = 0.0, double amplitude = 1.0, int modes = 3);
VectorField random_smooth_vector(Rng& rng, double amplitude = 1.0, int modes = 3);

/// Random bulk state with zero continuity residual: rho = c + div G and
/// rho v = -d_t G + curl A.
PhaseState random_continuity_exact_bulk(Rng& rng);

}  // namespace bsflow::fixtures
