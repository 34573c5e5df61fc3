#pragma once

// Dissipation functionals E_D, E_W, E_TD and checks that their Gateaux
// derivatives match the divergence-form forces and heat terms under
// admissible variations.

#include <ostream>
#include <string>
#include <vector>

#include "bsflow/residuals.hpp"
#include "bsflow/rng.hpp"

namespace bsflow {

class AdmissibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Free data for make_admissible. phi_S and psi_S are the surface values;
/// the *_free fields shape the extensions away from Gamma.
struct VariationSeeds {
  VectorField phi_S, phi_A_free, phi_B_free;
  Expr psi_S, psi_A_free, psi_B_free;
};

VariationSeeds random_seeds(Rng& rng, double amplitude = 1.0);

struct AdmissibleVariation {
  int r = 0;
  double t = 0;  // the fields are frozen at this time
  VectorField phi_A, phi_B, phi_S;
  Expr psi_A, psi_B, psi_S;

  AdmissibleVariation scaled(double s) const;
};

/// Builds variations satisfying the velocity and temperature admissibility
/// conditions at time t. With l the level set and m = (phi_S.n)n + r P phi_S:
///   phi_A = exp(-(l/w)^2) m + l a,  phi_B = om (m + l b),  phi_S = seed,
///   psi_A = psi_S + l a',           psi_B = om^2 (psi_S + l b'),
/// where om = (R_Omega^2 - |x|^2) / (R_Omega^2 - |x|^2 + l) is 1 on Gamma and
/// 0 on the outer sphere. psi_B therefore vanishes there with zero normal
/// derivative. width <= 0 selects w = 0.3 min(shell thickness, inner radius).
/// Throws std::invalid_argument if r is not 0/1 or width exceeds the inner
/// radius or the shell thickness.
AdmissibleVariation make_admissible(const VariationSeeds& seeds, int r, const DomainConfig& d, double t,
                                    double width = 0.0);

/// Max-abs over chart nodes of every admissibility condition.
std::vector<BoundaryCondition> admissibility_residual(const AdmissibleVariation& var, const DomainConfig& d,
                                                      const QuadratureRule& q);

enum class Functional { D, W, TD, DW };
const char* to_string(Functional f);

/// Sum of the bulk and surface integrals of the selected functional at t.
double functional(const SystemState& sys, Functional f, const QuadratureRule& q, double t);

struct GateauxResult {
  double side_a = 0;  // difference quotient of the functional in eps
  double side_b = 0;  // integral of the forces (heat terms) against the variation
  double gap = 0;
  double side_a_coarse = 0;  // difference quotient at twice the step
};

struct GateauxOptions {
  QuadratureRule q{24};
  double eps_step = 1e-2;
  double admissibility_tol = 1e-10;
};

/// d/d eps of E_{D+W}[v + eps phi] at 0 against the integrals of div T_A,
/// div T_B and div_Gamma T_S + T~_B n - T~_A n. Throws AdmissibilityError when
/// the variation violates its conditions or its slip flag differs from the
/// state's.
GateauxResult gateaux_gap_velocity(const SystemState& sys, const AdmissibleVariation& var,
                                   const GateauxOptions& opt = {});

/// Same for E_TD[theta + eps psi] against div(k grad theta) in the bulk and
/// div_Gamma(k_S grad_Gamma theta_S) + k_B dn theta_B - k_A dn theta_A on Gamma.
GateauxResult gateaux_gap_temperature(const SystemState& sys, const AdmissibleVariation& var,
                                      const GateauxOptions& opt = {});

struct GateauxRecord {
  std::string theorem;  // "velocity" or "temperature"
  int r = 0;
  int variation_id = 0;
  GateauxResult result;
  bool pass = false;
};

void write_gateaux_csv(std::ostream& os, const std::vector<GateauxRecord>& records);

}  // namespace bsflow
