#pragma once

// Materials, phase states and the constitutive quantities built from them:
// heat fluxes, energy densities, stresses, jump tractions, barotropic
// pressures, total energy and the surface energy jump.
//
// Bulk quantities are plain fields. Surface quantities take an extension n of
// the unit normal and are meaningful on Gamma only.

#include <string>
#include <variant>

#include "bsflow/calculus.hpp"
#include "bsflow/fields.hpp"

namespace bsflow {

enum class Phase { A = 0, B = 1, S = 2 };
const char* to_string(Phase p);
inline bool is_surface(Phase p) { return p == Phase::S; }

/// Density-only energy p(rho); the expression uses x1 as the density slot.
struct BarotropicLaw {
  Expr p;
  static BarotropicLaw parse(std::string_view src);  // accepts "rho" as the variable
};

/// e = cv theta, pi = R rho theta, entropy = cv log theta - R log rho.
struct IdealGas {
  double cv = 1.0;
  double R = 1.0;
};

struct PhaseMaterial {
  Phase phase = Phase::A;
  double mu = 0.0;
  double lambda = 0.0;
  double kappa = 0.0;
  /// monostate: pi and e are supplied as fields.
  std::variant<std::monostate, BarotropicLaw, IdealGas> eos;

  bool is_barotropic() const { return std::holds_alternative<BarotropicLaw>(eos); }
  bool is_ideal() const { return std::holds_alternative<IdealGas>(eos); }
  /// Throws std::invalid_argument on negative coefficients or bad EOS data.
  void validate() const;
};

struct PhaseState {
  Expr rho;
  VectorField v;
  Expr theta;
  Expr pi;
  Expr e;
};

/// Fills the EOS-derived fields: ideal gas sets e and pi; barotropic sets pi
/// to rho p'(rho) - p(rho). Supplied fields are overwritten only when derived.
PhaseState resolve(const PhaseMaterial& m, PhaseState s);

namespace constitutive {

VectorField heat_flux(const PhaseMaterial& m, const PhaseState& s);
VectorField heat_flux_surface(const PhaseMaterial& m, const PhaseState& s, const VectorField& n);

Expr dissipation_density(const PhaseMaterial& m, const PhaseState& s);
Expr dissipation_density_surface(const PhaseMaterial& m, const PhaseState& s, const VectorField& n);

Expr kinetic_density(const PhaseState& s);
Expr work_density(const PhaseState& s);
Expr work_density_surface(const PhaseState& s, const VectorField& n);
Expr thermal_density(const PhaseMaterial& m, const PhaseState& s);
Expr thermal_density_surface(const PhaseMaterial& m, const PhaseState& s, const VectorField& n);

TensorField stress(const PhaseMaterial& m, const PhaseState& s);
TensorField stress_surface(const PhaseMaterial& m, const PhaseState& s, const VectorField& n);

/// r = 0 form: mu n.(n.grad)v + lambda div v - pi.
Expr jump_traction_scalar(const PhaseMaterial& m, const PhaseState& s, const VectorField& n);
/// The traction vector entering the surface momentum balance: the r = 0
/// scalar acting along n, or T n for r = 1.
VectorField jump_traction(const PhaseMaterial& m, const PhaseState& s, const VectorField& n, int r);

/// rho p'(rho) - p(rho) for a barotropic material.
double barotropic_pressure(const PhaseMaterial& m, double rho);
double barotropic_pressure(const BarotropicLaw& law, double rho);
/// Same, as a field of the density field.
Expr barotropic_pressure(const BarotropicLaw& law, const Expr& rho);
/// p(rho) as a field.
Expr barotropic_potential(const BarotropicLaw& law, const Expr& rho);

/// rho |v|^2 / 2 + rho e.
Expr total_energy_density(const PhaseState& s);

/// T~_B n . v_S - T~_A n . v_S + q_B . n - q_A . n.
Expr energy_jump(const PhaseMaterial& mA, const PhaseState& A, const PhaseMaterial& mB, const PhaseState& B,
                 const PhaseState& S, const VectorField& n, int r);

struct EnergyJumpAtNode {
  double value;
  double coupling_residual;  // max of the interface conditions at the node
};

/// Nodewise energy jump with the chart normal. Throws std::runtime_error when
/// the interface coupling conditions are violated by more than tol.
EnergyJumpAtNode energy_jump(const PhaseMaterial& mA, const PhaseState& A, const PhaseMaterial& mB,
                             const PhaseState& B, const PhaseState& S, const SurfaceChart& chart, double u,
                             double v, double t, int r, double tol = 1e-10);

}  // namespace constitutive
}  // namespace bsflow
