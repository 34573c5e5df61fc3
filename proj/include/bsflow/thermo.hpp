#pragma once

// Thermodynamic potentials (enthalpy, entropy, Helmholtz and Gibbs free
// energies), the balance equations they satisfy when the system and the
// Gibbs relation hold, the material-derivative identities among them, and
// the entropy production.
//
// With sources present the equations carry the source terms that follow from
// the sourced continuity and energy equations; see potential_residual.

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bsflow/residuals.hpp"

namespace bsflow {

class ThermoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ThermoFields {
  Expr e, h, entropy, helmholtz, gibbs;
};

/// h = e + pi/rho, F^H = e - theta s, F^G = h - theta s. The entropy is
/// cv log theta - R log rho for an ideal gas; other materials need it
/// supplied. Throws ThermoError otherwise.
ThermoFields thermo_fields(const PhaseMaterial& m, const PhaseState& s, const std::optional<Expr>& entropy = {});

enum class Potential { Enthalpy, Entropy, Helmholtz, Gibbs };
const char* to_string(Potential p);

enum class MaterialIdentity {
  Energy,     // rho D e  = theta rho D s - pi rho D(1/rho)
  Enthalpy,   // rho D h  = theta rho D s + D pi
  Helmholtz,  // rho D F^H = -s rho D theta - pi rho D(1/rho)
  Gibbs,      // rho D F^G = -s rho D theta + D pi
  StressPower,           // T : D = e_D - (div v) pi
  HelmholtzDissipation,  // rho D F^H + rho s D theta - T : D = -e_D
  Trace,                 // I : D = div v (P : D_Gamma = div_Gamma v)
  SpecificVolume,        // rho D(1/rho) = div v
};
inline constexpr int kMaterialIdentities = 8;
const char* to_string(MaterialIdentity m);

struct ThermoOptions {
  double tol = 1e-7;
  /// Require the continuity and energy residuals and the Gibbs relation to
  /// be below tol at the point.
  bool check_preconditions = true;
};

/// Compiled evaluator of every thermodynamic quantity of a state. Points must
/// lie in the closure of the phase's region (on Gamma for S); rho and theta
/// must be positive there.
class ThermoModel {
 public:
  explicit ThermoModel(const SystemState& sys, const std::array<std::optional<Expr>, 3>& entropy = {});

  const SystemState& system() const { return sys_; }
  const ThermoFields& fields(Phase p) const { return fields_[static_cast<int>(p)]; }

  /// Signed D_t e - theta D_t s + pi D_t(1/rho).
  double gibbs_residual(Phase p, const Point& x) const;
  double identity_gap(Phase p, const Point& x) const;

  /// Signed residual of the selected balance, net of source terms:
  ///   enthalpy : d_t(rho h) + div(rho h v - q) - e_D - D_t pi [- jump] - (s_e + e s_c)
  ///   entropy  : d_t(rho s) + div(rho s v - q/theta) - e_D/theta - q.grad theta/theta^2
  ///              [- jump/theta] - ((s_e - pi s_c/rho)/theta + s s_c)
  ///   helmholtz: rho D_t F^H + rho s D_t theta + (div v) pi - pi s_c/rho
  ///   gibbs    : rho D_t F^G + rho s D_t theta - D_t pi
  /// On Gamma, d_t is the normal time derivative, div is div_Gamma and
  /// jump = q_B.n - q_A.n. Throws PreconditionError listing every violated
  /// precondition when opt.check_preconditions is set.
  double potential_residual(Potential which, Phase p, const Point& x, const ThermoOptions& opt = {}) const;
  double potential_gap(Potential which, Phase p, const Point& x, const ThermoOptions& opt = {}) const;

  /// e_D/theta + kappa |grad theta|^2 / theta^2 (tangential gradient on Gamma).
  double entropy_production(Phase p, const Point& x) const;

  /// Absolute gaps of the eight identities; no preconditions.
  std::array<double, kMaterialIdentities> material_identities(Phase p, const Point& x) const;

  /// |h - e - pi/rho|, |F^H - e + theta s|, |F^G - h + theta s|.
  std::array<double, 3> construction_gaps(Phase p, const Point& x) const;

  /// Signed continuity residual net of sources.
  double continuity_residual(Phase p, const Point& x) const;
  double energy_residual(Phase p, const Point& x) const;

 private:
  friend std::vector<struct ThermoRecord> thermo_report(const ThermoModel&, const QuadratureRule&, double, double);
  std::vector<double> values(Phase p, const Point& x) const;
  SystemState sys_;
  std::array<ThermoFields, 3> fields_;
  std::array<expr::Program, 3> programs_;
};

struct ThermoRecord {
  std::string identity;
  Phase phase;
  double node_u = 0, node_v = 0, t = 0;  // location of the largest gap
  double gap = 0;
  bool pass = false;
};

/// Largest gap over the quadrature nodes of every phase for the construction
/// identities, the Gibbs relation, the four balances, the eight material
/// identities and the entropy production (gap = max(0, -production)).
/// Balances are evaluated without preconditions; the residuals they rest on
/// are reported as "continuity" and "energy".
std::vector<ThermoRecord> thermo_report(const ThermoModel& model, const QuadratureRule& q, double t,
                                        double tol = 1e-7);

void write_thermo_csv(std::ostream& os, const std::vector<ThermoRecord>& records);

}  // namespace bsflow
