#pragma once

// Pointwise residuals of the governing system (continuity, internal energy,
// momentum), their conservative forms, the boundary and coupling conditions,
// and manufactured sources.
//
// Surface residuals are built with the level-set extension of n and are only
// evaluated at points of Gamma.

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bsflow/constitutive.hpp"
#include "bsflow/geometry.hpp"

namespace bsflow {

/// Right-hand sides that turn arbitrary fields into an exact solution.
struct PhaseSources {
  Expr continuity;
  Expr energy;
  VectorField momentum{};
};

struct SystemState {
  std::array<PhaseMaterial, 3> materials;
  std::array<PhaseState, 3> states;  // resolved through the EOS
  DomainConfig domain;
  std::optional<std::array<PhaseSources, 3>> sources;

  /// Resolves EOS-derived fields and validates the materials.
  static SystemState make(const std::array<PhaseMaterial, 3>& materials, const std::array<PhaseState, 3>& raw,
                          const DomainConfig& domain);

  const PhaseMaterial& material(Phase p) const { return materials[static_cast<int>(p)]; }
  const PhaseState& state(Phase p) const { return states[static_cast<int>(p)]; }
  int r() const { return domain.r; }
  /// Level-set extension of n_Gamma.
  const VectorField& normal() const { return domain.surface.normal_field(); }
};

enum class Equation { Continuity, Energy, Momentum, ConservativeMass, ConservativeEnergy, ConservativeMomentum };
const char* to_string(Equation e);
inline bool is_vector(Equation e) { return e == Equation::Momentum || e == Equation::ConservativeMomentum; }

/// All residual fields of one phase, net of sources when present.
struct ResidualFields {
  Expr continuity;
  Expr energy;
  VectorField momentum;
  Expr cons_mass;
  Expr cons_energy;
  VectorField cons_momentum;
  /// Continuity, energy and momentum written without sources: the
  /// combination the conservative forms must reproduce.
  Expr cons_energy_expected;
  VectorField cons_momentum_expected;
};

ResidualFields residual_fields(const SystemState& sys, Phase phase);

/// Unsourced residuals of the raw fields; used to manufacture sources.
ResidualFields raw_residual_fields(const SystemState& sys, Phase phase);

/// Returns sys with sources equal to its own residuals, so the residuals of
/// the result vanish identically.
SystemState with_manufactured_sources(SystemState sys);

class RegionError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Throws RegionError unless p lies in the closure of the phase's region
/// (A: inside Gamma, B: between Gamma and the outer sphere, S: on Gamma).
void require_in_region(const SystemState& sys, Phase phase, const Point& p, double tol = 1e-9);

double continuity_residual(const SystemState& sys, Phase phase, const Point& p);
double energy_residual(const SystemState& sys, Phase phase, const Point& p);
Eigen::Vector3d momentum_residual(const SystemState& sys, Phase phase, const Point& p);

struct ConservativeResidual {
  double mass;
  double energy;
  Eigen::Vector3d momentum;
};
ConservativeResidual conservative_residual(const SystemState& sys, Phase phase, const Point& p);

/// Compiled evaluator for all residuals of one phase; build once, evaluate
/// at many points.
class ResidualEvaluator {
 public:
  ResidualEvaluator(const SystemState& sys, Phase phase);
  struct Values {
    double continuity, energy;
    Eigen::Vector3d momentum;
    double cons_mass, cons_energy;
    Eigen::Vector3d cons_momentum;
    /// Conservative minus the matching combination of the plain forms.
    double energy_form_gap;
    Eigen::Vector3d momentum_form_gap;
  };
  /// Throws RegionError for points outside the phase's region.
  Values operator()(const Point& p) const;

 private:
  SystemState sys_;
  Phase phase_;
  Batch batch_;
};

struct ResidualReport {
  Equation equation;
  Phase phase;
  double norm_inf = 0;
  double norm_l2 = 0;
  double node_u = 0, node_v = 0, t = 0;  // location of the largest violation
};

/// Norms of one residual over the quadrature nodes of the phase.
ResidualReport residual_report(const SystemState& sys, Equation eq, Phase phase, const QuadratureRule& q,
                               double t);
/// All equations for all phases.
std::vector<ResidualReport> residual_reports(const SystemState& sys, const QuadratureRule& q, double t);

void write_residual_csv(std::ostream& os, const std::vector<ResidualReport>& reports);

struct BoundaryCondition {
  std::string name;
  double max_abs;
};

/// Max-abs over nodes of every boundary and coupling condition.
std::vector<BoundaryCondition> boundary_residual(const SystemState& sys, const QuadratureRule& q, double t);

}  // namespace bsflow
