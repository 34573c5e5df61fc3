#pragma once

// Integral-level checks: transport theorems on moving regions, the three
// integration-by-parts formulas, the first law in both forms, and the global
// conservation audits for mass, total energy, kinetic energy and momentum.

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsflow/residuals.hpp"

namespace bsflow {

enum class Moving { A, B, Gamma };
const char* to_string(Moving m);

class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integral of f over the region (or its cone cap q.cap) at time t.
double region_integral(const DomainConfig& d, Moving region, const Expr& f, const QuadratureRule& q, double t);
std::vector<double> region_integrals(const DomainConfig& d, Moving region, std::span<const Expr> f,
                                     const QuadratureRule& q, double t);

/// Fourth-order central difference of g at t with step h.
template <class G>
double central_difference(G&& g, double t, double h) {
  const double d1 = g(t + h) - g(t - h);
  const double d2 = g(t + 2 * h) - g(t - 2 * h);
  return (8 * d1 - d2) / (12 * h);
}

struct TransportResult {
  double lhs = 0, rhs = 0, gap = 0;
  double motion_mismatch = 0;  // max |V_Gamma - v.n| (and |v.n| on the outer sphere for B)
};

/// d/dt of the moving integral of f against the integral of D_t f + (div v) f
/// (tangential divergence on Gamma). h is the time step of the difference.
/// Throws PreconditionError when the chart motion disagrees with v . n by
/// more than motion_tol; for caps, also when v crosses the cone.
TransportResult transport_check(const DomainConfig& d, Moving region, const Expr& f, const VectorField& v,
                                const QuadratureRule& q, double t, double h, double motion_tol = 1e-9);

enum class IbpKind { BulkA, BulkB, Surface };
const char* to_string(IbpKind k);

struct IbpResult {
  double lhs = 0, rhs = 0, gap = 0;
};

/// Both sides of the integration-by-parts formula of the given kind, with
/// every integral evaluated separately.
IbpResult ibp_check(const DomainConfig& d, IbpKind kind, const Expr& f, const Expr& g, int j,
                    const QuadratureRule& q, double t);

struct IbpCase {
  std::string f, g;
  int j;
};
/// Twelve fixed (f, g, j) combinations of monomials and trigonometric terms.
const std::vector<IbpCase>& ibp_corpus();

enum class FirstLawForm { Internal, Barotropic };

struct FirstLawResult {
  Phase phase;
  double lhs = 0, rhs = 0, gap = 0;
};

/// Both sides of the first law for each phase at time t over the region
/// (or cap). Q~ = Q + e_D with Q the heat supply, plus the energy source in
/// sourced mode. Throws PreconditionError if the continuity residual exceeds
/// continuity_tol at the nodes, or if the barotropic form is requested for
/// a material without a barotropic law.
std::vector<FirstLawResult> first_law_check(const SystemState& sys, FirstLawForm form, const QuadratureRule& q,
                                            double t, double h, double continuity_tol = 1e-9,
                                            const std::vector<Phase>& phases = {Phase::A, Phase::B, Phase::S});

enum class Law { Mass, Energy, Kinetic, Momentum };
const char* to_string(Law l);

struct AuditResult {
  Law law;
  double t1 = 0, t2 = 0;
  double lhs = 0, rhs = 0, gap = 0;
  double tol = 0;
  bool pass = false;
  std::vector<std::string> notes;  // boundary and source contributions, preconditions
};

struct AuditOptions {
  QuadratureRule q{16};
  int time_nodes = 8;  // Gauss-Legendre nodes in t
  double tol = 1e-7;
  /// Relative tolerance: gap is compared with tol * max(1, |lhs|, |rhs|).
  bool relative = false;
  double precondition_tol = 1e-9;
};

/// Evaluates both sides of the selected law between t1 and t2:
///   lhs = value(t2) [+ dissipation for the kinetic law],
///   rhs = value(t1) + time integrals of outer-boundary fluxes and sources
///         [+ pressure work for the kinetic law].
/// The outer-boundary fluxes vanish under the boundary conditions. Without
/// sources, the governing residuals, the boundary conditions (and for
/// momentum r = 1 and the outer traction balance) are checked at the time
/// nodes; violations throw PreconditionError listing every failed item.
AuditResult conservation_audit(const SystemState& sys, Law law, double t1, double t2,
                               const AuditOptions& opt = {});

void write_audit_csv(std::ostream& os, const std::vector<AuditResult>& audits);

}  // namespace bsflow
