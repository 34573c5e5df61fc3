#pragma once

// Bulk and tangential differential operators.
//
// Surface fields are ambient fields restricted to Gamma(t); tangential
// derivatives are projected ambient derivatives,
//   d^G_i f = d_i f - n_i (n . grad f).
// The expression-level forms take an extension n of the unit normal and are
// meaningful on Gamma only. The nodewise forms take the chart normal.

#include <Eigen/Dense>

#include "bsflow/fields.hpp"
#include "bsflow/geometry.hpp"

namespace bsflow::calculus {

// ---------------------------------------------------------------------------
// Expression level

TensorField projection(const VectorField& n);
VectorField tangential_grad(const Expr& f, const VectorField& n);
Expr surface_divergence(const VectorField& V, const VectorField& n);
/// [grad_G V]_ij = d^G_j V_i.
TensorField surface_jacobian(const VectorField& V, const VectorField& n);
/// (a . grad_G) f.
Expr tangential_directional(const VectorField& a, const Expr& f, const VectorField& n);

/// (grad v + grad v^T)/2.
TensorField strain_bulk(const VectorField& v);
/// P (grad_G v + grad_G v^T) P / 2.
TensorField strain_surface(const VectorField& v, const VectorField& n);
/// P (grad v + grad v^T) P / 2.
TensorField strain_surface_ambient(const VectorField& v, const VectorField& n);
/// Componentwise: d^G_i v_j + d^G_j v_i - n_i (n . d^G_j v) - n_j (n . d^G_i v), halved.
TensorField strain_surface_components(const VectorField& v, const VectorField& n);

/// Row-wise tangential divergence, sum_j d^G_j T_ij.
VectorField surface_div_tensor(const TensorField& T, const VectorField& n);

/// d_t f + (v . grad) f.
Expr material_derivative(const Expr& f, const VectorField& v);
VectorField material_derivative(const VectorField& f, const VectorField& v);
/// d_t f + (v_S . n)(n . grad) f.
Expr normal_time_derivative(const Expr& f, const VectorField& vS, const VectorField& n);
VectorField normal_time_derivative(const VectorField& f, const VectorField& vS, const VectorField& n);

// ---------------------------------------------------------------------------
// Nodewise on a chart

Eigen::Vector3d tangential_grad(const Expr& f, const SurfaceChart& chart, double u, double v, double t);
double surface_divergence(const VectorField& V, const SurfaceChart& chart, double u, double v, double t);
Eigen::Matrix3d strain_surface(const VectorField& vS, const SurfaceChart& chart, double u, double v,
                               double t);
Eigen::Vector3d surface_div_tensor(const TensorField& T, const SurfaceChart& chart, double u, double v,
                                   double t);
double normal_time_derivative(const Expr& f, const VectorField& vS, const SurfaceChart& chart, double u,
                              double v, double t);

}  // namespace bsflow::calculus
