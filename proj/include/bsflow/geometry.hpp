#pragma once

// Star-shaped moving surfaces x = R(u,v,t) w(u,v) about the origin, the
// regions they bound inside a ball of radius R_Omega, and tensor-product
// quadrature on all of them.
//
// Chart coordinates u in (0, pi), v in [0, 2pi). The ray direction is
// w = E / |E| with E = (a sin u cos v, b sin u sin v, c cos u); a = b = c = 1
// (polar angle and azimuth) except for ellipsoids, which use their own axes.
// Profiles are stored as Expr with u -> x1, v -> x2.

#include <cmath>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bsflow/fields.hpp"

namespace bsflow {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SurfaceKind { Sphere, Ellipsoid, PerturbedSphere };
const char* to_string(SurfaceKind k);

struct ChartFrame {
  Eigen::Vector3d x;
  Eigen::Vector3d n;  // outward unit normal
  double area = 0;    // |x_u x x_v|
  Eigen::Vector3d xu, xv;
};

struct RayFrame {
  Eigen::Vector3d w, wu, wv;  // direction and its chart derivatives
  double solid_angle = 0;     // |w . (w_u x w_v)|
};

class SurfaceChart {
 public:
  SurfaceChart();  // unit sphere
  /// Sphere of radius R(t).
  static SurfaceChart sphere(const Expr& radius);
  /// Ellipsoid x1^2/a^2 + x2^2/b^2 + x3^2/c^2 = s(t)^2.
  static SurfaceChart ellipsoid(double a, double b, double c, const Expr& scale = Expr(1.0));
  /// R(u,v,t) = R0(t) (1 + eps sin^2 u cos 2v).
  static SurfaceChart perturbed_sphere(const Expr& radius, double eps);

  SurfaceKind kind() const;
  std::string describe() const;

  /// R(u,v,t) with u -> x1, v -> x2.
  const Expr& profile() const;
  /// Level set, negative inside, zero on the surface.
  const Expr& level_set() const;
  /// grad(phi)/|grad(phi)|; equals n_Gamma on the surface.
  const VectorField& normal_field() const;

  RayFrame ray(double u, double v) const;
  ChartFrame frame(double u, double v, double t) const;
  Eigen::Vector3d point(double u, double v, double t) const { return frame(u, v, t).x; }
  Eigen::Vector3d normal(double u, double v, double t) const { return frame(u, v, t).n; }
  Eigen::Matrix3d projection(double u, double v, double t) const;
  /// H = -div_Gamma n, via the tangential divergence of normal_field().
  double mean_curvature(double u, double v, double t) const;
  /// Normal velocity of the surface, -d_t phi / |grad phi|.
  double normal_speed(double u, double v, double t) const;

 private:
  struct Impl;
  explicit SurfaceChart(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

enum class Region { A, B };

struct DomainConfig {
  SurfaceChart surface;
  double outer_radius = 3.0;
  int r = 0;  // 1: slip, 0: no slip

  /// Throws GeometryError unless r is 0 or 1 and the surface stays strictly
  /// inside the outer ball at every node for the sampled times.
  void validate(const std::vector<double>& times, int N = 24) const;
};

// ---------------------------------------------------------------------------
// Quadrature

struct GaussRule {
  std::vector<double> x, w;
};
/// n-point Gauss-Legendre on (a, b).
GaussRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

struct QuadratureRule {
  int N = 24;
  /// Polar extent: nodes cover u in (0, cap). cap < pi gives a cone region.
  double cap = std::numbers::pi;
};

struct SurfaceNode {
  double u, v, t;
  Eigen::Vector3d x, n;
  double w;
  Point p() const { return point(x, t); }
};

struct VolumeNode {
  double u, v, s, t;
  Eigen::Vector3d x;
  double w;
  Point p() const { return point(x, t); }
};

/// N Gauss nodes in cos u (interior to (0, cap)), 2N trapezoid nodes in v.
std::vector<SurfaceNode> surface_nodes(const SurfaceChart& chart, const QuadratureRule& q, double t);
/// Sphere |x| = R_Omega with n = x/R_Omega.
std::vector<SurfaceNode> outer_nodes(const DomainConfig& d, const QuadratureRule& q, double t);
/// Volume coordinates (s, u, v), s in (0, 1): x = s X(u,v) in A; in B the
/// segment from X(u,v) to the outer-sphere point with spherical angles (u, v).
/// For charts in spherical angles both are the radial rays.
struct VolumeFrame {
  Eigen::Vector3d x, xs, xu, xv;
  double jacobian = 0;  // x_s . (x_u x x_v)
};
VolumeFrame volume_frame(const DomainConfig& d, Region region, double s, double u, double v, double t);

/// Gauss rule in s times the angular rule.
std::vector<VolumeNode> volume_nodes(const DomainConfig& d, Region region, const QuadratureRule& q,
                                     double t);

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double s = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      c_ += (sum_ - s) + x;
    } else {
      c_ += (x - s) + sum_;
    }
    sum_ = s;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0, c_ = 0;
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[noreturn]] void throw_nonfinite(double value, const Eigen::Vector3d& x, double t);

template <class Node, class F>
double integrate(const std::vector<Node>& nodes, F&& f) {
  CompensatedSum s;
  for (const Node& nd : nodes) {
    const double y = f(nd);
    if (!std::isfinite(y)) throw_nonfinite(y, nd.x, nd.t);
    s.add(nd.w * y);
  }
  return s.value();
}

/// Integrates several expressions over one node set with one compiled pass.
template <class Node>
std::vector<double> integrate_many(const std::vector<Node>& nodes, std::span<const Expr> integrands) {
  expr::Program prog(integrands);
  std::vector<CompensatedSum> acc(integrands.size());
  std::vector<double> out(integrands.size()), scratch;
  for (const Node& nd : nodes) {
    prog.evaluate(nd.p(), out, scratch);
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (!std::isfinite(out[k])) throw_nonfinite(out[k], nd.x, nd.t);
      acc[k].add(nd.w * out[k]);
    }
  }
  std::vector<double> r(acc.size());
  for (std::size_t k = 0; k < acc.size(); ++k) r[k] = acc[k].value();
  return r;
}

double integrate_surface(const SurfaceChart& chart, const QuadratureRule& q, double t, const Expr& f);
double integrate_volume(const DomainConfig& d, Region region, const QuadratureRule& q, double t,
                        const Expr& f);
double integrate_outer_boundary(const DomainConfig& d, const QuadratureRule& q, double t, const Expr& f);

}  // namespace bsflow
