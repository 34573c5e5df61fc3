#include "bsflow/geometry.hpp"

#include <cstdio>
#include <sstream>

#include "bsflow/calculus.hpp"

namespace bsflow {

using expr::x1;
using expr::x2;
using expr::x3;

const char* to_string(SurfaceKind k) {
  switch (k) {
    case SurfaceKind::Sphere: return "sphere";
    case SurfaceKind::Ellipsoid: return "ellipsoid";
    case SurfaceKind::PerturbedSphere: return "perturbed_sphere";
  }
  return "?";
}

struct SurfaceChart::Impl {
  SurfaceKind kind;
  std::string description;
  Expr profile;
  Expr level;
  Eigen::Vector3d axes{1.0, 1.0, 1.0};  // angular map w = E / |E|
  VectorField normal;
  expr::Program profile_prog;  // R, R_u, R_v
  expr::Program normal_prog;   // normal extension at a point
  expr::Program speed_prog;    // d_t phi, |grad phi|

  void finish() {
    const Expr du = expr::derivative(profile, Var::X1);
    const Expr dv = expr::derivative(profile, Var::X2);
    profile_prog = expr::Program{profile, du, dv};
    const VectorField g = grad(level);
    const Expr gn = expr::sqrt(dot(g, g));
    normal = {g[0] / gn, g[1] / gn, g[2] / gn};
    normal_prog = expr::Program{normal[0], normal[1], normal[2]};
    speed_prog = expr::Program{time_derivative(level), gn};
  }
};

namespace {

Expr radius_expr() { return expr::sqrt(x1() * x1() + x2() * x2() + x3() * x3()); }

// Chart-coordinate forms of w with u -> x1, v -> x2.
Expr omega1() { return expr::sin(x1()) * expr::cos(x2()); }
Expr omega2() { return expr::sin(x1()) * expr::sin(x2()); }
Expr omega3() { return expr::cos(x1()); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SurfaceChart::SurfaceChart() : SurfaceChart(sphere(Expr(1.0))) {}

SurfaceChart SurfaceChart::sphere(const Expr& radius) {
  auto im = std::make_shared<Impl>();
  im->kind = SurfaceKind::Sphere;
  im->description = "sphere R=" + expr::to_string(radius);
  im->profile = radius;
  im->level = radius_expr() - radius;
  im->finish();
  return SurfaceChart(std::move(im));
}

SurfaceChart SurfaceChart::ellipsoid(double a, double b, double c, const Expr& scale) {
  if (!(a > 0 && b > 0 && c > 0)) throw GeometryError("ellipsoid axes must be positive");
  auto im = std::make_shared<Impl>();
  im->kind = SurfaceKind::Ellipsoid;
  im->description = "ellipsoid axes=(" + fmt(a) + "," + fmt(b) + "," + fmt(c) +
                    ") scale=" + expr::to_string(scale);
  // Ellipsoidal angles: the point scale * E(u, v) lies on the surface, so the
  // chart stays analytic near the poles for elongated axes.
  im->axes = {a, b, c};
  const Expr e1 = Expr(a) * omega1(), e2 = Expr(b) * omega2(), e3 = Expr(c) * omega3();
  im->profile = scale * expr::sqrt(e1 * e1 + e2 * e2 + e3 * e3);
  const Expr qx = x1() * x1() / Expr(a * a) + x2() * x2() / Expr(b * b) + x3() * x3() / Expr(c * c);
  im->level = expr::sqrt(qx) - scale;
  im->finish();
  return SurfaceChart(std::move(im));
}

SurfaceChart SurfaceChart::perturbed_sphere(const Expr& radius, double eps) {
  if (!(std::abs(eps) < 0.5)) throw GeometryError("perturbation amplitude must satisfy |eps| < 0.5");
  auto im = std::make_shared<Impl>();
  im->kind = SurfaceKind::PerturbedSphere;
  im->description = "perturbed_sphere R0=" + expr::to_string(radius) + " eps=" + fmt(eps);
  // sin^2 u cos 2v = w1^2 - w2^2
  const Expr y = expr::pow(expr::sin(x1()), 2.0) * expr::cos(Expr(2.0) * x2());
  im->profile = radius * (Expr(1.0) + Expr(eps) * y);
  const Expr r = radius_expr();
  const Expr yx = (x1() * x1() - x2() * x2()) / (r * r);
  im->level = r - radius * (Expr(1.0) + Expr(eps) * yx);
  im->finish();
  return SurfaceChart(std::move(im));
}

SurfaceKind SurfaceChart::kind() const { return impl_->kind; }
std::string SurfaceChart::describe() const { return impl_->description; }
const Expr& SurfaceChart::profile() const { return impl_->profile; }
const Expr& SurfaceChart::level_set() const { return impl_->level; }
const VectorField& SurfaceChart::normal_field() const { return impl_->normal; }

ChartFrame SurfaceChart::frame(double u, double v, double t) const {
  double vals[3];
  std::vector<double> scratch;
  impl_->profile_prog.evaluate({u, v, 0.0, t}, vals, scratch);
  const double R = vals[0], Ru = vals[1], Rv = vals[2];
  if (!(R > 0)) throw GeometryError("nonpositive radial profile at u=" + fmt(u) + " v=" + fmt(v));
  const RayFrame ray_f = ray(u, v);
  const Eigen::Vector3d &w = ray_f.w, &wu = ray_f.wu, &wv = ray_f.wv;
  const double su = std::sin(u);
  ChartFrame f;
  f.x = R * w;
  f.xu = Ru * w + R * wu;
  f.xv = Rv * w + R * wv;
  const Eigen::Vector3d c = f.xu.cross(f.xv);
  f.area = c.norm();
  if (f.area > 1e-13 * R * R) {
    f.n = c / f.area;
    return f;
  }
  if (su < 1e-8) {
    // Pole: the chart degenerates; use the limit given by the level set.
    double nv[3];
    impl_->normal_prog.evaluate(bsflow::point(f.x, t), nv, scratch);
    f.n = Eigen::Vector3d(nv[0], nv[1], nv[2]);
    return f;
  }
  throw GeometryError("rank-deficient chart tangents at u=" + fmt(u) + " v=" + fmt(v));
}

RayFrame SurfaceChart::ray(double u, double v) const {
  const Eigen::Vector3d& ax = impl_->axes;
  const double su = std::sin(u), cu = std::cos(u), sv = std::sin(v), cv = std::cos(v);
  const Eigen::Vector3d E(ax[0] * su * cv, ax[1] * su * sv, ax[2] * cu);
  const Eigen::Vector3d Eu(ax[0] * cu * cv, ax[1] * cu * sv, -ax[2] * su);
  const Eigen::Vector3d Ev(-ax[0] * su * sv, ax[1] * su * cv, 0.0);
  const double L = E.norm();
  RayFrame r;
  r.w = E / L;
  r.wu = Eu / L - E * (E.dot(Eu) / (L * L * L));
  r.wv = Ev / L - E * (E.dot(Ev) / (L * L * L));
  r.solid_angle = ax[0] * ax[1] * ax[2] * su / (L * L * L);
  return r;
}

Eigen::Matrix3d SurfaceChart::projection(double u, double v, double t) const {
  const Eigen::Vector3d n = normal(u, v, t);
  return Eigen::Matrix3d::Identity() - n * n.transpose();
}

double SurfaceChart::mean_curvature(double u, double v, double t) const {
  return -calculus::surface_divergence(impl_->normal, *this, u, v, t);
}

double SurfaceChart::normal_speed(double u, double v, double t) const {
  const Eigen::Vector3d x = point(u, v, t);
  double out[2];
  std::vector<double> scratch;
  impl_->speed_prog.evaluate(bsflow::point(x, t), out, scratch);
  return -out[0] / out[1];
}

void DomainConfig::validate(const std::vector<double>& times, int N) const {
  if (r != 0 && r != 1) throw GeometryError("slip flag r must be 0 or 1, got " + std::to_string(r));
  if (!(outer_radius > 0)) throw GeometryError("outer radius must be positive");
  for (double t : times) {
    for (const SurfaceNode& nd : surface_nodes(surface, {N, std::numbers::pi}, t)) {
      if (!(nd.x.norm() < outer_radius)) {
        throw GeometryError("surface leaves the outer ball at t=" + fmt(t) + " (|x|=" +
                            fmt(nd.x.norm()) + ", R_Omega=" + fmt(outer_radius) + ")");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Quadrature

GaussRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussRule g;
  g.x.resize(n);
  g.w.resize(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    g.x[i] = mid - half * z;
    g.x[n - 1 - i] = mid + half * z;
    g.w[i] = g.w[n - 1 - i] = half * w;
  }
  return g;
}

namespace {

struct Angular {
  GaussRule u;
  std::vector<double> v;
  double wv;
};

Angular angular(const QuadratureRule& q) {
  if (q.N < 1) throw std::invalid_argument("quadrature N must be positive");
  Angular a;
  // Gauss-Legendre in z = cos u; the weights carry du = dz / sin u so that
  // callers keep multiplying by the sin u of the area element.
  const GaussRule z = gauss_legendre(q.N, std::cos(q.cap), 1.0);
  a.u.x.resize(q.N);
  a.u.w.resize(q.N);
  for (int i = 0; i < q.N; ++i) {
    a.u.x[i] = std::acos(z.x[i]);
    a.u.w[i] = z.w[i] / std::sin(a.u.x[i]);
  }
  const int nv = 2 * q.N;
  a.v.resize(nv);
  for (int k = 0; k < nv; ++k) a.v[k] = 2.0 * std::numbers::pi * k / nv;
  a.wv = 2.0 * std::numbers::pi / nv;
  return a;
}

}  // namespace

std::vector<SurfaceNode> surface_nodes(const SurfaceChart& chart, const QuadratureRule& q, double t) {
  const Angular a = angular(q);
  std::vector<SurfaceNode> nodes;
  nodes.reserve(a.u.x.size() * a.v.size());
  for (std::size_t i = 0; i < a.u.x.size(); ++i) {
    for (double v : a.v) {
      const double u = a.u.x[i];
      const ChartFrame f = chart.frame(u, v, t);
      nodes.push_back({u, v, t, f.x, f.n, a.u.w[i] * a.wv * f.area});
    }
  }
  return nodes;
}

std::vector<SurfaceNode> outer_nodes(const DomainConfig& d, const QuadratureRule& q, double t) {
  const Angular a = angular(q);
  const double R = d.outer_radius;
  std::vector<SurfaceNode> nodes;
  nodes.reserve(a.u.x.size() * a.v.size());
  for (std::size_t i = 0; i < a.u.x.size(); ++i) {
    for (double v : a.v) {
      const double u = a.u.x[i];
      const Eigen::Vector3d w(std::sin(u) * std::cos(v), std::sin(u) * std::sin(v), std::cos(u));
      nodes.push_back({u, v, t, R * w, w, a.u.w[i] * a.wv * R * R * std::sin(u)});
    }
  }
  return nodes;
}

VolumeFrame volume_frame(const DomainConfig& d, Region region, double s, double u, double v, double t) {
  const ChartFrame g = d.surface.frame(u, v, t);
  VolumeFrame f;
  if (region == Region::A) {
    f.x = s * g.x;
    f.xs = g.x;
    f.xu = s * g.xu;
    f.xv = s * g.xv;
  } else {
    // Straight segment from the surface point to the outer-sphere point with
    // the same spherical angles.
    const double Ro = d.outer_radius;
    const double su = std::sin(u), cu = std::cos(u), sv = std::sin(v), cv = std::cos(v);
    const Eigen::Vector3d o(Ro * su * cv, Ro * su * sv, Ro * cu);
    const Eigen::Vector3d ou(Ro * cu * cv, Ro * cu * sv, -Ro * su);
    const Eigen::Vector3d ov(-Ro * su * sv, Ro * su * cv, 0.0);
    f.x = g.x + s * (o - g.x);
    f.xs = o - g.x;
    f.xu = g.xu + s * (ou - g.xu);
    f.xv = g.xv + s * (ov - g.xv);
  }
  f.jacobian = f.xs.dot(f.xu.cross(f.xv));
  return f;
}

std::vector<VolumeNode> volume_nodes(const DomainConfig& d, Region region, const QuadratureRule& q,
                                     double t) {
  const Angular a = angular(q);
  const GaussRule s = gauss_legendre(q.N, 0.0, 1.0);
  std::vector<VolumeNode> nodes;
  nodes.reserve(a.u.x.size() * a.v.size() * s.x.size());
  for (std::size_t i = 0; i < a.u.x.size(); ++i) {
    const double u = a.u.x[i];
    for (double v : a.v) {
      const double wa = a.u.w[i] * a.wv;
      for (std::size_t k = 0; k < s.x.size(); ++k) {
        const VolumeFrame f = volume_frame(d, region, s.x[k], u, v, t);
        if (!(f.jacobian > 0)) {
          throw GeometryError("degenerate volume map for region " + std::string(region == Region::A ? "A" : "B") +
                              " at t=" + fmt(t) + " (surface leaves the outer ball?)");
        }
        nodes.push_back({u, v, s.x[k], t, f.x, wa * s.w[k] * f.jacobian});
      }
    }
  }
  return nodes;
}

void throw_nonfinite(double value, const Eigen::Vector3d& x, double t) {
  std::ostringstream os;
  os.precision(17);
  os << "non-finite integrand value " << value << " at x=(" << x[0] << ", " << x[1] << ", " << x[2]
     << "), t=" << t;
  throw IntegrationError(os.str());
}

double integrate_surface(const SurfaceChart& chart, const QuadratureRule& q, double t, const Expr& f) {
  return integrate_many(surface_nodes(chart, q, t), std::span<const Expr>(&f, 1))[0];
}

double integrate_volume(const DomainConfig& d, Region region, const QuadratureRule& q, double t,
                        const Expr& f) {
  return integrate_many(volume_nodes(d, region, q, t), std::span<const Expr>(&f, 1))[0];
}

double integrate_outer_boundary(const DomainConfig& d, const QuadratureRule& q, double t, const Expr& f) {
  return integrate_many(outer_nodes(d, q, t), std::span<const Expr>(&f, 1))[0];
}

}  // namespace bsflow
