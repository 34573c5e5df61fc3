#include "bsflow/calculus.hpp"

namespace bsflow::calculus {

TensorField projection(const VectorField& n) { return identity_tensor() - outer(n, n); }

VectorField tangential_grad(const Expr& f, const VectorField& n) {
  const VectorField g = grad(f);
  const Expr nd = dot(n, g);
  return {g[0] - n[0] * nd, g[1] - n[1] * nd, g[2] - n[2] * nd};
}

TensorField surface_jacobian(const VectorField& V, const VectorField& n) {
  TensorField r;
  for (int i = 0; i < 3; ++i) r[i] = tangential_grad(V[i], n);
  return r;
}

Expr surface_divergence(const VectorField& V, const VectorField& n) {
  const TensorField J = surface_jacobian(V, n);
  return trace(J);
}

Expr tangential_directional(const VectorField& a, const Expr& f, const VectorField& n) {
  return dot(a, tangential_grad(f, n));
}

TensorField strain_bulk(const VectorField& v) {
  const TensorField J = jacobian(v);
  return Expr(0.5) * (J + transpose(J));
}

TensorField strain_surface(const VectorField& v, const VectorField& n) {
  const TensorField P = projection(n);
  const TensorField J = surface_jacobian(v, n);
  return Expr(0.5) * matmul(P, matmul(J + transpose(J), P));
}

TensorField strain_surface_ambient(const VectorField& v, const VectorField& n) {
  const TensorField P = projection(n);
  const TensorField J = jacobian(v);
  return Expr(0.5) * matmul(P, matmul(J + transpose(J), P));
}

TensorField strain_surface_components(const VectorField& v, const VectorField& n) {
  // dG[i][j] = d^G_i v_j
  std::array<VectorField, 3> dG;
  for (int j = 0; j < 3; ++j) {
    const VectorField g = tangential_grad(v[j], n);
    for (int i = 0; i < 3; ++i) dG[i][j] = g[i];
  }
  TensorField r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r[i][j] = Expr(0.5) * (dG[i][j] + dG[j][i] - n[i] * dot(n, dG[j]) - n[j] * dot(n, dG[i]));
  return r;
}

VectorField surface_div_tensor(const TensorField& T, const VectorField& n) {
  VectorField r;
  for (int i = 0; i < 3; ++i) r[i] = surface_divergence(T[i], n);
  return r;
}

Expr material_derivative(const Expr& f, const VectorField& v) {
  return time_derivative(f) + directional(v, f);
}

VectorField material_derivative(const VectorField& f, const VectorField& v) {
  return {material_derivative(f[0], v), material_derivative(f[1], v), material_derivative(f[2], v)};
}

Expr normal_time_derivative(const Expr& f, const VectorField& vS, const VectorField& n) {
  return time_derivative(f) + dot(vS, n) * directional(n, f);
}

VectorField normal_time_derivative(const VectorField& f, const VectorField& vS, const VectorField& n) {
  return {normal_time_derivative(f[0], vS, n), normal_time_derivative(f[1], vS, n),
          normal_time_derivative(f[2], vS, n)};
}

// ---------------------------------------------------------------------------
// Nodewise

namespace {

enum Tag { kGrad = 1, kJac, kTensorGrad, kNormalTime };

Eigen::Matrix3d chart_projection(const Eigen::Vector3d& n) {
  return Eigen::Matrix3d::Identity() - n * n.transpose();
}

}  // namespace

Eigen::Vector3d tangential_grad(const Expr& f, const SurfaceChart& chart, double u, double v, double t) {
  const ChartFrame fr = chart.frame(u, v, t);
  const Batch& b = cached_batch(kGrad, {f}, [&] {
    const VectorField g = grad(f);
    return std::vector<Expr>{g.begin(), g.end()};
  });
  std::vector<double> out, scratch;
  b.evaluate(point(fr.x, t), out, scratch);
  return chart_projection(fr.n) * Batch::vec(out, 0);
}

double surface_divergence(const VectorField& V, const SurfaceChart& chart, double u, double v, double t) {
  const ChartFrame fr = chart.frame(u, v, t);
  const Batch& b = cached_batch(kJac, {V[0], V[1], V[2]}, [&] {
    const TensorField J = jacobian(V);
    std::vector<Expr> r;
    for (const auto& row : J) r.insert(r.end(), row.begin(), row.end());
    return r;
  });
  std::vector<double> out, scratch;
  b.evaluate(point(fr.x, t), out, scratch);
  const Eigen::Matrix3d J = Batch::mat(out, 0);
  return (J * chart_projection(fr.n)).trace();
}

Eigen::Matrix3d strain_surface(const VectorField& vS, const SurfaceChart& chart, double u, double v,
                               double t) {
  const ChartFrame fr = chart.frame(u, v, t);
  const Batch& b = cached_batch(kJac, {vS[0], vS[1], vS[2]}, [&] {
    const TensorField J = jacobian(vS);
    std::vector<Expr> r;
    for (const auto& row : J) r.insert(r.end(), row.begin(), row.end());
    return r;
  });
  std::vector<double> out, scratch;
  b.evaluate(point(fr.x, t), out, scratch);
  const Eigen::Matrix3d P = chart_projection(fr.n);
  const Eigen::Matrix3d JG = Batch::mat(out, 0) * P;
  return 0.5 * P * (JG + JG.transpose()) * P;
}

Eigen::Vector3d surface_div_tensor(const TensorField& T, const SurfaceChart& chart, double u, double v,
                                   double t) {
  const ChartFrame fr = chart.frame(u, v, t);
  std::vector<Expr> inputs;
  for (const auto& row : T) inputs.insert(inputs.end(), row.begin(), row.end());
  const Batch& b = cached_batch(kTensorGrad, inputs, [&] {
    std::vector<Expr> r;
    for (const auto& row : T)
      for (const Expr& e : row) {
        const VectorField g = grad(e);
        r.insert(r.end(), g.begin(), g.end());
      }
    return r;
  });
  std::vector<double> out, scratch;
  b.evaluate(point(fr.x, t), out, scratch);
  const Eigen::Matrix3d P = chart_projection(fr.n);
  Eigen::Vector3d r;
  for (int i = 0; i < 3; ++i) {
    double s = 0;
    for (int j = 0; j < 3; ++j) {
      const Eigen::Vector3d g = Batch::vec(out, 9 * i + 3 * j);
      s += (P * g)[j];
    }
    r[i] = s;
  }
  return r;
}

double normal_time_derivative(const Expr& f, const VectorField& vS, const SurfaceChart& chart, double u,
                              double v, double t) {
  const ChartFrame fr = chart.frame(u, v, t);
  const Batch& b = cached_batch(kNormalTime, {f, vS[0], vS[1], vS[2]}, [&] {
    const VectorField g = grad(f);
    return std::vector<Expr>{time_derivative(f), g[0], g[1], g[2], vS[0], vS[1], vS[2]};
  });
  std::vector<double> out, scratch;
  b.evaluate(point(fr.x, t), out, scratch);
  const Eigen::Vector3d g = Batch::vec(out, 1);
  const Eigen::Vector3d w = Batch::vec(out, 4);
  return out[0] + w.dot(fr.n) * fr.n.dot(g);
}

}  // namespace bsflow::calculus
