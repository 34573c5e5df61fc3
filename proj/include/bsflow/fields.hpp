#pragma once

// Scalar, vector and 3x3 tensor fields over (x1, x2, x3, t), built from Expr.
// Tensor divergence is taken row by row: (div T)_i = sum_j d_j T_ij.

#include <array>
#include <functional>
#include <string_view>

#include <Eigen/Dense>

#include "bsflow/expr.hpp"

namespace bsflow {

using expr::Expr;
using expr::Point;
using expr::Var;

using ScalarField = Expr;
using VectorField = std::array<Expr, 3>;
using TensorField = std::array<std::array<Expr, 3>, 3>;

inline Point point(const Eigen::Vector3d& x, double t) { return {x[0], x[1], x[2], t}; }

inline constexpr Var kSpace[3] = {Var::X1, Var::X2, Var::X3};

VectorField position();
VectorField constant_vector(double a, double b, double c);
VectorField parse_vector(std::string_view a, std::string_view b, std::string_view c);

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(const Expr& s, const VectorField& a);
Expr dot(const VectorField& a, const VectorField& b);
VectorField cross(const VectorField& a, const VectorField& b);

TensorField operator+(const TensorField& a, const TensorField& b);
TensorField operator-(const TensorField& a, const TensorField& b);
TensorField operator*(const Expr& s, const TensorField& a);
TensorField identity_tensor();
TensorField zero_tensor();
TensorField transpose(const TensorField& a);
TensorField outer(const VectorField& a, const VectorField& b);
TensorField matmul(const TensorField& a, const TensorField& b);
VectorField matvec(const TensorField& a, const VectorField& v);
Expr frobenius(const TensorField& a, const TensorField& b);
Expr trace(const TensorField& a);

// Bulk operators, exact through expr::derivative.
Expr time_derivative(const Expr& f);
VectorField time_derivative(const VectorField& f);
VectorField grad(const Expr& f);
Expr div(const VectorField& v);
/// [grad v]_ij = d_j v_i.
TensorField jacobian(const VectorField& v);
Expr laplacian(const Expr& f);
/// Row-wise divergence.
VectorField div_tensor(const TensorField& t);
/// Directional derivative (a . grad) f.
Expr directional(const VectorField& a, const Expr& f);
VectorField directional(const VectorField& a, const VectorField& f);

// Nodewise evaluation helpers.
Eigen::Vector3d eval(const VectorField& v, const Point& p);
Eigen::Matrix3d eval(const TensorField& t, const Point& p);

/// Compiled evaluator for a batch of scalar expressions; results are read
/// back into small Eigen objects by the caller.
class Batch {
 public:
  Batch() = default;
  std::size_t add(const Expr& e);
  std::size_t add(const VectorField& v);  // returns index of first component
  std::size_t add(const TensorField& t);  // row-major, 9 slots
  void compile();
  bool compiled() const { return compiled_; }
  std::size_t size() const { return roots_.size(); }

  void evaluate(const Point& p, std::vector<double>& out, std::vector<double>& scratch) const;

  static Eigen::Vector3d vec(const std::vector<double>& out, std::size_t i) {
    return {out[i], out[i + 1], out[i + 2]};
  }
  static Eigen::Matrix3d mat(const std::vector<double>& out, std::size_t i) {
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = out[i + 3 * r + c];
    return m;
  }

 private:
  std::vector<Expr> roots_;
  expr::Program program_;
  bool compiled_ = false;
};

/// Per-thread cache of compiled batches keyed by (tag, identity of the input
/// expressions). build() produces the roots on a miss. Used by the nodewise
/// convenience APIs so repeated calls do not rebuild or recompile.
const Batch& cached_batch(int tag, const std::vector<Expr>& inputs,
                          const std::function<std::vector<Expr>()>& build);

}  // namespace bsflow
