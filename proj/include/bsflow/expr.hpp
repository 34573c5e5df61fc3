#pragma once

// Expression trees over (x1, x2, x3, t) with exact symbolic differentiation.
//
// Expr values are immutable and share structure, so a derivative tree is a
// DAG that reuses the nodes of its source. Evaluation of many expressions at
// many points goes through Program, which flattens the DAG once.

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bsflow::expr {

enum class Var : std::uint8_t { X1 = 0, X2 = 1, X3 = 2, T = 3 };

enum class Op : std::uint8_t {
  Const,
  Variable,
  Neg,
  Sin,
  Cos,
  Exp,
  Log,
  Sqrt,
  Tanh,
  Add,
  Sub,
  Mul,
  Div,
  Pow,  // exponent is a constant stored on the node
};

/// Evaluation point (x1, x2, x3, t).
using Point = std::array<double, 4>;

struct Node;

class Expr {
 public:
  Expr();  // constant 0
  Expr(double value);  // NOLINT(google-explicit-constructor): literals read naturally

  static Expr constant(double value);
  static Expr variable(Var v);

  Op op() const;
  /// Constant value (Const) or exponent (Pow).
  double value() const;
  Var var() const;
  const Expr& lhs() const;
  const Expr& rhs() const;

  bool is_constant() const { return op() == Op::Const; }
  bool is_constant(double v) const { return is_constant() && value() == v; }

  const Node* id() const { return node_.get(); }

 private:
  struct NullTag {};
  explicit Expr(NullTag) {}
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;

  friend struct Node;
  friend Expr make_node(Op, double, Var, Expr, Expr);
};

struct Node {
  Op op = Op::Const;
  double value = 0.0;
  Var var = Var::X1;
  Expr a{Expr::NullTag{}};
  Expr b{Expr::NullTag{}};
};

// Builders. These fold constants and drop additive zeros and unit factors;
// no other algebraic rewriting is done.
Expr neg(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);
Expr tanh(const Expr& a);
Expr pow(const Expr& base, double exponent);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

inline Expr x1() { return Expr::variable(Var::X1); }
inline Expr x2() { return Expr::variable(Var::X2); }
inline Expr x3() { return Expr::variable(Var::X3); }
inline Expr t() { return Expr::variable(Var::T); }

// ---------------------------------------------------------------------------
// Parsing

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Extra identifiers accepted by the parser, each bound to one of the four
/// variables. Used for one-variable laws such as p(rho).
using Aliases = std::map<std::string, Var, std::less<>>;

/// Parses the expression grammar:
///   expr   := term { ("+"|"-") term }
///   term   := factor { ("*"|"/") factor }
///   factor := base [ "^" number ] | "-" factor
///   base   := number | ident | func "(" expr ")" | "(" expr ")"
/// The exponent literal may carry a leading minus sign.
Expr parse(std::string_view src, const Aliases& aliases = {});

/// Fully parenthesized text that parses back to the same tree.
std::string to_string(const Expr& e);

/// Structural equality (constants compared bit for bit).
bool equal(const Expr& a, const Expr& b);

// ---------------------------------------------------------------------------
// Evaluation and differentiation

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Direct tree evaluation. Throws DomainError naming the offending subterm
/// for log of a nonpositive value, sqrt of a negative value, division by
/// zero, or a non-finite power.
double eval(const Expr& e, const Point& p);

/// Exact partial derivative.
Expr derivative(const Expr& e, Var v);

/// Replaces variables by expressions. Variables missing from the map stay.
Expr substitute(const Expr& e, const std::map<Var, Expr>& repl);

/// Number of distinct nodes in the DAG.
std::size_t dag_size(const Expr& e);

/// Flattened evaluator for a fixed list of expressions. Shared subterms are
/// evaluated once per call. Thread-safe for concurrent evaluate() calls with
/// caller-provided scratch.
class Program {
 public:
  Program() = default;
  explicit Program(std::span<const Expr> roots);
  explicit Program(std::initializer_list<Expr> roots)
      : Program(std::span<const Expr>(roots.begin(), roots.size())) {}

  std::size_t num_outputs() const { return outputs_.size(); }
  std::size_t num_instructions() const { return code_.size(); }

  /// Writes num_outputs() values into out. scratch is resized as needed.
  void evaluate(const Point& p, std::span<double> out, std::vector<double>& scratch) const;
  std::vector<double> evaluate(const Point& p) const;

 private:
  struct Instr {
    Op op;
    Var var;
    std::uint32_t a;
    std::uint32_t b;
    double value;
  };
  std::vector<Instr> code_;
  std::vector<std::uint32_t> outputs_;
  std::vector<Expr> roots_;  // keeps the DAG alive for error messages
  std::vector<Expr> nodes_;  // node per instruction, for error messages
};

}  // namespace bsflow::expr
