#include "bsflow/expr.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <unordered_map>

namespace bsflow::expr {

namespace {

const std::shared_ptr<const Node>& zero_node() {
  static const auto z = std::make_shared<const Node>();
  return z;
}

bool is_unary(Op op) {
  switch (op) {
    case Op::Neg:
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Log:
    case Op::Sqrt:
    case Op::Tanh:
    case Op::Pow:
      return true;
    default:
      return false;
  }
}

const char* func_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Tanh: return "tanh";
    default: return "?";
  }
}

const char* var_name(Var v) {
  switch (v) {
    case Var::X1: return "x1";
    case Var::X2: return "x2";
    case Var::X3: return "x3";
    case Var::T: return "t";
  }
  return "?";
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Expr make_node(Op op, double value, Var var, Expr a, Expr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = value;
  n->var = var;
  n->a = std::move(a);
  n->b = std::move(b);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr::Expr() : node_(zero_node()) {}
Expr::Expr(double value) : Expr(constant(value)) {}

Expr Expr::constant(double value) {
  if (value == 0.0 && !std::signbit(value)) return Expr();
  return make_node(Op::Const, value, Var::X1, Expr(NullTag{}), Expr(NullTag{}));
}

Expr Expr::variable(Var v) {
  static const std::array<Expr, 4> vars = [] {
    std::array<Expr, 4> out;
    for (int i = 0; i < 4; ++i)
      out[i] = make_node(Op::Variable, 0.0, static_cast<Var>(i), Expr(NullTag{}), Expr(NullTag{}));
    return out;
  }();
  return vars[static_cast<int>(v)];
}

Op Expr::op() const { return node_->op; }
double Expr::value() const { return node_->value; }
Var Expr::var() const { return node_->var; }
const Expr& Expr::lhs() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }

// ---------------------------------------------------------------------------
// Builders

namespace {

Expr unary(Op op, const Expr& a, double (*f)(double)) {
  if (a.is_constant()) {
    const double v = f(a.value());
    if (std::isfinite(v)) return Expr::constant(v);
  }
  return make_node(op, 0.0, Var::X1, a, Expr());
}

}  // namespace

Expr neg(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.value());
  if (a.op() == Op::Neg) return a.lhs();
  return make_node(Op::Neg, 0.0, Var::X1, a, Expr());
}

Expr sin(const Expr& a) { return unary(Op::Sin, a, [](double x) { return std::sin(x); }); }
Expr cos(const Expr& a) { return unary(Op::Cos, a, [](double x) { return std::cos(x); }); }
Expr exp(const Expr& a) { return unary(Op::Exp, a, [](double x) { return std::exp(x); }); }
Expr tanh(const Expr& a) { return unary(Op::Tanh, a, [](double x) { return std::tanh(x); }); }
Expr log(const Expr& a) {
  if (a.is_constant() && a.value() <= 0.0) return make_node(Op::Log, 0.0, Var::X1, a, Expr());
  return unary(Op::Log, a, [](double x) { return std::log(x); });
}
Expr sqrt(const Expr& a) {
  if (a.is_constant() && a.value() < 0.0) return make_node(Op::Sqrt, 0.0, Var::X1, a, Expr());
  return unary(Op::Sqrt, a, [](double x) { return std::sqrt(x); });
}

Expr pow(const Expr& base, double exponent) {
  if (exponent == 1.0) return base;
  if (exponent == 0.0) return Expr::constant(1.0);
  if (base.is_constant()) {
    const double v = std::pow(base.value(), exponent);
    if (std::isfinite(v)) return Expr::constant(v);
  }
  return make_node(Op::Pow, exponent, Var::X1, base, Expr());
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() + b.value());
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return make_node(Op::Add, 0.0, Var::X1, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() - b.value());
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return neg(b);
  return make_node(Op::Sub, 0.0, Var::X1, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() * b.value());
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr();
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  return make_node(Op::Mul, 0.0, Var::X1, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && b.value() != 0.0)
    return Expr::constant(a.value() / b.value());
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(0.0) && !b.is_constant()) return Expr();
  return make_node(Op::Div, 0.0, Var::X1, a, b);
}

Expr operator-(const Expr& a) { return neg(a); }

// ---------------------------------------------------------------------------
// Parser

ParseError::ParseError(const std::string& msg, std::size_t offset)
    : std::runtime_error(msg + " at byte " + std::to_string(offset)), offset_(offset) {}

namespace {

class Parser {
 public:
  Parser(std::string_view src, const Aliases& aliases) : src_(src), aliases_(aliases) {}

  Expr run() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
      ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) {
      if (pos_ >= src_.size()) fail(std::string("expected '") + c + "' but reached end of input");
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    while (true) {
      if (peek('+')) {
        ++pos_;
        lhs = lhs + parse_term();
      } else if (peek('-')) {
        ++pos_;
        lhs = lhs - parse_term();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    while (true) {
      if (peek('*')) {
        ++pos_;
        lhs = lhs * parse_factor();
      } else if (peek('/')) {
        ++pos_;
        lhs = lhs / parse_factor();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_factor() {
    if (peek('-')) {
      ++pos_;
      return neg(parse_factor());
    }
    Expr base = parse_base();
    if (peek('^')) {
      ++pos_;
      skip_ws();
      bool negative = false;
      if (pos_ < src_.size() && src_[pos_] == '-') {
        negative = true;
        ++pos_;
        skip_ws();
      }
      if (pos_ >= src_.size() || !(std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
        fail("non-constant exponent");
      const double n = parse_number();
      return pow(base, negative ? -n : n);
    }
    return base;
  }

  double parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t n = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) {
        pos_ = save;
        fail("malformed exponent in number");
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (ec != std::errc() || ptr != src_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return v;
  }

  Expr parse_base() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Expr::constant(parse_number());
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      const std::string_view name = src_.substr(start, pos_ - start);
      if (name == "x1") return x1();
      if (name == "x2") return x2();
      if (name == "x3") return x3();
      if (name == "t") return t();
      if (name == "pi") return Expr::constant(std::numbers::pi);
      if (auto it = aliases_.find(name); it != aliases_.end()) return Expr::variable(it->second);
      static constexpr std::array<std::pair<std::string_view, Expr (*)(const Expr&)>, 6> funcs{{
          {"sin", &sin},
          {"cos", &cos},
          {"exp", &exp},
          {"log", &log},
          {"sqrt", &sqrt},
          {"tanh", &tanh},
      }};
      for (const auto& [fname, fn] : funcs) {
        if (name == fname) {
          expect('(');
          Expr arg = parse_expr();
          expect(')');
          return fn(arg);
        }
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view src_;
  const Aliases& aliases_;
  std::size_t pos_ = 0;
};

void print(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::Const:
      if (std::signbit(e.value())) {
        out += "(-";
        out += format_number(-e.value());
        out += ')';
      } else {
        out += format_number(e.value());
      }
      return;
    case Op::Variable:
      out += var_name(e.var());
      return;
    case Op::Neg:
      out += "(-";
      print(e.lhs(), out);
      out += ')';
      return;
    case Op::Pow:
      out += '(';
      print(e.lhs(), out);
      out += ")^";
      out += format_number(e.value());
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      static constexpr char sym[] = {'+', '-', '*', '/'};
      out += '(';
      print(e.lhs(), out);
      out += sym[static_cast<int>(e.op()) - static_cast<int>(Op::Add)];
      print(e.rhs(), out);
      out += ')';
      return;
    }
    default:
      out += func_name(e.op());
      out += '(';
      print(e.lhs(), out);
      out += ')';
      return;
  }
}

}  // namespace

Expr parse(std::string_view src, const Aliases& aliases) {
  for (std::size_t i = 0; i < src.size(); ++i)
    if (static_cast<unsigned char>(src[i]) > 127) throw ParseError("non-ASCII character", i);
  return Parser(src, aliases).run();
}

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

bool equal(const Expr& a, const Expr& b) {
  if (a.id() == b.id()) return true;
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::Const:
      return std::bit_cast<std::uint64_t>(a.value()) == std::bit_cast<std::uint64_t>(b.value());
    case Op::Variable:
      return a.var() == b.var();
    case Op::Pow:
      return a.value() == b.value() && equal(a.lhs(), b.lhs());
    default:
      if (is_unary(a.op())) return equal(a.lhs(), b.lhs());
      return equal(a.lhs(), b.lhs()) && equal(a.rhs(), b.rhs());
  }
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

[[noreturn]] void domain_fail(const char* what, double arg, const Expr& at) {
  throw DomainError(std::string(what) + " (argument " + format_number(arg) + ") in " + to_string(at));
}

inline double apply(Op op, double a, double b, double value, const Expr* at) {
  switch (op) {
    case Op::Neg: return -a;
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Exp: return std::exp(a);
    case Op::Tanh: return std::tanh(a);
    case Op::Log:
      if (!(a > 0.0)) domain_fail("log of nonpositive value", a, *at);
      return std::log(a);
    case Op::Sqrt:
      if (!(a >= 0.0)) domain_fail("sqrt of negative value", a, *at);
      return std::sqrt(a);
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div:
      if (b == 0.0) domain_fail("division by zero", a, *at);
      return a / b;
    case Op::Pow: {
      double r;
      if (value == 2.0) {
        r = a * a;
      } else if (value == 3.0) {
        r = a * a * a;
      } else {
        r = std::pow(a, value);
      }
      if (!std::isfinite(r) && std::isfinite(a)) domain_fail("non-finite power", a, *at);
      return r;
    }
    default:
      return 0.0;
  }
}

double eval_rec(const Expr& e, const Point& p) {
  switch (e.op()) {
    case Op::Const: return e.value();
    case Op::Variable: return p[static_cast<int>(e.var())];
    default: break;
  }
  const double a = eval_rec(e.lhs(), p);
  const double b = is_unary(e.op()) ? 0.0 : eval_rec(e.rhs(), p);
  return apply(e.op(), a, b, e.value(), &e);
}

}  // namespace

double eval(const Expr& e, const Point& p) { return eval_rec(e, p); }

// ---------------------------------------------------------------------------
// Differentiation and substitution

namespace {

class Differentiator {
 public:
  explicit Differentiator(Var v) : v_(v) {}

  Expr d(const Expr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Expr r = compute(e);
    memo_.emplace(e.id(), r);
    keep_.push_back(e);
    return r;
  }

 private:
  Expr compute(const Expr& e) {
    switch (e.op()) {
      case Op::Const: return Expr();
      case Op::Variable: return e.var() == v_ ? Expr(1.0) : Expr();
      case Op::Neg: return neg(d(e.lhs()));
      default: break;
    }
    const Expr& a = e.lhs();
    const Expr da = d(a);
    switch (e.op()) {
      case Op::Sin: return da.is_constant(0.0) ? Expr() : cos(a) * da;
      case Op::Cos: return da.is_constant(0.0) ? Expr() : neg(sin(a)) * da;
      case Op::Exp: return e * da;
      case Op::Log: return da / a;
      case Op::Sqrt: return da.is_constant(0.0) ? Expr() : da / (Expr(2.0) * e);
      case Op::Tanh: return da.is_constant(0.0) ? Expr() : (Expr(1.0) - pow(e, 2.0)) * da;
      case Op::Pow: {
        if (da.is_constant(0.0)) return Expr();
        const double n = e.value();
        return Expr(n) * pow(a, n - 1.0) * da;
      }
      default: break;
    }
    const Expr& b = e.rhs();
    const Expr db = d(b);
    switch (e.op()) {
      case Op::Add: return da + db;
      case Op::Sub: return da - db;
      case Op::Mul: return da * b + a * db;
      case Op::Div: return (da - e * db) / b;
      default: return Expr();
    }
  }

  Var v_;
  std::unordered_map<const Node*, Expr> memo_;
  std::vector<Expr> keep_;  // pins keys so node addresses stay unique
};

class Substituter {
 public:
  explicit Substituter(const std::map<Var, Expr>& repl) : repl_(repl) {}

  Expr s(const Expr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Expr r = compute(e);
    memo_.emplace(e.id(), r);
    keep_.push_back(e);
    return r;
  }

 private:
  Expr compute(const Expr& e) {
    switch (e.op()) {
      case Op::Const: return e;
      case Op::Variable: {
        auto it = repl_.find(e.var());
        return it == repl_.end() ? e : it->second;
      }
      case Op::Neg: return neg(s(e.lhs()));
      case Op::Sin: return sin(s(e.lhs()));
      case Op::Cos: return cos(s(e.lhs()));
      case Op::Exp: return exp(s(e.lhs()));
      case Op::Log: return log(s(e.lhs()));
      case Op::Sqrt: return sqrt(s(e.lhs()));
      case Op::Tanh: return tanh(s(e.lhs()));
      case Op::Pow: return pow(s(e.lhs()), e.value());
      case Op::Add: return s(e.lhs()) + s(e.rhs());
      case Op::Sub: return s(e.lhs()) - s(e.rhs());
      case Op::Mul: return s(e.lhs()) * s(e.rhs());
      case Op::Div: return s(e.lhs()) / s(e.rhs());
    }
    return e;
  }

  const std::map<Var, Expr>& repl_;
  std::unordered_map<const Node*, Expr> memo_;
  std::vector<Expr> keep_;
};

}  // namespace

Expr derivative(const Expr& e, Var v) { return Differentiator(v).d(e); }

Expr substitute(const Expr& e, const std::map<Var, Expr>& repl) { return Substituter(repl).s(e); }

// ---------------------------------------------------------------------------
// Program

namespace {

class Flattener {
 public:
  std::uint32_t visit(const Expr& e) {
    if (auto it = index_.find(e.id()); it != index_.end()) return it->second;
    std::uint32_t a = 0, b = 0;
    if (e.op() != Op::Const && e.op() != Op::Variable) {
      a = visit(e.lhs());
      if (!is_unary(e.op())) b = visit(e.rhs());
    }
    const auto idx = static_cast<std::uint32_t>(nodes.size());
    nodes.push_back(e);
    ops.push_back({e.op(), e.var(), a, b, e.value()});
    index_.emplace(e.id(), idx);
    return idx;
  }

  struct Raw {
    Op op;
    Var var;
    std::uint32_t a, b;
    double value;
  };
  std::vector<Expr> nodes;
  std::vector<Raw> ops;

 private:
  std::unordered_map<const Node*, std::uint32_t> index_;
};

}  // namespace

Program::Program(std::span<const Expr> roots) : roots_(roots.begin(), roots.end()) {
  Flattener f;
  outputs_.reserve(roots.size());
  for (const Expr& r : roots) outputs_.push_back(f.visit(r));
  code_.reserve(f.ops.size());
  for (const auto& o : f.ops) code_.push_back({o.op, o.var, o.a, o.b, o.value});
  nodes_ = std::move(f.nodes);
}

void Program::evaluate(const Point& p, std::span<double> out, std::vector<double>& scratch) const {
  if (scratch.size() < code_.size()) scratch.resize(code_.size());
  double* r = scratch.data();
  const std::size_t n = code_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Instr& in = code_[i];
    switch (in.op) {
      case Op::Const: r[i] = in.value; break;
      case Op::Variable: r[i] = p[static_cast<int>(in.var)]; break;
      case Op::Add: r[i] = r[in.a] + r[in.b]; break;
      case Op::Sub: r[i] = r[in.a] - r[in.b]; break;
      case Op::Mul: r[i] = r[in.a] * r[in.b]; break;
      case Op::Neg: r[i] = -r[in.a]; break;
      default: r[i] = apply(in.op, r[in.a], r[in.b], in.value, &nodes_[i]); break;
    }
  }
  for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = r[outputs_[k]];
}

std::vector<double> Program::evaluate(const Point& p) const {
  std::vector<double> out(outputs_.size());
  std::vector<double> scratch;
  evaluate(p, out, scratch);
  return out;
}

std::size_t dag_size(const Expr& e) {
  Flattener f;
  f.visit(e);
  return f.nodes.size();
}

}  // namespace bsflow::expr
