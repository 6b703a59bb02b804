#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "myller/dual.hpp"
#include "myller/errors.hpp"
#include "myller/kernel.hpp"

namespace myller::expr {

// Half-open byte range [begin, end) into the source text, 0-based.
struct Span {
  std::size_t begin = 0, end = 0;
};

// Offsets reported by SyntaxError are 1-based byte columns.
class SyntaxError : public ValidationError {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found);
  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class UnknownFunction : public ValidationError {
 public:
  UnknownFunction(const std::string& name, Span span)
      : ValidationError("UnknownFunction: '" + name + "'"), name_(name), span_(span) {}
  const std::string& name() const noexcept { return name_; }
  Span span() const noexcept { return span_; }

 private:
  std::string name_;
  Span span_;
};

class UnknownVariable : public ValidationError {
 public:
  explicit UnknownVariable(const std::string& name)
      : ValidationError("UnknownVariable: '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class EvalDomainError : public GeometricError {
 public:
  EvalDomainError(const std::string& what, Span span, const std::string& snippet)
      : GeometricError("EvalDomainError: " + what + " in '" + snippet + "'"), span_(span), snippet_(snippet) {}
  Span span() const noexcept { return span_; }
  const std::string& snippet() const noexcept { return snippet_; }

 private:
  Span span_;
  std::string snippet_;
};

enum class Fn { sin, cos, tan, asin, acos, atan, sqrt, exp, log, sinh, cosh, tanh, abs };
std::optional<Fn> lookup_function(const std::string& name);
const char* function_name(Fn f);

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { number, variable, unary, binary, call };
  Kind kind = Kind::number;
  double number = 0;   // number
  std::string name;    // variable
  char op = 0;         // unary '-', binary + - * / ^
  Fn fn = Fn::sin;     // call
  std::vector<NodePtr> children;
  Span span;
};

struct Ast {
  NodePtr root;
  std::string source;
};

Ast parse(const std::string& text);
// Fully parenthesized text; parse(print(a)) is structurally equal to a.
std::string print(const Ast& a);
std::string print(const Node& n);
bool structurally_equal(const Node& a, const Node& b);
// Variable names referenced by the tree, sorted and unique (constants excluded).
std::vector<std::string> free_variables(const Ast& a);

// Flat postfix form produced at bind time.
struct Instr {
  enum class Op { push, var, neg, add, sub, mul, div, pow, call };
  Op op = Op::push;
  double number = 0;
  std::size_t slot = 0;
  Fn fn = Fn::sin;
  Span span;
};

namespace detail {

inline double apply(Fn f, double x) {
  switch (f) {
    case Fn::sin: return std::sin(x);
    case Fn::cos: return std::cos(x);
    case Fn::tan: return std::tan(x);
    case Fn::asin: return std::asin(x);
    case Fn::acos: return std::acos(x);
    case Fn::atan: return std::atan(x);
    case Fn::sqrt: return std::sqrt(x);
    case Fn::exp: return std::exp(x);
    case Fn::log: return std::log(x);
    case Fn::sinh: return std::sinh(x);
    case Fn::cosh: return std::cosh(x);
    case Fn::tanh: return std::tanh(x);
    case Fn::abs: return std::abs(x);
  }
  return 0;
}

template <class T>
Dual<T> apply(Fn f, const Dual<T>& x) {
  switch (f) {
    case Fn::sin: return sin(x);
    case Fn::cos: return cos(x);
    case Fn::tan: return tan(x);
    case Fn::asin: return asin(x);
    case Fn::acos: return acos(x);
    case Fn::atan: return atan(x);
    case Fn::sqrt: return sqrt(x);
    case Fn::exp: return exp(x);
    case Fn::log: return log(x);
    case Fn::sinh: return sinh(x);
    case Fn::cosh: return cosh(x);
    case Fn::tanh: return tanh(x);
    case Fn::abs: return abs_value(x);
  }
  return x;
}

[[noreturn]] void domain_error(const std::string& what, Span span, const std::string& source);

}  // namespace detail

// A real function of named variables, backed by an expression or by grid samples.
class ScalarFunction {
 public:
  ScalarFunction() = default;
  // Parses text and binds it against the declared variables (UnknownVariable on mismatch).
  static ScalarFunction expression(const std::string& text, std::vector<std::string> variables);
  static ScalarFunction constant(double c, std::vector<std::string> variables);
  // One-variable sample backing on a grid.
  static ScalarFunction samples(std::vector<double> values, Grid grid, std::string variable = "s");

  bool expression_backed() const { return !sampled_; }
  const std::vector<std::string>& variables() const { return vars_; }
  const Ast& ast() const { return ast_; }
  const std::string& text() const { return ast_.source; }
  const std::vector<double>& sample_values() const { return values_; }
  const Grid& sample_grid() const { return grid_; }
  std::size_t slot(const std::string& var) const;

  // Bindings are given in declared-variable order.
  double eval(const std::vector<double>& bindings) const;
  double eval(const std::map<std::string, double>& bindings) const;
  double operator()(double x) const { return eval(std::vector<double>{x}); }
  // (value, derivative) with respect to variable slot `seed`.
  std::pair<double, double> eval_dual(const std::vector<double>& bindings, std::size_t seed) const;

  // Generic evaluation for expression-backed functions.
  template <class T>
  T eval_as(const T* args) const;

 private:
  std::vector<std::string> vars_;
  Ast ast_;
  std::vector<Instr> prog_;
  bool sampled_ = false;
  std::vector<double> values_;
  Grid grid_;
};

// d f / d var at the point: exact duals for expressions, grid stencils for samples.
double differentiate(const ScalarFunction& f, const std::string& var, const std::vector<double>& point);

template <class T>
T ScalarFunction::eval_as(const T* args) const {
  if (sampled_) throw InvalidArgument("generic evaluation needs an expression-backed function");
  T stack[64] = {};
  std::vector<T> heap;
  std::size_t top = 0;
  const bool big = prog_.size() > 64;
  if (big) heap.resize(prog_.size());
  T* st = big ? heap.data() : stack;
  for (const Instr& in : prog_) {
    switch (in.op) {
      case Instr::Op::push: st[top++] = T(in.number); break;
      case Instr::Op::var: st[top++] = args[in.slot]; break;
      case Instr::Op::neg: st[top - 1] = -st[top - 1]; break;
      case Instr::Op::call: {
        T& x = st[top - 1];
        if (in.fn == Fn::log && !(primal(x) > 0))
          detail::domain_error("log of a non-positive value", in.span, ast_.source);
        x = detail::apply(in.fn, x);
        break;
      }
      default: {
        T b = st[--top];
        T& a = st[top - 1];
        switch (in.op) {
          case Instr::Op::add: a = a + b; break;
          case Instr::Op::sub: a = a - b; break;
          case Instr::Op::mul: a = a * b; break;
          case Instr::Op::div:
            if (primal(b) == 0.0) detail::domain_error("division by zero", in.span, ast_.source);
            a = a / b;
            break;
          case Instr::Op::pow: a = power(a, b); break;
          default: break;
        }
      }
    }
    if (!all_finite(st[top - 1])) detail::domain_error("non-finite result", in.span, ast_.source);
  }
  return st[0];
}

}  // namespace myller::expr
