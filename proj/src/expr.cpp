#include "myller/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <set>

namespace myller::expr {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
  return out;
}

const std::vector<std::pair<const char*, Fn>>& function_table() {
  static const std::vector<std::pair<const char*, Fn>> t = {
      {"sin", Fn::sin},   {"cos", Fn::cos},   {"tan", Fn::tan},   {"asin", Fn::asin}, {"acos", Fn::acos},
      {"atan", Fn::atan}, {"sqrt", Fn::sqrt}, {"exp", Fn::exp},   {"log", Fn::log},   {"sinh", Fn::sinh},
      {"cosh", Fn::cosh}, {"tanh", Fn::tanh}, {"abs", Fn::abs}};
  return t;
}

bool is_constant_name(const std::string& s) { return s == "pi" || s == "e"; }

}  // namespace

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
    : ValidationError("SyntaxError at offset " + std::to_string(offset) + ": expected " + join(expected) +
                      ", found " + found),
      offset_(offset),
      expected_(std::move(expected)) {}

std::optional<Fn> lookup_function(const std::string& name) {
  for (const auto& [n, f] : function_table())
    if (name == n) return f;
  return std::nullopt;
}

const char* function_name(Fn f) {
  for (const auto& [n, g] : function_table())
    if (g == f) return n;
  return "?";
}

namespace detail {
void domain_error(const std::string& what, Span span, const std::string& source) {
  const std::size_t b = std::min(span.begin, source.size());
  const std::size_t e = std::min(std::max(span.end, b), source.size());
  throw EvalDomainError(what, span, source.substr(b, e - b));
}
}  // namespace detail

namespace {

struct Token {
  enum class Kind { number, ident, op, lparen, rparen, end, bad };
  Kind kind = Kind::end;
  std::string text;
  double number = 0;
  std::size_t pos = 0;  // 0-based
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) {}

  Token next() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    Token t;
    t.pos = i_;
    if (i_ >= s_.size()) return t;
    const char c = s_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_ + 1])))) {
      std::size_t j = i_;
      while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
      if (j < s_.size() && s_[j] == '.') {
        ++j;
        while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
      }
      if (j < s_.size() && (s_[j] == 'e' || s_[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s_.size() && (s_[k] == '+' || s_[k] == '-')) ++k;
        if (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) {
          while (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) ++k;
          j = k;
        }
      }
      t.kind = Token::Kind::number;
      t.text = s_.substr(i_, j - i_);
      t.number = std::strtod(t.text.c_str(), nullptr);
      i_ = j;
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
      t.kind = Token::Kind::ident;
      t.text = s_.substr(i_, j - i_);
      i_ = j;
      return t;
    }
    ++i_;
    t.text = std::string(1, c);
    if (c == '(') t.kind = Token::Kind::lparen;
    else if (c == ')') t.kind = Token::Kind::rparen;
    else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') t.kind = Token::Kind::op;
    else t.kind = Token::Kind::bad;
    return t;
  }

 private:
  const std::string& s_;
  std::size_t i_ = 0;
};

const std::vector<std::string> kOperand = {"number", "identifier", "(", "-"};
const std::vector<std::string> kAfterOperand = {"+", "-", "*", "/", "^", ")", "end of input"};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Token::Kind::end: return "end of input";
    case Token::Kind::number: return "number '" + t.text + "'";
    case Token::Kind::ident: return "identifier '" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

int infix_bp(const std::string& op) {
  if (op == "+" || op == "-") return 10;
  if (op == "*" || op == "/") return 20;
  if (op == "^") return 40;
  return -1;
}
constexpr int kUnaryBp = 30;

class Parser {
 public:
  explicit Parser(const std::string& s) : lex_(s) { advance(); }

  NodePtr parse_all() {
    NodePtr n = expression(0);
    if (cur_.kind != Token::Kind::end) fail(depth_ > 0 ? kAfterOperand : without_rparen());
    return n;
  }

 private:
  static std::vector<std::string> without_rparen() {
    return {"+", "-", "*", "/", "^", "end of input"};
  }

  [[noreturn]] void fail(const std::vector<std::string>& expected) {
    throw SyntaxError(cur_.pos + 1, expected, describe(cur_));
  }

  void advance() { cur_ = lex_.next(); }

  NodePtr expression(int min_bp) {
    NodePtr lhs = prefix();
    for (;;) {
      if (cur_.kind != Token::Kind::op) {
        if (cur_.kind == Token::Kind::end || cur_.kind == Token::Kind::rparen) break;
        fail(depth_ > 0 ? kAfterOperand : without_rparen());
      }
      const int bp = infix_bp(cur_.text);
      if (bp <= min_bp) break;
      const char op = cur_.text[0];
      advance();
      // Right-associative power: the exponent is parsed at unary level so 2^-1 is allowed.
      NodePtr rhs = op == '^' ? expression(kUnaryBp - 1) : expression(bp);
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::binary;
      n->op = op;
      n->span = {lhs->span.begin, rhs->span.end};
      n->children = {lhs, rhs};
      lhs = n;
    }
    return lhs;
  }

  NodePtr prefix() {
    const Token t = cur_;
    switch (t.kind) {
      case Token::Kind::number: {
        advance();
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::number;
        n->number = t.number;
        n->span = {t.pos, t.pos + t.text.size()};
        return n;
      }
      case Token::Kind::op:
        if (t.text == "-") {
          advance();
          NodePtr operand = expression(kUnaryBp);
          auto n = std::make_shared<Node>();
          n->kind = Node::Kind::unary;
          n->op = '-';
          n->span = {t.pos, operand->span.end};
          n->children = {operand};
          return n;
        }
        fail(kOperand);
      case Token::Kind::lparen: {
        advance();
        ++depth_;
        NodePtr inner = expression(0);
        if (cur_.kind != Token::Kind::rparen) fail(kAfterOperand);
        --depth_;
        auto wrapped = std::make_shared<Node>(*inner);
        wrapped->span = {t.pos, cur_.pos + 1};
        advance();
        return wrapped;
      }
      case Token::Kind::ident: {
        advance();
        const auto fn = lookup_function(t.text);
        if (cur_.kind == Token::Kind::lparen) {
          if (!fn) throw UnknownFunction(t.text, {t.pos, t.pos + t.text.size()});
          advance();
          ++depth_;
          NodePtr arg = expression(0);
          if (cur_.kind != Token::Kind::rparen) fail(kAfterOperand);
          --depth_;
          const std::size_t close = cur_.pos + 1;
          advance();
          auto n = std::make_shared<Node>();
          n->kind = Node::Kind::call;
          n->fn = *fn;
          n->span = {t.pos, close};
          n->children = {arg};
          return n;
        }
        if (fn) fail({"("});
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::variable;
        n->name = t.text;
        n->span = {t.pos, t.pos + t.text.size()};
        return n;
      }
      default: fail(kOperand);
    }
  }

  Lexer lex_;
  Token cur_;
  int depth_ = 0;
};

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void compile(const Node& n, const std::vector<std::string>& vars, std::vector<Instr>& out) {
  Instr in;
  in.span = n.span;
  switch (n.kind) {
    case Node::Kind::number:
      in.op = Instr::Op::push;
      in.number = n.number;
      break;
    case Node::Kind::variable: {
      if (n.name == "pi" || n.name == "e") {
        in.op = Instr::Op::push;
        in.number = n.name == "pi" ? pi : std::exp(1.0);
        break;
      }
      const auto it = std::find(vars.begin(), vars.end(), n.name);
      if (it == vars.end()) throw UnknownVariable(n.name);
      in.op = Instr::Op::var;
      in.slot = static_cast<std::size_t>(it - vars.begin());
      break;
    }
    case Node::Kind::unary:
      compile(*n.children[0], vars, out);
      in.op = Instr::Op::neg;
      break;
    case Node::Kind::call:
      compile(*n.children[0], vars, out);
      in.op = Instr::Op::call;
      in.fn = n.fn;
      break;
    case Node::Kind::binary:
      compile(*n.children[0], vars, out);
      compile(*n.children[1], vars, out);
      switch (n.op) {
        case '+': in.op = Instr::Op::add; break;
        case '-': in.op = Instr::Op::sub; break;
        case '*': in.op = Instr::Op::mul; break;
        case '/': in.op = Instr::Op::div; break;
        default: in.op = Instr::Op::pow; break;
      }
      break;
  }
  out.push_back(in);
}

void collect(const Node& n, std::set<std::string>& names) {
  if (n.kind == Node::Kind::variable && !is_constant_name(n.name)) names.insert(n.name);
  for (const auto& c : n.children) collect(*c, names);
}

}  // namespace

Ast parse(const std::string& text) {
  Parser p(text);
  return Ast{p.parse_all(), text};
}

std::string print(const Node& n) {
  switch (n.kind) {
    case Node::Kind::number: return format_number(n.number);
    case Node::Kind::variable: return n.name;
    case Node::Kind::unary: return "(-" + print(*n.children[0]) + ")";
    case Node::Kind::call: return std::string(function_name(n.fn)) + "(" + print(*n.children[0]) + ")";
    case Node::Kind::binary:
      return "(" + print(*n.children[0]) + " " + n.op + " " + print(*n.children[1]) + ")";
  }
  return {};
}

std::string print(const Ast& a) { return print(*a.root); }

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
  switch (a.kind) {
    case Node::Kind::number:
      if (a.number != b.number) return false;
      break;
    case Node::Kind::variable:
      if (a.name != b.name) return false;
      break;
    case Node::Kind::unary:
    case Node::Kind::binary:
      if (a.op != b.op) return false;
      break;
    case Node::Kind::call:
      if (a.fn != b.fn) return false;
      break;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!structurally_equal(*a.children[i], *b.children[i])) return false;
  return true;
}

std::vector<std::string> free_variables(const Ast& a) {
  std::set<std::string> names;
  collect(*a.root, names);
  return {names.begin(), names.end()};
}

ScalarFunction ScalarFunction::expression(const std::string& text, std::vector<std::string> variables) {
  for (const auto& v : variables)
    if (is_constant_name(v) || lookup_function(v)) throw InvalidArgument("reserved name used as variable: " + v);
  ScalarFunction f;
  f.vars_ = std::move(variables);
  f.ast_ = parse(text);
  compile(*f.ast_.root, f.vars_, f.prog_);
  return f;
}

ScalarFunction ScalarFunction::constant(double c, std::vector<std::string> variables) {
  return expression(format_number(c), std::move(variables));
}

ScalarFunction ScalarFunction::samples(std::vector<double> values, Grid grid, std::string variable) {
  if (values.size() != grid.size()) throw InvalidArgument("sample backing needs one value per grid node");
  ScalarFunction f;
  f.sampled_ = true;
  f.vars_ = {std::move(variable)};
  f.values_ = std::move(values);
  f.grid_ = std::move(grid);
  return f;
}

std::size_t ScalarFunction::slot(const std::string& var) const {
  const auto it = std::find(vars_.begin(), vars_.end(), var);
  if (it == vars_.end()) throw UnknownVariable(var);
  return static_cast<std::size_t>(it - vars_.begin());
}

double ScalarFunction::eval(const std::vector<double>& b) const {
  if (b.size() != vars_.size()) throw InvalidArgument("wrong number of bindings");
  if (sampled_) {
    const long i = grid_.find_node(b[0]);
    if (i < 0) throw OutOfDomain("sample-backed function evaluated off the grid nodes");
    return values_[static_cast<std::size_t>(i)];
  }
  return eval_as<double>(b.data());
}

double ScalarFunction::eval(const std::map<std::string, double>& bindings) const {
  std::vector<double> b;
  b.reserve(vars_.size());
  for (const auto& v : vars_) {
    const auto it = bindings.find(v);
    if (it == bindings.end()) throw UnknownVariable(v);
    b.push_back(it->second);
  }
  return eval(b);
}

std::pair<double, double> ScalarFunction::eval_dual(const std::vector<double>& b, std::size_t seed) const {
  if (b.size() != vars_.size() || seed >= vars_.size()) throw InvalidArgument("wrong number of bindings");
  if (sampled_) return {eval(b), differentiate(*this, vars_[seed], b)};
  std::vector<Dual<double>> args(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) args[i] = Dual<double>(b[i], i == seed ? 1.0 : 0.0);
  const auto r = eval_as<Dual<double>>(args.data());
  return {r.v, r.d};
}

double differentiate(const ScalarFunction& f, const std::string& var, const std::vector<double>& point) {
  const std::size_t k = f.slot(var);
  if (!f.expression_backed()) {
    const long i = f.sample_grid().find_node(point.at(0));
    if (i < 0) throw OutOfDomain("stencil point is not a grid node");
    return differentiate_at(f.sample_values(), f.sample_grid(), static_cast<std::size_t>(i));
  }
  return f.eval_dual(point, k).second;
}

}  // namespace myller::expr
