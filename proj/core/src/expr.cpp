#include "invaria/expr.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "invaria/error.hpp"

namespace invaria::expr {

struct Node {
  Expr::Kind kind;
  double value = 0.0;
  std::string name;
  BinaryOp op = BinaryOp::Add;
  std::vector<Expr> children;
};

Expr Expr::number(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Number;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::symbol(std::string name) {
  if (!is_identifier(name)) throw InvalidArgument("invalid symbol name '" + name + "'");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Symbol;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::negate(Expr operand) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Negate;
  n->children.push_back(std::move(operand));
  return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->op = op;
  n->children.push_back(std::move(lhs));
  n->children.push_back(std::move(rhs));
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
const Expr& Expr::operand() const { return node_->children.at(0); }
BinaryOp Expr::op() const { return node_->op; }
const Expr& Expr::lhs() const { return node_->children.at(0); }
const Expr& Expr::rhs() const { return node_->children.at(1); }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Number:
      return a.value() == b.value();
    case Expr::Kind::Symbol:
      return a.name() == b.name();
    case Expr::Kind::Negate:
      return a.operand() == b.operand();
    case Expr::Kind::Binary:
      return a.op() == b.op() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
  return false;
}

bool is_identifier(std::string_view name) {
  if (name.empty()) return false;
  auto head = static_cast<unsigned char>(name.front());
  if (!(std::isalpha(head) || head == '_')) return false;
  return std::all_of(name.begin() + 1, name.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u == '_';
  });
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("empty expression", 0);
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) {
      if (text_[pos_] == ')') throw ParseError("unbalanced parentheses", pos_);
      throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
    }
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(BinaryOp::Add, std::move(lhs), parse_product());
      } else if (accept('-')) {
        lhs = Expr::binary(BinaryOp::Sub, std::move(lhs), parse_product());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(BinaryOp::Mul, std::move(lhs), parse_unary());
      } else if (accept('/')) {
        lhs = Expr::binary(BinaryOp::Div, std::move(lhs), parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) return Expr::negate(parse_unary());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) return Expr::binary(BinaryOp::Pow, std::move(base), parse_unary());
    return base;
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("empty operand", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      const std::size_t open = pos_++;
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == ')') throw ParseError("empty operand", pos_);
      Expr inner = parse_sum();
      if (!accept(')')) throw ParseError("unbalanced parentheses", open);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    if (c == ')' || c == '+' || c == '*' || c == '/' || c == '^') {
      throw ParseError("empty operand", pos_);
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError("malformed number", start);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw ParseError("malformed exponent", start);
    }
    const std::string literal(text_.substr(start, pos_ - start));
    const double v = std::strtod(literal.c_str(), nullptr);
    if (!std::isfinite(v)) throw ParseError("number out of range", start);
    return Expr::number(v);
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    return Expr::symbol(std::string(text_.substr(start, pos_ - start)));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Printing and inspection

namespace {

void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::Number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", e.value());
      out += buf;
      return;
    }
    case Expr::Kind::Symbol:
      out += e.name();
      return;
    case Expr::Kind::Negate:
      out += "(-";
      print(e.operand(), out);
      out += ')';
      return;
    case Expr::Kind::Binary:
      out += '(';
      print(e.lhs(), out);
      out += ' ';
      out += static_cast<char>(e.op());
      out += ' ';
      print(e.rhs(), out);
      out += ')';
      return;
  }
}

void collect(const Expr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case Expr::Kind::Number:
      return;
    case Expr::Kind::Symbol:
      out.insert(e.name());
      return;
    case Expr::Kind::Negate:
      collect(e.operand(), out);
      return;
    case Expr::Kind::Binary:
      collect(e.lhs(), out);
      collect(e.rhs(), out);
      return;
  }
}

double checked(double v) {
  if (!std::isfinite(v)) throw EvalError("non-finite result");
  return v;
}

double apply(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::Add:
      return checked(a + b);
    case BinaryOp::Sub:
      return checked(a - b);
    case BinaryOp::Mul:
      return checked(a * b);
    case BinaryOp::Div:
      if (b == 0.0) throw EvalError("division by zero");
      return checked(a / b);
    case BinaryOp::Pow:
      if (a == 0.0 && b < 0.0) throw EvalError("zero raised to a negative power");
      return checked(std::pow(a, b));
  }
  return 0.0;
}

double eval_tree(const Expr& e, const Bindings& env) {
  switch (e.kind()) {
    case Expr::Kind::Number:
      return e.value();
    case Expr::Kind::Symbol: {
      auto it = env.find(e.name());
      if (it == env.end()) throw UnboundSymbol(e.name());
      return checked(it->second);
    }
    case Expr::Kind::Negate:
      return -eval_tree(e.operand(), env);
    case Expr::Kind::Binary:
      return apply(e.op(), eval_tree(e.lhs(), env), eval_tree(e.rhs(), env));
  }
  return 0.0;
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

std::set<std::string> symbols(const Expr& e) {
  std::set<std::string> out;
  collect(e, out);
  return out;
}

double eval(const Expr& e, const Bindings& env) { return eval_tree(e, env); }

double partial_fd(const Expr& e, const Bindings& env, std::string_view sym, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  auto it = env.find(sym);
  if (it == env.end()) throw UnboundSymbol(std::string(sym));
  Bindings shifted = env;
  double& x = shifted.find(sym)->second;
  const double x0 = it->second;
  x = x0 + h;
  const double fp = eval_tree(e, shifted);
  x = x0 - h;
  const double fm = eval_tree(e, shifted);
  return (fp - fm) / (2.0 * h);
}

double partial_fd(const Expr& e, const Bindings& env, std::string_view sym) {
  auto it = env.find(sym);
  if (it == env.end()) throw UnboundSymbol(std::string(sym));
  return partial_fd(e, env, sym, 1e-5 * std::max(1.0, std::abs(it->second)));
}

// ---------------------------------------------------------------------------
// Compiled form

CompiledExpr::CompiledExpr(const Expr& e, std::span<const std::string> slot_names) {
  std::size_t depth = 0;
  auto emit = [&](auto&& self, const Expr& node) -> void {
    switch (node.kind()) {
      case Expr::Kind::Number:
        program_.push_back({Instr::Code::Push, 0, node.value()});
        max_depth_ = std::max(max_depth_, ++depth);
        return;
      case Expr::Kind::Symbol: {
        auto it = std::find(slot_names.begin(), slot_names.end(), node.name());
        if (it == slot_names.end()) throw UnboundSymbol(node.name());
        program_.push_back(
            {Instr::Code::Load, static_cast<std::uint32_t>(it - slot_names.begin()), 0.0});
        max_depth_ = std::max(max_depth_, ++depth);
        return;
      }
      case Expr::Kind::Negate:
        self(self, node.operand());
        program_.push_back({Instr::Code::Neg, 0, 0.0});
        return;
      case Expr::Kind::Binary: {
        self(self, node.lhs());
        self(self, node.rhs());
        Instr::Code code = Instr::Code::Add;
        switch (node.op()) {
          case BinaryOp::Add: code = Instr::Code::Add; break;
          case BinaryOp::Sub: code = Instr::Code::Sub; break;
          case BinaryOp::Mul: code = Instr::Code::Mul; break;
          case BinaryOp::Div: code = Instr::Code::Div; break;
          case BinaryOp::Pow: code = Instr::Code::Pow; break;
        }
        program_.push_back({code, 0, 0.0});
        --depth;
        return;
      }
    }
  };
  emit(emit, e);
}

double CompiledExpr::operator()(std::span<const double> slots) const {
  constexpr std::size_t kInline = 32;
  double inline_stack[kInline] = {};
  std::vector<double> heap_stack;
  double* stack = inline_stack;
  if (max_depth_ > kInline) {
    heap_stack.resize(max_depth_);
    stack = heap_stack.data();
  }
  std::size_t top = 0;
  for (const Instr& in : program_) {
    switch (in.code) {
      case Instr::Code::Push:
        stack[top++] = in.value;
        break;
      case Instr::Code::Load:
        stack[top++] = checked(slots[in.slot]);
        break;
      case Instr::Code::Neg:
        stack[top - 1] = -stack[top - 1];
        break;
      default: {
        const double b = stack[--top];
        const double a = stack[top - 1];
        BinaryOp op = BinaryOp::Add;
        switch (in.code) {
          case Instr::Code::Sub: op = BinaryOp::Sub; break;
          case Instr::Code::Mul: op = BinaryOp::Mul; break;
          case Instr::Code::Div: op = BinaryOp::Div; break;
          case Instr::Code::Pow: op = BinaryOp::Pow; break;
          default: break;
        }
        stack[top - 1] = apply(op, a, b);
      }
    }
  }
  assert(top == 1);
  return stack[0];
}

}  // namespace invaria::expr
