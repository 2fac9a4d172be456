#pragma once

// Scalar arithmetic expressions over named symbols.
//
// Grammar (highest precedence first):
//   primary := number | identifier | '(' expr ')'
//   power   := primary ( '^' unary )?          right-associative
//   unary   := '-' unary | power
//   term    := unary ( ('*' | '/') unary )*    left-associative
//   expr    := term ( ('+' | '-') term )*      left-associative
//
// Identifiers match [a-zA-Z_][a-zA-Z0-9_]*. There are no function calls.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace invaria::expr {

using Bindings = std::map<std::string, double, std::less<>>;

enum class BinaryOp : char { Add = '+', Sub = '-', Mul = '*', Div = '/', Pow = '^' };

struct Node;

/// Immutable expression tree. Copies share structure.
class Expr {
 public:
  enum class Kind { Number, Symbol, Negate, Binary };

  static Expr number(double value);
  static Expr symbol(std::string name);
  static Expr negate(Expr operand);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);

  Kind kind() const;
  double value() const;              // Number
  const std::string& name() const;   // Symbol
  const Expr& operand() const;       // Negate
  BinaryOp op() const;               // Binary
  const Expr& lhs() const;           // Binary
  const Expr& rhs() const;           // Binary

  /// Structural equality.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

bool is_identifier(std::string_view name);

/// Throws ParseError carrying the byte offset of the failure.
Expr parse(std::string_view text);

/// Fully parenthesized text; parse(to_string(e)) == e.
std::string to_string(const Expr& e);

std::set<std::string> symbols(const Expr& e);

/// Throws UnboundSymbol for a missing symbol and EvalError on division by
/// zero, zero to a negative power, or any non-finite intermediate.
double eval(const Expr& e, const Bindings& env);

/// Central difference of `e` with respect to `sym` at `env`.
double partial_fd(const Expr& e, const Bindings& env, std::string_view sym, double h);

/// Same, with h = 1e-5 * max(1, |sym|).
double partial_fd(const Expr& e, const Bindings& env, std::string_view sym);

/// Expression lowered to a stack program over positional slots. Used on hot
/// paths (ODE right-hand sides) where map lookups would dominate.
class CompiledExpr {
 public:
  /// Throws UnboundSymbol if `e` references a name not in `slot_names`.
  CompiledExpr(const Expr& e, std::span<const std::string> slot_names);

  double operator()(std::span<const double> slots) const;

 private:
  struct Instr {
    enum class Code : std::uint8_t { Push, Load, Neg, Add, Sub, Mul, Div, Pow };
    Code code;
    std::uint32_t slot;
    double value;
  };

  std::vector<Instr> program_;
  std::size_t max_depth_ = 0;
};

}  // namespace invaria::expr
