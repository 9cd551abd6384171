#pragma once

// Immutable symbolic expressions over chart coordinates and real parameters.
//
// Expressions are cheap to copy (shared, immutable node trees). Construction
// performs only local normalization: flattening of nested sums/products,
// constant folding and removal of neutral elements. There is no general
// simplifier; semantic equality is decided by sampling (see sampling.hpp).

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace jlie {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifierError : public Error {
 public:
  UnknownIdentifierError(std::string name, std::vector<std::string> declared);
  const std::string& name() const { return name_; }
  const std::vector<std::string>& declared() const { return declared_; }

 private:
  std::string name_;
  std::vector<std::string> declared_;
};

/// Raised when an expression is evaluated outside the domain of one of its
/// sub-functions (ln of a nonpositive value, Ei1 at zero, overflow, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnboundNameError : public Error {
 public:
  explicit UnboundNameError(const std::string& name);
};

/// A rational constant when exactly representable, otherwise a double.
class Number {
 public:
  Number() = default;
  static Number integer(std::int64_t n) { return rational(n, 1); }
  static Number rational(std::int64_t num, std::int64_t den);
  static Number real(double v);
  /// Converts a double to an exact rational when it has a short decimal
  /// representation (e.g. 0.5 -> 1/2, 2 -> 2), otherwise keeps it inexact.
  static Number from_double(double v);

  bool exact() const { return exact_; }
  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const;

  bool is_zero() const { return exact_ ? num_ == 0 : real_ == 0.0; }
  bool is_one() const { return exact_ ? (num_ == 1 && den_ == 1) : real_ == 1.0; }
  bool is_integer() const { return exact_ && den_ == 1; }
  bool negative() const { return exact_ ? num_ < 0 : real_ < 0.0; }

  Number operator-() const;
  friend Number operator+(const Number& a, const Number& b);
  friend Number operator*(const Number& a, const Number& b);
  Number reciprocal() const;
  /// Integer power; inexact result when the exact one overflows.
  Number pow(std::int64_t e) const;

  friend bool operator==(const Number& a, const Number& b);

  std::string render() const;

 private:
  bool exact_ = true;
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  double real_ = 0.0;
};

enum class NodeKind {
  Constant,
  Variable,
  Parameter,
  Add,
  Mul,
  Pow,
  Exp,
  Ln,
  Sinh,
  Cosh,
  Sin,
  Cos,
  ExpInt1,
};

class Expression;

namespace detail {
struct Node;
}

class Expression {
 public:
  /// The constant 0.
  Expression();

  static Expression constant(Number n);
  static Expression constant(std::int64_t n) { return constant(Number::integer(n)); }
  static Expression variable(std::string name);
  static Expression parameter(std::string name);

  static Expression sum(std::vector<Expression> terms);
  static Expression product(std::vector<Expression> factors);
  static Expression power(Expression base, Number exponent);
  static Expression exp(Expression arg);
  static Expression ln(Expression arg);
  static Expression sinh(Expression arg);
  static Expression cosh(Expression arg);
  static Expression sin(Expression arg);
  static Expression cos(Expression arg);
  /// Exponential integral E1 extended to negative arguments by the real
  /// principal value, E1(u) = -Ei(-u).
  static Expression expint1(Expression arg);

  NodeKind kind() const;
  /// Value of a Constant node.
  const Number& number() const;
  /// Name of a Variable or Parameter node.
  const std::string& name() const;
  /// Exponent of a Pow node.
  const Number& exponent() const;
  /// Children: terms of Add, factors of Mul, base of Pow, argument of a
  /// function node. Empty for leaves.
  std::span<const Expression> operands() const;

  bool is_constant() const { return kind() == NodeKind::Constant; }
  bool is_zero_constant() const;
  bool is_one_constant() const;

  /// Address of the shared node; equal for copies of one expression.
  const void* identity() const { return node_.get(); }

  /// Number of nodes in the tree.
  std::size_t size() const;

  /// Fully parenthesized infix with '^' exponents; parses back to a
  /// structurally equal tree.
  std::string render() const;

  friend bool operator==(const Expression& a, const Expression& b);

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);

 private:
  friend class CompiledExpressions;
  explicit Expression(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::Node> node_;
};

/// Names that may appear in an expression string.
struct SymbolTable {
  std::vector<std::string> coordinates;
  std::vector<std::string> parameters;

  bool is_coordinate(std::string_view name) const;
  bool is_parameter(std::string_view name) const;
};

/// Parses the infix grammar: + - * / ^, parentheses, numeric literals and the
/// functions exp, ln, sinh, cosh, sin, cos, Ei1.
Expression parse(std::string_view text, const SymbolTable& symbols);

/// Exact derivative with respect to a coordinate (parameters are constants).
Expression diff(const Expression& e, std::string_view variable);

/// Binding of coordinate and parameter names to real values.
class Point {
 public:
  Point() = default;
  Point(std::initializer_list<std::pair<const std::string, double>> values) : values_(values) {}

  void set(const std::string& name, double value) { values_[name] = value; }
  std::optional<double> get(std::string_view name) const;
  bool contains(std::string_view name) const { return values_.find(name) != values_.end(); }
  const std::map<std::string, double, std::less<>>& values() const { return values_; }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::map<std::string, double, std::less<>> values_;
};

double eval(const Expression& e, const Point& p);

/// A batch of expressions flattened into one straight-line program over
/// named input slots. Shared subtrees are evaluated once.
class CompiledExpressions {
 public:
  CompiledExpressions(const std::vector<Expression>& roots, std::vector<std::string> slots);

  const std::vector<std::string>& slots() const { return slots_; }
  std::size_t size() const { return outputs_.size(); }

  /// Writes one value per root into out. Throws DomainError.
  void eval(std::span<const double> inputs, std::span<double> out) const;
  /// Same, but also fills scale[i] with a running bound on the magnitudes
  /// combined into root i, so cancellation anywhere in the DAG is visible.
  void eval_scaled(std::span<const double> inputs, std::span<double> out, std::span<double> scale) const;

 private:
  struct Op {
    NodeKind kind;
    double value;        // constant, or exponent of Pow
    bool integer_power;  // exponent is an exact integer
    std::uint32_t first; // operands as indices into args_
    std::uint32_t count;
  };
  void run(std::span<const double> inputs, std::vector<double>& regs) const;

  std::vector<std::string> slots_;
  std::vector<Op> ops_;
  std::vector<std::uint32_t> args_;
  std::vector<std::uint32_t> outputs_;
};

/// Replaces variables and parameters by name.
Expression substitute(const Expression& e, const std::map<std::string, Expression, std::less<>>& bindings);

/// Names of all variables and parameters occurring in e.
std::set<std::string> free_names(const Expression& e);

/// Denominators (bases of negative powers) that contain no coordinate.
std::vector<Expression> parameter_denominators(const Expression& e, const SymbolTable& symbols);

}  // namespace jlie
