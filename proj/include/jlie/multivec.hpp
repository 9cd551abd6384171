#pragma once

// Multivector fields on a coordinate chart.
//
// Components are stored on strictly increasing index tuples with no 1/k!
// factor: P = sum_{i1<...<ik} P^{i1...ik} d_{i1} ^ ... ^ d_{ik}.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "jlie/expr.hpp"
#include "jlie/sampling.hpp"

namespace jlie {

class Chart {
 public:
  Chart(std::vector<std::string> coordinates, std::vector<std::string> parameters = {});

  std::size_t dim() const { return coordinates_.size(); }
  const std::vector<std::string>& coordinates() const { return coordinates_; }
  const std::vector<std::string>& parameters() const { return parameters_; }
  /// Throws Error for an unknown name.
  std::size_t index_of(std::string_view coordinate) const;
  SymbolTable symbols() const { return {coordinates_, parameters_}; }

  /// Every coordinate in [0.2, 1.2]; parameters unset.
  SamplingBox default_box() const;

 private:
  std::vector<std::string> coordinates_;
  std::vector<std::string> parameters_;
};

using ChartPtr = std::shared_ptr<const Chart>;

ChartPtr make_chart(std::vector<std::string> coordinates, std::vector<std::string> parameters = {});

using IndexTuple = std::vector<int>;

class MultiVectorField {
 public:
  MultiVectorField(ChartPtr chart, int degree);

  static MultiVectorField scalar(ChartPtr chart, Expression f);
  /// Vector field from one component per coordinate.
  static MultiVectorField vector(ChartPtr chart, const std::vector<Expression>& components);
  /// The coordinate field d_i.
  static MultiVectorField basis(ChartPtr chart, int i);

  const ChartPtr& chart() const { return chart_; }
  int degree() const { return degree_; }

  /// Component on any tuple of distinct indices, with the permutation sign
  /// applied; zero for repeated indices or absent entries.
  Expression component(const IndexTuple& idx) const;
  /// Adds sign(idx) * value to the component; idx need not be sorted.
  void accumulate(const IndexTuple& idx, const Expression& value);
  void set(const IndexTuple& idx, const Expression& value);

  /// Stored (nonzero) entries.
  const std::map<IndexTuple, Expression>& entries() const { return components_; }
  /// All C(n,k) increasing tuples in lexicographic order.
  std::vector<IndexTuple> all_tuples() const;
  /// Components on all_tuples(), zeros included.
  std::vector<Expression> dense() const;

  /// Degree-0 value.
  Expression as_scalar() const { return component({}); }

  MultiVectorField operator-() const;
  friend MultiVectorField operator+(const MultiVectorField& a, const MultiVectorField& b);
  friend MultiVectorField operator-(const MultiVectorField& a, const MultiVectorField& b);
  friend MultiVectorField operator*(const Expression& f, const MultiVectorField& a);

  /// Substitutes names in every component.
  MultiVectorField substitute(const std::map<std::string, Expression, std::less<>>& bindings) const;

  /// "x,y" style key for a tuple.
  std::string key(const IndexTuple& idx) const;
  IndexTuple parse_key(std::string_view key) const;

 private:
  ChartPtr chart_;
  int degree_;
  std::map<IndexTuple, Expression> components_;
};

class OneForm {
 public:
  explicit OneForm(ChartPtr chart);
  OneForm(ChartPtr chart, std::vector<Expression> components);

  const ChartPtr& chart() const { return chart_; }
  const Expression& operator[](std::size_t i) const { return components_[i]; }
  const std::vector<Expression>& components() const { return components_; }

  /// dx^i
  static OneForm coordinate(ChartPtr chart, int i);

 private:
  ChartPtr chart_;
  std::vector<Expression> components_;
};

/// df
OneForm differential(const ChartPtr& chart, const Expression& f);

MultiVectorField wedge(const MultiVectorField& p, const MultiVectorField& q);

/// Commutator of vector fields.
MultiVectorField lie_bracket(const MultiVectorField& x, const MultiVectorField& y);

/// X(f) for a vector field X.
Expression apply(const MultiVectorField& x, const Expression& f);

/// Sign conventions of the Schouten-Nijenhuis bracket. Koszul satisfies
/// [P,Q] = -(-1)^{(p-1)(q-1)}[Q,P]; Lichnerowicz is (-1)^{p-1} times Koszul
/// and gives [L,L] = 2E^L for Jacobi structures.
enum class SchoutenConvention { Lichnerowicz, Koszul };

/// Recursive: built from [X,f] = X(f), [X,Y] and the graded Leibniz and
/// antisymmetry rules. Coordinate: direct formula in odd coordinates.
enum class SchoutenRoute { Recursive, Coordinate };

MultiVectorField schouten(const MultiVectorField& p, const MultiVectorField& q,
                          SchoutenConvention convention = SchoutenConvention::Lichnerowicz,
                          SchoutenRoute route = SchoutenRoute::Recursive);

MultiVectorField lie_derivative(const MultiVectorField& x, const MultiVectorField& p);

/// (sharp)^nu = sum_mu L^{mu nu} alpha_mu
MultiVectorField sharp(const MultiVectorField& lambda, const OneForm& alpha);

/// L(alpha, beta)
Expression pair2(const MultiVectorField& lambda, const OneForm& alpha, const OneForm& beta);

/// Contraction of the first slot.
MultiVectorField interior(const OneForm& phi, const MultiVectorField& p);

/// Zero test of every component.
CheckResult is_zero(const MultiVectorField& p, const SamplingBox& box, const ZeroTestOptions& opt = {});

/// One "key: expression" line per stored component; "0" when empty.
std::string describe(const MultiVectorField& p);

}  // namespace jlie
