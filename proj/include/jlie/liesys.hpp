#pragma once

// Time-dependent Lie systems X(t,x) = sum_i b_i(t) X_i(x).

#include <optional>
#include <string>
#include <vector>

#include "jlie/multivec.hpp"
#include "jlie/sampling.hpp"

namespace jlie {

struct LieSystemSpec {
  ChartPtr chart;
  std::vector<MultiVectorField> generators;
  /// b_i(t), expressions in the reserved variable t.
  std::vector<Expression> coefficients;
  /// Optional Hamiltonian functions aligned with generators.
  std::vector<Expression> hamiltonians;

  /// Checks the invariants; throws Error.
  void validate() const;
};

/// Symbols for parsing b_i(t): the reserved t plus the chart parameters.
SymbolTable time_symbols(const Chart& chart);

MultiVectorField commutator(const MultiVectorField& x, const MultiVectorField& y);

class RankDeficientError : public Error {
 public:
  using Error::Error;
};

struct FitOptions {
  std::size_t points = 25;
  std::uint64_t seed = 42;
  double rank_threshold = 1e-9;  // relative to the largest singular value
  double tol = 1e-8;             // acceptance tolerance for the fit residual
};

struct StructureConstants {
  std::size_t r = 0;
  /// c[(i*r + j)*r + k] = c_{ij}^k
  std::vector<double> c;
  double residual = 0.0;
  bool closed = false;

  double at(std::size_t i, std::size_t j, std::size_t k) const { return c[(i * r + j) * r + k]; }
};

/// Least-squares fit of [X_i, X_j] = sum_k c_ij^k X_k over jointly sampled
/// points. Throws RankDeficientError when the generators are linearly
/// dependent over the reals on the sample.
StructureConstants structure_constants(const std::vector<MultiVectorField>& generators, const SamplingBox& box,
                                       const FitOptions& opt = {});

/// Numerical rank of the fields as elements of a real vector space, from
/// their values at jointly sampled points.
std::size_t span_rank(const std::vector<MultiVectorField>& fields, const SamplingBox& box,
                      const FitOptions& opt = {});

struct ClosureResult {
  std::vector<MultiVectorField> basis;
  bool closed = false;
};

/// Adjoins commutators outside the current span until closed or the basis
/// would exceed max_dim.
ClosureResult lie_closure(const std::vector<MultiVectorField>& generators, std::size_t max_dim,
                          const SamplingBox& box, const FitOptions& opt = {});

enum class StopReason { Completed, LeftDomain, DomainFault };

const char* stop_reason_name(StopReason r);

struct Trajectory {
  std::vector<std::string> coordinates;
  std::vector<double> t;
  std::vector<std::vector<double>> x;
  double dt = 0.0;
  std::string method = "rk4";
  StopReason stop = StopReason::Completed;
  std::string fault;

  std::string to_csv() const;
  std::string to_json() const;
};

struct IntegrateOptions {
  /// Stop with LeftDomain when a state leaves this box.
  std::optional<SamplingBox> domain;
};

/// Classical fixed-step RK4 from t0 to t1 inclusive; the last step is
/// shortened to land on t1.
Trajectory integrate(const LieSystemSpec& sys, const Point& x0, double t0, double t1, double dt,
                     const IntegrateOptions& opt = {});

struct DriftResult {
  bool ok = false;
  double max_drift = 0.0;
  double h0 = 0.0;
};

/// max |h(x(t)) - h(x(t0))| <= tol (1 + |h(x(t0))|)
DriftResult check_invariant_along(const Trajectory& traj, const Expression& h, double tol);

/// X_i(h) = 0 for every generator.
CheckResult is_first_integral(const LieSystemSpec& sys, const Expression& h, const SamplingBox& box,
                              const ZeroTestOptions& opt = {});

}  // namespace jlie
