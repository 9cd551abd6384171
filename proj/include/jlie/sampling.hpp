#pragma once

// Sampling boxes and the probabilistic zero test.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "jlie/expr.hpp"

namespace jlie {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Sampled points must keep |expr| >= clearance.
struct Exclusion {
  Expression expr;
  double clearance = 1e-3;
};

class SamplingBox {
 public:
  SamplingBox() = default;

  void set_coordinate(const std::string& name, Interval iv);
  void set_parameter(const std::string& name, Interval iv);
  void add_exclusion(Expression e, double clearance);

  const std::vector<std::pair<std::string, Interval>>& coordinates() const { return coordinates_; }
  const std::vector<std::pair<std::string, Interval>>& parameters() const { return parameters_; }
  const std::vector<Exclusion>& exclusions() const { return exclusions_; }

  /// Coordinate names followed by parameter names, the slot order used for
  /// compiled evaluation.
  std::vector<std::string> slot_names() const;

  /// Deterministic draw of n points honouring the exclusions. Throws
  /// DomainError when the exclusions reject too many candidates.
  std::vector<std::vector<double>> sample(std::size_t n, std::uint64_t seed) const;

  Point to_point(const std::vector<double>& slots) const;

 private:
  std::vector<std::pair<std::string, Interval>> coordinates_;
  std::vector<std::pair<std::string, Interval>> parameters_;
  std::vector<Exclusion> exclusions_;
};

struct ZeroTestOptions {
  std::size_t samples = 200;
  double tol = 1e-8;
  std::uint64_t seed = 42;
};

enum class Outcome { Zero, NonZero, BadBox };

const char* outcome_name(Outcome o);

struct CheckResult {
  Outcome outcome = Outcome::Zero;
  /// Largest |e(p)| seen over all evaluated points.
  double max_residual = 0.0;
  /// First failing point (NonZero) or faulting point (BadBox).
  std::optional<Point> witness;
  /// Index of the first failing expression in a batch.
  std::size_t failing_index = 0;
  std::string note;

  bool passed() const { return outcome == Outcome::Zero; }
};

CheckResult is_zero(const Expression& e, const SamplingBox& box, const ZeroTestOptions& opt = {});

/// Zero test of several expressions on one shared set of points.
CheckResult is_zero_all(const std::vector<Expression>& exprs, const SamplingBox& box,
                        const ZeroTestOptions& opt = {});

/// Folds b into a: the worse outcome wins, residuals take the max.
void merge_into(CheckResult& a, const CheckResult& b, std::size_t index_offset = 0);

}  // namespace jlie
