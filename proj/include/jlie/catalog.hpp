#pragma once

// Catalog of tabulated Jacobi structures, their worked examples, and the
// construction of (L, E) from group data.

#include <map>
#include <string>
#include <vector>

#include "jlie/jacobi.hpp"
#include "jlie/liesys.hpp"

namespace jlie {

/// Schema violation; the message starts with a JSON pointer.
class CatalogError : public Error {
 public:
  CatalogError(std::string pointer, const std::string& message);
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class ExcludedParameterError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

using ParamValues = std::map<std::string, double, std::less<>>;

struct ParamSpec {
  std::string name;
  Interval range;
  std::vector<double> excluded;
};

/// An expected relation {f_i, f_j} = expect, or [X_i, X_j] = sum_k coeff[k] X_k.
struct BracketRelation {
  int i = 0;
  int j = 0;
  std::string text;
  Expression expect;           // over f1..fn (brackets)
  std::vector<double> coeffs;  // over X1..Xn (commutators)
};

struct PrintedDiscrepancy {
  std::string item;
  std::string note;
};

struct ExampleData {
  std::string kind;  // "hamiltonian_system" or "constant_of_motion"
  std::vector<Expression> hamiltonians;
  /// Printed Hamiltonian fields, one component list per generator.
  std::vector<std::vector<Expression>> fields;
  /// 1-based indices of the printed good Hamiltonians.
  std::vector<int> good;
  std::vector<BracketRelation> brackets;
  std::vector<BracketRelation> commutators;
  std::optional<Expression> invariant;
  std::optional<std::vector<Expression>> symmetry;
  std::vector<PrintedDiscrepancy> discrepancies;
};

struct CatalogEntry {
  std::string id;
  std::string label;
  int table = 0;
  ChartPtr chart;  // coordinates plus the entry's parameters
  std::vector<ParamSpec> params;
  /// "i,j" key -> component, parameters still symbolic.
  std::vector<std::pair<std::string, Expression>> lambda;
  /// One component per coordinate.
  std::vector<Expression> reeb;
  std::vector<std::pair<std::string, Interval>> box;
  std::vector<Exclusion> exclusions;
  bool paper_discrepancy = false;
  std::string discrepancy_note;
  std::vector<ExampleData> examples;

  const ParamSpec* param(std::string_view name) const;
  std::vector<std::string> param_names() const;
};

struct Catalog {
  int schema_version = 0;
  std::vector<CatalogEntry> entries;

  /// nullptr when absent.
  const CatalogEntry* find(std::string_view id) const;
};

/// Reads and validates a catalog file. Throws CatalogError (schema, with a
/// JSON pointer) or Error naming the entry whose expression fails to parse.
Catalog load_catalog(const std::string& path);
Catalog parse_catalog(const std::string& json_text);

/// Parameter draws used by verify_all: (b=1, a=2) and (b=-2, a=-3), with a
/// value replaced by (b=2, a=3) when excluded. Deduplicated; one empty draw
/// for entries without parameters.
std::vector<ParamValues> default_draws(const CatalogEntry& entry);

/// Checks names, ranges and exclusions. Throws ParameterError or
/// ExcludedParameterError.
void check_parameters(const CatalogEntry& entry, const ParamValues& params);

/// Parameters replaced by numeric constants.
std::map<std::string, Expression, std::less<>> parameter_bindings(const ParamValues& params);

/// The entry's structure with parameters substituted. Missing parameters
/// are an error.
JacobiStructure instantiate(const CatalogEntry& entry, const ParamValues& params);

/// Parses text with the entry's symbols and substitutes the parameters.
Expression parse_bound(const CatalogEntry& entry, const ParamValues& params, std::string_view text);

/// Example data with parameters substituted; fields and Hamiltonians live on
/// the structure's chart.
struct ExampleInstance {
  const ExampleData* data = nullptr;
  std::vector<Expression> hamiltonians;
  std::vector<MultiVectorField> fields;
  std::vector<Expression> bracket_expect;  // aligned with data->brackets
  std::optional<Expression> invariant;
  std::optional<MultiVectorField> symmetry;
};

ExampleInstance instantiate_example(const CatalogEntry& entry, const ExampleData& ex, const ParamValues& params,
                                    const ChartPtr& chart);

struct GroupData {
  ChartPtr chart;
  /// r^{ij}, antisymmetric.
  std::vector<std::vector<double>> r;
  std::vector<MultiVectorField> right;
  std::vector<MultiVectorField> left;
  Expression sigma;
  /// X0 = alpha^i X_i.
  std::vector<Expression> alpha;
};

/// L^{mu nu} = sum_{i,j} r^{ij} (X_i^{R mu} X_j^{R nu} - e^{-sigma} X_i^{L mu} X_j^{L nu}) on mu < nu,
/// E = -alpha^i X_i^R. The result is unverified.
JacobiStructure build_from_group_data(const GroupData& gd, SamplingBox box);

struct DrawReport {
  ParamValues params;
  VerificationReport recursive;
  VerificationReport coordinate;
  bool agree() const { return recursive.outcome() == coordinate.outcome(); }
};

struct EntryReport {
  std::string id;
  std::vector<DrawReport> draws;
  /// Set when instantiation or sampling failed outright.
  std::string error;
  bool flagged = false;  // paper_discrepancy in the catalog

  bool passed() const;
  bool implementations_agree() const;
  /// Both implementations reject the entry on some draw.
  bool discrepancy_detected() const;
  /// Passed, or failed exactly as flagged.
  bool accepted() const;
};

struct VerifyAllOptions {
  ZeroTestOptions zero;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Verifies every entry at its default draws with both Schouten routes.
/// Never throws for a single entry; reports are ordered by id.
std::vector<EntryReport> verify_all(const std::vector<CatalogEntry>& entries, const VerifyAllOptions& opt = {});

}  // namespace jlie
