#pragma once

// Jacobi structures (L, E): axioms, the Kirillov bracket, Hamiltonian vector
// fields, constants of motion and Lie symmetries.

#include <string>
#include <vector>

#include "jlie/multivec.hpp"
#include "jlie/sampling.hpp"

namespace jlie {

enum class VerificationStatus { Unverified, Verified, Failed };

const char* status_name(VerificationStatus s);

struct JacobiStructure {
  JacobiStructure(ChartPtr chart, MultiVectorField lambda, MultiVectorField reeb, SamplingBox box,
                  std::string name = {});

  ChartPtr chart;
  MultiVectorField lambda;
  MultiVectorField reeb;
  SamplingBox box;
  std::string name;
  VerificationStatus status = VerificationStatus::Unverified;
};

struct AxiomCheck {
  std::string axiom;  // "schouten_identity" or "reeb_invariance"
  CheckResult check;
};

struct VerificationReport {
  std::string entry;
  std::vector<AxiomCheck> axioms;
  ZeroTestOptions options;
  SchoutenRoute route = SchoutenRoute::Recursive;

  Outcome outcome() const;
  bool passed() const { return outcome() == Outcome::Zero; }
  double max_residual() const;
};

/// Checks [L,L] - 2 E^L = 0 and [E,L] = 0 (Lichnerowicz signs) on J.box.
VerificationReport verify_jacobi(const JacobiStructure& j, const ZeroTestOptions& opt = {},
                                 SchoutenRoute route = SchoutenRoute::Recursive);

/// Runs verify_jacobi and records the verdict in j.status.
VerificationReport verify_and_mark(JacobiStructure& j, const ZeroTestOptions& opt = {});

/// {f,g} = L(df,dg) + f E(g) - g E(f)
Expression jacobi_bracket(const JacobiStructure& j, const Expression& f, const Expression& g);

/// The same bracket assembled from Schouten brackets: [[L,f],g] + f[E,g] - g[E,f].
Expression jacobi_bracket_via_schouten(const JacobiStructure& j, const Expression& f, const Expression& g,
                                       SchoutenRoute route);

/// X_f = L#(df) + f E
MultiVectorField hamiltonian_vf(const JacobiStructure& j, const Expression& f);

/// X_f = [L,f] + f E
MultiVectorField hamiltonian_vf_via_schouten(const JacobiStructure& j, const Expression& f, SchoutenRoute route);

/// E(f) = 0
CheckResult is_good_hamiltonian(const JacobiStructure& j, const Expression& f, const ZeroTestOptions& opt = {});

/// X - X_f = 0 componentwise.
CheckResult check_hamiltonian_pair(const JacobiStructure& j, const MultiVectorField& x, const Expression& f,
                                   const ZeroTestOptions& opt = {});

/// {f_i, h} = 0 for every generator.
CheckResult is_constant_of_motion(const JacobiStructure& j, const Expression& h,
                                  const std::vector<Expression>& generators, const ZeroTestOptions& opt = {});

/// X_h, named for symmetry reports.
MultiVectorField symmetry_field(const JacobiStructure& j, const Expression& h);

/// [X_h, X_i] = 0 for every generator.
CheckResult check_lie_symmetry(const MultiVectorField& xh, const std::vector<MultiVectorField>& generators,
                               const SamplingBox& box, const ZeroTestOptions& opt = {});

class UnverifiedStructureError : public Error {
 public:
  UnverifiedStructureError() : Error("structure unverified: run verify_jacobi first") {}
};

/// X_{f,g} - [X_f, X_g] = 0. Throws UnverifiedStructureError unless
/// j.status is Verified.
CheckResult homomorphism_check(const JacobiStructure& j, const Expression& f, const Expression& g,
                               const ZeroTestOptions& opt = {});

}  // namespace jlie
