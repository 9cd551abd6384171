#include "jlie/jacobi.hpp"

#include <algorithm>

namespace jlie {

namespace {
constexpr auto kLich = SchoutenConvention::Lichnerowicz;

MultiVectorField scalar_field(const JacobiStructure& j, const Expression& f) {
  return MultiVectorField::scalar(j.chart, f);
}
}  // namespace

const char* status_name(VerificationStatus s) {
  switch (s) {
    case VerificationStatus::Unverified: return "unverified";
    case VerificationStatus::Verified: return "verified";
    case VerificationStatus::Failed: return "failed";
  }
  return "?";
}

JacobiStructure::JacobiStructure(ChartPtr c, MultiVectorField l, MultiVectorField e, SamplingBox b, std::string n)
    : chart(std::move(c)), lambda(std::move(l)), reeb(std::move(e)), box(std::move(b)), name(std::move(n)) {
  if (lambda.degree() != 2) throw Error("Jacobi structure needs a bivector");
  if (reeb.degree() != 1) throw Error("Reeb field must be a vector field");
  if (lambda.chart()->coordinates() != chart->coordinates() || reeb.chart()->coordinates() != chart->coordinates())
    throw Error("chart mismatch");
}

Outcome VerificationReport::outcome() const {
  Outcome o = Outcome::Zero;
  for (const auto& a : axioms) {
    if (a.check.outcome == Outcome::BadBox) return Outcome::BadBox;
    if (a.check.outcome == Outcome::NonZero) o = Outcome::NonZero;
  }
  return o;
}

double VerificationReport::max_residual() const {
  double r = 0.0;
  for (const auto& a : axioms) r = std::max(r, a.check.max_residual);
  return r;
}

VerificationReport verify_jacobi(const JacobiStructure& j, const ZeroTestOptions& opt, SchoutenRoute route) {
  VerificationReport rep;
  rep.entry = j.name;
  rep.options = opt;
  rep.route = route;

  MultiVectorField identity = schouten(j.lambda, j.lambda, kLich, route);
  // on a chart of dimension < 3 every trivector vanishes
  if (j.chart->dim() >= 3) identity = identity - Expression::constant(2) * wedge(j.reeb, j.lambda);
  rep.axioms.push_back({"schouten_identity", is_zero(identity, j.box, opt)});
  rep.axioms.push_back({"reeb_invariance", is_zero(schouten(j.reeb, j.lambda, kLich, route), j.box, opt)});
  return rep;
}

VerificationReport verify_and_mark(JacobiStructure& j, const ZeroTestOptions& opt) {
  VerificationReport rep = verify_jacobi(j, opt);
  j.status = rep.passed() ? VerificationStatus::Verified : VerificationStatus::Failed;
  return rep;
}

Expression jacobi_bracket(const JacobiStructure& j, const Expression& f, const Expression& g) {
  Expression p = pair2(j.lambda, differential(j.chart, f), differential(j.chart, g));
  return p + f * apply(j.reeb, g) - g * apply(j.reeb, f);
}

Expression jacobi_bracket_via_schouten(const JacobiStructure& j, const Expression& f, const Expression& g,
                                       SchoutenRoute route) {
  MultiVectorField fs = scalar_field(j, f), gs = scalar_field(j, g);
  MultiVectorField lf = schouten(j.lambda, fs, kLich, route);
  Expression lfg = schouten(lf, gs, kLich, route).as_scalar();
  Expression eg = schouten(j.reeb, gs, kLich, route).as_scalar();
  Expression ef = schouten(j.reeb, fs, kLich, route).as_scalar();
  return lfg + f * eg - g * ef;
}

MultiVectorField hamiltonian_vf(const JacobiStructure& j, const Expression& f) {
  return sharp(j.lambda, differential(j.chart, f)) + f * j.reeb;
}

MultiVectorField hamiltonian_vf_via_schouten(const JacobiStructure& j, const Expression& f, SchoutenRoute route) {
  return schouten(j.lambda, scalar_field(j, f), kLich, route) + f * j.reeb;
}

CheckResult is_good_hamiltonian(const JacobiStructure& j, const Expression& f, const ZeroTestOptions& opt) {
  return is_zero(apply(j.reeb, f), j.box, opt);
}

CheckResult check_hamiltonian_pair(const JacobiStructure& j, const MultiVectorField& x, const Expression& f,
                                   const ZeroTestOptions& opt) {
  return is_zero(x - hamiltonian_vf(j, f), j.box, opt);
}

CheckResult is_constant_of_motion(const JacobiStructure& j, const Expression& h,
                                  const std::vector<Expression>& generators, const ZeroTestOptions& opt) {
  std::vector<Expression> brackets;
  for (const auto& f : generators) brackets.push_back(jacobi_bracket(j, f, h));
  return is_zero_all(brackets, j.box, opt);
}

MultiVectorField symmetry_field(const JacobiStructure& j, const Expression& h) { return hamiltonian_vf(j, h); }

CheckResult check_lie_symmetry(const MultiVectorField& xh, const std::vector<MultiVectorField>& generators,
                               const SamplingBox& box, const ZeroTestOptions& opt) {
  std::vector<Expression> comps;
  for (const auto& g : generators) {
    MultiVectorField c = lie_bracket(xh, g);
    for (const auto& [k, v] : c.entries()) comps.push_back(v);
  }
  return is_zero_all(comps, box, opt);
}

CheckResult homomorphism_check(const JacobiStructure& j, const Expression& f, const Expression& g,
                               const ZeroTestOptions& opt) {
  if (j.status != VerificationStatus::Verified) throw UnverifiedStructureError();
  MultiVectorField lhs = hamiltonian_vf(j, jacobi_bracket(j, f, g));
  MultiVectorField rhs = lie_bracket(hamiltonian_vf(j, f), hamiltonian_vf(j, g));
  return is_zero(lhs - rhs, j.box, opt);
}

}  // namespace jlie
