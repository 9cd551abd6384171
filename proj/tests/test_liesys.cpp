#include <cmath>

#include "doctest.h"
#include "jlie/liesys.hpp"
#include "support.hpp"

using namespace jlie;
using namespace testsupport;

namespace {

Expression T(const char* s) { return parse(s, time_symbols(*xyz())); }

LieSystemSpec system_of(std::vector<MultiVectorField> gens, std::vector<const char*> coefs) {
  LieSystemSpec s{xyz(), std::move(gens), {}, {}};
  for (const char* c : coefs) s.coefficients.push_back(T(c));
  return s;
}

MultiVectorField bind_b(const MultiVectorField& m, double b) {
  return m.substitute({{"b", Expression::constant(Number::from_double(b))}});
}

}  // namespace

TEST_CASE("commutator") {
  auto a2 = ex_a2();
  auto x1 = hamiltonian_vf(a2, P("exp(-x/b)"));
  auto x2 = hamiltonian_vf(a2, P("1"));
  CHECK(is_zero(commutator(x1, x2) - x1, a2.box).passed());
  CHECK(commutator(vf("1", "0", "0"), vf("0", "1", "0")).entries().empty());
  CHECK(is_zero(commutator(vf("1", "0", "0"), vf("0", "x", "0")) - vf("0", "1", "0"), a2.box).passed());
}

TEST_CASE("structure constants of the worked systems") {
  SamplingBox box = xyz()->default_box();
  auto a2 = ex_a2();
  std::vector<MultiVectorField> g1{bind_b(hamiltonian_vf(a2, P("exp(-x/b)")), 1.0),
                                   bind_b(hamiltonian_vf(a2, P("1")), 1.0)};
  auto sc = structure_constants(g1, box);
  CHECK(sc.at(0, 1, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::fabs(sc.at(0, 1, 1)) < 1e-9);
  CHECK(sc.at(1, 0, 0) == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(sc.residual < 1e-8);
  CHECK(sc.closed);

  auto zero_sc = structure_constants({vf("1", "0", "0"), vf("0", "1", "0")}, box);
  for (double c : zero_sc.c) CHECK(c == 0.0);

  auto j4 = ex_iv_iiivi();
  std::vector<MultiVectorField> g4;
  for (const char* f : {"(2*y-z)*exp(-x)/x", "1", "-1/x"}) g4.push_back(hamiltonian_vf(j4, P(f)));
  auto s4 = structure_constants(g4, box);
  CHECK(s4.at(0, 1, 1) == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(s4.at(0, 1, 2) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s4.at(0, 2, 2) == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(std::fabs(s4.at(0, 1, 0)) < 1e-7);
  CHECK(std::fabs(s4.at(0, 2, 0)) < 1e-7);
  CHECK(std::fabs(s4.at(0, 2, 1)) < 1e-7);
  for (int k = 0; k < 3; ++k) CHECK(std::fabs(s4.at(1, 2, k)) < 1e-7);

  CHECK_THROWS_AS(structure_constants({vf("1", "0", "0"), vf("2", "0", "0")}, box), RankDeficientError);
}

TEST_CASE("Lie closure") {
  auto j2 = ex_iii_iv();
  std::vector<MultiVectorField> g{bind_b(hamiltonian_vf(j2, P("x")), 1.0),
                                  bind_b(hamiltonian_vf(j2, P("-x*ln(x)/b")), 1.0)};
  SamplingBox box = xyz()->default_box();
  auto c = lie_closure(g, 5, box);
  CHECK(c.closed);
  CHECK(c.basis.size() == 2);
  auto again = lie_closure(c.basis, 5, box);
  CHECK(again.basis.size() == 2);

  CHECK(lie_closure({vf("1", "0", "0")}, 1, box).basis.size() == 1);

  auto line = make_chart({"x"});
  SamplingBox lb = line->default_box();
  auto px = MultiVectorField::basis(line, 0);
  auto x2 = MultiVectorField::vector(line, {parse("x^2", line->symbols())});
  auto sl2 = lie_closure({px, x2}, 3, lb);
  CHECK(sl2.closed);
  CHECK(sl2.basis.size() == 3);
  auto capped = lie_closure({px, x2}, 2, lb);
  CHECK_FALSE(capped.closed);
  CHECK(capped.basis.size() == 2);
}

TEST_CASE("RK4 on simple fields") {
  auto sys = system_of({vf("1", "0", "0")}, {"1"});
  auto tr = integrate(sys, {{"x", 0.0}, {"y", 0.0}, {"z", 0.0}}, 0.0, 1.0, 0.1);
  CHECK(tr.stop == StopReason::Completed);
  CHECK(tr.t.size() == 11);
  CHECK(tr.t.back() == 1.0);
  CHECK(tr.x.back()[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(tr.x.back()[1] == 0.0);
  for (std::size_t i = 1; i < tr.t.size(); ++i) CHECK(tr.t[i] > tr.t[i - 1]);

  auto tsys = system_of({vf("1", "0", "0")}, {"t"});
  auto tt = integrate(tsys, {{"x", 0.0}, {"y", 0.0}, {"z", 0.0}}, 0.0, 1.0, 0.1);
  CHECK(std::fabs(tt.x.back()[0] - 0.5) < 1e-12);

  // uneven last step lands on t1
  auto odd = integrate(sys, {{"x", 0.0}, {"y", 0.0}, {"z", 0.0}}, 0.0, 1.0, 0.3);
  CHECK(odd.t.back() == 1.0);
  CHECK(odd.t.size() == 5);

  CHECK_THROWS_AS(integrate(sys, {{"x", 0.0}, {"y", 0.0}, {"z", 0.0}}, 0.0, 1.0, 0.0), Error);

  auto drift = check_invariant_along(tr, P("y"), 1e-12);
  CHECK(drift.ok);
  CHECK(drift.max_drift == 0.0);
}

TEST_CASE("RK4 convergence order") {
  // x' = cos(t) x y, y' = -x
  auto sys = system_of({vf("x*y", "0", "0"), vf("0", "-x", "0")}, {"cos(t)", "1"});
  Point x0{{"x", 1.0}, {"y", 0.5}, {"z", 0.0}};
  auto end = [&](double dt) { return integrate(sys, x0, 0.0, 2.0, dt).x.back(); };
  double dt = 0.1;
  auto ref = end(dt / 16);
  auto e = [&](const std::vector<double>& v) { return std::hypot(v[0] - ref[0], v[1] - ref[1]); };
  double ratio = e(end(dt)) / e(end(dt / 2));
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("domain fault truncates the trajectory") {
  auto sys = system_of({vf("1", "0", "0"), vf("0", "ln(1.5 - x)", "0")}, {"1", "1"});
  auto tr = integrate(sys, {{"x", 0.0}, {"y", 0.0}, {"z", 0.0}}, 0.0, 3.0, 0.01);
  CHECK(tr.stop == StopReason::DomainFault);
  CHECK(tr.t.back() < 1.5);
  CHECK(tr.fault.find("near t=") != std::string::npos);

  IntegrateOptions opt;
  opt.domain = xyz()->default_box();
  auto left = integrate(system_of({vf("1", "0", "0")}, {"1"}), {{"x", 0.5}, {"y", 0.5}, {"z", 0.5}}, 0.0, 2.0,
                        0.01, opt);
  CHECK(left.stop == StopReason::LeftDomain);
}

TEST_CASE("flow of the A2 system from the conserved-quantity example") {
  // b = 1: X1 = X_{x}, X2 = X_{-x ln x}, b1 = sin t, b2 = 1
  auto j2 = ex_iii_iv();
  auto sys = system_of({bind_b(hamiltonian_vf(j2, P("x")), 1.0), bind_b(hamiltonian_vf(j2, P("-x*ln(x)/b")), 1.0)},
                       {"sin(t)", "1"});
  auto tr = integrate(sys, {{"x", 1.0}, {"y", 0.5}, {"z", 0.2}}, 0.0, 2.0, 1e-3);
  REQUIRE(tr.stop == StopReason::Completed);
  CHECK(tr.t.size() == 2001);
  // y + z is a first integral of this system
  CHECK(check_invariant_along(tr, P("y+z"), 1e-9).ok);
  CHECK(is_first_integral(sys, P("y+z"), xyz()->default_box()).passed());
  // h = 1 - exp(-(y-z)) is not: d h/dt = h (b2 (1 + ln x) - b1), see the decisions notes
  auto h = check_invariant_along(tr, P("1-exp(-(y-z))"), 1e-6);
  CHECK_FALSE(h.ok);
  CHECK(h.max_drift > 0.05);
  CHECK_FALSE(check_invariant_along(tr, P("x"), 1e-6).ok);
}

TEST_CASE("trajectory export") {
  auto tr = integrate(system_of({vf("1", "0", "0")}, {"1"}), {{"x", 0.0}, {"y", 0.25}, {"z", 0.0}}, 0.0, 0.5, 0.25);
  std::string csv = tr.to_csv();
  CHECK(csv.rfind("t,x,y,z\n0,0,0.25,0\n0.25,0.25,0.25,0\n", 0) == 0);
  std::string js = tr.to_json();
  CHECK(js.find("\"stop\": \"completed\"") != std::string::npos);
}
