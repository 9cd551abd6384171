#include "doctest.h"
#include "jlie/multivec.hpp"
#include "support.hpp"

using namespace jlie;
using testsupport::P;
using testsupport::xyz;

namespace {

MultiVectorField bivector(std::initializer_list<std::pair<IndexTuple, const char*>> comps) {
  MultiVectorField m(xyz(), 2);
  for (const auto& [k, v] : comps) m.set(k, P(v));
  return m;
}

MultiVectorField vec(const char* a, const char* b, const char* c) {
  return MultiVectorField::vector(xyz(), {P(a), P(b), P(c)});
}

MultiVectorField trivector(const char* v) {
  MultiVectorField m(xyz(), 3);
  m.set({0, 1, 2}, P(v));
  return m;
}

bool zero(const MultiVectorField& m, const SamplingBox& box = testsupport::box_b1()) {
  return is_zero(m, box).passed();
}

const SchoutenRoute kRoutes[] = {SchoutenRoute::Recursive, SchoutenRoute::Coordinate};

}  // namespace

TEST_CASE("wedge") {
  auto dx = MultiVectorField::basis(xyz(), 0), dy = MultiVectorField::basis(xyz(), 1);
  auto w = wedge(dx, dy);
  CHECK(w.degree() == 2);
  CHECK(w.component({0, 1}).is_one_constant());
  CHECK(w.component({1, 0}).number() == Number::integer(-1));

  auto e = vec("0", "exp(x)", "exp(x)*(1-x)");
  auto l = bivector({{{0, 2}, "-x*exp(x)"}, {{1, 2}, "exp(x)*(z-y-1+exp(x))"}});
  CHECK(zero(wedge(e, l) - trivector("x*exp(2*x)")));

  auto x = vec("x*y", "exp(z)", "1");
  CHECK(zero(wedge(x, x)));
  CHECK_THROWS_AS(wedge(wedge(dx, dy), wedge(dx, dy)), Error);
}

TEST_CASE("Schouten brackets of the worked structures") {
  // [L,L] = 2 E^L in the Lichnerowicz convention; Koszul flips the sign
  auto l3 = bivector({{{0, 1}, "(exp(2*x)-1)/4"}, {{0, 2}, "(exp(2*x)-1)/4"}, {{1, 2}, "-(y+z+1-exp(2*x))/2"}});
  auto l2 = bivector({{{0, 1}, "(1-exp(b*(y-z)))/2"}, {{0, 2}, "-(1-exp(b*(y-z)))/2"}, {{1, 2}, "(y+z)*exp(b*(y-z))"}});
  auto l4 = bivector({{{0, 2}, "-x*exp(x)"}, {{1, 2}, "exp(x)*(z-y-1+exp(x))"}});
  for (auto route : kRoutes) {
    CHECK(zero(schouten(l3, l3, SchoutenConvention::Lichnerowicz, route) - trivector("(exp(2*x)-1)/2")));
    CHECK(zero(schouten(l3, l3, SchoutenConvention::Koszul, route) + trivector("(exp(2*x)-1)/2")));
    CHECK(zero(schouten(l2, l2, SchoutenConvention::Lichnerowicz, route) -
               trivector("-2*b*(y+z)*exp(b*(y-z))")));
    CHECK(zero(schouten(l4, l4, SchoutenConvention::Lichnerowicz, route) - trivector("2*x*exp(2*x)")));
  }
}

TEST_CASE("Schouten bracket small cases") {
  auto c = bivector({{{0, 1}, "2"}, {{1, 2}, "-3/2"}});
  auto dx = MultiVectorField::basis(xyz(), 0);
  auto q = bivector({{{0, 1}, "x"}});
  for (auto route : kRoutes) {
    CHECK(schouten(c, c, SchoutenConvention::Lichnerowicz, route).entries().empty());
    // oracle: (L_X Q)^{ij} = X^k d_k Q^{ij} - Q^{kj} d_k X^i - Q^{ik} d_k X^j gives d_x ^ d_y
    auto r = schouten(dx, q, SchoutenConvention::Lichnerowicz, route);
    CHECK(zero(r - bivector({{{0, 1}, "1"}})));
    // [X, f] = X(f)
    auto f = MultiVectorField::scalar(xyz(), P("x*y^2"));
    auto xf = schouten(vec("1", "x", "0"), f, SchoutenConvention::Koszul, route);
    CHECK(is_zero(xf.as_scalar() - P("y^2 + 2*x^2*y"), testsupport::box_b1()).passed());
  }
  CHECK(zero(lie_derivative(dx, q) - bivector({{{0, 1}, "1"}})));
  CHECK(lie_derivative(dx, bivector({{{0, 1}, "y*z"}})).entries().empty());
  CHECK_THROWS_AS(lie_derivative(q, q), Error);
}

TEST_CASE("Lie derivative of the A2 structure along its Reeb field") {
  auto chart = make_chart({"x", "y"}, {"b"});
  MultiVectorField l(chart, 2);
  l.set({0, 1}, parse("1 - exp(-(b+1)*y)", chart->symbols()));
  auto e = MultiVectorField::vector(chart, {parse("b", chart->symbols()), Expression()});
  CHECK(lie_derivative(e, l).entries().empty());
}

TEST_CASE("sharp and pair2") {
  auto chart = make_chart({"x", "y"}, {"b"});
  MultiVectorField unit(chart, 2);
  unit.set({0, 1}, Expression::constant(1));
  auto s = sharp(unit, OneForm::coordinate(chart, 0));
  CHECK(s.component({1}).is_one_constant());
  CHECK(s.component({0}).is_zero_constant());
  CHECK(pair2(unit, OneForm::coordinate(chart, 0), OneForm::coordinate(chart, 1)).is_one_constant());

  auto sym = chart->symbols();
  MultiVectorField l(chart, 2);
  l.set({0, 1}, parse("1 - exp(-(b+1)*y)", sym));
  auto got = sharp(l, differential(chart, parse("exp(-x/b)", sym)));
  auto want = MultiVectorField::vector(chart, {Expression(), parse("(-1+exp(-(1+b)*y))*exp(-x/b)/b", sym)});
  SamplingBox box = chart->default_box();
  box.set_parameter("b", {0.5, 3.0});
  CHECK(is_zero(got - want, box).passed());
  CHECK(sharp(l, OneForm(chart)).entries().empty());

  auto alpha = differential(chart, parse("x*y + exp(y)", sym));
  CHECK(pair2(l, alpha, alpha).is_zero_constant() == false);
  CHECK(is_zero(pair2(l, alpha, alpha), box).passed());

  auto l3 = bivector({{{0, 1}, "(exp(2*x)-1)/4"}, {{0, 2}, "(exp(2*x)-1)/4"}, {{1, 2}, "-(y+z+1-exp(2*x))/2"}});
  CHECK(is_zero(pair2(l3, OneForm::coordinate(xyz(), 1), OneForm::coordinate(xyz(), 2)) + P("(y+z+1-exp(2*x))/2"),
                testsupport::box_b1())
            .passed());
}

TEST_CASE("interior") {
  auto dxdy = bivector({{{0, 1}, "1"}});
  auto r = interior(OneForm::coordinate(xyz(), 0), dxdy);
  CHECK(r.component({1}).is_one_constant());
  CHECK(interior(OneForm::coordinate(xyz(), 2), dxdy).entries().empty());
  auto p = bivector({{{0, 1}, "x"}, {{1, 2}, "1"}});
  CHECK(zero(interior(OneForm::coordinate(xyz(), 0), p) - vec("0", "x", "0")));
  CHECK_THROWS_AS(interior(OneForm::coordinate(xyz(), 0), MultiVectorField::scalar(xyz(), P("x"))), Error);
}

TEST_CASE("serialization keys") {
  auto m = bivector({{{0, 2}, "x"}});
  CHECK(m.key({0, 2}) == "x,z");
  CHECK(m.parse_key("x,z") == IndexTuple{0, 2});
  CHECK_THROWS_AS(m.parse_key("z,x"), Error);
  CHECK_THROWS_AS(m.parse_key("x,w"), Error);
  CHECK_THROWS_AS(make_chart({"x", "t"}), Error);
}

TEST_CASE("random-instance properties") {
  testsupport::RandomExpressions gen(2024);
  SamplingBox box = xyz()->default_box();
  const auto K = SchoutenConvention::Koszul;
  for (int n = 0; n < 60; ++n) {
    int p = gen.uniform(0, 3), q = gen.uniform(0, 3);
    if (p + q == 0) p = 1;
    auto P1 = gen.field(p), Q1 = gen.field(q);
    auto a = schouten(P1, Q1, K, SchoutenRoute::Recursive);
    auto b = schouten(P1, Q1, K, SchoutenRoute::Coordinate);
    auto rab = is_zero(a - b, box);
    CAPTURE(rab.note);
    CHECK(rab.passed());
    // [P,Q] = -(-1)^{(p-1)(q-1)} [Q,P]
    auto sw = schouten(Q1, P1, K, SchoutenRoute::Recursive);
    auto anti = ((p - 1) * (q - 1)) % 2 == 0 ? a + sw : a - sw;
    CHECK(is_zero(anti, box).passed());
  }
  auto pairing = [](const OneForm& beta, const MultiVectorField& v) {
    return Expression::sum({beta[0] * v.component({0}), beta[1] * v.component({1}), beta[2] * v.component({2})});
  };
  for (int n = 0; n < 10; ++n) {
    auto alpha = OneForm(xyz(), {gen.expr(2), gen.expr(2), gen.expr(2)});
    auto beta = OneForm(xyz(), {gen.expr(2), gen.expr(2), gen.expr(2)});
    auto l = gen.field(2);
    CHECK(is_zero(pairing(beta, sharp(l, alpha)) - pair2(l, alpha, beta), box).passed());
    CHECK(is_zero(pairing(beta, interior(alpha, l)) - pair2(l, alpha, beta), box).passed());
    CHECK(is_zero(pair2(l, alpha, beta) + pair2(l, beta, alpha), box).passed());
    CHECK(is_zero(interior(alpha, interior(alpha, l)), box).passed());
  }
}
