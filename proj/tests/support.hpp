#pragma once

#include <random>
#include <string>

#include "jlie/jacobi.hpp"
#include "jlie/multivec.hpp"

namespace testsupport {

using namespace jlie;

inline ChartPtr xyz() {
  static const ChartPtr c = make_chart({"x", "y", "z"}, {"a", "b"});
  return c;
}

inline Expression P(const std::string& s) { return parse(s, xyz()->symbols()); }

inline SamplingBox box_b1() {
  SamplingBox box = xyz()->default_box();
  box.set_parameter("b", {1.0, 1.0});
  return box;
}

// Random expressions that stay finite and moderate on [0.2, 1.2]^3
// (arguments of ln and negative powers are at least 1).
class RandomExpressions {
 public:
  explicit RandomExpressions(std::uint64_t seed) : rng_(seed) {}

  Expression leaf() {
    static const char* vars[] = {"x", "y", "z"};
    int pick = uniform(0, 4);
    if (pick < 3) return Expression::variable(vars[pick]);
    return Expression::constant(Number::rational(uniform(-3, 3), uniform(1, 3)));
  }

  Expression expr(int depth = 3) {
    if (depth == 0) return leaf();
    switch (uniform(0, 7)) {
      case 0:
      case 1:
        return expr(depth - 1) + expr(depth - 1);
      case 2:
      case 3:
        return expr(depth - 1) * expr(depth - 1);
      case 4:
        return Expression::exp(Expression::constant(Number::rational(uniform(-2, 2), 2)) * leaf());
      case 5:
        return Expression::sinh(leaf());
      case 6:
        return Expression::ln(Expression::constant(4) + leaf());
      default:
        return Expression::power(Expression::constant(4) + leaf(), Number::integer(uniform(-2, 2)));
    }
  }

  // Mostly nonzero components.
  MultiVectorField field(int degree, int depth = 2) {
    MultiVectorField m(xyz(), degree);
    for (const auto& t : m.all_tuples())
      if (uniform(0, 5) > 0) m.accumulate(t, expr(depth));
    return m;
  }

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testsupport

namespace testsupport {

// Structure on the xyz chart from "i,j" -> expression strings; parameters
// stay symbolic and are pinned in the box.
inline jlie::JacobiStructure structure(std::initializer_list<std::pair<const char*, const char*>> lambda,
                                       std::initializer_list<const char*> reeb, double b = 1.0,
                                       std::string name = {}) {
  using namespace jlie;
  MultiVectorField l(xyz(), 2);
  for (const auto& [k, v] : lambda) l.set(l.parse_key(k), P(v));
  std::vector<Expression> e;
  for (const char* s : reeb) e.push_back(P(s));
  SamplingBox box = xyz()->default_box();
  box.set_parameter("b", {b, b});
  return JacobiStructure(xyz(), l, MultiVectorField::vector(xyz(), e), box, std::move(name));
}

inline jlie::MultiVectorField vf(const char* a, const char* b, const char* c) {
  return jlie::MultiVectorField::vector(xyz(), {P(a), P(b), P(c)});
}

// The structures of the worked examples, written on x, y, z.
inline jlie::JacobiStructure ex_a2(double b = 1.0) {
  return structure({{"x,y", "1 - exp(-(b+1)*y)"}}, {"b", "0", "0"}, b, "A2-A2i");
}
inline jlie::JacobiStructure ex_iii_iv(double b = 1.0) {
  return structure({{"x,y", "(1-exp(b*(y-z)))/2"}, {"x,z", "-(1-exp(b*(y-z)))/2"}, {"y,z", "(y+z)*exp(b*(y-z))"}},
                   {"-b", "0", "0"}, b, "III-IIIiv");
}
inline jlie::JacobiStructure ex_iii_v() {
  return structure({{"x,y", "(exp(2*x)-1)/4"}, {"x,z", "(exp(2*x)-1)/4"}, {"y,z", "-(y+z+1-exp(2*x))/2"}},
                   {"0", "-1/2", "1/2"}, 1.0, "III-IIIv");
}
inline jlie::JacobiStructure ex_iv_iiivi() {
  return structure({{"x,z", "-x*exp(x)"}, {"y,z", "exp(x)*(z-y-1+exp(x))"}}, {"0", "exp(x)", "exp(x)*(1-x)"}, 1.0,
                   "IV-IIIvi");
}
inline jlie::JacobiStructure ex_vi0_iiiix() {
  return structure({{"x,y", "1+y-exp(-z)"}, {"x,z", "exp(-z)*sinh(z)"}, {"y,z", "1-exp(-z)*cosh(z)"}},
                   {"1", "0", "0"}, 1.0, "VI0-IIIix");
}

}  // namespace testsupport
