#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "jlie/catalog.hpp"

using namespace jlie;

namespace {

const Catalog& shipped() {
  static const Catalog cat = load_catalog(JLIE_CATALOG_PATH);
  return cat;
}

const CatalogEntry& entry(const char* id) {
  const CatalogEntry* e = shipped().find(id);
  REQUIRE_MESSAGE(e != nullptr, id);
  return *e;
}

CheckResult same(const MultiVectorField& a, const MultiVectorField& b, const SamplingBox& box) {
  return is_zero(a - b, box);
}

std::string minimal_entry(const std::string& lambda_xy) {
  return R"({"schema_version": 1, "entries": [{"id": "T9:X", "table": 9, "label": "x", "coords": ["x", "y"],
    "params": [], "lambda": {"x,y": ")" +
         lambda_xy + R"("}, "E": {}, "box": {"x": [0.2, 1.2], "y": [0.2, 1.2]}}]})";
}

}  // namespace

TEST_CASE("shipped catalog holds every table row") {
  const Catalog& cat = shipped();
  CHECK(cat.schema_version == 1);
  int counts[4] = {0, 0, 0, 0};
  for (const auto& e : cat.entries) {
    REQUIRE(e.table >= 1);
    REQUIRE(e.table <= 3);
    ++counts[e.table];
    CHECK(e.id.rfind("T" + std::to_string(e.table) + ":", 0) == 0);
  }
  CHECK(counts[1] == 3);
  CHECK(counts[2] == 40);
  CHECK(counts[3] == 14);
  // near-duplicate rows are kept, with a suffix on the id
  CHECK(cat.find("T2:VIa-VIbvii") != nullptr);
  CHECK(cat.find("T2:VIa-VIbvii-2") != nullptr);
  CHECK(entry("T1:A2-A2i").label == "((A₂,bX̃²),(A₂.i,−bX₁))");
  CHECK(entry("T2:III-IIIiv").label == "((Ⅲ,−bX̃²+bX̃³),(Ⅲ.iv,bX₁))");
}

TEST_CASE("table 1 rows load as printed") {
  JacobiStructure j1 = instantiate(entry("T1:A1-A1"), {});
  ChartPtr c = j1.chart;
  MultiVectorField lam(c, 2);
  lam.set({0, 1}, parse("1 - exp(-x)", c->symbols()));
  CHECK(same(j1.lambda, lam, j1.box).passed());
  CHECK(same(j1.reeb, MultiVectorField::vector(c, {Expression(), Expression::constant(-1)}), j1.box).passed());

  JacobiStructure j3 = instantiate(entry("T1:A1-A2"), {});
  CHECK(j3.lambda.entries().empty());
  CHECK(same(j3.reeb, MultiVectorField::basis(j3.chart, 1), j3.box).passed());
}

TEST_CASE("instantiate substitutes parameters") {
  JacobiStructure j = instantiate(entry("T1:A2-A2i"), {{"b", 1.0}});
  MultiVectorField lam(j.chart, 2);
  lam.set({0, 1}, parse("1 - exp(-2*y)", j.chart->symbols()));
  CHECK(same(j.lambda, lam, j.box).passed());
  CHECK(same(j.reeb, MultiVectorField::basis(j.chart, 0), j.box).passed());
  CHECK(j.status == VerificationStatus::Unverified);

  JacobiStructure v = instantiate(entry("T2:III-VI0iv"), {});
  MultiVectorField lv(v.chart, 2);
  lv.set({1, 2}, parse("-2*(y+z)", v.chart->symbols()));
  CHECK(same(v.lambda, lv, v.box).passed());
  CHECK(same(v.reeb, MultiVectorField::vector(v.chart, {Expression(), Expression::constant(-1), Expression::constant(1)}),
             v.box)
            .passed());
}

TEST_CASE("parameter checks") {
  const CatalogEntry& e = entry("T2:III-VIavii");
  CHECK_THROWS_AS(instantiate(e, {{"a", 1.0}}), ExcludedParameterError);
  CHECK_THROWS_AS(instantiate(e, {}), ParameterError);
  CHECK_THROWS_AS(instantiate(e, {{"a", 2.0}, {"q", 1.0}}), ParameterError);
  CHECK_THROWS_AS(instantiate(e, {{"a", 7.0}}), ParameterError);
  CHECK_NOTHROW(instantiate(e, {{"a", 2.0}}));
  CHECK_THROWS_AS(instantiate(entry("T2:III-IIIi"), {{"b", 0.0}}), ExcludedParameterError);
}

TEST_CASE("default parameter draws") {
  CHECK(default_draws(entry("T2:III-Vi")).size() == 1);
  auto a2 = default_draws(entry("T1:A2-A2i"));
  REQUIRE(a2.size() == 2);
  CHECK(a2[0].at("b") == 1.0);
  CHECK(a2[1].at("b") == -2.0);
  // b = 1 is excluded where 1/(b-1) occurs
  auto v = default_draws(entry("T2:VIa-VIbv"));
  REQUIRE(v.size() == 2);
  CHECK(v[0].at("b") == 2.0);
  CHECK(v[0].at("a") == 2.0);
  CHECK(v[1].at("b") == -2.0);
  CHECK(v[1].at("a") == -3.0);
}

TEST_CASE("exclusions cover every parameter denominator") {
  for (const auto& e : shipped().entries) {
    if (e.params.empty()) continue;
    std::vector<Expression> exprs;
    for (const auto& [k, v] : e.lambda) exprs.push_back(v);
    exprs.insert(exprs.end(), e.reeb.begin(), e.reeb.end());
    for (const auto& ex : exprs)
      for (const auto& d : parameter_denominators(ex, e.chart->symbols())) {
        // scan one parameter at a time, others at a generic admissible value
        for (const auto& p : e.params) {
          for (int k = -40; k <= 40; ++k) {
            double val = k / 8.0;
            Point pt;
            for (const auto& q : e.params) pt.set(q.name, q.name == p.name ? val : 2.375);
            if (std::fabs(eval(d, pt)) < 1e-12) {
              bool covered = std::find(p.excluded.begin(), p.excluded.end(), val) != p.excluded.end();
              CHECK_MESSAGE(covered, e.id << ": " << d.render() << " vanishes at " << p.name << "=" << val);
            }
          }
        }
      }
  }
}

TEST_CASE("every entry and example evaluates on its box") {
  for (const auto& e : shipped().entries) {
    for (const auto& params : default_draws(e)) {
      JacobiStructure j = instantiate(e, params);
      std::vector<Expression> exprs = j.lambda.dense();
      for (const auto& c : j.reeb.dense()) exprs.push_back(c);
      for (const auto& ex : e.examples) {
        ExampleInstance inst = instantiate_example(e, ex, params, j.chart);
        exprs.insert(exprs.end(), inst.hamiltonians.begin(), inst.hamiltonians.end());
        for (const auto& f : inst.fields)
          for (const auto& c : f.dense()) exprs.push_back(c);
        if (inst.invariant) exprs.push_back(*inst.invariant);
      }
      CompiledExpressions prog(exprs, j.box.slot_names());
      std::vector<double> out(exprs.size());
      for (const auto& pt : j.box.sample(50, 7)) {
        CHECK_NOTHROW(prog.eval(pt, out));
        for (double v : out) CHECK(std::isfinite(v));
      }
    }
  }
}

TEST_CASE("examples are attached to their entries") {
  CHECK(entry("T1:A2-A2i").examples.size() == 1);
  CHECK(entry("T2:III-IIIiv").examples.size() == 2);
  CHECK(entry("T2:III-IIIv").examples.size() == 2);
  CHECK(entry("T2:IV-IIIvi").examples.size() == 2);
  CHECK(entry("T2:VI0-IIIix").examples.size() == 1);
  std::size_t total = 0;
  for (const auto& e : shipped().entries)
    for (const auto& ex : e.examples) {
      ++total;
      CHECK(ex.fields.size() == ex.hamiltonians.size());
    }
  CHECK(total == 8);
  const auto& c = entry("T2:IV-IIIvi").examples[0].commutators;
  REQUIRE(c.size() == 2);
  CHECK(c[0].coeffs == std::vector<double>{0, -1, 1});
  CHECK(c[1].coeffs == std::vector<double>{0, 0, -1});
}

TEST_CASE("schema errors carry a JSON pointer") {
  try {
    parse_catalog(R"({"schema_version": 1, "entries": [{"id": "T9:X"}]})");
    FAIL("expected an error");
  } catch (const CatalogError& e) {
    CHECK(e.pointer() == "/entries/0");
    CHECK(std::string(e.what()).find("label") != std::string::npos);
  }
  try {
    parse_catalog(R"({"entries": []})");
    FAIL("expected an error");
  } catch (const CatalogError& e) {
    CHECK(e.pointer() == "");
  }
  try {
    parse_catalog(minimal_entry("1").replace(minimal_entry("1").find("[0.2, 1.2]}"), 11, "[2, 1]}"));
    FAIL("expected an error");
  } catch (const CatalogError& e) {
    CHECK(e.pointer() == "/entries/0/box/y");
  }
  CHECK_NOTHROW(parse_catalog(minimal_entry("1 - exp(-x)")));
}

TEST_CASE("malformed component names the entry") {
  try {
    parse_catalog(minimal_entry("1 - exp(-x"));
    FAIL("expected an error");
  } catch (const CatalogError&) {
    FAIL("expected a parse error, not a schema error");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(msg.find("T9:X") != std::string::npos);
    CHECK(msg.find("/entries/0/lambda/x,y") != std::string::npos);
  }
  CHECK_THROWS_AS(load_catalog("/nonexistent/catalog.json"), Error);
}

TEST_CASE("build_from_group_data") {
  ChartPtr c = make_chart({"x", "y"}, {"b"});
  auto P = [&](const char* s) { return parse(s, c->symbols()); };
  auto V = [&](const char* a, const char* b) { return MultiVectorField::vector(c, {P(a), P(b)}); };
  SamplingBox box = c->default_box();
  box.set_parameter("b", {1.0, 1.0});

  SUBCASE("r = 0 gives E only") {
    GroupData gd{c, {{0, 0}, {0, 0}}, {V("1", "0"), V("-x", "1")}, {V("exp(-y)", "0"), V("0", "1")}, P("b*y"),
                 {P("2"), P("3")}};
    JacobiStructure j = build_from_group_data(gd, box);
    CHECK(j.lambda.entries().empty());
    CHECK(same(j.reeb, V("-2+3*x", "-3"), box).passed());
  }
  SUBCASE("equal left and right fields with sigma = 0") {
    GroupData gd{c, {{0, 1}, {-1, 0}}, {V("1", "0"), V("y", "1")}, {V("1", "0"), V("y", "1")}, Expression(),
                 {Expression(), Expression()}};
    JacobiStructure j = build_from_group_data(gd, box);
    CHECK(is_zero(j.lambda, box).passed());
  }
  SUBCASE("affine group realization reproduces the A2 row") {
    GroupData gd{c, {{0, 1}, {-1, 0}}, {V("1", "0"), V("-x", "1")}, {V("exp(-y)", "0"), V("0", "1")}, P("b*y"),
                 {P("-b"), Expression()}};
    JacobiStructure j = build_from_group_data(gd, box);
    MultiVectorField lam(c, 2);
    lam.set({0, 1}, P("1 - exp(-(b+1)*y)"));
    CHECK(same(j.lambda, lam, box).passed());
    CHECK(same(j.reeb, V("b", "0"), box).passed());
    CHECK(j.status == VerificationStatus::Unverified);
    CHECK(verify_jacobi(j).passed());
  }
  SUBCASE("invalid input") {
    GroupData gd{c, {{0, 1}, {1, 0}}, {V("1", "0"), V("0", "1")}, {V("1", "0"), V("0", "1")}, Expression(),
                 {Expression(), Expression()}};
    CHECK_THROWS_AS(build_from_group_data(gd, box), Error);
    gd.r = {{0, 1}, {-1, 0}};
    gd.left.pop_back();
    CHECK_THROWS_AS(build_from_group_data(gd, box), Error);
  }
}

TEST_CASE("verify_all sweeps the whole catalog") {
  VerifyAllOptions opt;
  opt.zero.samples = 60;
  auto reports = verify_all(shipped().entries, opt);
  REQUIRE(reports.size() == shipped().entries.size());
  CHECK(std::is_sorted(reports.begin(), reports.end(), [](const auto& a, const auto& b) { return a.id < b.id; }));
  std::size_t flagged = 0;
  for (const auto& r : reports) {
    CHECK_MESSAGE(r.error.empty(), r.id << ": " << r.error);
    CHECK_MESSAGE(r.implementations_agree(), r.id);
    // flag stability: a failure is exactly a recorded discrepancy
    CHECK_MESSAGE(r.accepted(), r.id);
    if (r.flagged) ++flagged;
  }
  CHECK(flagged == 1);
  auto it = std::find_if(reports.begin(), reports.end(), [](const auto& r) { return r.id == "T2:III-IIIiv"; });
  REQUIRE(it != reports.end());
  CHECK(it->passed());
  CHECK(it->draws.size() == 2);

  // the parallel sweep matches a serial one
  opt.threads = 1;
  auto serial = verify_all(shipped().entries, opt);
  for (std::size_t k = 0; k < reports.size(); ++k) {
    CHECK(serial[k].id == reports[k].id);
    CHECK(serial[k].passed() == reports[k].passed());
  }
}
