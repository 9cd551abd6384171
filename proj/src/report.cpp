#include "jlie/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace jlie {

const char* verdict_name(ItemVerdict v) {
  switch (v) {
    case ItemVerdict::Pass:
      return "pass";
    case ItemVerdict::Discrepancy:
      return "discrepancy";
    case ItemVerdict::Fail:
      return "fail";
  }
  return "?";
}

bool CriterionResult::passed() const {
  return std::none_of(items.begin(), items.end(), [](const ReportItem& i) { return i.verdict == ItemVerdict::Fail; });
}

int AcceptanceReport::unexpected_failures() const {
  int n = 0;
  for (const auto& c : criteria)
    if (!c.passed() && !c.known_unattainable) ++n;
  return n;
}

namespace {

constexpr SchoutenRoute kRoutes[] = {SchoutenRoute::Recursive, SchoutenRoute::Coordinate};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

ReportItem item(std::string name, const CheckResult& r) {
  ReportItem it{std::move(name), r.passed() ? ItemVerdict::Pass : ItemVerdict::Fail, r.max_residual, r.note};
  if (r.outcome == Outcome::BadBox) it.note = "sampling box fault: " + r.note;
  return it;
}

// Random expressions over a chart's coordinates that stay finite on
// positive boxes: arguments of ln and of negative powers are at least 1.
class RandomExpressions {
 public:
  RandomExpressions(ChartPtr chart, std::uint64_t seed) : chart_(std::move(chart)), rng_(seed) {}

  Expression leaf() {
    int n = static_cast<int>(chart_->dim());
    int pick = uniform(0, n + 1);
    if (pick < n) return Expression::variable(chart_->coordinates()[pick]);
    return Expression::constant(Number::rational(uniform(-3, 3), uniform(1, 3)));
  }

  Expression expr(int depth) {
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

  MultiVectorField field(int degree, int depth = 2) {
    MultiVectorField m(chart_, degree);
    for (const auto& t : m.all_tuples())
      if (uniform(0, 5) > 0) m.accumulate(t, expr(depth));
    return m;
  }

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

 private:
  ChartPtr chart_;
  std::mt19937_64 rng_;
};

struct Worked {
  const char* id;
  const char* label;  // where the structure is worked out
};

// The worked structures, at b = 1 (a = 2 where present).
const Worked kWorked[] = {{"T1:A2-A2i", "A2-A2.i"},
                          {"T2:III-IIIiv", "III-III.iv"},
                          {"T2:III-IIIv", "III-III.v"},
                          {"T2:IV-IIIvi", "IV-III.vi"},
                          {"T2:VI0-IIIix", "VI0-III.ix"}};

ParamValues worked_params(const CatalogEntry& e) {
  ParamValues p;
  for (const auto& s : e.params) p[s.name] = s.name == "a" ? 2.0 : 1.0;
  return p;
}

struct Loaded {
  const CatalogEntry* entry;
  std::string label;
  JacobiStructure j;
  std::vector<ExampleInstance> examples;
};

std::vector<Loaded> load_worked(const Catalog& cat) {
  std::vector<Loaded> out;
  for (const auto& w : kWorked) {
    const CatalogEntry* e = cat.find(w.id);
    if (!e) throw Error(std::string("catalog lacks worked entry ") + w.id);
    ParamValues p = worked_params(*e);
    JacobiStructure j = instantiate(*e, p);
    std::vector<ExampleInstance> ex;
    for (const auto& d : e->examples) ex.push_back(instantiate_example(*e, d, p, j.chart));
    out.push_back({e, w.label, std::move(j), std::move(ex)});
  }
  return out;
}

std::string example_name(const Loaded& l, const ExampleInstance& ex) {
  return l.entry->id + " " + ex.data->kind;
}

bool recorded(const ExampleData& d, const std::string& item) {
  return std::any_of(d.discrepancies.begin(), d.discrepancies.end(),
                     [&](const PrintedDiscrepancy& p) { return p.item == item; });
}

// Applies the discrepancy protocol: a failure stands as a discrepancy only
// when every independent route fails and the catalog records it.
ReportItem protocol(std::string name, const CheckResult& primary, const std::vector<CheckResult>& others,
                    bool is_recorded) {
  ReportItem it = item(std::move(name), primary);
  if (primary.passed()) {
    for (const auto& o : others)
      if (!o.passed()) {
        it.verdict = ItemVerdict::Fail;
        it.note = "implementations disagree";
      }
    return it;
  }
  bool all_fail = std::all_of(others.begin(), others.end(), [](const CheckResult& o) { return !o.passed(); });
  if (!all_fail) {
    it.note = "implementations disagree";
  } else if (is_recorded) {
    it.verdict = ItemVerdict::Discrepancy;
    it.note = "confirmed by both Schouten routes; recorded printed discrepancy";
  } else {
    it.note = "confirmed by both Schouten routes but not recorded in the catalog";
  }
  return it;
}

CriterionResult c1_axioms(const std::vector<Loaded>& worked, const ZeroTestOptions& z) {
  CriterionResult c{1, "Jacobi axioms of the worked structures", z.tol, {}, false, {}};
  for (const auto& l : worked)
    for (auto route : kRoutes) {
      VerificationReport r = verify_jacobi(l.j, z, route);
      CheckResult all;
      for (const auto& a : r.axioms) merge_into(all, a.check);
      c.items.push_back(item(l.label + (route == SchoutenRoute::Recursive ? " recursive" : " coordinate"), all));
    }
  return c;
}

CriterionResult c2_schouten_values(const std::vector<Loaded>& worked, const ZeroTestOptions& z) {
  CriterionResult c{2, "printed [L,L] trivectors", z.tol, {}, false, {}};
  const std::pair<const char*, const char*> printed[] = {
      {"T2:III-IIIiv", "-2*b*(y+z)*exp(b*(y-z))"}, {"T2:III-IIIv", "(exp(2*x)-1)/2"}, {"T2:IV-IIIvi", "2*x*exp(2*x)"}};
  for (const auto& [id, text] : printed) {
    const Loaded& l = *std::find_if(worked.begin(), worked.end(), [&](const Loaded& w) { return w.entry->id == id; });
    MultiVectorField expect(l.j.chart, 3);
    expect.set({0, 1, 2}, parse_bound(*l.entry, worked_params(*l.entry), text));
    for (auto route : kRoutes) {
      MultiVectorField ll = schouten(l.j.lambda, l.j.lambda, SchoutenConvention::Lichnerowicz, route);
      c.items.push_back(
          item(l.label + (route == SchoutenRoute::Recursive ? " recursive" : " coordinate"), is_zero(ll - expect, l.j.box, z)));
    }
  }
  return c;
}

CriterionResult c3_brackets(const std::vector<Loaded>& worked, const ZeroTestOptions& z) {
  CriterionResult c{3, "bracket tables", z.tol, {}, false, {}};
  for (const auto& l : worked)
    for (const auto& ex : l.examples)
      for (std::size_t k = 0; k < ex.data->brackets.size(); ++k) {
        const auto& rel = ex.data->brackets[k];
        const Expression& f = ex.hamiltonians[rel.i - 1];
        const Expression& g = ex.hamiltonians[rel.j - 1];
        const Expression& want = ex.bracket_expect[k];
        CheckResult direct = is_zero(jacobi_bracket(l.j, f, g) - want, l.j.box, z);
        std::vector<CheckResult> others;
        for (auto route : kRoutes) others.push_back(is_zero(jacobi_bracket_via_schouten(l.j, f, g, route) - want, l.j.box, z));
        std::string name = example_name(l, ex) + " {f" + std::to_string(rel.i) + ",f" + std::to_string(rel.j) +
                           "} = " + rel.text;
        c.items.push_back(protocol(name, direct, others, recorded(*ex.data, "brackets/" + std::to_string(k + 1))));
      }
  return c;
}

CriterionResult c4_hamiltonian_fields(const std::vector<Loaded>& worked, const ZeroTestOptions& z) {
  CriterionResult c{4, "Hamiltonian vector fields", z.tol, {}, false, {}};
  for (const auto& l : worked)
    for (const auto& ex : l.examples) {
      bool strict = l.entry->table == 1;
      for (std::size_t i = 0; i < ex.fields.size(); ++i) {
        const Expression& f = ex.hamiltonians[i];
        std::string name = example_name(l, ex) + " X" + std::to_string(i + 1);
        // f = 1 forces X_f = E whatever is printed
        if (f.is_one_constant())
          c.items.push_back(item(name + " from f = 1 is E", is_zero(hamiltonian_vf(l.j, f) - l.j.reeb, l.j.box, z)));
        CheckResult direct = check_hamiltonian_pair(l.j, ex.fields[i], f, z);
        std::vector<CheckResult> others;
        for (auto route : kRoutes)
          others.push_back(is_zero(hamiltonian_vf_via_schouten(l.j, f, route) - ex.fields[i], l.j.box, z));
        ReportItem it = protocol(name + " printed", direct, others,
                                 !strict && recorded(*ex.data, "fields/" + std::to_string(i + 1)));
        c.items.push_back(it);
      }
    }
  return c;
}

CriterionResult c5_structure_constants(const std::vector<Loaded>& worked) {
  CriterionResult c{5, "structure constants of the Hamiltonian fields", 1e-6, {}, false, {}};
  for (const auto& l : worked)
    for (const auto& ex : l.examples) {
      if (ex.data->commutators.empty()) continue;
      std::vector<MultiVectorField> gens;
      for (const auto& f : ex.hamiltonians) gens.push_back(hamiltonian_vf(l.j, f));
      std::string base = example_name(l, ex);
      StructureConstants sc;
      try {
        sc = structure_constants(gens, l.j.box);
      } catch (const Error& err) {
        c.items.push_back({base, ItemVerdict::Fail, 0.0, err.what()});
        continue;
      }
      for (const auto& rel : ex.data->commutators) {
        double worst = 0.0;
        for (std::size_t k = 0; k < sc.r; ++k)
          worst = std::max(worst, std::fabs(sc.at(rel.i - 1, rel.j - 1, k) - rel.coeffs[k]));
        ReportItem it{base + " [X" + std::to_string(rel.i) + ",X" + std::to_string(rel.j) + "] = " + rel.text,
                      worst < c.threshold && sc.closed ? ItemVerdict::Pass : ItemVerdict::Fail, worst,
                      "fit residual " + fmt(sc.residual)};
        c.items.push_back(it);
      }
    }
  return c;
}

CriterionResult c6_symmetries(const std::vector<Loaded>& worked, const ZeroTestOptions& z) {
  CriterionResult c{6, "Lie symmetries from constants of motion", z.tol, {}, false, {}};
  for (const auto& l : worked)
    for (const auto& ex : l.examples) {
      if (!ex.invariant || !ex.symmetry) continue;
      std::string base = example_name(l, ex);
      MultiVectorField xh = symmetry_field(l.j, *ex.invariant);
      c.items.push_back(item(base + " X_h matches the printed field", is_zero(xh - *ex.symmetry, l.j.box, z)));
      // printed generators, except where a printed field is a recorded discrepancy
      std::vector<MultiVectorField> gens;
      bool substituted = false;
      for (std::size_t i = 0; i < ex.fields.size(); ++i) {
        if (recorded(*ex.data, "fields/" + std::to_string(i + 1))) {
          gens.push_back(hamiltonian_vf(l.j, ex.hamiltonians[i]));
          substituted = true;
        } else {
          gens.push_back(ex.fields[i]);
        }
      }
      ReportItem it = item(base + " [X_h, X_i] = 0", check_lie_symmetry(*ex.symmetry, gens, l.j.box, z));
      if (substituted) it.note = "recorded printed-field discrepancy replaced by the computed field";
      c.items.push_back(it);
    }
  return c;
}

CriterionResult c7_flow(const std::vector<Loaded>& worked) {
  CriterionResult c{7, "conservation of h along the flow", 1e-6, {}, false, {}};
  const Loaded& l = worked[1];
  const ExampleInstance* ex = nullptr;
  for (const auto& e : l.examples)
    if (e.invariant) ex = &e;
  if (!ex) throw Error("worked entry lacks its constant of motion");
  LieSystemSpec sys{l.j.chart, ex->fields, {}, ex->hamiltonians};
  SymbolTable ts = time_symbols(*l.j.chart);
  sys.coefficients = {parse("sin(t)", ts), parse("1", ts)};
  Trajectory tr = integrate(sys, Point{{"x", 1.0}, {"y", 0.5}, {"z", 0.2}}, 0.0, 2.0, 1e-3);
  DriftResult h = check_invariant_along(tr, *ex->invariant, c.threshold);
  ReportItem it{"h = " + ex->invariant->render() + ", RK4 dt=1e-3 on [0,2]", h.ok ? ItemVerdict::Pass : ItemVerdict::Fail,
                h.max_drift, "trajectory " + std::string(stop_reason_name(tr.stop))};
  c.items.push_back(it);
  DriftResult yz = check_invariant_along(tr, parse("y+z", l.j.chart->symbols()), 1e-9);
  c.items.push_back({"control: y+z along the same trajectory", yz.ok ? ItemVerdict::Pass : ItemVerdict::Fail,
                     yz.max_drift, "first integral of this system"});
  if (!h.ok) {
    c.known_unattainable = true;
    c.reason =
        "E(f_i) != 0 for f1 = x and f2 = -x ln(x)/b, so dh/dt = h (b2 (1 + ln x) - b b1) does not vanish and "
        "h(x0) = 1 - exp(-0.3) != 0; h Poisson-commutes with the f_i but is not a first integral of the flow";
  }
  return c;
}

CriterionResult c8_properties(const Catalog& cat, const ZeroTestOptions& z) {
  CriterionResult c{8, "property suites", z.tol, {}, false, {}};
  ChartPtr xyz = make_chart({"x", "y", "z"});
  SamplingBox box = xyz->default_box();
  const auto K = SchoutenConvention::Koszul;

  {  // (a) the two Schouten routes agree
    RandomExpressions gen(xyz, z.seed);
    CheckResult all;
    for (int n = 0; n < 200; ++n) {
      int p = gen.uniform(0, 3), q = gen.uniform(0, 3);
      if (p + q == 0) p = 1;
      MultiVectorField a = gen.field(p), b = gen.field(q);
      merge_into(all, is_zero(schouten(a, b, K, SchoutenRoute::Recursive) - schouten(a, b, K, SchoutenRoute::Coordinate),
                              box, z));
    }
    c.items.push_back(item("(a) Schouten routes agree, 200 random pairs, degree <= 3", all));
  }
  {  // (b) graded antisymmetry and the graded Leibniz rule
    RandomExpressions gen(xyz, z.seed + 1);
    CheckResult anti, leib;
    for (int n = 0; n < 100; ++n) {
      int p = gen.uniform(1, 2), q = gen.uniform(0, 1), r = gen.uniform(0, 1);
      MultiVectorField P = gen.field(p), Q = gen.field(q), R = gen.field(r);
      MultiVectorField pq = schouten(P, Q, K), qp = schouten(Q, P, K);
      merge_into(anti, is_zero(((p - 1) * (q - 1)) % 2 == 0 ? pq + qp : pq - qp, box, z));
      // [P, Q^R] = [P,Q]^R + (-1)^{(p-1)q} Q^[P,R]
      MultiVectorField rhs2 = wedge(Q, schouten(P, R, K));
      MultiVectorField rhs = ((p - 1) * q) % 2 == 0 ? wedge(pq, R) + rhs2 : wedge(pq, R) - rhs2;
      merge_into(leib, is_zero(schouten(P, wedge(Q, R), K) - rhs, box, z));
    }
    c.items.push_back(item("(b) graded antisymmetry, 100 random instances", anti));
    c.items.push_back(item("(b) graded Leibniz rule, 100 random instances", leib));
  }

  // structures verified by both routes at every default draw
  std::vector<JacobiStructure> verified;
  for (const auto& e : cat.entries)
    for (const auto& p : default_draws(e)) {
      JacobiStructure j = instantiate(e, p);
      if (verify_jacobi(j, z, SchoutenRoute::Recursive).passed() && verify_jacobi(j, z, SchoutenRoute::Coordinate).passed()) {
        j.status = VerificationStatus::Verified;
        verified.push_back(std::move(j));
      }
    }

  {  // (c) Jacobi identity of the Kirillov bracket
    CheckResult all;
    int triples = 0;
    for (const auto& w : kWorked) {
      const CatalogEntry* e = cat.find(w.id);
      JacobiStructure j = instantiate(*e, worked_params(*e));
      RandomExpressions gen(j.chart, z.seed + 2);
      for (int n = 0; n < 10; ++n, ++triples) {
        Expression f = gen.expr(2), g = gen.expr(2), h = gen.expr(2);
        Expression cyc = jacobi_bracket(j, jacobi_bracket(j, f, g), h) + jacobi_bracket(j, jacobi_bracket(j, g, h), f) +
                         jacobi_bracket(j, jacobi_bracket(j, h, f), g);
        merge_into(all, is_zero(cyc, j.box, z));
      }
    }
    c.items.push_back(item("(c) Jacobi identity of the bracket, " + std::to_string(triples) + " random triples", all));
  }
  {  // (d) f -> X_f is a Lie algebra homomorphism
    CheckResult all;
    for (const auto& j : verified) {
      RandomExpressions gen(j.chart, z.seed + 3);
      for (int n = 0; n < 20; ++n) merge_into(all, homomorphism_check(j, gen.expr(2), gen.expr(2), z));
    }
    c.items.push_back(item("(d) X_{f,g} = [X_f, X_g] on " + std::to_string(verified.size()) +
                               " verified structures, 20 random pairs each",
                           all));
  }
  {  // (e) symbolic derivatives against central differences
    RandomExpressions gen(xyz, z.seed + 4);
    const double h = 1e-5;
    double worst = 0.0;
    auto pts = box.sample(100, z.seed);
    for (int n = 0; n < 100; ++n) {
      Expression f = gen.expr(3);
      int v = n % 3;
      const std::string& name = xyz->coordinates()[v];
      Point p = box.to_point(pts[n]);
      Point lo = p, hi = p;
      lo.set(name, *p.get(name) - h);
      hi.set(name, *p.get(name) + h);
      double fd = (eval(f, hi) - eval(f, lo)) / (2 * h);
      double exact = eval(diff(f, name), p);
      worst = std::max(worst, std::fabs(fd - exact) / std::max(1.0, std::fabs(exact)));
    }
    c.items.push_back({"(e) diff against central differences, 100 random cases",
                       worst < 1e-6 ? ItemVerdict::Pass : ItemVerdict::Fail, worst,
                       "relative error |fd - d| / max(1, |d|), step 1e-5"});
  }
  {  // (f) RK4 error ratio under step halving
    ChartPtr cx = make_chart({"x", "y"});
    SymbolTable ts = time_symbols(*cx);
    LieSystemSpec sys{cx,
                      {MultiVectorField::vector(cx, {Expression::variable("x"), Expression()}),
                       MultiVectorField::basis(cx, 1)},
                      {parse("sin(t)", ts), parse("1", ts)},
                      {}};
    // x(t) = x0 exp(1 - cos t)
    auto err = [&](double dt) {
      Trajectory tr = integrate(sys, Point{{"x", 1.0}, {"y", 0.0}}, 0.0, 2.0, dt);
      return std::fabs(tr.x.back()[0] - std::exp(1.0 - std::cos(2.0)));
    };
    double ratio = err(0.1) / err(0.05);
    c.items.push_back({"(f) RK4 error ratio, dt 0.1 -> 0.05", ratio >= 12 && ratio <= 20 ? ItemVerdict::Pass : ItemVerdict::Fail,
                       ratio, "expected near 16"});
  }
  return c;
}

CriterionResult c9_sweep(const Catalog& cat, const AcceptanceOptions& opt) {
  CriterionResult c{9, "full table sweep", 60.0, {}, false, {}};
  auto t0 = std::chrono::steady_clock::now();
  VerifyAllOptions vo{opt.zero, opt.threads};
  auto reports = verify_all(cat.entries, vo);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::size_t disagree = 0, flagged = 0, rejected = 0;
  for (const auto& r : reports) {
    if (!r.implementations_agree()) ++disagree;
    if (r.flagged) ++flagged;
    if (!r.accepted()) ++rejected;
  }
  c.items.push_back({"one report per entry (" + std::to_string(reports.size()) + " entries)",
                     reports.size() == cat.entries.size() ? ItemVerdict::Pass : ItemVerdict::Fail,
                     static_cast<double>(reports.size()), {}});
  c.items.push_back({"implementation disagreements", disagree == 0 ? ItemVerdict::Pass : ItemVerdict::Fail,
                     static_cast<double>(disagree), {}});
  c.items.push_back({"entries neither verified nor flagged", rejected == 0 ? ItemVerdict::Pass : ItemVerdict::Fail,
                     static_cast<double>(rejected), std::to_string(flagged) + " flagged printed discrepancies"});
  c.items.push_back({"wall time in seconds", secs < c.threshold ? ItemVerdict::Pass : ItemVerdict::Fail, secs, {}});
  return c;
}

}  // namespace

AcceptanceReport acceptance_report(const Catalog& catalog, const AcceptanceOptions& opt) {
  AcceptanceReport rep;
  rep.zero = opt.zero;
  std::vector<Loaded> worked = load_worked(catalog);
  rep.criteria.push_back(c1_axioms(worked, opt.zero));
  rep.criteria.push_back(c2_schouten_values(worked, opt.zero));
  rep.criteria.push_back(c3_brackets(worked, opt.zero));
  rep.criteria.push_back(c4_hamiltonian_fields(worked, opt.zero));
  rep.criteria.push_back(c5_structure_constants(worked));
  rep.criteria.push_back(c6_symmetries(worked, opt.zero));
  rep.criteria.push_back(c7_flow(worked));
  rep.criteria.push_back(c8_properties(catalog, opt.zero));
  rep.criteria.push_back(c9_sweep(catalog, opt));
  return rep;
}

}  // namespace jlie
