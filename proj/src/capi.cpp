#include "jlie/jlie.h"

#include <cstring>
#include <fstream>
#include <optional>
#include <string>

#include "jlie/catalog.hpp"
#include "jlie/report.hpp"
#include "json.hpp"

using nlohmann::ordered_json;
using namespace jlie;

struct jlie_catalog {
  Catalog cat;
};

struct jlie_structure {
  CatalogEntry entry;
  ParamValues params;
  JacobiStructure j;
};

struct jlie_system {
  ChartPtr chart;
  std::vector<MultiVectorField> generators;
  std::string source;
};

namespace {

thread_local std::string g_error;

jlie_status fail(jlie_status s, std::string msg) {
  g_error = std::move(msg);
  return s;
}

template <class F>
jlie_status guarded(F&& f) {
  g_error.clear();
  try {
    return f();
  } catch (const CatalogError& e) {
    return fail(JLIE_ERR_PARSE, e.what());
  } catch (const ParseError& e) {
    return fail(JLIE_ERR_PARSE, e.what());
  } catch (const UnknownIdentifierError& e) {
    return fail(JLIE_ERR_PARSE, e.what());
  } catch (const UnboundNameError& e) {
    return fail(JLIE_ERR_PARSE, e.what());
  } catch (const DomainError& e) {
    return fail(JLIE_ERR_DOMAIN, e.what());
  } catch (const Error& e) {
    return fail(JLIE_ERR_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(JLIE_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(JLIE_ERR_INTERNAL, "unknown exception");
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const ordered_json& j) {
  if (out) *out = dup(j.dump(2) + "\n");
}

ZeroTestOptions zero_options(const jlie_options* opt) {
  ZeroTestOptions z;
  if (opt) {
    z.samples = opt->samples;
    z.tol = opt->tol;
    z.seed = opt->seed;
  }
  if (z.samples == 0) throw Error("samples must be positive");
  if (!(z.tol > 0.0)) throw Error("tol must be positive");
  return z;
}

void stamp(ordered_json& j, const ZeroTestOptions& z) {
  j["seed"] = z.seed;
  j["samples"] = z.samples;
  j["tol"] = z.tol;
}

ordered_json point_json(const std::optional<Point>& p) {
  if (!p) return nullptr;
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : p->values()) j[k] = v;
  return j;
}

ordered_json check_json(const CheckResult& r) {
  ordered_json j;
  j["verdict"] = outcome_name(r.outcome);
  j["max_residual"] = r.max_residual;
  j["witness"] = point_json(r.witness);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

ordered_json params_json(const ParamValues& p) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

ordered_json field_json(const MultiVectorField& m) {
  ordered_json j;
  j["degree"] = m.degree();
  ordered_json comps = ordered_json::object();
  for (const auto& [idx, e] : m.entries()) comps[m.key(idx)] = e.render();
  j["components"] = comps;
  return j;
}

// Components that vanish at every sample are listed separately: the
// renderer does not simplify, so exp(u)*exp(-u) and the like stay visible.
ordered_json field_json(const MultiVectorField& m, const SamplingBox& box, const ZeroTestOptions& z) {
  ordered_json j;
  j["degree"] = m.degree();
  ordered_json comps = ordered_json::object(), zero = ordered_json::array();
  for (const auto& [idx, e] : m.entries()) {
    if (is_zero(e, box, z).passed())
      zero.push_back(m.key(idx));
    else
      comps[m.key(idx)] = e.render();
  }
  j["components"] = comps;
  j["numerically_zero"] = zero;
  return j;
}

const char* route_name(SchoutenRoute r) { return r == SchoutenRoute::Recursive ? "recursive" : "coordinate"; }

// One record per axiom, each carrying the sampling settings.
ordered_json report_json(const VerificationReport& r) {
  ordered_json out = ordered_json::array();
  for (const auto& a : r.axioms) {
    ordered_json j;
    j["entry"] = r.entry;
    j["route"] = route_name(r.route);
    j["axiom"] = a.axiom;
    ordered_json c = check_json(a.check);
    for (auto it = c.begin(); it != c.end(); ++it) j[it.key()] = it.value();
    stamp(j, r.options);
    out.push_back(j);
  }
  return out;
}

ordered_json entry_report_json(const EntryReport& r) {
  ordered_json j;
  j["id"] = r.id;
  j["flagged"] = r.flagged;
  j["passed"] = r.passed();
  j["implementations_agree"] = r.implementations_agree();
  j["accepted"] = r.accepted();
  if (!r.error.empty()) j["error"] = r.error;
  ordered_json draws = ordered_json::array();
  for (const auto& d : r.draws) {
    ordered_json dj;
    dj["params"] = params_json(d.params);
    dj["reports"] = report_json(d.recursive);
    for (auto& x : report_json(d.coordinate)) dj["reports"].push_back(x);
    draws.push_back(dj);
  }
  j["draws"] = draws;
  return j;
}

ordered_json header(const jlie_structure* s) {
  ordered_json j;
  j["entry"] = s->entry.id;
  j["params"] = params_json(s->params);
  return j;
}

const ExampleData* pick_example(const CatalogEntry& e, int index) {
  if (e.examples.empty()) return nullptr;
  if (index >= 1) {
    if (static_cast<std::size_t>(index) > e.examples.size())
      throw Error("entry " + e.id + " has " + std::to_string(e.examples.size()) + " examples");
    return &e.examples[index - 1];
  }
  for (const auto& ex : e.examples)
    if (ex.invariant) return &ex;
  return &e.examples.front();
}

// Printed generators; a printed field recorded as a discrepancy is replaced
// by the computed Hamiltonian field.
std::vector<MultiVectorField> example_generators(const jlie_structure* s, const ExampleData& ex) {
  ExampleInstance inst = instantiate_example(s->entry, ex, s->params, s->j.chart);
  std::vector<MultiVectorField> gens;
  for (std::size_t i = 0; i < inst.fields.size(); ++i) {
    bool bad = false;
    for (const auto& d : ex.discrepancies)
      if (d.item == "fields/" + std::to_string(i + 1)) bad = true;
    gens.push_back(bad ? hamiltonian_vf(s->j, inst.hamiltonians[i]) : inst.fields[i]);
  }
  return gens;
}

Expression parse_on(const jlie_structure* s, const char* text, const char* what) {
  if (!text) throw Error(std::string("missing expression for ") + what);
  return parse_bound(s->entry, s->params, text);
}

}  // namespace

extern "C" {

const char* jlie_version(void) { return "1.0.0"; }

void jlie_options_default(jlie_options* opt) {
  if (!opt) return;
  opt->samples = 200;
  opt->tol = 1e-8;
  opt->seed = 42;
  opt->threads = 0;
}

const char* jlie_last_error(void) { return g_error.c_str(); }

const char* jlie_status_name(jlie_status s) {
  switch (s) {
    case JLIE_OK:
      return "ok";
    case JLIE_ERR_ARGUMENT:
      return "argument";
    case JLIE_ERR_PARSE:
      return "parse";
    case JLIE_ERR_DOMAIN:
      return "domain";
    case JLIE_ERR_NOT_FOUND:
      return "not_found";
    case JLIE_ERR_IO:
      return "io";
    case JLIE_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

void jlie_string_free(char* s) { std::free(s); }

jlie_status jlie_catalog_load(const char* path, jlie_catalog** out) {
  return guarded([&] {
    if (!path || !out) return fail(JLIE_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    if (!*path) return fail(JLIE_ERR_IO, "empty catalog path");
    if (!std::ifstream(path)) return fail(JLIE_ERR_IO, std::string("cannot open catalog '") + path + "'");
    auto c = std::make_unique<jlie_catalog>();
    c->cat = load_catalog(path);
    *out = c.release();
    return JLIE_OK;
  });
}

void jlie_catalog_free(jlie_catalog* cat) { delete cat; }

jlie_status jlie_catalog_list(const jlie_catalog* cat, char** json) {
  return guarded([&] {
    if (!cat || !json) return fail(JLIE_ERR_ARGUMENT, "null argument");
    ordered_json arr = ordered_json::array();
    for (const auto& e : cat->cat.entries) {
      ordered_json j;
      j["id"] = e.id;
      j["label"] = e.label;
      j["table"] = e.table;
      j["params"] = e.param_names();
      j["examples"] = e.examples.size();
      j["paper_discrepancy"] = e.paper_discrepancy;
      arr.push_back(j);
    }
    emit(json, arr);
    return JLIE_OK;
  });
}

jlie_status jlie_verify_all(const jlie_catalog* cat, const jlie_options* opt, int* accepted, char** json) {
  return guarded([&] {
    if (!cat) return fail(JLIE_ERR_ARGUMENT, "null catalog");
    VerifyAllOptions vo{zero_options(opt), opt ? opt->threads : 0u};
    auto reports = verify_all(cat->cat.entries, vo);
    ordered_json j;
    stamp(j, vo.zero);
    ordered_json entries = ordered_json::array();
    std::size_t passed = 0, flagged = 0, disagree = 0, rejected = 0;
    for (const auto& r : reports) {
      entries.push_back(entry_report_json(r));
      passed += r.passed();
      flagged += r.flagged;
      disagree += !r.implementations_agree();
      rejected += !r.accepted();
    }
    j["summary"] = {{"entries", reports.size()},
                    {"passed", passed},
                    {"flagged", flagged},
                    {"disagreements", disagree},
                    {"rejected", rejected}};
    j["entries"] = entries;
    if (accepted) *accepted = rejected == 0;
    emit(json, j);
    return JLIE_OK;
  });
}

jlie_status jlie_report(const jlie_catalog* cat, const jlie_options* opt, int* unexpected, char** json) {
  return guarded([&] {
    if (!cat) return fail(JLIE_ERR_ARGUMENT, "null catalog");
    AcceptanceOptions ao{zero_options(opt), opt ? opt->threads : 0u};
    AcceptanceReport rep = acceptance_report(cat->cat, ao);
    ordered_json j;
    stamp(j, ao.zero);
    j["unexpected_failures"] = rep.unexpected_failures();
    ordered_json crit = ordered_json::array();
    for (const auto& c : rep.criteria) {
      ordered_json cj;
      cj["id"] = c.id;
      cj["title"] = c.title;
      cj["passed"] = c.passed();
      cj["threshold"] = c.threshold;
      cj["known_unattainable"] = c.known_unattainable;
      if (!c.reason.empty()) cj["reason"] = c.reason;
      ordered_json items = ordered_json::array();
      for (const auto& i : c.items) {
        ordered_json ij;
        ij["name"] = i.name;
        ij["verdict"] = verdict_name(i.verdict);
        ij["measured"] = i.measured;
        if (!i.note.empty()) ij["note"] = i.note;
        items.push_back(ij);
      }
      cj["items"] = items;
      crit.push_back(cj);
    }
    j["criteria"] = crit;
    if (unexpected) *unexpected = rep.unexpected_failures();
    emit(json, j);
    return JLIE_OK;
  });
}

jlie_status jlie_structure_from_entry(const jlie_catalog* cat, const char* id, const char* const* names,
                                      const double* values, size_t n, jlie_structure** out) {
  return guarded([&] {
    if (!cat || !id || !out || (n > 0 && (!names || !values))) return fail(JLIE_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    const CatalogEntry* e = cat->cat.find(id);
    if (!e) return fail(JLIE_ERR_NOT_FOUND, std::string("unknown entry '") + id + "'");
    ParamValues p;
    for (size_t i = 0; i < n; ++i) {
      if (!names[i]) return fail(JLIE_ERR_ARGUMENT, "null parameter name");
      p[names[i]] = values[i];
    }
    *out = new jlie_structure{*e, p, instantiate(*e, p)};
    return JLIE_OK;
  });
}

void jlie_structure_free(jlie_structure* s) { delete s; }

jlie_status jlie_structure_describe(const jlie_structure* s, char** json) {
  return guarded([&] {
    if (!s || !json) return fail(JLIE_ERR_ARGUMENT, "null argument");
    ordered_json j = header(s);
    j["label"] = s->entry.label;
    j["coords"] = s->j.chart->coordinates();
    j["lambda"] = field_json(s->j.lambda);
    j["E"] = field_json(s->j.reeb);
    emit(json, j);
    return JLIE_OK;
  });
}

jlie_status jlie_verify(const jlie_structure* s, const jlie_options* opt, int* passed, char** json) {
  return guarded([&] {
    if (!s) return fail(JLIE_ERR_ARGUMENT, "null structure");
    ZeroTestOptions z = zero_options(opt);
    VerificationReport rec = verify_jacobi(s->j, z, SchoutenRoute::Recursive);
    VerificationReport coo = verify_jacobi(s->j, z, SchoutenRoute::Coordinate);
    ordered_json j = header(s);
    stamp(j, z);
    j["flagged"] = s->entry.paper_discrepancy;
    if (!s->entry.discrepancy_note.empty()) j["discrepancy_note"] = s->entry.discrepancy_note;
    j["implementations_agree"] = rec.outcome() == coo.outcome();
    j["passed"] = rec.passed() && coo.passed();
    j["reports"] = report_json(rec);
    for (auto& x : report_json(coo)) j["reports"].push_back(x);
    if (passed) *passed = rec.passed() && coo.passed();
    emit(json, j);
    return JLIE_OK;
  });
}

jlie_status jlie_bracket(const jlie_structure* s, const char* f, const char* g, const char* expect,
                         const jlie_options* opt, int* passed, char** json) {
  return guarded([&] {
    if (!s) return fail(JLIE_ERR_ARGUMENT, "null structure");
    ZeroTestOptions z = zero_options(opt);
    Expression fe = parse_on(s, f, "f"), ge = parse_on(s, g, "g");
    std::optional<Expression> want;
    if (expect) want = parse_on(s, expect, "expect");
    Expression br = jacobi_bracket(s->j, fe, ge);
    ordered_json j = header(s);
    stamp(j, z);
    j["convention"] = "{f,g} = L(df,dg) + f E(g) - g E(f)";
    j["f"] = f;
    j["g"] = g;
    j["bracket"] = br.render();
    bool ok = true;
    if (want) {
      CheckResult r = is_zero(br - *want, s->j.box, z);
      j["expect"] = expect;
      j["check"] = check_json(r);
      ok = r.passed();
      if (r.outcome == Outcome::BadBox) return fail(JLIE_ERR_DOMAIN, "sampling box fault: " + r.note);
    }
    if (passed) *passed = ok;
    emit(json, j);
    return JLIE_OK;
  });
}

jlie_status jlie_hamiltonian_vf(const jlie_structure* s, const char* f, const jlie_options* opt, char** json) {
  return guarded([&] {
    if (!s || !json) return fail(JLIE_ERR_ARGUMENT, "null argument");
    ZeroTestOptions z = zero_options(opt);
    Expression fe = parse_on(s, f, "f");
    ordered_json j = header(s);
    stamp(j, z);
    j["f"] = f;
    j["field"] = field_json(hamiltonian_vf(s->j, fe), s->j.box, z);
    j["good_hamiltonian"] = check_json(is_good_hamiltonian(s->j, fe, z));
    emit(json, j);
    return JLIE_OK;
  });
}

jlie_status jlie_symmetry(const jlie_structure* s, const char* h, const jlie_options* opt, int* passed, char** json) {
  return guarded([&] {
    if (!s) return fail(JLIE_ERR_ARGUMENT, "null structure");
    ZeroTestOptions z = zero_options(opt);
    Expression he = parse_on(s, h, "h");
    const ExampleData* ex = pick_example(s->entry, 0);
    if (!ex) return fail(JLIE_ERR_ARGUMENT, "entry " + s->entry.id + " has no example generators");
    auto gens = example_generators(s, *ex);
    MultiVectorField xh = symmetry_field(s->j, he);
    CheckResult r = check_lie_symmetry(xh, gens, s->j.box, z);
    if (r.outcome == Outcome::BadBox) return fail(JLIE_ERR_DOMAIN, "sampling box fault: " + r.note);
    ordered_json j = header(s);
    stamp(j, z);
    j["h"] = h;
    j["example"] = ex->kind;
    j["generators"] = gens.size();
    j["symmetry"] = field_json(xh, s->j.box, z);
    j["check"] = check_json(r);
    if (passed) *passed = r.passed();
    emit(json, j);
    return JLIE_OK;
  });
}

jlie_status jlie_system_from_entry(const jlie_structure* s, int example_index, jlie_system** out) {
  return guarded([&] {
    if (!s || !out) return fail(JLIE_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    const ExampleData* ex = pick_example(s->entry, example_index);
    if (!ex) return fail(JLIE_ERR_ARGUMENT, "entry " + s->entry.id + " has no example generators");
    *out = new jlie_system{s->j.chart, example_generators(s, *ex), s->entry.id + " " + ex->kind};
    return JLIE_OK;
  });
}

jlie_status jlie_system_inline(const char* const* coords, size_t n_coords, const char* const* components,
                               size_t n_fields, jlie_system** out) {
  return guarded([&] {
    if (!coords || !out || n_coords == 0 || (n_fields > 0 && !components))
      return fail(JLIE_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    if (n_fields == 0) return fail(JLIE_ERR_ARGUMENT, "no generators");
    std::vector<std::string> names(coords, coords + n_coords);
    ChartPtr chart = make_chart(names);
    std::vector<MultiVectorField> gens;
    for (size_t i = 0; i < n_fields; ++i) {
      std::vector<Expression> comps;
      for (size_t k = 0; k < n_coords; ++k) {
        const char* text = components[i * n_coords + k];
        if (!text) return fail(JLIE_ERR_ARGUMENT, "null component");
        comps.push_back(parse(text, chart->symbols()));
      }
      gens.push_back(MultiVectorField::vector(chart, comps));
    }
    *out = new jlie_system{chart, std::move(gens), "inline"};
    return JLIE_OK;
  });
}

void jlie_system_free(jlie_system* sys) { delete sys; }

size_t jlie_system_size(const jlie_system* sys) { return sys ? sys->generators.size() : 0; }

jlie_status jlie_integrate(const jlie_system* sys, const char* const* coefficients, size_t n_coefficients,
                           const double* x0, size_t n_x0, double t0, double t1, double dt, const char* invariant,
                           double tol, int format, char** trajectory, char** summary) {
  return guarded([&] {
    if (!sys || (n_coefficients > 0 && !coefficients) || (n_x0 > 0 && !x0))
      return fail(JLIE_ERR_ARGUMENT, "null argument");
    if (!(dt > 0.0)) return fail(JLIE_ERR_ARGUMENT, "dt must be positive");
    if (!(t1 >= t0)) return fail(JLIE_ERR_ARGUMENT, "t1 must not precede t0");
    if (format != 0 && format != 1) return fail(JLIE_ERR_ARGUMENT, "format must be 0 (csv) or 1 (json)");
    if (n_coefficients != sys->generators.size())
      return fail(JLIE_ERR_ARGUMENT, "system has " + std::to_string(sys->generators.size()) + " generators but " +
                                         std::to_string(n_coefficients) + " coefficients were given");
    const auto& coords = sys->chart->coordinates();
    if (n_x0 != coords.size())
      return fail(JLIE_ERR_ARGUMENT, "initial point needs " + std::to_string(coords.size()) + " values");
    LieSystemSpec spec{sys->chart, sys->generators, {}, {}};
    SymbolTable ts = time_symbols(*sys->chart);
    for (size_t i = 0; i < n_coefficients; ++i) {
      if (!coefficients[i]) return fail(JLIE_ERR_ARGUMENT, "null coefficient");
      spec.coefficients.push_back(parse(coefficients[i], ts));
    }
    std::optional<Expression> h;
    if (invariant) h = parse(invariant, sys->chart->symbols());
    Point p0;
    for (size_t i = 0; i < n_x0; ++i) p0.set(coords[i], x0[i]);
    Trajectory tr = integrate(spec, p0, t0, t1, dt);
    ordered_json j;
    j["system"] = sys->source;
    j["method"] = tr.method;
    j["dt"] = dt;
    j["stop"] = stop_reason_name(tr.stop);
    if (!tr.fault.empty()) j["fault"] = tr.fault;
    j["points"] = tr.t.size();
    j["t_end"] = tr.t.empty() ? t0 : tr.t.back();
    j["x_end"] = tr.x.empty() ? std::vector<double>{} : tr.x.back();
    if (h) {
      DriftResult d = check_invariant_along(tr, *h, tol);
      j["invariant"] = {{"expression", invariant}, {"h0", d.h0}, {"max_drift", d.max_drift}, {"tol", tol}, {"ok", d.ok}};
    }
    if (trajectory) *trajectory = dup(format == 0 ? tr.to_csv() : tr.to_json() + "\n");
    emit(summary, j);
    return JLIE_OK;
  });
}

}  // extern "C"
