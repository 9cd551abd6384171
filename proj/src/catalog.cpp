#include "jlie/catalog.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace jlie {

using nlohmann::json;

CatalogError::CatalogError(std::string pointer, const std::string& message)
    : Error(pointer + ": " + message), pointer_(std::move(pointer)) {}

const ParamSpec* CatalogEntry::param(std::string_view name) const {
  for (const auto& p : params)
    if (p.name == name) return &p;
  return nullptr;
}

std::vector<std::string> CatalogEntry::param_names() const {
  std::vector<std::string> out;
  for (const auto& p : params) out.push_back(p.name);
  return out;
}

const CatalogEntry* Catalog::find(std::string_view id) const {
  for (const auto& e : entries)
    if (e.id == id) return &e;
  return nullptr;
}

namespace {

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

std::string at_key(const std::string& ptr, const std::string& key) { return ptr + "/" + escape_token(key); }
std::string at_index(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

const json& need(const json& obj, const std::string& ptr, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw CatalogError(ptr, std::string("missing required member '") + key + "'");
  return *it;
}

void expect_object(const json& v, const std::string& ptr) {
  if (!v.is_object()) throw CatalogError(ptr, "expected an object");
}
void expect_array(const json& v, const std::string& ptr) {
  if (!v.is_array()) throw CatalogError(ptr, "expected an array");
}
const std::string& expect_string(const json& v, const std::string& ptr) {
  if (!v.is_string()) throw CatalogError(ptr, "expected a string");
  return v.get_ref<const std::string&>();
}
double expect_number(const json& v, const std::string& ptr) {
  if (!v.is_number()) throw CatalogError(ptr, "expected a number");
  return v.get<double>();
}
int expect_int(const json& v, const std::string& ptr) {
  if (!v.is_number_integer()) throw CatalogError(ptr, "expected an integer");
  return v.get<int>();
}

Interval expect_interval(const json& v, const std::string& ptr) {
  expect_array(v, ptr);
  if (v.size() != 2) throw CatalogError(ptr, "expected [lo, hi]");
  Interval iv{expect_number(v[0], at_index(ptr, 0)), expect_number(v[1], at_index(ptr, 1))};
  if (!(iv.lo <= iv.hi)) throw CatalogError(ptr, "empty interval");
  return iv;
}

struct EntryParser {
  const std::string& id;
  SymbolTable symbols;

  Expression expr(const json& v, const std::string& ptr) const { return expr_with(v, ptr, symbols); }

  Expression expr_with(const json& v, const std::string& ptr, const SymbolTable& table) const {
    const std::string& text = expect_string(v, ptr);
    try {
      return parse(text, table);
    } catch (const Error& e) {
      throw Error("entry " + id + " (" + ptr + "): " + e.what());
    }
  }

  std::vector<Expression> expr_list(const json& v, const std::string& ptr, std::size_t expected) const {
    expect_array(v, ptr);
    if (expected && v.size() != expected)
      throw CatalogError(ptr, "expected " + std::to_string(expected) + " components");
    std::vector<Expression> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(expr(v[i], at_index(ptr, i)));
    return out;
  }

  std::vector<BracketRelation> relations(const json& v, const std::string& ptr, std::size_t n, bool fields) const {
    expect_array(v, ptr);
    std::vector<std::string> names;
    for (std::size_t k = 1; k <= n; ++k) names.push_back((fields ? "X" : "f") + std::to_string(k));
    SymbolTable table{names, symbols.parameters};
    std::vector<BracketRelation> out;
    for (std::size_t r = 0; r < v.size(); ++r) {
      std::string p = at_index(ptr, r);
      expect_object(v[r], p);
      const json& pair = need(v[r], p, "pair");
      expect_array(pair, at_key(p, "pair"));
      if (pair.size() != 2) throw CatalogError(at_key(p, "pair"), "expected two indices");
      BracketRelation rel;
      rel.i = expect_int(pair[0], at_index(at_key(p, "pair"), 0));
      rel.j = expect_int(pair[1], at_index(at_key(p, "pair"), 1));
      if (rel.i < 1 || rel.j < 1 || static_cast<std::size_t>(rel.i) > n || static_cast<std::size_t>(rel.j) > n)
        throw CatalogError(at_key(p, "pair"), "index out of range");
      rel.text = expect_string(need(v[r], p, "expect"), at_key(p, "expect"));
      rel.expect = expr_with(need(v[r], p, "expect"), at_key(p, "expect"), table);
      if (fields) {
        // a linear combination of the generators with constant coefficients
        for (const auto& name : names) {
          Expression c = diff(rel.expect, name);
          if (!free_names(c).empty()) throw CatalogError(at_key(p, "expect"), "coefficients must be constants");
          rel.coeffs.push_back(eval(c, Point{}));
        }
      }
      out.push_back(std::move(rel));
    }
    return out;
  }

  ExampleData example(const json& v, const std::string& ptr, std::size_t dim) const {
    expect_object(v, ptr);
    ExampleData ex;
    ex.kind = expect_string(need(v, ptr, "kind"), at_key(ptr, "kind"));
    if (ex.kind != "hamiltonian_system" && ex.kind != "constant_of_motion")
      throw CatalogError(at_key(ptr, "kind"), "unknown example kind '" + ex.kind + "'");
    ex.hamiltonians = expr_list(need(v, ptr, "hamiltonians"), at_key(ptr, "hamiltonians"), 0);
    std::size_t n = ex.hamiltonians.size();
    const json& fields = need(v, ptr, "fields");
    std::string fp = at_key(ptr, "fields");
    expect_array(fields, fp);
    if (fields.size() != n) throw CatalogError(fp, "fields must align with hamiltonians");
    for (std::size_t i = 0; i < n; ++i) ex.fields.push_back(expr_list(fields[i], at_index(fp, i), dim));
    if (auto it = v.find("good"); it != v.end()) {
      expect_array(*it, at_key(ptr, "good"));
      for (std::size_t i = 0; i < it->size(); ++i) ex.good.push_back(expect_int((*it)[i], at_index(at_key(ptr, "good"), i)));
    }
    if (auto it = v.find("brackets"); it != v.end()) ex.brackets = relations(*it, at_key(ptr, "brackets"), n, false);
    if (auto it = v.find("commutators"); it != v.end())
      ex.commutators = relations(*it, at_key(ptr, "commutators"), n, true);
    if (auto it = v.find("invariant"); it != v.end()) ex.invariant = expr(*it, at_key(ptr, "invariant"));
    if (auto it = v.find("symmetry"); it != v.end()) ex.symmetry = expr_list(*it, at_key(ptr, "symmetry"), dim);
    if (auto it = v.find("discrepancies"); it != v.end()) {
      std::string dp = at_key(ptr, "discrepancies");
      expect_array(*it, dp);
      for (std::size_t i = 0; i < it->size(); ++i) {
        std::string p = at_index(dp, i);
        expect_object((*it)[i], p);
        ex.discrepancies.push_back({expect_string(need((*it)[i], p, "item"), at_key(p, "item")),
                                    expect_string(need((*it)[i], p, "note"), at_key(p, "note"))});
      }
    }
    return ex;
  }
};

CatalogEntry parse_entry(const json& v, const std::string& ptr) {
  expect_object(v, ptr);
  CatalogEntry e;
  e.id = expect_string(need(v, ptr, "id"), at_key(ptr, "id"));
  e.label = expect_string(need(v, ptr, "label"), at_key(ptr, "label"));
  e.table = expect_int(need(v, ptr, "table"), at_key(ptr, "table"));

  std::vector<std::string> coords;
  const json& cj = need(v, ptr, "coords");
  expect_array(cj, at_key(ptr, "coords"));
  if (cj.empty()) throw CatalogError(at_key(ptr, "coords"), "at least one coordinate required");
  for (std::size_t i = 0; i < cj.size(); ++i) coords.push_back(expect_string(cj[i], at_index(at_key(ptr, "coords"), i)));

  const json& pj = need(v, ptr, "params");
  expect_array(pj, at_key(ptr, "params"));
  for (std::size_t i = 0; i < pj.size(); ++i) {
    std::string p = at_index(at_key(ptr, "params"), i);
    expect_object(pj[i], p);
    ParamSpec spec;
    spec.name = expect_string(need(pj[i], p, "name"), at_key(p, "name"));
    spec.range = expect_interval(need(pj[i], p, "range"), at_key(p, "range"));
    const json& ex = need(pj[i], p, "excluded");
    expect_array(ex, at_key(p, "excluded"));
    for (std::size_t k = 0; k < ex.size(); ++k) spec.excluded.push_back(expect_number(ex[k], at_index(at_key(p, "excluded"), k)));
    e.params.push_back(std::move(spec));
  }
  try {
    e.chart = make_chart(coords, e.param_names());
  } catch (const Error& err) {
    throw CatalogError(at_key(ptr, "coords"), err.what());
  }
  EntryParser ep{e.id, e.chart->symbols()};

  const json& lj = need(v, ptr, "lambda");
  expect_object(lj, at_key(ptr, "lambda"));
  MultiVectorField probe(e.chart, 2);
  for (const auto& [key, val] : lj.items()) {
    std::string p = at_key(at_key(ptr, "lambda"), key);
    try {
      probe.parse_key(key);
    } catch (const Error& err) {
      throw CatalogError(p, err.what());
    }
    e.lambda.emplace_back(key, ep.expr(val, p));
  }

  const json& rj = need(v, ptr, "E");
  expect_object(rj, at_key(ptr, "E"));
  e.reeb.assign(coords.size(), Expression());
  for (const auto& [key, val] : rj.items()) {
    std::string p = at_key(at_key(ptr, "E"), key);
    auto it = std::find(coords.begin(), coords.end(), key);
    if (it == coords.end()) throw CatalogError(p, "unknown coordinate '" + key + "'");
    e.reeb[static_cast<std::size_t>(it - coords.begin())] = ep.expr(val, p);
  }

  const json& bj = need(v, ptr, "box");
  expect_object(bj, at_key(ptr, "box"));
  for (const auto& c : coords) {
    std::string p = at_key(at_key(ptr, "box"), c);
    auto it = bj.find(c);
    if (it == bj.end()) throw CatalogError(at_key(ptr, "box"), "no interval for coordinate '" + c + "'");
    e.box.emplace_back(c, expect_interval(*it, p));
  }
  for (const auto& [key, val] : bj.items())
    if (std::find(coords.begin(), coords.end(), key) == coords.end())
      throw CatalogError(at_key(at_key(ptr, "box"), key), "unknown coordinate '" + key + "'");

  if (auto it = v.find("exclusions"); it != v.end()) {
    std::string xp = at_key(ptr, "exclusions");
    expect_array(*it, xp);
    for (std::size_t i = 0; i < it->size(); ++i) {
      std::string p = at_index(xp, i);
      expect_object((*it)[i], p);
      Exclusion x;
      x.expr = ep.expr(need((*it)[i], p, "expr"), at_key(p, "expr"));
      x.clearance = expect_number(need((*it)[i], p, "clearance"), at_key(p, "clearance"));
      e.exclusions.push_back(std::move(x));
    }
  }

  if (auto it = v.find("paper_discrepancy"); it != v.end()) {
    if (!it->is_boolean()) throw CatalogError(at_key(ptr, "paper_discrepancy"), "expected a boolean");
    e.paper_discrepancy = it->get<bool>();
  }
  if (auto it = v.find("discrepancy_note"); it != v.end())
    e.discrepancy_note = expect_string(*it, at_key(ptr, "discrepancy_note"));

  if (auto it = v.find("examples"); it != v.end()) {
    std::string xp = at_key(ptr, "examples");
    expect_array(*it, xp);
    for (std::size_t i = 0; i < it->size(); ++i) e.examples.push_back(ep.example((*it)[i], at_index(xp, i), coords.size()));
  }
  return e;
}

}  // namespace

Catalog parse_catalog(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw CatalogError("", std::string("invalid JSON: ") + e.what());
  }
  expect_object(doc, "");
  Catalog cat;
  cat.schema_version = expect_int(need(doc, "", "schema_version"), "/schema_version");
  if (cat.schema_version != 1)
    throw CatalogError("/schema_version", "unsupported schema version " + std::to_string(cat.schema_version));
  const json& ej = need(doc, "", "entries");
  expect_array(ej, "/entries");
  for (std::size_t i = 0; i < ej.size(); ++i) {
    CatalogEntry e = parse_entry(ej[i], at_index("/entries", i));
    if (cat.find(e.id)) throw CatalogError(at_key(at_index("/entries", i), "id"), "duplicate id '" + e.id + "'");
    cat.entries.push_back(std::move(e));
  }
  return cat;
}

Catalog load_catalog(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open catalog '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw Error("catalog '" + path + "' is empty");
  return parse_catalog(text);
}

// ---------------------------------------------------------------------------

std::vector<ParamValues> default_draws(const CatalogEntry& entry) {
  static const ParamValues draws[] = {{{"b", 1.0}, {"a", 2.0}}, {{"b", -2.0}, {"a", -3.0}}};
  static const ParamValues fallback = {{"b", 2.0}, {"a", 3.0}};
  std::vector<ParamValues> out;
  for (const auto& d : draws) {
    ParamValues v;
    bool ok = true;
    for (const auto& p : entry.params) {
      auto excluded = [&](double x) {
        return std::find(p.excluded.begin(), p.excluded.end(), x) != p.excluded.end() || x < p.range.lo ||
               x > p.range.hi;
      };
      auto it = d.find(p.name);
      double x = it != d.end() ? it->second : 0.5 * (p.range.lo + p.range.hi);
      if (excluded(x)) {
        auto fb = fallback.find(p.name);
        x = fb != fallback.end() ? fb->second : x;
      }
      if (excluded(x)) {
        ok = false;
        break;
      }
      v[p.name] = x;
    }
    if (ok && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
  }
  return out;
}

void check_parameters(const CatalogEntry& entry, const ParamValues& params) {
  for (const auto& [name, value] : params)
    if (!entry.param(name)) throw ParameterError("entry " + entry.id + " has no parameter '" + name + "'");
  for (const auto& p : entry.params) {
    auto it = params.find(p.name);
    if (it == params.end()) throw ParameterError("entry " + entry.id + " needs a value for parameter '" + p.name + "'");
    double v = it->second;
    if (!std::isfinite(v) || v < p.range.lo || v > p.range.hi) {
      std::ostringstream os;
      os << "parameter " << p.name << "=" << v << " outside [" << p.range.lo << ", " << p.range.hi << "]";
      throw ParameterError(os.str());
    }
    for (double x : p.excluded)
      if (v == x) {
        std::ostringstream os;
        os << "parameter " << p.name << "=" << v << " is excluded for entry " << entry.id;
        throw ExcludedParameterError(os.str());
      }
  }
}

std::map<std::string, Expression, std::less<>> parameter_bindings(const ParamValues& params) {
  std::map<std::string, Expression, std::less<>> b;
  for (const auto& [name, value] : params) b.emplace(name, Expression::constant(Number::from_double(value)));
  return b;
}

namespace {

// Denominators that vanish at these parameter values also count as excluded.
void check_denominators(const CatalogEntry& entry, const std::vector<Expression>& exprs, const ParamValues& params) {
  Point p;
  for (const auto& [name, value] : params) p.set(name, value);
  SymbolTable symbols = entry.chart->symbols();
  for (const auto& e : exprs)
    for (const auto& d : parameter_denominators(e, symbols)) {
      double v = eval(d, p);
      if (std::fabs(v) < 1e-12) throw ExcludedParameterError("entry " + entry.id + ": denominator " + d.render() + " vanishes");
    }
}

std::vector<Expression> all_expressions(const CatalogEntry& entry) {
  std::vector<Expression> out;
  for (const auto& [k, v] : entry.lambda) out.push_back(v);
  out.insert(out.end(), entry.reeb.begin(), entry.reeb.end());
  return out;
}

}  // namespace

JacobiStructure instantiate(const CatalogEntry& entry, const ParamValues& params) {
  check_parameters(entry, params);
  check_denominators(entry, all_expressions(entry), params);
  auto bind = parameter_bindings(params);
  ChartPtr chart = make_chart(entry.chart->coordinates());
  MultiVectorField lambda(chart, 2);
  for (const auto& [key, v] : entry.lambda) lambda.accumulate(lambda.parse_key(key), substitute(v, bind));
  std::vector<Expression> e;
  for (const auto& c : entry.reeb) e.push_back(substitute(c, bind));
  SamplingBox box;
  for (const auto& [name, iv] : entry.box) box.set_coordinate(name, iv);
  for (const auto& x : entry.exclusions) box.add_exclusion(substitute(x.expr, bind), x.clearance);
  return JacobiStructure(chart, lambda, MultiVectorField::vector(chart, e), box, entry.id);
}

Expression parse_bound(const CatalogEntry& entry, const ParamValues& params, std::string_view text) {
  return substitute(parse(text, entry.chart->symbols()), parameter_bindings(params));
}

ExampleInstance instantiate_example(const CatalogEntry& entry, const ExampleData& ex, const ParamValues& params,
                                    const ChartPtr& chart) {
  check_parameters(entry, params);
  auto bind = parameter_bindings(params);
  ExampleInstance inst;
  inst.data = &ex;
  for (const auto& f : ex.hamiltonians) inst.hamiltonians.push_back(substitute(f, bind));
  for (const auto& comps : ex.fields) {
    std::vector<Expression> c;
    for (const auto& v : comps) c.push_back(substitute(v, bind));
    inst.fields.push_back(MultiVectorField::vector(chart, c));
  }
  std::map<std::string, Expression, std::less<>> fbind = bind;
  for (std::size_t k = 0; k < inst.hamiltonians.size(); ++k) fbind["f" + std::to_string(k + 1)] = inst.hamiltonians[k];
  for (const auto& rel : ex.brackets) inst.bracket_expect.push_back(substitute(rel.expect, fbind));
  if (ex.invariant) inst.invariant = substitute(*ex.invariant, bind);
  if (ex.symmetry) {
    std::vector<Expression> c;
    for (const auto& v : *ex.symmetry) c.push_back(substitute(v, bind));
    inst.symmetry = MultiVectorField::vector(chart, c);
  }
  return inst;
}

// ---------------------------------------------------------------------------

JacobiStructure build_from_group_data(const GroupData& gd, SamplingBox box) {
  if (!gd.chart) throw Error("group data without chart");
  std::size_t d = gd.right.size();
  if (gd.left.size() != d || gd.r.size() != d || gd.alpha.size() != d)
    throw Error("group data: r, fields and alpha must all have the algebra dimension");
  for (std::size_t i = 0; i < d; ++i) {
    if (gd.r[i].size() != d) throw Error("group data: r must be square");
    for (std::size_t j = 0; j < d; ++j)
      if (gd.r[i][j] != -gd.r[j][i]) throw Error("group data: r must be antisymmetric");
    if (gd.right[i].degree() != 1 || gd.left[i].degree() != 1) throw Error("group data: fields must be vector fields");
  }
  std::size_t n = gd.chart->dim();
  Expression w = Expression::exp(-gd.sigma);
  MultiVectorField lambda(gd.chart, 2);
  for (std::size_t mu = 0; mu < n; ++mu)
    for (std::size_t nu = mu + 1; nu < n; ++nu) {
      std::vector<Expression> terms;
      int m = static_cast<int>(mu), v = static_cast<int>(nu);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
          if (gd.r[i][j] == 0.0) continue;
          Expression rij = Expression::constant(Number::from_double(gd.r[i][j]));
          Expression right = gd.right[i].component({m}) * gd.right[j].component({v});
          Expression left = gd.left[i].component({m}) * gd.left[j].component({v});
          terms.push_back(rij * (right - w * left));
        }
      lambda.set({m, v}, Expression::sum(std::move(terms)));
    }
  std::vector<Expression> e(n);
  for (std::size_t mu = 0; mu < n; ++mu) {
    std::vector<Expression> terms;
    for (std::size_t i = 0; i < d; ++i) terms.push_back(-(gd.alpha[i] * gd.right[i].component({static_cast<int>(mu)})));
    e[mu] = Expression::sum(std::move(terms));
  }
  return JacobiStructure(gd.chart, lambda, MultiVectorField::vector(gd.chart, e), std::move(box), "group-data");
}

// ---------------------------------------------------------------------------

bool EntryReport::passed() const {
  if (!error.empty() || draws.empty()) return false;
  for (const auto& d : draws)
    if (!d.recursive.passed() || !d.coordinate.passed()) return false;
  return true;
}

bool EntryReport::implementations_agree() const {
  for (const auto& d : draws)
    if (!d.agree()) return false;
  return true;
}

bool EntryReport::discrepancy_detected() const {
  for (const auto& d : draws)
    if (d.recursive.outcome() == Outcome::NonZero && d.coordinate.outcome() == Outcome::NonZero) return true;
  return false;
}

bool EntryReport::accepted() const {
  if (!error.empty() || !implementations_agree()) return false;
  if (passed()) return !flagged;
  return flagged && discrepancy_detected();
}

std::vector<EntryReport> verify_all(const std::vector<CatalogEntry>& entries, const VerifyAllOptions& opt) {
  std::vector<EntryReport> reports(entries.size());
  auto work = [&](std::size_t k) {
    const CatalogEntry& e = entries[k];
    EntryReport& rep = reports[k];
    rep.id = e.id;
    rep.flagged = e.paper_discrepancy;
    try {
      for (const auto& params : default_draws(e)) {
        JacobiStructure j = instantiate(e, params);
        rep.draws.push_back({params, verify_jacobi(j, opt.zero, SchoutenRoute::Recursive),
                             verify_jacobi(j, opt.zero, SchoutenRoute::Coordinate)});
      }
      if (rep.draws.empty()) rep.error = "no admissible parameter draw";
    } catch (const std::exception& ex) {
      rep.error = ex.what();
    }
  };
  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, entries.size())));
  if (threads <= 1) {
    for (std::size_t k = 0; k < entries.size(); ++k) work(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < entries.size(); k = next++) work(k);
      });
    for (auto& th : pool) th.join();
  }
  std::stable_sort(reports.begin(), reports.end(), [](const EntryReport& a, const EntryReport& b) { return a.id < b.id; });
  return reports;
}

}  // namespace jlie
