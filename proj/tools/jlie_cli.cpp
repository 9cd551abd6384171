// Command-line front end over the C interface.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jlie/jlie.h"
#include "json.hpp"

using nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kMath = 1, kUsage = 2, kDomain = 3 };

struct Config {
  std::string catalog;
  std::string entry;
  std::vector<std::string> params;
  std::size_t samples = 200;
  double tol = 1e-8;
  std::uint64_t seed = 42;
  unsigned threads = 0;
  std::string format = "text";
  std::string output;
};

struct Failure {
  int code;
  std::string message;
};

int exit_for(jlie_status s) {
  switch (s) {
    case JLIE_OK:
      return kOk;
    case JLIE_ERR_DOMAIN:
      return kDomain;
    default:
      return kUsage;
  }
}

void check(jlie_status s, const char* what) {
  if (s != JLIE_OK) throw Failure{exit_for(s), std::string(what) + ": " + jlie_last_error()};
}

// Owns a string returned by the library.
struct Owned {
  char* p = nullptr;
  ~Owned() { jlie_string_free(p); }
  std::string str() const { return p ? p : ""; }
  ordered_json json() const { return ordered_json::parse(str()); }
};

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
};

using Catalog = Handle<jlie_catalog, jlie_catalog_free>;
using Structure = Handle<jlie_structure, jlie_structure_free>;
using System = Handle<jlie_system, jlie_system_free>;

std::string catalog_path(const Config& c) {
  if (!c.catalog.empty()) return c.catalog;
  if (const char* env = std::getenv("JACOBI_CATALOG")) return env;
  return JLIE_DEFAULT_CATALOG;
}

void load(const Config& c, Catalog& cat) { check(jlie_catalog_load(catalog_path(c).c_str(), &cat.p), "loading catalog"); }

jlie_options options(const Config& c) {
  jlie_options o;
  jlie_options_default(&o);
  o.samples = c.samples;
  o.tol = c.tol;
  o.seed = c.seed;
  o.threads = c.threads;
  return o;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Failure{kUsage, "bad number '" + s + "' for " + what};
  }
}

void open_structure(const Config& c, Catalog& cat, Structure& s) {
  if (c.entry.empty()) throw Failure{kUsage, "--entry is required"};
  std::vector<std::string> names;
  std::vector<double> values;
  for (const auto& group : c.params)
    for (const auto& kv : split(group, ',')) {
      auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw Failure{kUsage, "parameter '" + kv + "' is not name=value"};
      names.push_back(kv.substr(0, eq));
      values.push_back(number(kv.substr(eq + 1), names.back()));
    }
  std::vector<const char*> np;
  for (const auto& n : names) np.push_back(n.c_str());
  load(c, cat);
  check(jlie_structure_from_entry(cat.p, c.entry.c_str(), np.data(), values.data(), names.size(), &s.p),
        "instantiating entry");
}

class Out {
 public:
  explicit Out(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Failure{kUsage, "cannot write '" + path + "'"};
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string g(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

std::string params_text(const ordered_json& p) {
  std::string s;
  for (auto it = p.begin(); it != p.end(); ++it) s += (s.empty() ? "" : ",") + it.key() + "=" + g(it.value());
  return s.empty() ? "-" : s;
}

std::string witness_text(const ordered_json& w) {
  if (w.is_null()) return "";
  std::string s = "  witness";
  for (auto it = w.begin(); it != w.end(); ++it) s += " " + it.key() + "=" + g(it.value());
  return s;
}

void seed_line(std::ostream& os, const Config& c) {
  os << "seed: " << c.seed << "  samples: " << c.samples << "  tol: " << g(c.tol) << "\n";
}

void field_text(std::ostream& os, const ordered_json& f, const ordered_json& coords) {
  const auto& comps = f["components"];
  if (comps.empty()) os << "  0\n";
  for (auto it = comps.begin(); it != comps.end(); ++it) {
    std::string key = it.key();
    if (f["degree"] == 1 && coords.is_array()) key = "d/d" + key;
    os << "  " << key << ": " << it.value().get<std::string>() << "\n";
  }
  if (f.contains("numerically_zero") && !f["numerically_zero"].empty()) {
    os << "  vanishing on the sampling box:";
    for (const auto& k : f["numerically_zero"]) os << " " << k.get<std::string>();
    os << "\n";
  }
}

// --- commands ---------------------------------------------------------------

int cmd_list(const Config& c) {
  Catalog cat;
  load(c, cat);
  Owned js;
  check(jlie_catalog_list(cat.p, &js.p), "listing");
  Out out(c.output);
  if (c.format == "json") {
    out.os() << js.str();
    return kOk;
  }
  seed_line(out.os(), c);
  for (const auto& e : js.json()) {
    std::string params;
    for (const auto& p : e["params"]) params += (params.empty() ? "" : ",") + p.get<std::string>();
    out.os() << e["id"].get<std::string>() << "  " << e["label"].get<std::string>()
             << "  params: " << (params.empty() ? "-" : params) << "\n";
  }
  return kOk;
}

void reports_text(std::ostream& os, const ordered_json& reports, const std::string& prefix) {
  for (const auto& r : reports)
    os << prefix << r["route"].get<std::string>() << "  " << r["axiom"].get<std::string>() << "  "
       << r["verdict"].get<std::string>() << "  max_residual " << g(r["max_residual"]) << witness_text(r["witness"])
       << "\n";
}

int cmd_verify_all(const Config& c) {
  Catalog cat;
  load(c, cat);
  jlie_options o = options(c);
  int accepted = 0;
  Owned js;
  check(jlie_verify_all(cat.p, &o, &accepted, &js.p), "verifying catalog");
  Out out(c.output);
  if (c.format == "json") {
    out.os() << js.str();
  } else {
    ordered_json j = js.json();
    seed_line(out.os(), c);
    for (const auto& e : j["entries"]) {
      std::string verdict = e["passed"].get<bool>() ? "pass" : (e["flagged"].get<bool>() ? "discrepancy" : "fail");
      if (!e["implementations_agree"].get<bool>()) verdict += " (implementations disagree)";
      if (e.contains("error")) verdict = "error: " + e["error"].get<std::string>();
      out.os() << e["id"].get<std::string>() << "  " << verdict << "\n";
    }
    const auto& s = j["summary"];
    out.os() << "entries " << s["entries"] << ", passed " << s["passed"] << ", flagged " << s["flagged"]
             << ", disagreements " << s["disagreements"] << ", rejected " << s["rejected"] << "\n";
  }
  return accepted ? kOk : kMath;
}

int cmd_verify(const Config& c) {
  Catalog cat;
  Structure s;
  open_structure(c, cat, s);
  jlie_options o = options(c);
  int passed = 0;
  Owned js;
  check(jlie_verify(s.p, &o, &passed, &js.p), "verifying");
  ordered_json j = js.json();
  bool agree = j["implementations_agree"].get<bool>();
  bool flagged = j["flagged"].get<bool>();
  Out out(c.output);
  if (c.format == "json") {
    out.os() << js.str();
  } else {
    seed_line(out.os(), c);
    std::string head = j["entry"].get<std::string>() + "  " + params_text(j["params"]) + "  ";
    reports_text(out.os(), j["reports"], head);
    std::string verdict = passed ? "pass" : (flagged && agree ? "discrepancy (flagged in the catalog)" : "fail");
    if (!agree) verdict += " (implementations disagree)";
    out.os() << "verdict: " << verdict << "\n";
    if (!passed && j.contains("discrepancy_note")) out.os() << "note: " << j["discrepancy_note"].get<std::string>() << "\n";
  }
  return agree && (passed || flagged) ? kOk : kMath;
}

int cmd_bracket(const Config& c, const std::string& f, const std::string& gx, const std::string& expect) {
  Catalog cat;
  Structure s;
  open_structure(c, cat, s);
  jlie_options o = options(c);
  int passed = 1;
  Owned js;
  check(jlie_bracket(s.p, f.c_str(), gx.c_str(), expect.empty() ? nullptr : expect.c_str(), &o, &passed, &js.p),
        "bracket");
  Out out(c.output);
  if (c.format == "json") {
    out.os() << js.str();
  } else {
    ordered_json j = js.json();
    seed_line(out.os(), c);
    out.os() << "convention: " << j["convention"].get<std::string>() << "\n";
    out.os() << "{f,g} = " << j["bracket"].get<std::string>() << "\n";
    if (j.contains("check"))
      out.os() << "expect " << j["expect"].get<std::string>() << ": " << j["check"]["verdict"].get<std::string>()
               << "  max_residual " << g(j["check"]["max_residual"]) << witness_text(j["check"]["witness"]) << "\n";
  }
  return passed ? kOk : kMath;
}

int cmd_hamvf(const Config& c, const std::string& f) {
  Catalog cat;
  Structure s;
  open_structure(c, cat, s);
  jlie_options o = options(c);
  Owned js;
  check(jlie_hamiltonian_vf(s.p, f.c_str(), &o, &js.p), "hamiltonian field");
  Out out(c.output);
  if (c.format == "json") {
    out.os() << js.str();
  } else {
    ordered_json j = js.json();
    seed_line(out.os(), c);
    out.os() << "X_f for f = " << f << ":\n";
    field_text(out.os(), j["field"], ordered_json::array());
    out.os() << "good Hamiltonian (E(f) = 0): " << j["good_hamiltonian"]["verdict"].get<std::string>() << "\n";
  }
  return kOk;
}

int cmd_symmetry(const Config& c, const std::string& h) {
  Catalog cat;
  Structure s;
  open_structure(c, cat, s);
  jlie_options o = options(c);
  int passed = 0;
  Owned js;
  check(jlie_symmetry(s.p, h.c_str(), &o, &passed, &js.p), "symmetry");
  Out out(c.output);
  if (c.format == "json") {
    out.os() << js.str();
  } else {
    ordered_json j = js.json();
    seed_line(out.os(), c);
    out.os() << "X_h for h = " << h << ":\n";
    field_text(out.os(), j["symmetry"], ordered_json::array());
    out.os() << "commutes with the " << j["generators"] << " generators of the " << j["example"].get<std::string>()
             << " example: " << j["check"]["verdict"].get<std::string>() << "  max_residual "
             << g(j["check"]["max_residual"]) << witness_text(j["check"]["witness"]) << "\n";
  }
  return passed ? kOk : kMath;
}

struct IntegrateArgs {
  int example = 0;
  std::string coords;
  std::vector<std::string> fields;
  std::string b;
  std::string x0;
  double t0 = 0.0, t1 = 1.0, dt = 1e-3;
  std::string invariant;
};

int cmd_integrate(const Config& c, const IntegrateArgs& a) {
  System sys;
  Catalog cat;
  Structure s;
  if (!a.fields.empty()) {
    if (!c.entry.empty()) throw Failure{kUsage, "give either --entry or --field, not both"};
    std::vector<std::string> coords = split(a.coords.empty() ? "x,y,z" : a.coords, ',');
    std::vector<std::string> comps;
    for (const auto& f : a.fields) {
      auto parts = split(f, ',');
      if (parts.size() != coords.size())
        throw Failure{kUsage, "field '" + f + "' needs " + std::to_string(coords.size()) + " components"};
      comps.insert(comps.end(), parts.begin(), parts.end());
    }
    std::vector<const char*> cp, pp;
    for (const auto& x : coords) cp.push_back(x.c_str());
    for (const auto& x : comps) pp.push_back(x.c_str());
    check(jlie_system_inline(cp.data(), cp.size(), pp.data(), a.fields.size(), &sys.p), "building system");
  } else {
    open_structure(c, cat, s);
    check(jlie_system_from_entry(s.p, a.example, &sys.p), "building system");
  }
  std::vector<std::string> b = split(a.b, ',');
  std::vector<const char*> bp;
  for (const auto& x : b) bp.push_back(x.c_str());
  std::vector<double> x0;
  for (const auto& x : split(a.x0, ',')) x0.push_back(number(x, "--x0"));
  const bool json = c.format == "json";
  Owned traj, summary;
  check(jlie_integrate(sys.p, bp.data(), bp.size(), x0.data(), x0.size(), a.t0, a.t1, a.dt,
                       a.invariant.empty() ? nullptr : a.invariant.c_str(), c.tol, json ? 1 : 0, &traj.p, &summary.p),
        "integrating");
  ordered_json j = summary.json();
  j["seed"] = c.seed;
  {
    Out out(c.output);
    out.os() << traj.str();
  }
  // with the trajectory on stdout, the summary goes to stderr
  std::ostream& os = c.output.empty() ? std::cerr : std::cout;
  if (json) {
    os << j.dump(2) << "\n";
  } else {
    os << "seed: " << c.seed << "\n";
    os << "system: " << j["system"].get<std::string>() << "  method " << j["method"].get<std::string>() << "  dt "
       << g(j["dt"]) << "\n";
    os << "stop: " << j["stop"].get<std::string>() << " at t = " << g(j["t_end"]) << " after " << j["points"]
       << " points\n";
    if (j.contains("fault")) os << "fault: " << j["fault"].get<std::string>() << "\n";
    if (j.contains("invariant")) {
      const auto& h = j["invariant"];
      os << "invariant " << h["expression"].get<std::string>() << ": max drift " << g(h["max_drift"]) << " (tol "
         << g(h["tol"]) << ") " << (h["ok"].get<bool>() ? "pass" : "fail") << "\n";
    }
  }
  if (j["stop"] == "domain_fault") {
    std::cerr << "domain fault at t = " << g(j["t_end"]) << ", x = " << j["x_end"].dump() << "\n";
    return kDomain;
  }
  if (j.contains("invariant") && !j["invariant"]["ok"].get<bool>()) return kMath;
  return kOk;
}

int cmd_report(const Config& c) {
  Catalog cat;
  load(c, cat);
  jlie_options o = options(c);
  int unexpected = 0;
  Owned js;
  check(jlie_report(cat.p, &o, &unexpected, &js.p), "report");
  Out out(c.output);
  if (c.format == "json") {
    out.os() << js.str();
  } else {
    seed_line(out.os(), c);
    for (const auto& cr : js.json()["criteria"]) {
      out.os() << "criterion " << cr["id"] << " " << (cr["passed"].get<bool>() ? "PASS" : "FAIL") << "  "
               << cr["title"].get<std::string>() << "\n";
      for (const auto& it : cr["items"])
        out.os() << "    " << it["verdict"].get<std::string>() << "  " << it["name"].get<std::string>() << "  "
                 << g(it["measured"]) << (it.contains("note") ? "  (" + it["note"].get<std::string>() + ")" : "")
                 << "\n";
      if (cr.contains("reason")) out.os() << "    known unattainable: " << cr["reason"].get<std::string>() << "\n";
    }
    out.os() << "unexpected failures: " << unexpected << "\n";
  }
  return unexpected == 0 ? kOk : kMath;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jacobi structures, Jacobi-Lie Hamiltonian systems and their verification"};
  app.require_subcommand(1);
  Config cfg;

  auto common = [&](CLI::App* sub, bool with_entry) {
    sub->add_option("--catalog", cfg.catalog, "catalog file (default: $JACOBI_CATALOG, then the shipped catalog)");
    sub->add_option("--samples", cfg.samples, "sample points per zero test")->check(CLI::PositiveNumber);
    sub->add_option("--tol", cfg.tol, "zero-test tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "sampling seed");
    sub->add_option("--format", cfg.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--output", cfg.output, "write the output to this file");
    if (with_entry) {
      sub->add_option("--entry", cfg.entry, "catalog entry id");
      sub->add_option("--param", cfg.params, "parameter value name=value (repeatable)");
    }
  };

  auto* list = app.add_subcommand("list", "list catalog entries");
  common(list, false);

  auto* verify = app.add_subcommand("verify", "check the Jacobi axioms");
  common(verify, true);
  bool all = false;
  verify->add_flag("--all", all, "verify every entry at the default parameter draws");
  verify->add_option("--threads", cfg.threads, "workers for --all (0: hardware)");

  std::string f, gx, expect, h;
  auto* bracket = app.add_subcommand("bracket", "Jacobi bracket {f,g}");
  common(bracket, true);
  bracket->add_option("--f", f, "first function")->required();
  bracket->add_option("--g", gx, "second function")->required();
  bracket->add_option("--expect", expect, "expected value; sets the exit code");

  auto* hamvf = app.add_subcommand("hamvf", "Hamiltonian vector field of f");
  common(hamvf, true);
  hamvf->add_option("--f", f, "function")->required();

  IntegrateArgs ia;
  auto* integ = app.add_subcommand("integrate", "integrate a Lie system with RK4");
  common(integ, true);
  integ->add_option("--example", ia.example, "example of the entry to take generators from (1-based)");
  integ->add_option("--coords", ia.coords, "coordinates of inline generators (default x,y,z)");
  integ->add_option("--field", ia.fields, "inline generator, comma-separated components (repeatable)");
  integ->add_option("--b", ia.b, "coefficients b_i(t), comma-separated")->required();
  integ->add_option("--x0", ia.x0, "initial point, comma-separated")->required();
  integ->add_option("--t0", ia.t0, "start time");
  integ->add_option("--t1", ia.t1, "end time");
  integ->add_option("--dt", ia.dt, "step");
  integ->add_option("--invariant", ia.invariant, "function whose drift is checked against --tol");

  auto* sym = app.add_subcommand("symmetry", "Lie symmetry X_h of a constant of motion");
  sym->set_help_flag("--help", "Print this help message and exit");
  common(sym, true);
  sym->add_option("--h", h, "constant of motion")->required();

  auto* report = app.add_subcommand("report", "full acceptance sweep");
  common(report, false);
  report->add_option("--threads", cfg.threads, "workers for the table sweep (0: hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*list) return cmd_list(cfg);
    if (*verify) {
      if (all && !cfg.entry.empty()) throw Failure{kUsage, "give either --entry or --all"};
      return all ? cmd_verify_all(cfg) : cmd_verify(cfg);
    }
    if (*bracket) return cmd_bracket(cfg, f, gx, expect);
    if (*hamvf) return cmd_hamvf(cfg, f);
    if (*integ) return cmd_integrate(cfg, ia);
    if (*sym) return cmd_symmetry(cfg, h);
    if (*report) return cmd_report(cfg);
  } catch (const Failure& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  }
  return kUsage;
}
