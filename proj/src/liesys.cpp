#include "jlie/liesys.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include "json.hpp"

namespace jlie {

void LieSystemSpec::validate() const {
  if (!chart) throw Error("Lie system without chart");
  if (generators.empty()) throw Error("Lie system without generators");
  if (coefficients.size() != generators.size())
    throw Error("expected " + std::to_string(generators.size()) + " coefficient functions, got " +
                std::to_string(coefficients.size()));
  if (!hamiltonians.empty() && hamiltonians.size() != generators.size())
    throw Error("Hamiltonian list does not align with generators");
  for (const auto& g : generators) {
    if (g.degree() != 1) throw Error("generators must be vector fields");
    if (g.chart()->coordinates() != chart->coordinates()) throw Error("chart mismatch");
  }
}

SymbolTable time_symbols(const Chart& chart) { return {{"t"}, chart.parameters()}; }

MultiVectorField commutator(const MultiVectorField& x, const MultiVectorField& y) { return lie_bracket(x, y); }

namespace {

// Rows: (point, component); columns: fields.
Eigen::MatrixXd sample_matrix(const std::vector<MultiVectorField>& fields,
                              const std::vector<std::vector<double>>& points, const SamplingBox& box) {
  if (fields.empty()) return {};
  std::size_t n = fields.front().chart()->dim();
  std::vector<Expression> exprs;
  for (const auto& f : fields)
    for (const auto& c : f.dense()) exprs.push_back(c);
  CompiledExpressions prog(exprs, box.slot_names());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(points.size() * n), static_cast<Eigen::Index>(fields.size()));
  std::vector<double> out(exprs.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    prog.eval(points[p], out);
    for (std::size_t f = 0; f < fields.size(); ++f)
      for (std::size_t mu = 0; mu < n; ++mu)
        m(static_cast<Eigen::Index>(p * n + mu), static_cast<Eigen::Index>(f)) = out[f * n + mu];
  }
  return m;
}

std::size_t numeric_rank(const Eigen::MatrixXd& m, double rel) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel * s(0)) ++r;
  return r;
}

}  // namespace

std::size_t span_rank(const std::vector<MultiVectorField>& fields, const SamplingBox& box, const FitOptions& opt) {
  auto points = box.sample(opt.points, opt.seed);
  return numeric_rank(sample_matrix(fields, points, box), opt.rank_threshold);
}

StructureConstants structure_constants(const std::vector<MultiVectorField>& gens, const SamplingBox& box,
                                       const FitOptions& opt) {
  StructureConstants sc;
  sc.r = gens.size();
  sc.c.assign(sc.r * sc.r * sc.r, 0.0);
  if (gens.empty()) {
    sc.closed = true;
    return sc;
  }
  std::size_t n = gens.front().chart()->dim();
  std::size_t m = std::max(opt.points, 3 * n);
  auto points = box.sample(m, opt.seed);
  Eigen::MatrixXd a = sample_matrix(gens, points, box);
  if (numeric_rank(a, opt.rank_threshold) < sc.r)
    throw RankDeficientError("generators are linearly dependent on every sampled point set");
  auto qr = a.colPivHouseholderQr();
  for (std::size_t i = 0; i < sc.r; ++i) {
    for (std::size_t j = i + 1; j < sc.r; ++j) {
      Eigen::MatrixXd bm = sample_matrix({commutator(gens[i], gens[j])}, points, box);
      Eigen::VectorXd b = bm.col(0);
      Eigen::VectorXd c = qr.solve(b);
      double res = (a * c - b).lpNorm<Eigen::Infinity>() / (1.0 + b.lpNorm<Eigen::Infinity>());
      sc.residual = std::max(sc.residual, res);
      for (std::size_t k = 0; k < sc.r; ++k) {
        sc.c[(i * sc.r + j) * sc.r + k] = c(static_cast<Eigen::Index>(k));
        sc.c[(j * sc.r + i) * sc.r + k] = -c(static_cast<Eigen::Index>(k));
      }
    }
  }
  sc.closed = sc.residual <= opt.tol;
  return sc;
}

ClosureResult lie_closure(const std::vector<MultiVectorField>& gens, std::size_t max_dim, const SamplingBox& box,
                          const FitOptions& opt) {
  if (max_dim < gens.size()) throw Error("max_dim is smaller than the generator count");
  ClosureResult res;
  if (gens.empty()) {
    res.closed = true;
    return res;
  }
  std::size_t n = gens.front().chart()->dim();
  auto points = box.sample(std::max(opt.points, 3 * n), opt.seed);
  auto rank_of = [&](const std::vector<MultiVectorField>& f) {
    return numeric_rank(sample_matrix(f, points, box), opt.rank_threshold);
  };
  // drop generators already in the span of earlier ones
  for (const auto& g : gens) {
    auto trial = res.basis;
    trial.push_back(g);
    if (rank_of(trial) > res.basis.size()) res.basis = std::move(trial);
  }
  std::size_t checked_upto = 0;  // pairs (i, j) with j < checked_upto are done
  while (checked_upto < res.basis.size()) {
    std::size_t j = checked_upto;
    for (std::size_t i = 0; i < j; ++i) {
      MultiVectorField c = commutator(res.basis[i], res.basis[j]);
      auto trial = res.basis;
      trial.push_back(c);
      if (rank_of(trial) > res.basis.size()) {
        if (res.basis.size() + 1 > max_dim) {
          res.closed = false;
          return res;
        }
        res.basis = std::move(trial);
      }
    }
    ++checked_upto;
  }
  res.closed = true;
  return res;
}

// ---------------------------------------------------------------------------

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::Completed: return "completed";
    case StopReason::LeftDomain: return "left_domain";
    case StopReason::DomainFault: return "domain_fault";
  }
  return "?";
}

Trajectory integrate(const LieSystemSpec& sys, const Point& x0, double t0, double t1, double dt,
                     const IntegrateOptions& opt) {
  sys.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("dt must be positive");
  if (!(t1 >= t0)) throw Error("t1 must not precede t0");
  const auto& coords = sys.chart->coordinates();
  std::size_t n = coords.size();

  std::vector<Expression> field(n);
  for (std::size_t mu = 0; mu < n; ++mu) {
    std::vector<Expression> terms;
    for (std::size_t i = 0; i < sys.generators.size(); ++i)
      terms.push_back(sys.coefficients[i] * sys.generators[i].component({static_cast<int>(mu)}));
    field[mu] = Expression::sum(std::move(terms));
  }
  std::vector<std::string> slots = coords;
  slots.push_back("t");
  CompiledExpressions prog(field, slots);

  Trajectory tr;
  tr.coordinates = coords;
  tr.dt = dt;
  std::vector<double> state(n);
  for (std::size_t mu = 0; mu < n; ++mu) {
    auto v = x0.get(coords[mu]);
    if (!v) throw Error("initial point lacks coordinate '" + coords[mu] + "'");
    state[mu] = *v;
  }

  std::vector<double> in(n + 1), k1(n), k2(n), k3(n), k4(n), tmp(n);
  auto rhs = [&](double t, const std::vector<double>& s, std::vector<double>& out) {
    std::copy(s.begin(), s.end(), in.begin());
    in[n] = t;
    prog.eval(in, out);
  };
  auto inside = [&](const std::vector<double>& s) {
    if (!opt.domain) return true;
    for (std::size_t mu = 0; mu < n; ++mu)
      for (const auto& [name, iv] : opt.domain->coordinates())
        if (name == coords[mu] && (s[mu] < iv.lo || s[mu] > iv.hi)) return false;
    return true;
  };

  tr.t.push_back(t0);
  tr.x.push_back(state);
  if (!inside(state)) {
    tr.stop = StopReason::LeftDomain;
    return tr;
  }
  double span = t1 - t0;
  auto steps = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
  for (std::size_t k = 0; k < steps; ++k) {
    double t = t0 + static_cast<double>(k) * dt;
    double next = (k + 1 == steps) ? t1 : t0 + static_cast<double>(k + 1) * dt;
    double h = next - t;
    try {
      rhs(t, state, k1);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + 0.5 * h * k1[i];
      rhs(t + 0.5 * h, tmp, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + 0.5 * h * k2[i];
      rhs(t + 0.5 * h, tmp, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + h * k3[i];
      rhs(next, tmp, k4);
    } catch (const DomainError& e) {
      tr.stop = StopReason::DomainFault;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", t);
      tr.fault = std::string(e.what()) + " near t=" + buf;
      return tr;
    }
    for (std::size_t i = 0; i < n; ++i) state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!std::all_of(state.begin(), state.end(), [](double v) { return std::isfinite(v); })) {
      tr.stop = StopReason::DomainFault;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", next);
      tr.fault = std::string("state became non-finite at t=") + buf;
      return tr;
    }
    tr.t.push_back(next);
    tr.x.push_back(state);
    if (!inside(state)) {
      tr.stop = StopReason::LeftDomain;
      return tr;
    }
  }
  return tr;
}

namespace {
std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

std::string Trajectory::to_csv() const {
  std::string out = "t";
  for (const auto& c : coordinates) out += "," + c;
  out += '\n';
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += g17(t[i]);
    for (double v : x[i]) out += "," + g17(v);
    out += '\n';
  }
  return out;
}

std::string Trajectory::to_json() const {
  nlohmann::ordered_json j;
  j["coordinates"] = coordinates;
  j["method"] = method;
  j["dt"] = dt;
  j["stop"] = stop_reason_name(stop);
  if (!fault.empty()) j["fault"] = fault;
  j["t"] = t;
  j["x"] = x;
  return j.dump(2);
}

DriftResult check_invariant_along(const Trajectory& traj, const Expression& h, double tol) {
  DriftResult r;
  if (traj.t.empty()) return r;
  CompiledExpressions prog({h}, traj.coordinates);
  double v = 0.0;
  prog.eval(traj.x.front(), std::span<double>(&v, 1));
  r.h0 = v;
  for (const auto& s : traj.x) {
    prog.eval(s, std::span<double>(&v, 1));
    r.max_drift = std::max(r.max_drift, std::fabs(v - r.h0));
  }
  r.ok = r.max_drift <= tol * (1.0 + std::fabs(r.h0));
  return r;
}

CheckResult is_first_integral(const LieSystemSpec& sys, const Expression& h, const SamplingBox& box,
                              const ZeroTestOptions& opt) {
  std::vector<Expression> vals;
  for (const auto& g : sys.generators) vals.push_back(apply(g, h));
  return is_zero_all(vals, box, opt);
}

}  // namespace jlie
