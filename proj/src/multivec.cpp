#include "jlie/multivec.hpp"

#include <algorithm>
#include <set>

namespace jlie {

namespace {

void require_same_chart(const ChartPtr& a, const ChartPtr& b) {
  if (a != b && a->coordinates() != b->coordinates()) throw Error("chart mismatch");
}

// Sorts idx in place; returns the permutation sign, or 0 on a repeated index.
int sort_with_sign(IndexTuple& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    for (std::size_t j = i; j > 0 && idx[j - 1] > idx[j]; --j) {
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  }
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (idx[i] == idx[i - 1]) return 0;
  return sign;
}

Expression signed_expr(int sign, const Expression& e) { return sign > 0 ? e : -e; }

}  // namespace

Chart::Chart(std::vector<std::string> coordinates, std::vector<std::string> parameters)
    : coordinates_(std::move(coordinates)), parameters_(std::move(parameters)) {
  if (coordinates_.empty()) throw Error("a chart needs at least one coordinate");
  std::set<std::string> seen;
  for (const auto& n : coordinates_) {
    if (n == "t") throw Error("'t' is reserved for time and cannot be a coordinate");
    if (!seen.insert(n).second) throw Error("duplicate coordinate '" + n + "'");
  }
  for (const auto& n : parameters_)
    if (!seen.insert(n).second) throw Error("parameter '" + n + "' clashes with another name");
}

std::size_t Chart::index_of(std::string_view coordinate) const {
  auto it = std::find(coordinates_.begin(), coordinates_.end(), coordinate);
  if (it == coordinates_.end()) throw Error("unknown coordinate '" + std::string(coordinate) + "'");
  return static_cast<std::size_t>(it - coordinates_.begin());
}

SamplingBox Chart::default_box() const {
  SamplingBox box;
  for (const auto& c : coordinates_) box.set_coordinate(c, {0.2, 1.2});
  return box;
}

ChartPtr make_chart(std::vector<std::string> coordinates, std::vector<std::string> parameters) {
  return std::make_shared<const Chart>(std::move(coordinates), std::move(parameters));
}

// ---------------------------------------------------------------------------

MultiVectorField::MultiVectorField(ChartPtr chart, int degree) : chart_(std::move(chart)), degree_(degree) {
  if (!chart_) throw Error("multivector without chart");
  // degrees above the dimension are allowed and always zero
  if (degree < 0) throw Error("negative multivector degree");
}

MultiVectorField MultiVectorField::scalar(ChartPtr chart, Expression f) {
  MultiVectorField m(std::move(chart), 0);
  m.set({}, f);
  return m;
}

MultiVectorField MultiVectorField::vector(ChartPtr chart, const std::vector<Expression>& components) {
  if (components.size() != chart->dim()) throw Error("vector field component count does not match chart");
  MultiVectorField m(std::move(chart), 1);
  for (std::size_t i = 0; i < components.size(); ++i) m.set({static_cast<int>(i)}, components[i]);
  return m;
}

MultiVectorField MultiVectorField::basis(ChartPtr chart, int i) {
  MultiVectorField m(std::move(chart), 1);
  m.set({i}, Expression::constant(1));
  return m;
}

Expression MultiVectorField::component(const IndexTuple& idx) const {
  IndexTuple s = idx;
  int sign = sort_with_sign(s);
  if (sign == 0) return Expression();
  auto it = components_.find(s);
  if (it == components_.end()) return Expression();
  return signed_expr(sign, it->second);
}

void MultiVectorField::accumulate(const IndexTuple& idx, const Expression& value) {
  if (value.is_zero_constant()) return;
  if (static_cast<int>(idx.size()) != degree_) throw Error("index tuple does not match degree");
  IndexTuple s = idx;
  int sign = sort_with_sign(s);
  if (sign == 0) return;
  for (int i : s)
    if (i < 0 || static_cast<std::size_t>(i) >= chart_->dim()) throw Error("index out of range");
  auto it = components_.find(s);
  Expression v = signed_expr(sign, value);
  if (it == components_.end()) {
    components_.emplace(std::move(s), v);
  } else {
    it->second = it->second + v;
    if (it->second.is_zero_constant()) components_.erase(it);
  }
}

void MultiVectorField::set(const IndexTuple& idx, const Expression& value) {
  IndexTuple s = idx;
  int sign = sort_with_sign(s);
  if (sign == 0) throw Error("repeated index in multivector component");
  components_.erase(s);
  accumulate(idx, value);
}

std::vector<IndexTuple> MultiVectorField::all_tuples() const {
  std::vector<IndexTuple> out;
  int n = static_cast<int>(chart_->dim());
  IndexTuple cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == degree_) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

std::vector<Expression> MultiVectorField::dense() const {
  std::vector<Expression> out;
  for (const auto& t : all_tuples()) out.push_back(component(t));
  return out;
}

MultiVectorField MultiVectorField::operator-() const {
  MultiVectorField r(chart_, degree_);
  for (const auto& [k, v] : components_) r.components_.emplace(k, -v);
  return r;
}

MultiVectorField operator+(const MultiVectorField& a, const MultiVectorField& b) {
  require_same_chart(a.chart_, b.chart_);
  if (a.degree_ != b.degree_) throw Error("cannot add multivectors of different degree");
  MultiVectorField r = a;
  for (const auto& [k, v] : b.components_) r.accumulate(k, v);
  return r;
}

MultiVectorField operator-(const MultiVectorField& a, const MultiVectorField& b) { return a + (-b); }

MultiVectorField operator*(const Expression& f, const MultiVectorField& a) {
  MultiVectorField r(a.chart_, a.degree_);
  for (const auto& [k, v] : a.components_) r.accumulate(k, f * v);
  return r;
}

MultiVectorField MultiVectorField::substitute(const std::map<std::string, Expression, std::less<>>& bindings) const {
  MultiVectorField r(chart_, degree_);
  for (const auto& [k, v] : components_) r.accumulate(k, jlie::substitute(v, bindings));
  return r;
}

std::string MultiVectorField::key(const IndexTuple& idx) const {
  std::string s;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) s += ',';
    s += chart_->coordinates()[static_cast<std::size_t>(idx[i])];
  }
  return s;
}

IndexTuple MultiVectorField::parse_key(std::string_view key) const {
  IndexTuple idx;
  if (key.empty()) return idx;
  std::size_t start = 0;
  for (;;) {
    auto comma = key.find(',', start);
    std::string_view name = key.substr(start, comma == std::string_view::npos ? key.npos : comma - start);
    while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
    while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
    idx.push_back(static_cast<int>(chart_->index_of(name)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (!std::is_sorted(idx.begin(), idx.end()) || std::adjacent_find(idx.begin(), idx.end()) != idx.end())
    throw Error("component key '" + std::string(key) + "' is not strictly increasing");
  return idx;
}

// ---------------------------------------------------------------------------

OneForm::OneForm(ChartPtr chart) : chart_(std::move(chart)), components_(chart_->dim()) {}

OneForm::OneForm(ChartPtr chart, std::vector<Expression> components)
    : chart_(std::move(chart)), components_(std::move(components)) {
  if (components_.size() != chart_->dim()) throw Error("one-form component count does not match chart");
}

OneForm OneForm::coordinate(ChartPtr chart, int i) {
  OneForm f(std::move(chart));
  f.components_.at(static_cast<std::size_t>(i)) = Expression::constant(1);
  return f;
}

OneForm differential(const ChartPtr& chart, const Expression& f) {
  std::vector<Expression> c;
  for (const auto& x : chart->coordinates()) c.push_back(diff(f, x));
  return OneForm(chart, std::move(c));
}

// ---------------------------------------------------------------------------

MultiVectorField wedge(const MultiVectorField& p, const MultiVectorField& q) {
  require_same_chart(p.chart(), q.chart());
  int deg = p.degree() + q.degree();
  if (static_cast<std::size_t>(deg) > p.chart()->dim()) throw Error("wedge degree exceeds chart dimension");
  MultiVectorField r(p.chart(), deg);
  for (const auto& [i, a] : p.entries()) {
    for (const auto& [j, b] : q.entries()) {
      IndexTuple idx = i;
      idx.insert(idx.end(), j.begin(), j.end());
      r.accumulate(idx, a * b);
    }
  }
  return r;
}

Expression apply(const MultiVectorField& x, const Expression& f) {
  if (x.degree() != 1) throw Error("apply needs a vector field");
  std::vector<Expression> terms;
  for (const auto& [i, c] : x.entries())
    terms.push_back(c * diff(f, x.chart()->coordinates()[static_cast<std::size_t>(i[0])]));
  return Expression::sum(std::move(terms));
}

MultiVectorField lie_bracket(const MultiVectorField& x, const MultiVectorField& y) {
  require_same_chart(x.chart(), y.chart());
  if (x.degree() != 1 || y.degree() != 1) throw Error("lie_bracket needs vector fields");
  MultiVectorField r(x.chart(), 1);
  for (std::size_t i = 0; i < x.chart()->dim(); ++i) {
    int ii = static_cast<int>(i);
    r.accumulate({ii}, apply(x, y.component({ii})) - apply(y, x.component({ii})));
  }
  return r;
}

namespace {

// ---- recursive route (Koszul signs) ----

struct Monomial {
  Expression coef;
  IndexTuple idx;
  int degree() const { return static_cast<int>(idx.size()); }
};

MultiVectorField to_field(const ChartPtr& chart, const Monomial& m) {
  MultiVectorField r(chart, m.degree());
  r.accumulate(m.idx, m.coef);
  return r;
}

int parity_sign(int n) { return (n % 2 == 0) ? 1 : -1; }

MultiVectorField bracket_monomials(const ChartPtr& chart, const Monomial& a, const Monomial& b) {
  int p = a.degree(), q = b.degree();
  int deg = p + q - 1;
  if (deg < 0) return MultiVectorField(chart, 0);
  if (q >= 2) {
    // b = (g d_{j1}) ^ d_{rest}: graded Leibniz in the second slot
    Monomial y{b.coef, {b.idx[0]}};
    Monomial rest{Expression::constant(1), IndexTuple(b.idx.begin() + 1, b.idx.end())};
    MultiVectorField first = wedge(bracket_monomials(chart, a, y), to_field(chart, rest));
    MultiVectorField second = wedge(to_field(chart, y), bracket_monomials(chart, a, rest));
    if (parity_sign(p - 1) < 0) return first - second;
    return first + second;
  }
  if (p >= 2) {
    // graded antisymmetry moves the high-degree factor into the second slot
    MultiVectorField swapped = bracket_monomials(chart, b, a);
    return parity_sign((p - 1) * (q - 1)) > 0 ? -swapped : swapped;
  }
  if (p == 0 && q == 0) return MultiVectorField(chart, 0);
  const auto& names = chart->coordinates();
  if (p == 1 && q == 0) {
    Expression v = a.coef * diff(b.coef, names[static_cast<std::size_t>(a.idx[0])]);
    return MultiVectorField::scalar(chart, v);
  }
  if (p == 0 && q == 1) {
    Expression v = -(b.coef * diff(a.coef, names[static_cast<std::size_t>(b.idx[0])]));
    return MultiVectorField::scalar(chart, v);
  }
  // two vector monomials f d_i and g d_j
  MultiVectorField r(chart, 1);
  r.accumulate(b.idx, a.coef * diff(b.coef, names[static_cast<std::size_t>(a.idx[0])]));
  r.accumulate(a.idx, -(b.coef * diff(a.coef, names[static_cast<std::size_t>(b.idx[0])])));
  return r;
}

MultiVectorField schouten_recursive(const MultiVectorField& p, const MultiVectorField& q) {
  const ChartPtr& chart = p.chart();
  MultiVectorField r(chart, p.degree() + q.degree() - 1);
  for (const auto& [i, a] : p.entries())
    for (const auto& [j, b] : q.entries()) r = r + bracket_monomials(chart, {a, i}, {b, j});
  return r;
}

// ---- coordinate route (Koszul signs) ----
//
// [P,Q] = sum_i (P <- d/dxi_i) ^ d_{x_i} Q - (-1)^{(p-1)(q-1)} (Q <- d/dxi_i) ^ d_{x_i} P
// with right derivatives in the odd coordinates xi_i = d_{x_i}.

MultiVectorField right_derivative(const MultiVectorField& p, int i) {
  MultiVectorField r(p.chart(), p.degree() - 1);
  for (const auto& [idx, c] : p.entries()) {
    auto it = std::find(idx.begin(), idx.end(), i);
    if (it == idx.end()) continue;
    auto m = static_cast<int>(it - idx.begin());
    IndexTuple rest = idx;
    rest.erase(rest.begin() + m);
    int moves = p.degree() - 1 - m;
    r.accumulate(rest, parity_sign(moves) > 0 ? c : -c);
  }
  return r;
}

MultiVectorField coefficient_derivative(const MultiVectorField& p, const std::string& x) {
  MultiVectorField r(p.chart(), p.degree());
  for (const auto& [idx, c] : p.entries()) r.accumulate(idx, diff(c, x));
  return r;
}

MultiVectorField schouten_coordinate(const MultiVectorField& p, const MultiVectorField& q) {
  const ChartPtr& chart = p.chart();
  int pd = p.degree(), qd = q.degree();
  MultiVectorField r(chart, pd + qd - 1);
  int s = parity_sign((pd - 1) * (qd - 1));
  for (std::size_t i = 0; i < chart->dim(); ++i) {
    const std::string& x = chart->coordinates()[i];
    int ii = static_cast<int>(i);
    if (pd >= 1) r = r + wedge(right_derivative(p, ii), coefficient_derivative(q, x));
    if (qd >= 1) {
      MultiVectorField t = wedge(right_derivative(q, ii), coefficient_derivative(p, x));
      r = s > 0 ? r - t : r + t;
    }
  }
  return r;
}

}  // namespace

MultiVectorField schouten(const MultiVectorField& p, const MultiVectorField& q, SchoutenConvention convention,
                          SchoutenRoute route) {
  require_same_chart(p.chart(), q.chart());
  int deg = p.degree() + q.degree() - 1;
  if (deg < 0) throw Error("Schouten bracket of two functions is undefined");
  if (static_cast<std::size_t>(deg) > p.chart()->dim()) return MultiVectorField(p.chart(), deg);
  MultiVectorField r = route == SchoutenRoute::Recursive ? schouten_recursive(p, q) : schouten_coordinate(p, q);
  if (convention == SchoutenConvention::Lichnerowicz && parity_sign(p.degree() - 1) < 0) return -r;
  return r;
}

MultiVectorField lie_derivative(const MultiVectorField& x, const MultiVectorField& p) {
  if (x.degree() != 1) throw Error("lie_derivative needs a vector field");
  return schouten(x, p);
}

MultiVectorField sharp(const MultiVectorField& lambda, const OneForm& alpha) {
  if (lambda.degree() != 2) throw Error("sharp needs a bivector");
  require_same_chart(lambda.chart(), alpha.chart());
  MultiVectorField r(lambda.chart(), 1);
  for (const auto& [idx, c] : lambda.entries()) {
    // L^{mu nu} alpha_mu d_nu - L^{mu nu} alpha_nu d_mu, mu < nu
    int mu = idx[0], nu = idx[1];
    r.accumulate({nu}, c * alpha[static_cast<std::size_t>(mu)]);
    r.accumulate({mu}, -(c * alpha[static_cast<std::size_t>(nu)]));
  }
  return r;
}

Expression pair2(const MultiVectorField& lambda, const OneForm& alpha, const OneForm& beta) {
  if (lambda.degree() != 2) throw Error("pair2 needs a bivector");
  require_same_chart(lambda.chart(), alpha.chart());
  require_same_chart(lambda.chart(), beta.chart());
  std::vector<Expression> terms;
  for (const auto& [idx, c] : lambda.entries()) {
    auto mu = static_cast<std::size_t>(idx[0]), nu = static_cast<std::size_t>(idx[1]);
    terms.push_back(c * (alpha[mu] * beta[nu] - alpha[nu] * beta[mu]));
  }
  return Expression::sum(std::move(terms));
}

MultiVectorField interior(const OneForm& phi, const MultiVectorField& p) {
  if (p.degree() < 1) throw Error("interior product of a function");
  require_same_chart(p.chart(), phi.chart());
  MultiVectorField r(p.chart(), p.degree() - 1);
  for (const auto& [idx, c] : p.entries()) {
    for (std::size_t m = 0; m < idx.size(); ++m) {
      IndexTuple rest = idx;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(m));
      Expression v = phi[static_cast<std::size_t>(idx[m])] * c;
      r.accumulate(rest, m % 2 == 0 ? v : -v);
    }
  }
  return r;
}

CheckResult is_zero(const MultiVectorField& p, const SamplingBox& box, const ZeroTestOptions& opt) {
  std::vector<Expression> comps;
  for (const auto& [k, v] : p.entries()) comps.push_back(v);
  return is_zero_all(comps, box, opt);
}

std::string describe(const MultiVectorField& p) {
  if (p.entries().empty()) return "0";
  std::string out;
  for (const auto& [k, v] : p.entries()) {
    if (!out.empty()) out += '\n';
    if (p.degree() > 0) out += p.key(k) + ": ";
    out += v.render();
  }
  return out;
}

}  // namespace jlie
