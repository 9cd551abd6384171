#include "jlie/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "jlie/special.hpp"

namespace jlie {

ParseError::ParseError(std::string message, std::size_t offset)
    : Error(message + " at byte " + std::to_string(offset)), offset_(offset) {}

namespace {
std::string unknown_message(const std::string& name, const std::vector<std::string>& declared) {
  std::string msg = "unknown identifier '" + name + "'; declared names:";
  if (declared.empty()) msg += " (none)";
  for (const auto& d : declared) msg += " " + d;
  return msg;
}
}  // namespace

UnknownIdentifierError::UnknownIdentifierError(std::string name, std::vector<std::string> declared)
    : Error(unknown_message(name, declared)), name_(std::move(name)), declared_(std::move(declared)) {}

UnboundNameError::UnboundNameError(const std::string& name) : Error("unbound name '" + name + "'") {}

// ---------------------------------------------------------------------------
// Number

namespace {

using i128 = __int128;

constexpr i128 kMax = std::numeric_limits<std::int64_t>::max();
constexpr i128 kMin = std::numeric_limits<std::int64_t>::min();

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::optional<Number> make_exact(i128 num, i128 den) {
  if (den == 0) return std::nullopt;
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num > kMax || num < kMin + 1 || den > kMax) return std::nullopt;
  return Number::rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

}  // namespace

Number Number::rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw DomainError("rational constant with zero denominator");
  Number n;
  i128 a = num, b = den;
  if (b < 0) {
    a = -a;
    b = -b;
  }
  i128 g = gcd128(a, b);
  if (g > 1) {
    a /= g;
    b /= g;
  }
  n.exact_ = true;
  n.num_ = static_cast<std::int64_t>(a);
  n.den_ = static_cast<std::int64_t>(b);
  return n;
}

Number Number::real(double v) {
  Number n;
  n.exact_ = false;
  n.real_ = v;
  return n;
}

Number Number::from_double(double v) {
  if (!std::isfinite(v)) return real(v);
  if (v == std::floor(v) && std::fabs(v) < 9.0e15) return integer(static_cast<std::int64_t>(v));
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string_view s(buf, static_cast<std::size_t>(end - buf));
  if (ec != std::errc{} || s.find('e') != std::string_view::npos) return real(v);
  auto dot = s.find('.');
  std::string digits;
  for (char c : s)
    if (c != '.' && c != '-') digits += c;
  std::size_t frac = dot == std::string_view::npos ? 0 : s.size() - dot - 1;
  if (digits.size() > 15 || frac > 15) return real(v);
  std::int64_t num = std::stoll(digits);
  if (v < 0) num = -num;
  std::int64_t den = 1;
  for (std::size_t i = 0; i < frac; ++i) den *= 10;
  return rational(num, den);
}

double Number::value() const {
  return exact_ ? static_cast<double>(num_) / static_cast<double>(den_) : real_;
}

Number Number::operator-() const {
  if (exact_ && num_ != std::numeric_limits<std::int64_t>::min()) return rational(-num_, den_);
  return real(-value());
}

Number operator+(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) {
    auto r = make_exact(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                        static_cast<i128>(a.den_) * b.den_);
    if (r) return *r;
  }
  return Number::real(a.value() + b.value());
}

Number operator*(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) {
    auto r = make_exact(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
    if (r) return *r;
  }
  return Number::real(a.value() * b.value());
}

Number Number::reciprocal() const {
  if (is_zero()) throw DomainError("division by zero constant");
  if (exact_) return rational(den_, num_);
  return real(1.0 / real_);
}

Number Number::pow(std::int64_t e) const {
  if (e < 0) return reciprocal().pow(-e);
  Number result = integer(1);
  Number base = *this;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

bool operator==(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) return a.num_ == b.num_ && a.den_ == b.den_;
  return a.value() == b.value();
}

std::string Number::render() const {
  if (exact_) {
    if (den_ == 1) {
      std::string s = std::to_string(num_);
      return num_ < 0 ? "(" + s + ")" : s;
    }
    return "(" + std::to_string(num_) + "/" + std::to_string(den_) + ")";
  }
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, real_);
  std::string s(buf, end);
  if (s.find_first_of(".e") == std::string::npos && s.find("inf") == std::string::npos &&
      s.find("nan") == std::string::npos)
    s += ".0";
  return "(" + s + ")";
}

// ---------------------------------------------------------------------------
// Nodes

namespace detail {
struct Node {
  NodeKind kind = NodeKind::Constant;
  Number number;
  std::string name;
  Number exponent;
  std::vector<Expression> args;
};
}  // namespace detail

namespace {

std::shared_ptr<const detail::Node> make_node(NodeKind kind, std::vector<Expression> args) {
  auto n = std::make_shared<detail::Node>();
  n->kind = kind;
  n->args = std::move(args);
  return n;
}

const std::shared_ptr<const detail::Node>& zero_node() {
  static const std::shared_ptr<const detail::Node> zero = [] {
    auto n = std::make_shared<detail::Node>();
    n->kind = NodeKind::Constant;
    n->number = Number::integer(0);
    return std::shared_ptr<const detail::Node>(n);
  }();
  return zero;
}

}  // namespace

Expression::Expression() : node_(zero_node()) {}

Expression Expression::constant(Number n) {
  auto node = std::make_shared<detail::Node>();
  node->kind = NodeKind::Constant;
  node->number = n;
  return Expression(std::move(node));
}

Expression Expression::variable(std::string name) {
  auto node = std::make_shared<detail::Node>();
  node->kind = NodeKind::Variable;
  node->name = std::move(name);
  return Expression(std::move(node));
}

Expression Expression::parameter(std::string name) {
  auto node = std::make_shared<detail::Node>();
  node->kind = NodeKind::Parameter;
  node->name = std::move(name);
  return Expression(std::move(node));
}

Expression Expression::sum(std::vector<Expression> terms) {
  std::vector<Expression> flat;
  flat.reserve(terms.size());
  std::optional<std::size_t> const_slot;
  Number acc = Number::integer(0);
  for (auto& t : terms) {
    std::vector<Expression> pieces;
    if (t.kind() == NodeKind::Add) {
      auto ops = t.operands();
      pieces.assign(ops.begin(), ops.end());
    } else {
      pieces.push_back(t);
    }
    for (auto& p : pieces) {
      if (p.is_constant()) {
        if (!const_slot) {
          const_slot = flat.size();
          flat.push_back(p);
        }
        acc = acc + p.number();
      } else {
        flat.push_back(std::move(p));
      }
    }
  }
  if (const_slot) {
    if (acc.is_zero())
      flat.erase(flat.begin() + static_cast<std::ptrdiff_t>(*const_slot));
    else
      flat[*const_slot] = constant(acc);
  }
  if (flat.empty()) return Expression();
  if (flat.size() == 1) return flat.front();
  return Expression(make_node(NodeKind::Add, std::move(flat)));
}

Expression Expression::product(std::vector<Expression> factors) {
  std::vector<Expression> flat;
  flat.reserve(factors.size());
  std::optional<std::size_t> const_slot;
  Number acc = Number::integer(1);
  for (auto& f : factors) {
    std::vector<Expression> pieces;
    if (f.kind() == NodeKind::Mul) {
      auto ops = f.operands();
      pieces.assign(ops.begin(), ops.end());
    } else {
      pieces.push_back(f);
    }
    for (auto& p : pieces) {
      if (p.is_constant()) {
        if (p.number().is_zero()) return Expression();
        if (!const_slot) {
          const_slot = flat.size();
          flat.push_back(p);
        }
        acc = acc * p.number();
      } else {
        flat.push_back(std::move(p));
      }
    }
  }
  if (const_slot) {
    if (acc.is_one())
      flat.erase(flat.begin() + static_cast<std::ptrdiff_t>(*const_slot));
    else
      flat[*const_slot] = constant(acc);
  }
  if (flat.empty()) return constant(Number::integer(1));
  if (flat.size() == 1) return flat.front();
  return Expression(make_node(NodeKind::Mul, std::move(flat)));
}

Expression Expression::power(Expression base, Number exponent) {
  if (exponent.is_zero()) return constant(Number::integer(1));
  if (exponent.is_one()) return base;
  if (base.is_constant()) {
    if (exponent.is_integer()) return constant(base.number().pow(exponent.num()));
    if (base.number().is_one()) return base;
  }
  auto node = std::make_shared<detail::Node>();
  node->kind = NodeKind::Pow;
  node->exponent = exponent;
  node->args = {std::move(base)};
  return Expression(std::move(node));
}

Expression Expression::exp(Expression arg) {
  if (arg.is_zero_constant()) return constant(Number::integer(1));
  return Expression(make_node(NodeKind::Exp, {std::move(arg)}));
}

Expression Expression::ln(Expression arg) {
  if (arg.is_one_constant()) return Expression();
  return Expression(make_node(NodeKind::Ln, {std::move(arg)}));
}

Expression Expression::sinh(Expression arg) {
  if (arg.is_zero_constant()) return Expression();
  return Expression(make_node(NodeKind::Sinh, {std::move(arg)}));
}

Expression Expression::cosh(Expression arg) {
  if (arg.is_zero_constant()) return constant(Number::integer(1));
  return Expression(make_node(NodeKind::Cosh, {std::move(arg)}));
}

Expression Expression::sin(Expression arg) {
  if (arg.is_zero_constant()) return Expression();
  return Expression(make_node(NodeKind::Sin, {std::move(arg)}));
}

Expression Expression::cos(Expression arg) {
  if (arg.is_zero_constant()) return constant(Number::integer(1));
  return Expression(make_node(NodeKind::Cos, {std::move(arg)}));
}

Expression Expression::expint1(Expression arg) {
  return Expression(make_node(NodeKind::ExpInt1, {std::move(arg)}));
}

NodeKind Expression::kind() const { return node_->kind; }
const Number& Expression::number() const { return node_->number; }
const std::string& Expression::name() const { return node_->name; }
const Number& Expression::exponent() const { return node_->exponent; }
std::span<const Expression> Expression::operands() const { return node_->args; }

bool Expression::is_zero_constant() const { return is_constant() && number().is_zero(); }
bool Expression::is_one_constant() const { return is_constant() && number().is_one(); }

std::size_t Expression::size() const {
  std::size_t n = 1;
  for (const auto& a : operands()) n += a.size();
  return n;
}

bool operator==(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case NodeKind::Constant:
      return a.number() == b.number();
    case NodeKind::Variable:
    case NodeKind::Parameter:
      return a.name() == b.name();
    case NodeKind::Pow:
      if (!(a.exponent() == b.exponent())) return false;
      break;
    default:
      break;
  }
  auto x = a.operands(), y = b.operands();
  return std::equal(x.begin(), x.end(), y.begin(), y.end());
}

Expression operator+(const Expression& a, const Expression& b) { return Expression::sum({a, b}); }
Expression operator-(const Expression& a) { return Expression::product({Expression::constant(-1), a}); }
Expression operator-(const Expression& a, const Expression& b) { return Expression::sum({a, -b}); }
Expression operator*(const Expression& a, const Expression& b) { return Expression::product({a, b}); }
Expression operator/(const Expression& a, const Expression& b) {
  if (b.is_constant()) return Expression::product({a, Expression::constant(b.number().reciprocal())});
  return Expression::product({a, Expression::power(b, Number::integer(-1))});
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

const char* function_name(NodeKind k) {
  switch (k) {
    case NodeKind::Exp: return "exp";
    case NodeKind::Ln: return "ln";
    case NodeKind::Sinh: return "sinh";
    case NodeKind::Cosh: return "cosh";
    case NodeKind::Sin: return "sin";
    case NodeKind::Cos: return "cos";
    case NodeKind::ExpInt1: return "Ei1";
    default: return nullptr;
  }
}

void render_into(const Expression& e, std::string& out) {
  switch (e.kind()) {
    case NodeKind::Constant:
      out += e.number().render();
      return;
    case NodeKind::Variable:
    case NodeKind::Parameter:
      out += e.name();
      return;
    case NodeKind::Add:
    case NodeKind::Mul: {
      const char* sep = e.kind() == NodeKind::Add ? " + " : " * ";
      out += '(';
      bool first = true;
      for (const auto& a : e.operands()) {
        if (!first) out += sep;
        first = false;
        render_into(a, out);
      }
      out += ')';
      return;
    }
    case NodeKind::Pow:
      out += '(';
      render_into(e.operands()[0], out);
      out += '^';
      out += e.exponent().render();
      out += ')';
      return;
    default:
      out += function_name(e.kind());
      out += '(';
      render_into(e.operands()[0], out);
      out += ')';
      return;
  }
}

}  // namespace

std::string Expression::render() const {
  std::string out;
  render_into(*this, out);
  return out;
}

// ---------------------------------------------------------------------------
// Symbol table

bool SymbolTable::is_coordinate(std::string_view name) const {
  return std::find(coordinates.begin(), coordinates.end(), name) != coordinates.end();
}

bool SymbolTable::is_parameter(std::string_view name) const {
  return std::find(parameters.begin(), parameters.end(), name) != parameters.end();
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

using Memo = std::unordered_map<const void*, Expression>;

Expression diff_rec(const Expression& e, std::string_view v, Memo& memo);

Expression diff_uncached(const Expression& e, std::string_view v, Memo& memo) {
  switch (e.kind()) {
    case NodeKind::Constant:
    case NodeKind::Parameter:
      return Expression();
    case NodeKind::Variable:
      return e.name() == v ? Expression::constant(1) : Expression();
    case NodeKind::Add: {
      std::vector<Expression> terms;
      for (const auto& t : e.operands()) terms.push_back(diff_rec(t, v, memo));
      return Expression::sum(std::move(terms));
    }
    case NodeKind::Mul: {
      auto factors = e.operands();
      std::vector<Expression> terms;
      for (std::size_t i = 0; i < factors.size(); ++i) {
        Expression d = diff_rec(factors[i], v, memo);
        if (d.is_zero_constant()) continue;
        std::vector<Expression> prod(factors.begin(), factors.end());
        prod[i] = d;
        terms.push_back(Expression::product(std::move(prod)));
      }
      return Expression::sum(std::move(terms));
    }
    case NodeKind::Pow: {
      const Expression& base = e.operands()[0];
      Expression db = diff_rec(base, v, memo);
      if (db.is_zero_constant()) return Expression();
      const Number& q = e.exponent();
      return Expression::product({Expression::constant(q),
                                  Expression::power(base, q + Number::integer(-1)), db});
    }
    default:
      break;
  }
  const Expression& u = e.operands()[0];
  Expression du = diff_rec(u, v, memo);
  if (du.is_zero_constant()) return Expression();
  switch (e.kind()) {
    case NodeKind::Exp:
      return e * du;
    case NodeKind::Ln:
      return du / u;
    case NodeKind::Sinh:
      return Expression::cosh(u) * du;
    case NodeKind::Cosh:
      return Expression::sinh(u) * du;
    case NodeKind::Sin:
      return Expression::cos(u) * du;
    case NodeKind::Cos:
      return -(Expression::sin(u) * du);
    case NodeKind::ExpInt1:
      // d/du E1(u) = -exp(-u)/u, same on the principal-value branch
      return -(Expression::exp(-u) * du / u);
    default:
      return Expression();
  }
}

}  // namespace

Expression diff(const Expression& e, std::string_view v) {
  Memo memo;
  return diff_rec(e, v, memo);
}

namespace {
Expression diff_rec(const Expression& e, std::string_view v, Memo& memo) {
  if (e.operands().empty()) return diff_uncached(e, v, memo);
  const void* key = e.identity();
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  Expression d = diff_uncached(e, v, memo);
  memo.emplace(key, d);
  return d;
}
}  // namespace

// ---------------------------------------------------------------------------
// Compiled evaluation

CompiledExpressions::CompiledExpressions(const std::vector<Expression>& roots, std::vector<std::string> slots)
    : slots_(std::move(slots)) {
  std::unordered_map<const detail::Node*, std::uint32_t> index;
  // Iterative post-order so deep trees do not exhaust the stack.
  auto compile = [&](const Expression& root) -> std::uint32_t {
    std::vector<std::pair<const Expression*, bool>> stack{{&root, false}};
    while (!stack.empty()) {
      auto [e, expanded] = stack.back();
      const detail::Node* key = e->node_.get();
      if (index.count(key)) {
        stack.pop_back();
        continue;
      }
      if (!expanded) {
        stack.back().second = true;
        for (const auto& a : e->operands()) stack.emplace_back(&a, false);
        continue;
      }
      stack.pop_back();
      Op op{e->kind(), 0.0, false, static_cast<std::uint32_t>(args_.size()), 0};
      switch (e->kind()) {
        case NodeKind::Constant:
          op.value = e->number().value();
          break;
        case NodeKind::Variable:
        case NodeKind::Parameter: {
          auto it = std::find(slots_.begin(), slots_.end(), e->name());
          if (it == slots_.end()) throw UnboundNameError(e->name());
          op.first = static_cast<std::uint32_t>(it - slots_.begin());
          break;
        }
        case NodeKind::Pow:
          op.value = e->exponent().value();
          op.integer_power = e->exponent().is_integer();
          break;
        default:
          break;
      }
      if (e->kind() != NodeKind::Variable && e->kind() != NodeKind::Parameter) {
        for (const auto& a : e->operands()) args_.push_back(index.at(a.node_.get()));
        op.count = static_cast<std::uint32_t>(e->operands().size());
      }
      index.emplace(key, static_cast<std::uint32_t>(ops_.size()));
      ops_.push_back(op);
    }
    return index.at(root.node_.get());
  };
  for (const auto& r : roots) {
    outputs_.push_back(compile(r));
  }
}

namespace {
double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite value in ") + what);
  return v;
}
}  // namespace

void CompiledExpressions::run(std::span<const double> inputs, std::vector<double>& regs) const {
  if (inputs.size() != slots_.size()) throw Error("input count does not match compiled slots");
  regs.resize(ops_.size());
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const Op& op = ops_[i];
    const std::uint32_t* a = args_.data() + op.first;
    double r = 0.0;
    switch (op.kind) {
      case NodeKind::Constant:
        r = op.value;
        break;
      case NodeKind::Variable:
      case NodeKind::Parameter:
        r = inputs[op.first];
        break;
      case NodeKind::Add:
        for (std::uint32_t k = 0; k < op.count; ++k) r += regs[a[k]];
        break;
      case NodeKind::Mul:
        r = 1.0;
        for (std::uint32_t k = 0; k < op.count; ++k) r *= regs[a[k]];
        break;
      case NodeKind::Pow: {
        double b = regs[a[0]];
        if (b == 0.0 && op.value < 0) throw DomainError("division by zero");
        if (!op.integer_power && b < 0.0) throw DomainError("fractional power of a negative value");
        if (op.integer_power && op.value == -1.0)
          r = 1.0 / b;
        else if (op.integer_power && op.value == 2.0)
          r = b * b;
        else
          r = std::pow(b, op.value);
        r = checked(r, "power");
        break;
      }
      case NodeKind::Exp:
        r = checked(std::exp(regs[a[0]]), "exp");
        break;
      case NodeKind::Ln: {
        double u = regs[a[0]];
        if (!(u > 0.0)) throw DomainError("ln of a nonpositive value");
        r = std::log(u);
        break;
      }
      case NodeKind::Sinh:
        r = checked(std::sinh(regs[a[0]]), "sinh");
        break;
      case NodeKind::Cosh:
        r = checked(std::cosh(regs[a[0]]), "cosh");
        break;
      case NodeKind::Sin:
        r = std::sin(regs[a[0]]);
        break;
      case NodeKind::Cos:
        r = std::cos(regs[a[0]]);
        break;
      case NodeKind::ExpInt1: {
        double u = regs[a[0]];
        if (u == 0.0) throw DomainError("Ei1 at zero");
        r = checked(expint1(u), "Ei1");
        break;
      }
    }
    if (std::isnan(r)) throw DomainError("undefined value");
    regs[i] = r;
  }
}

void CompiledExpressions::eval(std::span<const double> inputs, std::span<double> out) const {
  std::vector<double> regs;
  run(inputs, regs);
  for (std::size_t i = 0; i < outputs_.size(); ++i) {
    out[i] = regs[outputs_[i]];
    if (!std::isfinite(out[i])) throw DomainError("non-finite result");
  }
}

void CompiledExpressions::eval_scaled(std::span<const double> inputs, std::span<double> out,
                                      std::span<double> scale) const {
  std::vector<double> regs;
  run(inputs, regs);
  // mag[i] is the size of register i before any cancellation: sums add the
  // magnitudes of their terms, products multiply them, functions keep |value|.
  std::vector<double> mag(ops_.size());
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const Op& op = ops_[i];
    const std::uint32_t* a = args_.data() + op.first;
    double r = std::fabs(regs[i]);
    double m = r;
    switch (op.kind) {
      case NodeKind::Add:
        m = 0.0;
        for (std::uint32_t k = 0; k < op.count; ++k) m += mag[a[k]];
        break;
      case NodeKind::Mul:
        m = 1.0;
        for (std::uint32_t k = 0; k < op.count; ++k) m *= mag[a[k]];
        break;
      default:
        break;
    }
    mag[i] = std::isfinite(m) ? m : std::numeric_limits<double>::max();
  }
  for (std::size_t i = 0; i < outputs_.size(); ++i) {
    out[i] = regs[outputs_[i]];
    if (!std::isfinite(out[i])) throw DomainError("non-finite result");
    scale[i] = mag[outputs_[i]];
  }
}

std::optional<double> Point::get(std::string_view name) const {
  auto it = values_.find(name);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double eval(const Expression& e, const Point& p) {
  std::vector<std::string> slots;
  std::vector<double> inputs;
  for (const auto& n : free_names(e)) {
    auto v = p.get(n);
    if (!v) throw UnboundNameError(n);
    slots.push_back(n);
    inputs.push_back(*v);
  }
  CompiledExpressions prog({e}, std::move(slots));
  double out = 0.0;
  prog.eval(inputs, std::span<double>(&out, 1));
  return out;
}

// ---------------------------------------------------------------------------
// Substitution and inspection

namespace {
Expression substitute_rec(const Expression& e, const std::map<std::string, Expression, std::less<>>& bindings,
                          Memo& memo);
}

Expression substitute(const Expression& e, const std::map<std::string, Expression, std::less<>>& bindings) {
  Memo memo;
  return substitute_rec(e, bindings, memo);
}

namespace {
Expression substitute_rec(const Expression& e, const std::map<std::string, Expression, std::less<>>& bindings,
                          Memo& memo) {
  switch (e.kind()) {
    case NodeKind::Constant:
      return e;
    case NodeKind::Variable:
    case NodeKind::Parameter: {
      auto it = bindings.find(e.name());
      return it == bindings.end() ? e : it->second;
    }
    default:
      break;
  }
  const void* key = e.identity();
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::vector<Expression> args;
  for (const auto& a : e.operands()) args.push_back(substitute_rec(a, bindings, memo));
  Expression r;
  switch (e.kind()) {
    case NodeKind::Add: r = Expression::sum(std::move(args)); break;
    case NodeKind::Mul: r = Expression::product(std::move(args)); break;
    case NodeKind::Pow: r = Expression::power(args[0], e.exponent()); break;
    case NodeKind::Exp: r = Expression::exp(args[0]); break;
    case NodeKind::Ln: r = Expression::ln(args[0]); break;
    case NodeKind::Sinh: r = Expression::sinh(args[0]); break;
    case NodeKind::Cosh: r = Expression::cosh(args[0]); break;
    case NodeKind::Sin: r = Expression::sin(args[0]); break;
    case NodeKind::Cos: r = Expression::cos(args[0]); break;
    case NodeKind::ExpInt1: r = Expression::expint1(args[0]); break;
    default: r = e; break;
  }
  memo.emplace(key, r);
  return r;
}
}  // namespace


namespace {
void collect_names(const Expression& e, std::set<std::string>& out) {
  if (e.kind() == NodeKind::Variable || e.kind() == NodeKind::Parameter) out.insert(e.name());
  for (const auto& a : e.operands()) collect_names(a, out);
}

void collect_denominators(const Expression& e, const SymbolTable& symbols, std::vector<Expression>& out) {
  if (e.kind() == NodeKind::Pow && e.exponent().negative()) {
    const Expression& base = e.operands()[0];
    std::set<std::string> names;
    collect_names(base, names);
    bool has_coordinate = std::any_of(names.begin(), names.end(),
                                      [&](const std::string& n) { return symbols.is_coordinate(n); });
    if (!has_coordinate && std::find(out.begin(), out.end(), base) == out.end()) out.push_back(base);
  }
  for (const auto& a : e.operands()) collect_denominators(a, symbols, out);
}
}  // namespace

std::set<std::string> free_names(const Expression& e) {
  std::set<std::string> out;
  collect_names(e, out);
  return out;
}

std::vector<Expression> parameter_denominators(const Expression& e, const SymbolTable& symbols) {
  std::vector<Expression> out;
  collect_denominators(e, symbols, out);
  return out;
}

}  // namespace jlie
