#include "jlie/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace jlie {

namespace {
void upsert(std::vector<std::pair<std::string, Interval>>& v, const std::string& name, Interval iv) {
  for (auto& [n, i] : v) {
    if (n == name) {
      i = iv;
      return;
    }
  }
  v.emplace_back(name, iv);
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

constexpr std::size_t kMaxRejections = 10000;
}  // namespace

void SamplingBox::set_coordinate(const std::string& name, Interval iv) { upsert(coordinates_, name, iv); }
void SamplingBox::set_parameter(const std::string& name, Interval iv) { upsert(parameters_, name, iv); }
void SamplingBox::add_exclusion(Expression e, double clearance) {
  exclusions_.push_back({std::move(e), clearance});
}

std::vector<std::string> SamplingBox::slot_names() const {
  std::vector<std::string> names;
  for (const auto& [n, iv] : coordinates_) names.push_back(n);
  for (const auto& [n, iv] : parameters_) names.push_back(n);
  return names;
}

Point SamplingBox::to_point(const std::vector<double>& slots) const {
  Point p;
  auto names = slot_names();
  for (std::size_t i = 0; i < names.size() && i < slots.size(); ++i) p.set(names[i], slots[i]);
  return p;
}

std::vector<std::vector<double>> SamplingBox::sample(std::size_t n, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  auto names = slot_names();
  std::vector<Expression> excl;
  for (const auto& e : exclusions_) excl.push_back(e.expr);
  CompiledExpressions guard(excl, names);
  std::vector<double> gv(excl.size());

  std::vector<std::vector<double>> points;
  points.reserve(n);
  std::size_t rejected = 0;
  while (points.size() < n) {
    std::vector<double> p;
    p.reserve(names.size());
    for (const auto& [name, iv] : coordinates_) p.push_back(iv.lo + (iv.hi - iv.lo) * unit(rng));
    for (const auto& [name, iv] : parameters_) p.push_back(iv.lo + (iv.hi - iv.lo) * unit(rng));
    bool ok = true;
    if (!excl.empty()) {
      try {
        guard.eval(p, gv);
        for (std::size_t i = 0; i < gv.size() && ok; ++i)
          ok = std::fabs(gv[i]) >= exclusions_[i].clearance;
      } catch (const DomainError&) {
        ok = false;
      }
    }
    if (ok) {
      points.push_back(std::move(p));
    } else if (++rejected > kMaxRejections) {
      throw DomainError("sampling box exclusions reject almost every point");
    }
  }
  return points;
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Zero: return "pass";
    case Outcome::NonZero: return "fail";
    case Outcome::BadBox: return "bad_box";
  }
  return "?";
}

CheckResult is_zero_all(const std::vector<Expression>& exprs, const SamplingBox& box, const ZeroTestOptions& opt) {
  CheckResult r;
  if (exprs.empty()) return r;
  if (opt.samples == 0) throw Error("zero test needs at least one sample");
  std::vector<std::vector<double>> points;
  try {
    points = box.sample(opt.samples, opt.seed);
  } catch (const DomainError& e) {
    r.outcome = Outcome::BadBox;
    r.note = e.what();
    return r;
  }
  std::unique_ptr<CompiledExpressions> prog;
  try {
    prog = std::make_unique<CompiledExpressions>(exprs, box.slot_names());
  } catch (const UnboundNameError& e) {
    r.outcome = Outcome::BadBox;
    r.note = e.what();
    return r;
  }
  std::vector<double> val(exprs.size()), scale(exprs.size());
  for (const auto& p : points) {
    try {
      prog->eval_scaled(p, val, scale);
    } catch (const DomainError& e) {
      r.outcome = Outcome::BadBox;
      r.witness = box.to_point(p);
      r.note = e.what();
      return r;
    }
    for (std::size_t i = 0; i < val.size(); ++i) {
      double a = std::fabs(val[i]);
      r.max_residual = std::max(r.max_residual, a);
      if (a > opt.tol * (1.0 + scale[i]) && r.outcome == Outcome::Zero) {
        r.outcome = Outcome::NonZero;
        r.witness = box.to_point(p);
        r.failing_index = i;
      }
    }
  }
  return r;
}

CheckResult is_zero(const Expression& e, const SamplingBox& box, const ZeroTestOptions& opt) {
  return is_zero_all({e}, box, opt);
}

void merge_into(CheckResult& a, const CheckResult& b, std::size_t index_offset) {
  a.max_residual = std::max(a.max_residual, b.max_residual);
  auto rank = [](Outcome o) { return o == Outcome::Zero ? 0 : o == Outcome::NonZero ? 1 : 2; };
  if (rank(b.outcome) > rank(a.outcome)) {
    a.outcome = b.outcome;
    a.witness = b.witness;
    a.failing_index = b.failing_index + index_offset;
    a.note = b.note;
  }
}

}  // namespace jlie
