#include "moto2d/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace moto2d {

VarId VariableTable::add_continuous(std::string name, double lb, double ub) {
  if (!(lb <= ub)) throw std::invalid_argument("variable '" + name + "': lb > ub");
  vars_.push_back({std::move(name), VarKind::Continuous, lb, ub});
  return static_cast<VarId>(vars_.size() - 1);
}

VarId VariableTable::add_binary(std::string name, int branch_priority) {
  vars_.push_back({std::move(name), VarKind::Binary, 0.0, 1.0, branch_priority});
  return static_cast<VarId>(vars_.size() - 1);
}

LinExpr LinExpr::variable(VarId id, double coef) {
  LinExpr e;
  e.terms_.push_back({id, coef});
  return e;
}

LinExpr& LinExpr::add_term(VarId var, double coef) {
  terms_.push_back({var, coef});
  canonicalize();
  return *this;
}

void LinExpr::canonicalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const LinTerm& a, const LinTerm& b) { return a.var < b.var; });
  size_t out = 0;
  for (size_t i = 0; i < terms_.size();) {
    VarId v = terms_[i].var;
    double c = 0.0;
    while (i < terms_.size() && terms_[i].var == v) c += terms_[i++].coef;
    if (c != 0.0) terms_[out++] = {v, c};
  }
  terms_.resize(out);
}

LinExpr& LinExpr::operator+=(const LinExpr& other) {
  constant_ += other.constant_;
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  canonicalize();
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other) {
  constant_ -= other.constant_;
  for (const LinTerm& t : other.terms_) terms_.push_back({t.var, -t.coef});
  canonicalize();
  return *this;
}

LinExpr& LinExpr::operator*=(double s) {
  constant_ *= s;
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (LinTerm& t : terms_) t.coef *= s;
  return *this;
}

double LinExpr::value(std::span<const double> x) const {
  double v = constant_;
  for (const LinTerm& t : terms_) v += t.coef * x[static_cast<size_t>(t.var)];
  return v;
}

Interval LinExpr::range(const VariableTable& vars) const {
  Interval r{constant_, constant_};
  for (const LinTerm& t : terms_) {
    const VarInfo& info = vars[t.var];
    const double a = t.coef * info.lb;
    const double b = t.coef * info.ub;
    r.lo += std::min(a, b);
    r.hi += std::max(a, b);
  }
  return r;
}

double LinConstraint::violation(std::span<const double> x) const {
  const double v = expr.value(x);
  switch (rel) {
    case Relation::LessEq: return v - rhs;
    case Relation::GreaterEq: return rhs - v;
    case Relation::Equal: return std::abs(v - rhs);
  }
  return 0.0;
}

double QuadObjective::value(std::span<const double> x) const {
  double v = linear.value(x);
  for (const QuadTerm& q : quad)
    v += q.coef * x[static_cast<size_t>(q.a)] * x[static_cast<size_t>(q.b)];
  return v;
}

const char* to_string(ElemType t) {
  switch (t) {
    case ElemType::MM: return "MM";
    case ElemType::HM: return "HM";
    case ElemType::INV: return "INV";
    case ElemType::BP: return "BP";
    case ElemType::GT: return "GT";
    case ElemType::WL: return "WL";
  }
  return "?";
}

const char* to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::Rect: return "rect";
    case ShapeKind::Circle: return "circle";
    case ShapeKind::Subsystem: return "subsystem";
  }
  return "?";
}

double MiqpModel::objective_value(std::span<const double> x) const {
  return objective.value(x) + objective_constant;
}

int MiqpModel::num_binaries() const {
  int n = 0;
  for (VarId i = 0; i < vars.size(); ++i)
    if (vars[i].kind == VarKind::Binary) ++n;
  return n;
}

void MiqpModel::add_squared_objective(const LinExpr& expr, double weight) {
  if (weight == 0.0) return;
  const auto& terms = expr.terms();
  const double c = expr.constant();
  for (size_t i = 0; i < terms.size(); ++i) {
    for (size_t j = i; j < terms.size(); ++j) {
      const double coef = (i == j) ? weight * terms[i].coef * terms[j].coef
                                   : 2.0 * weight * terms[i].coef * terms[j].coef;
      const VarId a = std::min(terms[i].var, terms[j].var);
      const VarId b = std::max(terms[i].var, terms[j].var);
      objective.quad.push_back({a, b, coef});
    }
    if (c != 0.0)
      objective.linear.add_term(terms[i].var, 2.0 * weight * c * terms[i].coef);
  }
  objective_constant += weight * c * c;
}

std::optional<ConstraintViolation> MiqpModel::check_point(
    std::span<const double> x, double tol) const {
  for (VarId i = 0; i < vars.size(); ++i) {
    const VarInfo& v = vars[i];
    const double xi = x[static_cast<size_t>(i)];
    if (xi < v.lb - tol || xi > v.ub + tol)
      return ConstraintViolation{"bound:" + v.name,
                                 std::max(v.lb - xi, xi - v.ub)};
    if (v.kind == VarKind::Binary &&
        std::abs(xi - std::round(xi)) > tol)
      return ConstraintViolation{"integrality:" + v.name,
                                 std::abs(xi - std::round(xi))};
  }
  for (const LinConstraint& c : constraints) {
    const double viol = c.violation(x);
    if (viol > tol) return ConstraintViolation{c.name, viol};
  }
  return std::nullopt;
}

}  // namespace moto2d
