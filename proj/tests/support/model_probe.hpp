#pragma once

// Helpers for probing emitted constraint blocks: partial substitution and
// whole-box satisfaction checks via interval arithmetic.

#include <map>

#include "moto2d/model.hpp"

namespace moto2d::probe {

inline LinExpr partial_eval(const LinExpr& e, const std::map<VarId, double>& fixed) {
  LinExpr out(e.constant());
  for (const LinTerm& t : e.terms()) {
    if (const auto it = fixed.find(t.var); it != fixed.end())
      out += t.coef * it->second;
    else
      out.add_term(t.var, t.coef);
  }
  return out;
}

// True when the constraint is satisfied at every point of the variable box
// after substituting the fixed values.
inline bool holds_over_box(const LinConstraint& c, const VariableTable& vars,
                           const std::map<VarId, double>& fixed, double tol = 1e-9) {
  const Interval r = partial_eval(c.expr, fixed).range(vars);
  switch (c.rel) {
    case Relation::LessEq:
      return r.hi <= c.rhs + tol;
    case Relation::GreaterEq:
      return r.lo >= c.rhs - tol;
    case Relation::Equal:
      return r.hi <= c.rhs + tol && r.lo >= c.rhs - tol;
  }
  return false;
}

}  // namespace moto2d::probe
