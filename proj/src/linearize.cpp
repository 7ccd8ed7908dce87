#include "moto2d/linearize.hpp"

#include <algorithm>
#include <stdexcept>

#include "moto2d/geometry.hpp"

namespace moto2d {

double trig_eval(TrigFn fn, double angle_deg) {
  return fn == TrigFn::Cos ? cos_deg(angle_deg) : sin_deg(angle_deg);
}

void ModelBuild::add_constraint(LinExpr expr, Relation rel, double rhs, std::string name) {
  model_.constraints.push_back({std::move(expr), rel, rhs, std::move(name)});
}

void ModelBuild::add_one_hot(const std::vector<VarId>& group, const std::string& name) {
  LinExpr sum;
  for (VarId v : group) sum += LinExpr::variable(v);
  add_constraint(std::move(sum), Relation::Equal, 1.0, name);
}

VarId ModelBuild::and_binary(VarId a, VarId b) {
  if (a == b) return a;
  const auto key = std::minmax(a, b);
  if (const auto it = and_cache_.find(key); it != and_cache_.end()) return it->second;
  const std::string na = model_.vars[a].name;
  const std::string nb = model_.vars[b].name;
  const VarId c = add_binary("and(" + na + "," + nb + ")");
  add_constraint(LinExpr::variable(c) - LinExpr::variable(a), Relation::LessEq, 0.0,
                 "and_le_a(" + na + "," + nb + ")");
  add_constraint(LinExpr::variable(c) - LinExpr::variable(b), Relation::LessEq, 0.0,
                 "and_le_b(" + na + "," + nb + ")");
  add_constraint(LinExpr::variable(c) - LinExpr::variable(a) - LinExpr::variable(b),
                 Relation::GreaterEq, -1.0, "and_ge(" + na + "," + nb + ")");
  and_cache_.emplace(key, c);
  return c;
}

LinExpr ModelBuild::trig_of_selected_angle(const std::vector<VarId>& decisions,
                                           const std::vector<double>& angles_deg,
                                           TrigFn fn) const {
  if (decisions.size() != angles_deg.size())
    throw std::invalid_argument("trig_of_selected_angle: size mismatch");
  LinExpr e;
  for (size_t k = 0; k < decisions.size(); ++k)
    e += LinExpr::variable(decisions[k], trig_eval(fn, angles_deg[k]));
  return e;
}

LinExpr ModelBuild::continuous_times_trig(VarId x, const std::vector<VarId>& decisions,
                                          const std::vector<double>& angles_deg, TrigFn fn,
                                          const std::string& name) {
  if (decisions.size() != angles_deg.size())
    throw std::invalid_argument("continuous_times_trig: size mismatch");
  const Interval xr = LinExpr::variable(x).range(model_.vars);
  LinExpr sum;
  for (size_t k = 0; k < decisions.size(); ++k) {
    const double ck = trig_eval(fn, angles_deg[k]);
    const double bound = std::abs(ck) * xr.max_abs();
    const std::string tag = name + "_k" + std::to_string(k);
    const VarId aux = add_continuous(tag, -bound, bound);
    const VarId d = decisions[k];
    const LinExpr diff = LinExpr::variable(aux) - LinExpr::variable(x, ck);
    const double m12 = size_big_m(diff);
    const double m34 = size_big_m(LinExpr::variable(aux));
    add_constraint(diff + LinExpr::variable(d, m12), Relation::LessEq, m12, tag + "_r1");
    add_constraint(diff - LinExpr::variable(d, m12), Relation::GreaterEq, -m12, tag + "_r2");
    add_constraint(LinExpr::variable(aux) - LinExpr::variable(d, m34), Relation::LessEq, 0.0,
                   tag + "_r3");
    add_constraint(LinExpr::variable(aux) + LinExpr::variable(d, m34), Relation::GreaterEq, 0.0,
                   tag + "_r4");
    sum += LinExpr::variable(aux);
  }
  return sum;
}

LinExpr ModelBuild::selector_value(const std::vector<VarId>& decisions,
                                   const std::vector<LinExpr>& values, const std::string& name) {
  if (decisions.size() != values.size())
    throw std::invalid_argument("selector_value: size mismatch");
  LinExpr sum;
  for (size_t k = 0; k < decisions.size(); ++k) {
    const Interval r = values[k].range(model_.vars);
    const std::string tag = name + "_k" + std::to_string(k);
    const VarId aux = add_continuous(tag, std::min(0.0, r.lo), std::max(0.0, r.hi));
    const VarId d = decisions[k];
    const LinExpr diff = LinExpr::variable(aux) - values[k];
    const double m = size_big_m(diff);
    add_constraint(diff + LinExpr::variable(d, m), Relation::LessEq, m, tag + "_r1");
    add_constraint(diff - LinExpr::variable(d, m), Relation::GreaterEq, -m, tag + "_r2");
    add_constraint(LinExpr::variable(aux) - LinExpr::variable(d, std::max(0.0, r.hi)),
                   Relation::LessEq, 0.0, tag + "_r3");
    add_constraint(LinExpr::variable(aux) - LinExpr::variable(d, std::min(0.0, r.lo)),
                   Relation::GreaterEq, 0.0, tag + "_r4");
    sum += LinExpr::variable(aux);
  }
  return sum;
}

ModelBuild::AbsDisjunction ModelBuild::abs_disjunction(const LinExpr& a, const LinExpr& b,
                                                       const std::string& name) {
  const VarId sgn = add_binary(name + "_sgn");
  const VarId suc = add_binary(name + "_suc");
  abs_disjunction_rows(a, b, sgn, suc, LinExpr(), name);
  return {sgn, suc};
}

void ModelBuild::abs_disjunction_rows(const LinExpr& a, const LinExpr& b, VarId delta_sgn,
                                      VarId delta_suc, const LinExpr& extra_slack,
                                      const std::string& name) {
  const double m1 = size_big_m(a - b);
  const double m2 = size_big_m(a + b);
  // a >= b - M(1-sgn) - M(1-suc) - slack
  add_constraint(b - a + LinExpr::variable(delta_sgn, m1) + LinExpr::variable(delta_suc, m1) -
                     extra_slack,
                 Relation::LessEq, 2.0 * m1, name + "_r1");
  // a <= -b + M*sgn + M(1-suc) + slack
  add_constraint(a + b - LinExpr::variable(delta_sgn, m2) + LinExpr::variable(delta_suc, m2) -
                     extra_slack,
                 Relation::LessEq, m2, name + "_r2");
  // a <= b + M*suc + slack
  add_constraint(a - b - LinExpr::variable(delta_suc, m1) - extra_slack, Relation::LessEq, 0.0,
                 name + "_r3");
  // a >= -b - M*suc - slack
  add_constraint(a + b + LinExpr::variable(delta_suc, m2) + extra_slack, Relation::GreaterEq, 0.0,
                 name + "_r4");
}

}  // namespace moto2d
