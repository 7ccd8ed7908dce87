#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "moto2d/model.hpp"

namespace moto2d {

enum class TrigFn { Cos, Sin };

double trig_eval(TrigFn fn, double angle_deg);

// Incremental model assembly with the mixed-integer linearization gadgets.
// All transforms are purely additive: they never touch constraints that were
// emitted earlier.
class ModelBuild {
 public:
  explicit ModelBuild(MiqpModel& model) : model_(model) {}

  MiqpModel& model() { return model_; }
  VariableTable& vars() { return model_.vars; }

  VarId add_binary(std::string name, int branch_priority = 0) {
    return model_.vars.add_binary(std::move(name), branch_priority);
  }
  VarId add_continuous(std::string name, double lb, double ub) {
    return model_.vars.add_continuous(std::move(name), lb, ub);
  }
  void add_constraint(LinExpr expr, Relation rel, double rhs, std::string name);

  // Sum of the group forced to exactly one.
  void add_one_hot(const std::vector<VarId>& group, const std::string& name);

  // Tightest slack constant that deactivates a constraint on expr over the
  // declared variable box, with a 10% margin.
  double size_big_m(const LinExpr& expr) const { return 1.1 * expr.range(model_.vars).max_abs(); }

  // c = a AND b. Cached per unordered pair; emits c<=a, c<=b, c>=a+b-1 once.
  VarId and_binary(VarId a, VarId b);

  // Sum_k delta_k * fn(theta_k); equals fn(theta) under one-hot selection.
  LinExpr trig_of_selected_angle(const std::vector<VarId>& decisions,
                                 const std::vector<double>& angles_deg, TrigFn fn) const;

  // x * fn(theta) for the selected angle: one auxiliary per angle with the
  // four-row big-M block, returns the sum of auxiliaries.
  LinExpr continuous_times_trig(VarId x, const std::vector<VarId>& decisions,
                                const std::vector<double>& angles_deg, TrigFn fn,
                                const std::string& name);

  // Generalization of the same gadget: value of the expression selected by a
  // one-hot group. values[k] is gated by decisions[k].
  LinExpr selector_value(const std::vector<VarId>& decisions,
                         const std::vector<LinExpr>& values, const std::string& name);

  struct AbsDisjunction {
    VarId delta_sgn;
    VarId delta_suc;
  };

  // |a| >= b certified by delta_suc = 1 (b must be nonnegative wherever it is
  // used). Emits the printed four-row block; delta_suc = 0 pins |a| <= b.
  AbsDisjunction abs_disjunction(const LinExpr& a, const LinExpr& b, const std::string& name);

  // Same four rows with caller-owned indicator binaries and an extra slack
  // expression added to every row's relaxed side. The slack must be zero when
  // the block is meant to hold and large enough to free it otherwise.
  void abs_disjunction_rows(const LinExpr& a, const LinExpr& b, VarId delta_sgn, VarId delta_suc,
                            const LinExpr& extra_slack, const std::string& name);

 private:
  MiqpModel& model_;
  std::map<std::pair<VarId, VarId>, VarId> and_cache_;
};

}  // namespace moto2d
