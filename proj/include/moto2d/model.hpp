#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace moto2d {

using VarId = std::int32_t;
inline constexpr VarId kInvalidVar = -1;

enum class VarKind { Continuous, Binary };

struct VarInfo {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lb = 0.0;
  double ub = 0.0;
  // Branch-and-bound hint: higher values branch first. Structural choices
  // (arrangements, angles) move the relaxation; separation certificates do
  // not, so they default low.
  int branch_priority = 0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double max_abs() const { return std::max(std::abs(lo), std::abs(hi)); }
};

class VariableTable {
 public:
  VarId add_continuous(std::string name, double lb, double ub);
  VarId add_binary(std::string name, int branch_priority = 0);

  const VarInfo& operator[](VarId id) const { return vars_[static_cast<size_t>(id)]; }
  // Mutable access, e.g. to pin a variable by collapsing its bounds.
  VarInfo& info(VarId id) { return vars_[static_cast<size_t>(id)]; }
  VarId size() const { return static_cast<VarId>(vars_.size()); }
  bool empty() const { return vars_.empty(); }

 private:
  std::vector<VarInfo> vars_;
};

struct LinTerm {
  VarId var;
  double coef;
};

// Linear expression: constant + sum of coef*var, terms kept sorted and unique.
class LinExpr {
 public:
  LinExpr() = default;
  explicit LinExpr(double constant) : constant_(constant) {}
  static LinExpr variable(VarId id, double coef = 1.0);

  double constant() const { return constant_; }
  const std::vector<LinTerm>& terms() const { return terms_; }

  LinExpr& operator+=(const LinExpr& other);
  LinExpr& operator-=(const LinExpr& other);
  LinExpr& operator+=(double c) { constant_ += c; return *this; }
  LinExpr& operator-=(double c) { constant_ -= c; return *this; }
  LinExpr& operator*=(double s);
  LinExpr& add_term(VarId var, double coef);

  friend LinExpr operator+(LinExpr a, const LinExpr& b) { a += b; return a; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { a -= b; return a; }
  friend LinExpr operator+(LinExpr a, double c) { a += c; return a; }
  friend LinExpr operator+(double c, LinExpr a) { a += c; return a; }
  friend LinExpr operator-(LinExpr a, double c) { a -= c; return a; }
  friend LinExpr operator-(double c, LinExpr a) { a *= -1.0; a += c; return a; }
  friend LinExpr operator*(LinExpr a, double s) { a *= s; return a; }
  friend LinExpr operator*(double s, LinExpr a) { a *= s; return a; }
  friend LinExpr operator-(LinExpr a) { a *= -1.0; return a; }

  double value(std::span<const double> x) const;
  // Range of the expression over the declared variable box.
  Interval range(const VariableTable& vars) const;

 private:
  void canonicalize();
  double constant_ = 0.0;
  std::vector<LinTerm> terms_;
};

enum class Relation { LessEq, GreaterEq, Equal };

struct LinConstraint {
  LinExpr expr;
  Relation rel = Relation::LessEq;
  double rhs = 0.0;
  std::string name;

  // Signed violation at a point: positive means the constraint is broken.
  double violation(std::span<const double> x) const;
};

// coef * x_a * x_b with a <= b.
struct QuadTerm {
  VarId a;
  VarId b;
  double coef;
};

struct QuadObjective {
  std::vector<QuadTerm> quad;
  LinExpr linear;

  double value(std::span<const double> x) const;
};

struct ConstraintViolation {
  std::string constraint;
  double magnitude = 0.0;
};

enum class ElemType { MM, HM, INV, BP, GT, WL };
enum class ShapeKind { Rect, Circle, Subsystem };

const char* to_string(ElemType t);
const char* to_string(ShapeKind k);

struct Arrangement {
  int n_w = 1;
  int n_h = 1;
  int n_b = 1;
  double w = 0.0;
  double h = 0.0;
  double mass = 0.0;
};

// Mapping from model variables back to the physical layout objects.
struct ElementMeta {
  std::string name;
  ElemType type = ElemType::INV;
  ShapeKind shape = ShapeKind::Rect;
  double w = 0.0, h = 0.0, r = 0.0;
  double mass = 0.0;
  bool fixed = false;
  double fx = 0.0, fy = 0.0;
  VarId x = kInvalidVar, y = kInvalidVar;
  std::vector<VarId> angle_sel;    // rect angle or circle projected-angle one-hot
  std::vector<double> angles_deg;
};

struct ClusterMeta {
  std::string subsystem;
  int index = 0;  // 1-based within the subsystem
  VarId x = kInvalidVar, y = kInvalidVar;
  std::vector<VarId> angle_sel;
  std::vector<double> angles_deg;
  std::vector<VarId> arr_sel;
  std::vector<Arrangement> arrangements;
};

struct SubsystemMeta {
  std::string name;
  int n_sub = 0;
  double sub_w = 0.0, sub_h = 0.0, sub_mass = 0.0;
  double total_mass = 0.0;
  std::vector<int> cluster_ids;  // indices into ModelMeta::clusters
};

struct ModelMeta {
  std::vector<ElementMeta> elements;
  std::vector<SubsystemMeta> subsystems;
  std::vector<ClusterMeta> clusters;
  VarId x_cog = kInvalidVar, y_cog = kInvalidVar;
  double total_mass = 0.0;
  double chassis_mass = 0.0, chassis_x = 0.0, chassis_y = 0.0;
  double rider_mass = 0.0, rider_x = 0.0, rider_y = 0.0;
  double l_n = 1.0, l_n_mm = 1.0;
  int n_mm = 0;
  double ideal_x = 0.0, ideal_y = 0.0;
  double rear_wx = 0.0, rear_wy = 0.0;
  double epsilon_contiguity = 1e-3;
};

struct MiqpModel {
  VariableTable vars;
  std::vector<LinConstraint> constraints;
  QuadObjective objective;
  double objective_constant = 0.0;
  ModelMeta meta;

  double objective_value(std::span<const double> x) const;
  int num_binaries() const;
  // objective += weight * expr^2, expanded into quadratic/linear/constant parts.
  void add_squared_objective(const LinExpr& expr, double weight);
  // First violated constraint (or bound) at a point, if any.
  std::optional<ConstraintViolation> check_point(std::span<const double> x,
                                                 double tol) const;
};

}  // namespace moto2d
