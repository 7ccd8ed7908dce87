#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "moto2d/geometry.hpp"
#include "moto2d/model.hpp"

namespace moto2d {

// Build-time rejection with a location, so config errors point at the
// offending element instead of surfacing as an infeasible model.
struct BuildError : std::runtime_error {
  BuildError(std::string where_, std::string what_)
      : std::runtime_error(where_ + ": " + what_), where(std::move(where_)) {}
  std::string where;
};

struct ElementSpec {
  std::string name;
  ElemType type = ElemType::INV;
  bool exists = true;
  double mass = 0.0;  // kg, total element mass
  ShapeKind shape = ShapeKind::Rect;
  double w = 0.0, h = 0.0;  // rect dims (m)
  double r = 0.0;           // circle radius (m)

  // Subsystems: n_sub >= 1 modules of sub_w x sub_h, sub_mass each, grouped
  // into n_com clusters. Components have n_sub = 0.
  int n_sub = 0;
  double sub_w = 0.0, sub_h = 0.0, sub_mass = 0.0;
  int n_com = 1;

  bool fixed = false;  // wheels and hub motors sit at structurally known points
  double fx = 0.0, fy = 0.0;
  double fixed_theta_deg = 0.0;  // orientation of a fixed rect

  bool is_subsystem() const { return n_sub >= 1; }
};

struct Topology {
  std::vector<ElementSpec> elements;
};

// Throws BuildError on the first violated element invariant: duplicate or
// empty names, nonpositive masses or dims, subsystem module masses not
// summing to the element mass, n_com out of range, fixed centers or free
// shapes that cannot fit the design space.
void validate_topology(const Topology& topo, const DesignSpace& space);

// All (n_w, n_h) grids with n_w*n_h <= n_sub whose outline fits the design
// space, ascending by module count then by columns.
std::vector<Arrangement> enumerate_arrangements(const ElementSpec& spec, const DesignSpace& space);

}  // namespace moto2d
