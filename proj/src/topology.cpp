#include "moto2d/topology.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace moto2d {

namespace {

void check(bool ok, const std::string& where, const std::string& what) {
  if (!ok) throw BuildError(where, what);
}

}  // namespace

void validate_topology(const Topology& topo, const DesignSpace& space) {
  check(space.x_max > space.x_min && space.y_max > space.y_min, "design_space",
        "empty design space");
  std::set<std::string> names;
  for (const ElementSpec& e : topo.elements) {
    check(!e.name.empty(), "topology", "element with empty name");
    check(names.insert(e.name).second, e.name, "duplicate element name");
    if (!e.exists) continue;
    check(e.mass > 0.0, e.name, "existing element needs positive mass");
    if (e.is_subsystem()) {
      check(e.shape == ShapeKind::Rect || e.shape == ShapeKind::Subsystem, e.name,
            "subsystems are rectangular module grids");
      check(e.sub_w > 0.0 && e.sub_h > 0.0, e.name, "module dims must be positive");
      check(e.sub_mass > 0.0, e.name, "module mass must be positive");
      check(e.n_sub * e.sub_mass <= e.mass * (1.0 + 1e-9), e.name,
            "module masses exceed the element mass");
      check(e.n_com >= 1 && e.n_com <= e.n_sub, e.name,
            "cluster count must be in [1, n_sub]");
      check(!e.fixed, e.name, "subsystems cannot be position-fixed");
      check(e.sub_w <= space.x_max - space.x_min && e.sub_h <= space.y_max - space.y_min,
            e.name, "module larger than the design space");
    } else {
      check(e.n_sub == 0, e.name, "components have n_sub = 0");
      if (e.shape == ShapeKind::Rect) {
        check(e.w > 0.0 && e.h > 0.0, e.name, "rect dims must be positive");
        check(std::min(e.w, e.h) <= space.x_max - space.x_min &&
                  std::min(e.w, e.h) <= space.y_max - space.y_min,
              e.name, "rect larger than the design space");
      } else {
        check(e.shape == ShapeKind::Circle, e.name, "component shape must be rect or circle");
        check(e.r > 0.0, e.name, "circle radius must be positive");
      }
    }
    if (!e.fixed) {
      // Paper convention: the center is constrained to the design space.
      check(true, e.name, "");
    }
  }
}

std::vector<Arrangement> enumerate_arrangements(const ElementSpec& spec,
                                                const DesignSpace& space) {
  check(spec.n_sub >= 1, spec.name, "components have no arrangements");
  const double span_x = space.x_max - space.x_min;
  const double span_y = space.y_max - space.y_min;
  const bool square_module = spec.sub_w == spec.sub_h;
  std::vector<Arrangement> out;
  for (int nb = 1; nb <= spec.n_sub; ++nb) {
    for (int nw = 1; nw <= nb; ++nw) {
      if (nb % nw != 0) continue;
      const int nh = nb / nw;
      const double w = nw * spec.sub_w;
      const double h = nh * spec.sub_h;
      if (nb * spec.sub_mass > spec.mass * (1.0 + 1e-9)) continue;
      if (w > span_x || h > span_y) continue;
      // A square module makes (nh, nw) the same outline rotated 90 degrees, so
      // keep only the nw <= nh representative -- but only when that
      // representative itself fits, or the whole outline would be lost.
      if (square_module && nw > nh && nh * spec.sub_w <= span_x && nw * spec.sub_h <= span_y)
        continue;
      out.push_back({nw, nh, nb, w, h, nb * spec.sub_mass});
    }
  }
  // Already ascending by (n_b, n_w) from the loop order.
  return out;
}

}  // namespace moto2d
