#pragma once

#include <string>

#include "moto2d/geometry.hpp"
#include "moto2d/model.hpp"
#include "moto2d/topology.hpp"
#include "moto2d/vehicle.hpp"

namespace moto2d {

struct BuildOptions {
  double ideal_x = 0.0, ideal_y = 0.0;  // target CoG
  double l_n = 1.0, l_n_mm = 1.0;       // normalization lengths (m)
  // Feasible box for the main-motor center; user input, only consulted when
  // the topology has an MM element.
  double mm_x_min = 0.0, mm_x_max = 0.0;
  double mm_y_min = 0.0, mm_y_max = 0.0;
  // Rear wheel center, the anchor of the MM chain-length objective term.
  double rear_wheel_x = 0.0, rear_wheel_y = 0.0;
  double epsilon_contiguity = 1e-3;  // abutment tolerance (m)
};

// Closed-form structural counts for an assembled model, derived before
// building anything. `assemble` must produce exactly these numbers; the
// formulas are documented in docs/model_counting.md.
struct ModelSizePrediction {
  int continuous_vars = 0;
  int binary_vars = 0;
  int constraints = 0;
};

ModelSizePrediction predict_model_size(const Topology& topo, const DesignSpace& space,
                                       const AngleScheme& scheme);

// Assembles the full placement MIQP: placement variables and bounds, pairwise
// separation, cluster selection/orientation/contiguity, and the CoG
// objective. Throws BuildError on inputs that cannot produce a feasible,
// well-formed model.
MiqpModel assemble(const Topology& topo, const DesignSpace& space, const AngleScheme& scheme,
                   const VehicleParams& vehicle, const BuildOptions& options);

}  // namespace moto2d
