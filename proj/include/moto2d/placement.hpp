#pragma once

#include <optional>
#include <string>
#include <vector>

#include "moto2d/branch_and_bound.hpp"
#include "moto2d/model.hpp"
#include "moto2d/topology.hpp"

namespace moto2d {

// One cluster of a subsystem: selected module grid, center, rotation.
struct PlacedCluster {
  Arrangement arrangement;
  double x = 0.0, y = 0.0;
  double theta_deg = 0.0;
};

// One element of a placement. For subsystems `clusters` is nonempty and the
// element-level pose is the mass-weighted mean of the cluster centers. For
// circles theta_deg records the selected projection axis, not a rotation.
struct PlacedElement {
  std::string name;
  double x = 0.0, y = 0.0;
  double theta_deg = 0.0;
  std::vector<PlacedCluster> clusters;

  bool is_subsystem() const { return !clusters.empty(); }
};

struct Placement {
  std::vector<PlacedElement> elements;
  double objective = 0.0;
};

// Reads element centers, selected angles and selected arrangements out of a
// full solution vector. Throws BuildError on a size mismatch.
Placement decode_placement(const MiqpModel& model, const std::vector<double>& solution);

// Reconstructs a full solution vector from a placement by pinning every
// decision variable it determines (centers, rotation one-hots, arrangement
// one-hots) and letting branch and bound resolve the certificate gadgets.
// Circle projection axes are left free. Returns nullopt when the placement
// does not embed into the model (off-grid angle, unknown arrangement, value
// outside variable bounds, or no feasible completion).
std::optional<std::vector<double>> lift_placement(const MiqpModel& model, const Placement& p,
                                                  const BnbOptions& opts = {});

}  // namespace moto2d
