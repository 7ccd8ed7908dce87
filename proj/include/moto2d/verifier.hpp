#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "moto2d/model_builder.hpp"
#include "moto2d/placement.hpp"
#include "moto2d/topology.hpp"
#include "moto2d/vehicle.hpp"

namespace moto2d {

struct VerifyTolerances {
  // Abutment tolerance; nonpositive means "use the model's epsilon".
  double epsilon_contiguity = 0.0;
  double geo_tol = 1e-6;
  double objective_rel_tol = 1e-6;
};

struct Violation {
  std::string category;
  std::string subject;  // offending element, pair, or cluster
  double magnitude = 0.0;
  std::string detail;
};

// Category keys: bounds, overlap, contiguity, connectivity, mass,
// orientation, objective. Connectivity discrepancies are advisory: they land
// in `warnings` and leave the category passing.
struct VerificationReport {
  bool pass = false;
  std::map<std::string, bool> categories;
  std::vector<Violation> violations;
  std::vector<Violation> warnings;
  // Per subsystem: abutting cluster pairs (1-based ordinals).
  std::map<std::string, std::vector<std::pair<int, int>>> abutments;
  double objective_recomputed = 0.0;

  std::string summary() const;
};

// Model-free validation of a placement against the design rules, from exact
// geometry: shapes in bounds (free shapes only; structurally fixed elements
// may straddle the boundary), pairwise separation, cluster contiguity and
// connectivity, cluster mass equivalence, 0/90 orientation coupling, and an
// objective recomputation. Throws BuildError("placement", ...) when the
// placement does not match the topology structurally.
VerificationReport verify(const Placement& placement, const Topology& topo,
                          const DesignSpace& space, const VehicleParams& vehicle,
                          const BuildOptions& options, const VerifyTolerances& tol = {});

// First-principles objective: squared CoG offset over l_n^2 plus, per motor
// element, squared distance to the rear wheel center over l_n_mm^2.
double objective_of(const Placement& placement, const Topology& topo,
                    const VehicleParams& vehicle, const BuildOptions& options);

}  // namespace moto2d
