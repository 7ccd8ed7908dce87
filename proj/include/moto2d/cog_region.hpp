#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "moto2d/vehicle.hpp"

namespace moto2d {

// Wheel normal loads from the quasi-static moment balance about each contact
// point. wheel_lift marks a negative load on either wheel.
struct NormalForces {
  double front = 0.0;
  double rear = 0.0;
  bool wheel_lift = false;
};

// b: horizontal CoG distance from the rear contact (m), h: CoG height (m),
// accel: longitudinal acceleration (m/s^2, positive forward).
NormalForces normal_forces(const VehicleParams& params, double m_total, double b, double h,
                           double accel);

// Tractive force demanded at sample i: m*dv/dt plus road load c0 + c1*v +
// c2*v^2. Acceleration from a forward difference; the last sample reuses the
// preceding interval (backward difference). Negative values are regenerative
// braking demand.
double required_tractive_force(const VehicleParams& params, double m_total,
                               const DriveCycle& cycle, size_t i);

// Inclusive (b, h) grid; step applies to both axes.
struct RegionGridSpec {
  double b_min = 0.0, b_max = 0.0;
  double h_min = 0.0, h_max = 0.0;
  double step = 0.02;
};

// Evaluated grid with the friction-inactive mask. When the mask is non-empty
// the ideal point fields hold the lowest inactive CoG (ties: closest to
// mid-wheelbase, then rearmost), in design coordinates x = b, y = h.
struct RegionGrid {
  std::vector<double> b;
  std::vector<double> h;
  std::vector<std::uint8_t> inactive;  // row-major, index = hi * b.size() + bi
  bool any_inactive = false;
  double x_ideal = 0.0, y_ideal = 0.0;
  double l_wb = 0.0;

  bool at(size_t bi, size_t hi) const { return inactive[hi * b.size() + bi] != 0; }
};

// A grid point is inactive when no cycle sample lifts a wheel or pushes any
// driven wheel past its friction limit. Rear-driven demand goes fully to the
// rear wheel, front-driven to the front, dual-driven splits by
// params.front_drive_split.
RegionGrid inactive_region(const VehicleParams& params, double m_total, const DriveCycle& cycle,
                           const RegionGridSpec& spec);

// Lowest inactive point, ties broken toward mid-wheelbase then smaller b.
// Throws BuildError("region", ...) when the inactive set is empty.
std::pair<double, double> ideal_cog(const RegionGrid& region);

}  // namespace moto2d
