#include "moto2d/cog_region.hpp"

#include <cmath>
#include <stdexcept>

#include "moto2d/topology.hpp"

namespace moto2d {

namespace {

double sample_accel(const DriveCycle& cycle, size_t i) {
  const size_t n = cycle.t_s.size();
  // Forward difference; the final sample reuses the last interval.
  const size_t a = i + 1 < n ? i : i - 1;
  return (cycle.v_mps[a + 1] - cycle.v_mps[a]) / (cycle.t_s[a + 1] - cycle.t_s[a]);
}

void check_inputs(const VehicleParams& params, double m_total) {
  params.validate();
  if (!(m_total > 0.0)) throw BuildError("region", "total mass must be positive");
}

}  // namespace

NormalForces normal_forces(const VehicleParams& params, double m_total, double b, double h,
                           double accel) {
  check_inputs(params, m_total);
  if (!(b > 0.0 && b < params.l_wb) || !(h > 0.0))
    throw BuildError("region", "CoG candidate outside (0, l_wb) x (0, inf)");
  NormalForces out;
  const double mg = m_total * params.g;
  const double transfer = (h / params.l_wb) * m_total * accel;
  out.front = (b / params.l_wb) * mg - transfer;
  out.rear = ((params.l_wb - b) / params.l_wb) * mg + transfer;
  out.wheel_lift = out.front < 0.0 || out.rear < 0.0;
  return out;
}

double required_tractive_force(const VehicleParams& params, double m_total,
                               const DriveCycle& cycle, size_t i) {
  check_inputs(params, m_total);
  cycle.validate();
  if (i >= cycle.t_s.size()) throw BuildError("region", "cycle sample index out of range");
  const double v = cycle.v_mps[i];
  return m_total * sample_accel(cycle, i) + params.c0 + params.c1 * v + params.c2 * v * v;
}

RegionGrid inactive_region(const VehicleParams& params, double m_total, const DriveCycle& cycle,
                           const RegionGridSpec& spec) {
  check_inputs(params, m_total);
  cycle.validate();
  if (!(spec.step > 0.0)) throw BuildError("region", "grid step must be positive");
  if (!(spec.b_min > 0.0 && spec.b_max < params.l_wb && spec.b_min <= spec.b_max))
    throw BuildError("region", "b grid must lie inside (0, l_wb)");
  if (!(spec.h_min > 0.0 && spec.h_min <= spec.h_max))
    throw BuildError("region", "h grid must lie above the ground");

  RegionGrid grid;
  grid.l_wb = params.l_wb;
  const auto axis = [&](double lo, double hi, std::vector<double>& out) {
    const size_t count = static_cast<size_t>(std::floor((hi - lo) / spec.step + 1e-9)) + 1;
    out.reserve(count);
    for (size_t k = 0; k < count; ++k) out.push_back(lo + static_cast<double>(k) * spec.step);
  };
  axis(spec.b_min, spec.b_max, grid.b);
  axis(spec.h_min, spec.h_max, grid.h);

  // Per-sample demand and acceleration are CoG-independent; precompute.
  const size_t ns = cycle.t_s.size();
  std::vector<double> accel(ns), demand(ns);
  for (size_t i = 0; i < ns; ++i) {
    accel[i] = sample_accel(cycle, i);
    const double v = cycle.v_mps[i];
    demand[i] = m_total * accel[i] + params.c0 + params.c1 * v + params.c2 * v * v;
  }
  const double split = params.driven_front && params.driven_rear ? params.front_drive_split
                       : params.driven_front                     ? 1.0
                                                                 : 0.0;

  grid.inactive.assign(grid.b.size() * grid.h.size(), 0);
  for (size_t hi = 0; hi < grid.h.size(); ++hi) {
    for (size_t bi = 0; bi < grid.b.size(); ++bi) {
      bool ok = true;
      for (size_t i = 0; i < ns && ok; ++i) {
        const NormalForces nf =
            normal_forces(params, m_total, grid.b[bi], grid.h[hi], accel[i]);
        if (nf.wheel_lift) {
          ok = false;
          break;
        }
        if (params.driven_front && std::abs(split * demand[i]) > params.mu_f * nf.front)
          ok = false;
        if (params.driven_rear && std::abs((1.0 - split) * demand[i]) > params.mu_r * nf.rear)
          ok = false;
      }
      if (ok) {
        grid.inactive[hi * grid.b.size() + bi] = 1;
        grid.any_inactive = true;
      }
    }
  }
  if (grid.any_inactive) {
    const auto [x, y] = ideal_cog(grid);
    grid.x_ideal = x;
    grid.y_ideal = y;
  }
  return grid;
}

std::pair<double, double> ideal_cog(const RegionGrid& region) {
  bool found = false;
  double bx = 0.0, by = 0.0;
  for (size_t hi = 0; hi < region.h.size() && !found; ++hi) {
    // Lowest row first; within it prefer mid-wheelbase, then smaller b.
    const double mid = region.l_wb / 2.0;
    double best_tie = 0.0;
    for (size_t bi = 0; bi < region.b.size(); ++bi) {
      if (!region.at(bi, hi)) continue;
      const double tie = std::abs(region.b[bi] - mid);
      if (!found || tie < best_tie - 1e-12) {
        found = true;
        best_tie = tie;
        bx = region.b[bi];
        by = region.h[hi];
      }
    }
    if (found) break;
  }
  if (!found) throw BuildError("region", "no feasible CoG: inactive set is empty");
  return {bx, by};
}

}  // namespace moto2d
