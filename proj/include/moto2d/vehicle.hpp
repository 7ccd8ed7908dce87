#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace moto2d {

// Vehicle-level quantities shared by the placement model and the drive-cycle
// evaluation. Positions are in the design frame: origin at the rear wheel
// contact point, x forward, y up.
struct VehicleParams {
  double l_wb = 1.4;  // wheelbase (m)
  double chassis_mass = 0.0;
  double chassis_x = 0.0, chassis_y = 0.0;
  double rider_mass = 0.0;
  double rider_x = 0.0, rider_y = 0.0;
  double mu_f = 1.0, mu_r = 1.0;
  double g = 9.81;
  bool driven_front = false, driven_rear = true;
  // Fraction of the tractive force carried by the front axle when both
  // wheels are driven; ignored otherwise.
  double front_drive_split = 0.5;
  // Road-load force c0 + c1*v + c2*v^2 (N, N*s/m, N*s^2/m^2).
  double c0 = 0.0, c1 = 0.0, c2 = 0.35;

  void validate() const {
    if (!(l_wb > 0.0)) throw std::invalid_argument("vehicle: wheelbase must be positive");
    if (!(chassis_mass > 0.0)) throw std::invalid_argument("vehicle: chassis mass must be positive");
    if (!(rider_mass > 0.0)) throw std::invalid_argument("vehicle: rider mass must be positive");
    if (!(mu_f > 0.0 && mu_f <= 1.5) || !(mu_r > 0.0 && mu_r <= 1.5))
      throw std::invalid_argument("vehicle: friction coefficients must be in (0, 1.5]");
    if (!driven_front && !driven_rear)
      throw std::invalid_argument("vehicle: at least one driven wheel");
    if (driven_front && driven_rear &&
        !(front_drive_split >= 0.0 && front_drive_split <= 1.0))
      throw std::invalid_argument("vehicle: drive split must be in [0, 1]");
  }
};

// Sampled speed trace; time strictly increasing, speeds nonnegative.
struct DriveCycle {
  std::vector<double> t_s;
  std::vector<double> v_mps;

  void validate() const {
    if (t_s.size() != v_mps.size()) throw std::invalid_argument("drive cycle: t/v size mismatch");
    if (t_s.size() < 2) throw std::invalid_argument("drive cycle: need at least 2 samples");
    for (size_t i = 1; i < t_s.size(); ++i)
      if (!(t_s[i] > t_s[i - 1]))
        throw std::invalid_argument("drive cycle: time must be strictly increasing at sample " +
                                    std::to_string(i));
    for (size_t i = 0; i < v_mps.size(); ++i)
      if (v_mps[i] < 0.0)
        throw std::invalid_argument("drive cycle: negative speed at sample " + std::to_string(i));
  }
};

}  // namespace moto2d
