#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "moto2d/model.hpp"
#include "moto2d/qp.hpp"

namespace moto2d {

enum class SolveStatus { Optimal, GapLimit, TimeLimit, NodeLimit, Infeasible };

const char* to_string(SolveStatus s);

struct BnbOptions {
  double gap_tol = 0.0;
  double time_limit_s = 0.0;  // <= 0: unlimited
  long node_limit = 0;        // <= 0: unlimited
  double feas_tol = 1e-6;
  double int_tol = 1e-6;
  bool log_progress = true;  // one stderr line per 1000 nodes
  // Test hook, called once per evaluated node with (parent bound, node bound,
  // incumbent objective, global bound).
  std::function<void(double, double, double, double)> node_observer;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> incumbent;  // empty when none found
  double objective = 0.0;         // incumbent objective, valid when incumbent set
  double bound = 0.0;             // certified global lower bound
  double gap = 0.0;               // (objective - bound) / max(|objective|, 1e-12)
  long nodes = 0;
  double wall_time_s = 0.0;

  bool has_incumbent() const { return !incumbent.empty(); }
};

double relative_gap(double objective, double bound);

// Convex relaxation with a partial binary assignment, standalone entry point.
QpResult solve_qp_relaxation(const MiqpModel& model,
                             const std::vector<std::pair<VarId, double>>& fixings = {});

struct WarmStartCheck {
  bool accepted = false;
  std::string reason;     // violated constraint when rejected
  double objective = 0.0; // recomputed objective when accepted
};

// A hint becomes an incumbent only if it satisfies every constraint within
// the feasibility tolerance.
WarmStartCheck validate_warm_start(const MiqpModel& model, const std::vector<double>& hint,
                                   double feas_tol = 1e-6);

SolveResult branch_and_bound(const MiqpModel& model, const BnbOptions& opts = {},
                             const std::vector<double>* warm_hint = nullptr);

}  // namespace moto2d
