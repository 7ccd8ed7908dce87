#pragma once

#include <Eigen/Sparse>
#include <limits>
#include <memory>
#include <vector>

#include "moto2d/model.hpp"

namespace moto2d {

enum class QpStatus { Optimal, Infeasible, NumericalFailure };

struct QpResult {
  QpStatus status = QpStatus::NumericalFailure;
  Eigen::VectorXd x;
  // Full model objective (quadratic + linear + constant) at x.
  double objective = 0.0;
  // Rigorous-ish margin to subtract from `objective` to get a safe lower
  // bound on the node optimum: residual complementarity plus dual residual
  // times the box radius.
  double bound_slack = 0.0;
  // Best weak-duality lower bound seen across iterations. Valid whatever the
  // final status: the Lagrangian bound holds at every iterate, so a stalled
  // solve still certifies this much. +inf once infeasibility is certified.
  double safe_bound = -std::numeric_limits<double>::infinity();
  double kkt_residual = 0.0;
  int iterations = 0;
  // Positive phase-1 optimum when status == Infeasible.
  double infeasibility = 0.0;
};

struct QpOptions {
  int max_iter = 100;
  double kkt_tol = 1e-8;
};

// Continuous relaxation of a MiqpModel in solver form:
//   min 0.5 x'Qx + c'x + c0   s.t.  A x = b,  G x <= h,  lb <= x <= ub.
// Binary variables become [0,1] boxes; branching only moves lb/ub, so the
// compiled matrices are shared by every node.
struct QpForm {
  int n = 0;
  Eigen::SparseMatrix<double> Q;  // symmetric, full storage
  Eigen::VectorXd c;
  double c0 = 0.0;
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  Eigen::SparseMatrix<double> G;
  Eigen::VectorXd h;
  Eigen::VectorXd lb, ub;  // root bounds

  static QpForm compile(const MiqpModel& model);
  // Elastic feasibility problem: minimize the total constraint violation
  // over the same box. Zero optimum iff the node is feasible.
  QpForm elastic() const;
};

// Mehrotra predictor-corrector interior-point method. The KKT pattern is
// analyzed once per form; each solve only refactorizes values, so one
// instance serves a whole branch-and-bound tree.
class IpmSolver {
 public:
  explicit IpmSolver(const QpForm& form, QpOptions opts = {});
  ~IpmSolver();
  IpmSolver(IpmSolver&&) noexcept;
  IpmSolver& operator=(IpmSolver&&) noexcept;

  // Bounds must satisfy lb <= ub elementwise (equal allowed: fixed vars).
  QpResult solve(const Eigen::VectorXd& lb, const Eigen::VectorXd& ub,
                 const Eigen::VectorXd* warm_x = nullptr);

  const QpForm& form() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Relaxation solver with infeasibility certification: runs the main IPM and
// falls back to the elastic phase-1 problem when it fails to converge.
class RelaxationSolver {
 public:
  explicit RelaxationSolver(const MiqpModel& model, QpOptions opts = {});

  QpResult solve(const Eigen::VectorXd& lb, const Eigen::VectorXd& ub,
                 const Eigen::VectorXd* warm_x = nullptr);

  const QpForm& form() const { return form_; }

 private:
  QpForm form_;
  QpForm elastic_form_;
  IpmSolver main_;
  IpmSolver phase1_;
  double feas_tol_;
};

}  // namespace moto2d
