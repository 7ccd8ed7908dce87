#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "moto2d/linearize.hpp"
#include "moto2d/qp.hpp"
#include "support/qp_oracle.hpp"

using namespace moto2d;

namespace {

MiqpModel single_var_model(double lb, double ub) {
  MiqpModel m;
  m.vars.add_continuous("x", lb, ub);
  return m;
}

}  // namespace

TEST_CASE("unconstrained parabola") {
  // (x-1)^2 = x^2 - 2x + 1
  MiqpModel m = single_var_model(-10, 10);
  m.objective.quad.push_back({0, 0, 1.0});
  m.objective.linear = LinExpr::variable(0, -2.0);
  m.objective_constant = 1.0;

  RelaxationSolver solver(m);
  const QpResult r = solver.solve(solver.form().lb, solver.form().ub);
  REQUIRE(r.status == QpStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.objective == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
  CHECK(r.bound_slack >= 0.0);
  CHECK(r.bound_slack < 1e-4);
}

TEST_CASE("active bound: min x^2 with x >= 3") {
  MiqpModel m = single_var_model(3, 10);
  m.objective.quad.push_back({0, 0, 1.0});
  RelaxationSolver solver(m);
  const QpResult r = solver.solve(solver.form().lb, solver.form().ub);
  REQUIRE(r.status == QpStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(r.objective == doctest::Approx(9.0).epsilon(1e-6));
}

TEST_CASE("active inequality row") {
  // min x^2 subject to x >= 3 expressed as a row, box [-10, 10].
  MiqpModel m = single_var_model(-10, 10);
  m.objective.quad.push_back({0, 0, 1.0});
  m.constraints.push_back({LinExpr::variable(0), Relation::GreaterEq, 3.0, "lo"});
  RelaxationSolver solver(m);
  const QpResult r = solver.solve(solver.form().lb, solver.form().ub);
  REQUIRE(r.status == QpStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(r.objective == doctest::Approx(9.0).epsilon(1e-6));
}

TEST_CASE("equality projection") {
  // min x^2 + y^2 with x + y = 2 -> (1,1).
  MiqpModel m;
  m.vars.add_continuous("x", -10, 10);
  m.vars.add_continuous("y", -10, 10);
  m.objective.quad.push_back({0, 0, 1.0});
  m.objective.quad.push_back({1, 1, 1.0});
  m.constraints.push_back(
      {LinExpr::variable(0) + LinExpr::variable(1), Relation::Equal, 2.0, "sum"});
  RelaxationSolver solver(m);
  const QpResult r = solver.solve(solver.form().lb, solver.form().ub);
  REQUIRE(r.status == QpStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("halfspace projection has the analytic solution") {
  // min 0.5 ||x - p||^2 s.t. sum(x) <= 1: x* = p - max(0, (sum p - 1)/n) 1.
  const int n = 6;
  MiqpModel m;
  LinExpr sum;
  Eigen::VectorXd p(n);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> pv(0.0, 2.0);
  for (int i = 0; i < n; ++i) {
    m.vars.add_continuous("x" + std::to_string(i), -50, 50);
    p[i] = pv(rng);
    m.objective.quad.push_back({i, i, 0.5});
    m.objective.linear += LinExpr::variable(i, -p[i]);
    sum += LinExpr::variable(i);
  }
  m.objective_constant = 0.5 * p.squaredNorm();
  m.constraints.push_back({sum, Relation::LessEq, 1.0, "cap"});

  RelaxationSolver solver(m);
  const QpResult r = solver.solve(solver.form().lb, solver.form().ub);
  REQUIRE(r.status == QpStatus::Optimal);
  const double shift = std::max(0.0, (p.sum() - 1.0) / n);
  for (int i = 0; i < n; ++i) CHECK(r.x[i] == doctest::Approx(p[i] - shift).epsilon(1e-6));
}

TEST_CASE("infeasible box is certified") {
  MiqpModel m;
  m.vars.add_continuous("x", 0, 1);
  m.vars.add_continuous("y", 0, 1);
  m.constraints.push_back(
      {LinExpr::variable(0) + LinExpr::variable(1), Relation::Equal, 5.0, "sum"});
  RelaxationSolver solver(m);
  const QpResult r = solver.solve(solver.form().lb, solver.form().ub);
  REQUIRE(r.status == QpStatus::Infeasible);
  CHECK(r.infeasibility == doctest::Approx(3.0).epsilon(1e-4));
}

TEST_CASE("contradictory inequality rows are certified") {
  MiqpModel m;
  m.vars.add_continuous("x", -10, 10);
  m.constraints.push_back({LinExpr::variable(0), Relation::GreaterEq, 4.0, "ge"});
  m.constraints.push_back({LinExpr::variable(0), Relation::LessEq, 1.0, "le"});
  RelaxationSolver solver(m);
  const QpResult r = solver.solve(solver.form().lb, solver.form().ub);
  REQUIRE(r.status == QpStatus::Infeasible);
  CHECK(r.infeasibility == doctest::Approx(3.0).epsilon(1e-4));
}

TEST_CASE("random box QPs match projected gradient") {
  std::mt19937 rng(2024);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 4 + trial % 9;
    const int rank = (trial % 3 == 0) ? n / 2 + 1 : n;  // mix in singular Q
    Eigen::MatrixXd B(n, rank);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < rank; ++j) B(i, j) = gauss(rng);
    Eigen::MatrixXd Q = B * B.transpose();
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i) c[i] = gauss(rng);

    MiqpModel m;
    for (int i = 0; i < n; ++i) m.vars.add_continuous("x" + std::to_string(i), -1.0, 2.0);
    for (int i = 0; i < n; ++i) {
      m.objective.quad.push_back({i, i, 0.5 * Q(i, i)});
      for (int j = i + 1; j < n; ++j)
        if (Q(i, j) != 0.0) m.objective.quad.push_back({i, j, Q(i, j)});
      m.objective.linear += LinExpr::variable(i, c[i]);
    }

    RelaxationSolver solver(m);
    const QpResult r = solver.solve(solver.form().lb, solver.form().ub);
    REQUIRE(r.status == QpStatus::Optimal);

    const Eigen::VectorXd ref =
        oracle::projected_gradient(Q, c, solver.form().lb, solver.form().ub);
    const double obj_ref = 0.5 * ref.dot(Q * ref) + c.dot(ref);
    CHECK(r.objective <= obj_ref + 1e-6 * (1.0 + std::abs(obj_ref)));
    CHECK(r.objective >= obj_ref - 1e-6 * (1.0 + std::abs(obj_ref)));
  }
}

TEST_CASE("fixed variables are honored") {
  MiqpModel m;
  m.vars.add_continuous("x", -10, 10);
  m.vars.add_continuous("y", -10, 10);
  // (x-1)^2 + (y-2)^2
  m.objective.quad.push_back({0, 0, 1.0});
  m.objective.quad.push_back({1, 1, 1.0});
  m.objective.linear = LinExpr::variable(0, -2.0) + LinExpr::variable(1, -4.0);
  m.objective_constant = 5.0;
  m.constraints.push_back(
      {LinExpr::variable(0) + LinExpr::variable(1), Relation::LessEq, 50.0, "slack_row"});

  RelaxationSolver solver(m);
  Eigen::VectorXd lb = solver.form().lb, ub = solver.form().ub;
  lb[1] = ub[1] = 0.0;  // pin y
  const QpResult r = solver.solve(lb, ub);
  REQUIRE(r.status == QpStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x[1] == 0.0);
  CHECK(r.objective == doctest::Approx(4.0).epsilon(1e-5));

  // Same instance again without pins: pattern reuse across solves.
  const QpResult r2 = solver.solve(solver.form().lb, solver.form().ub);
  REQUIRE(r2.status == QpStatus::Optimal);
  CHECK(r2.x[1] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("solves are deterministic") {
  MiqpModel m;
  ModelBuild b(m);
  const VarId x = b.add_continuous("x", -5, 5);
  std::vector<VarId> sel{b.add_binary("d0"), b.add_binary("d1")};
  b.add_one_hot(sel, "onehot");
  b.continuous_times_trig(x, sel, {0.0, 90.0}, TrigFn::Cos, "xc");
  m.objective.quad.push_back({x, x, 1.0});
  m.objective.linear = LinExpr::variable(x, -3.0);

  RelaxationSolver solver(m);
  const QpResult a = solver.solve(solver.form().lb, solver.form().ub);
  const QpResult c = solver.solve(solver.form().lb, solver.form().ub);
  REQUIRE(a.status == QpStatus::Optimal);
  REQUIRE(c.status == QpStatus::Optimal);
  CHECK(a.x == c.x);
  CHECK(a.objective == c.objective);

  // Warm starts may change the path but not the answer.
  const QpResult w = solver.solve(solver.form().lb, solver.form().ub, &a.x);
  REQUIRE(w.status == QpStatus::Optimal);
  CHECK(w.objective == doctest::Approx(a.objective).epsilon(1e-6));
}
