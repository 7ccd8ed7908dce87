#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "moto2d/geometry.hpp"
#include "moto2d/linearize.hpp"
#include "support/model_probe.hpp"

using namespace moto2d;

namespace {

// Assignment helper: every variable defaults to zero.
std::vector<double> zeros(const MiqpModel& m) {
  return std::vector<double>(static_cast<size_t>(m.vars.size()), 0.0);
}

bool feasible(const MiqpModel& m, const std::vector<double>& x, double tol = 1e-9) {
  return !m.check_point(x, tol).has_value();
}

}  // namespace

TEST_CASE("big-M sizing from variable bounds") {
  MiqpModel m;
  ModelBuild b(m);
  const VarId x = b.add_continuous("x", -2.0, 5.0);
  CHECK(b.size_big_m(LinExpr::variable(x)) == doctest::Approx(5.5));

  const VarId x2 = b.add_continuous("x2", 0.0, 1.0);
  const VarId y = b.add_continuous("y", 0.0, 4.0);
  CHECK(b.size_big_m(LinExpr::variable(x2, 2.0) - LinExpr::variable(y)) ==
        doctest::Approx(4.4));

  const VarId d = b.add_binary("d");
  CHECK(b.size_big_m(LinExpr::variable(d)) == doctest::Approx(1.1));
}

TEST_CASE("binary AND truth table") {
  MiqpModel m;
  ModelBuild b(m);
  const VarId a = b.add_binary("a");
  const VarId d = b.add_binary("b");
  const VarId c = b.and_binary(a, d);
  REQUIRE(m.vars.size() == 3);
  REQUIRE(m.constraints.size() == 3);

  for (int va = 0; va <= 1; ++va)
    for (int vb = 0; vb <= 1; ++vb)
      for (int vc = 0; vc <= 1; ++vc) {
        const std::vector<double> x{double(va), double(vb), double(vc)};
        CHECK(feasible(m, x) == (vc == va * vb));
      }

  // Caching: the pair maps to one binary regardless of argument order.
  CHECK(b.and_binary(a, d) == c);
  CHECK(b.and_binary(d, a) == c);
  CHECK(b.and_binary(a, a) == a);
  CHECK(m.constraints.size() == 3);
}

TEST_CASE("trig of selected angle") {
  MiqpModel m;
  ModelBuild b(m);
  const std::vector<double> angles{0.0, 45.0, 90.0, 135.0};
  std::vector<VarId> sel;
  for (int k = 0; k < 4; ++k) sel.push_back(b.add_binary("d" + std::to_string(k)));

  const LinExpr c = b.trig_of_selected_angle(sel, angles, TrigFn::Cos);
  const LinExpr s = b.trig_of_selected_angle(sel, angles, TrigFn::Sin);

  std::vector<double> x{1, 0, 0, 0};
  CHECK(c.value(x) == doctest::Approx(1.0));
  x = {0, 1, 0, 0};
  CHECK(s.value(x) == doctest::Approx(std::sqrt(2.0) / 2.0));

  CHECK_THROWS_AS(b.trig_of_selected_angle(sel, {0.0, 90.0}, TrigFn::Cos),
                  std::invalid_argument);
}

TEST_CASE("angle-pair products via AND expansion") {
  MiqpModel m;
  ModelBuild b(m);
  const std::vector<double> angles{0.0, 45.0, 90.0, 135.0};
  std::vector<VarId> da, dz;
  for (int k = 0; k < 4; ++k) da.push_back(b.add_binary("da" + std::to_string(k)));
  for (int k = 0; k < 4; ++k) dz.push_back(b.add_binary("dz" + std::to_string(k)));

  LinExpr prod;
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l)
      prod += LinExpr::variable(b.and_binary(da[k], dz[l]),
                                cos_deg(angles[k]) * cos_deg(angles[l]));

  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) {
      std::vector<double> x = zeros(m);
      x[static_cast<size_t>(da[k])] = 1.0;
      x[static_cast<size_t>(dz[l])] = 1.0;
      x[static_cast<size_t>(b.and_binary(da[k], dz[l]))] = 1.0;
      CHECK(feasible(m, x));
      CHECK(prod.value(x) == doctest::Approx(cos_deg(angles[k]) * cos_deg(angles[l])));
    }
}

TEST_CASE("continuous times trig reduces to the exact product") {
  MiqpModel m;
  ModelBuild b(m);
  const VarId x = b.add_continuous("x", -10.0, 10.0);
  const std::vector<double> angles{0.0, 45.0, 90.0, 135.0};
  std::vector<VarId> sel;
  for (int k = 0; k < 4; ++k) sel.push_back(b.add_binary("d" + std::to_string(k)));
  b.add_one_hot(sel, "onehot");
  const LinExpr expr = b.continuous_times_trig(x, sel, angles, TrigFn::Cos, "xc");
  REQUIRE(m.vars.size() == 9);

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> xv(-10.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = trial % 4;
    const double v = (trial < 8) ? (trial < 4 ? 3.0 : 4.0) : xv(rng);
    std::vector<double> p = zeros(m);
    p[static_cast<size_t>(x)] = v;
    p[static_cast<size_t>(sel[k])] = 1.0;
    // The implied auxiliary values: selected channel carries the product.
    p[static_cast<size_t>(sel[3] + 1 + k)] = v * cos_deg(angles[k]);
    REQUIRE(feasible(m, p));
    CHECK(expr.value(p) ==
          doctest::Approx(v * cos_deg(angles[k])).epsilon(1e-9));
    // The block pins the auxiliaries: nudging one is infeasible.
    p[static_cast<size_t>(sel[3] + 1 + ((k + 1) % 4))] += 1e-3;
    CHECK_FALSE(feasible(m, p));
  }
}

TEST_CASE("continuous times trig big-M rows are non-binding when deselected") {
  MiqpModel m;
  ModelBuild b(m);
  const VarId x = b.add_continuous("x", -10.0, 10.0);
  std::vector<VarId> sel{b.add_binary("d0"), b.add_binary("d1")};
  b.add_one_hot(sel, "onehot");
  const size_t before = m.constraints.size();
  b.continuous_times_trig(x, sel, {0.0, 90.0}, TrigFn::Cos, "xc");

  // Fix d0=0, d1=1 and force only the gating rows of channel 0 (aux0 = 0):
  // the r1/r2 rows of channel 0 must hold over the whole remaining box.
  for (size_t i = before; i < m.constraints.size(); ++i) {
    const LinConstraint& c = m.constraints[i];
    const bool channel0 = c.name.find("_k0_") != std::string::npos;
    std::map<VarId, double> fixed{{sel[0], 0.0}, {sel[1], 1.0}};
    if (channel0 && (c.name.ends_with("_r1") || c.name.ends_with("_r2"))) {
      CHECK(probe::holds_over_box(c, m.vars, fixed));
    }
    // Selected channel: r3/r4 guards must be non-binding.
    if (!channel0 && (c.name.ends_with("_r3") || c.name.ends_with("_r4"))) {
      CHECK(probe::holds_over_box(c, m.vars, fixed));
    }
  }
}

TEST_CASE("selector value gates arbitrary expressions") {
  MiqpModel m;
  ModelBuild b(m);
  const VarId u = b.add_continuous("u", -2.0, 3.0);
  const VarId w = b.add_continuous("w", 0.0, 4.0);
  std::vector<VarId> sel{b.add_binary("d0"), b.add_binary("d1"), b.add_binary("d2")};
  b.add_one_hot(sel, "onehot");

  const std::vector<LinExpr> values{
      LinExpr::variable(u, 2.0) + 1.0,
      LinExpr::variable(w, -1.5),
      LinExpr::variable(u) + LinExpr::variable(w) - 0.25,
  };
  const LinExpr picked = b.selector_value(sel, values, "pick");
  const VarId aux0 = w + 1 + 3;  // first aux follows the binaries

  std::mt19937 rng(17);
  std::uniform_real_distribution<double> uv(-2.0, 3.0), wv(0.0, 4.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = trial % 3;
    std::vector<double> p = zeros(m);
    p[static_cast<size_t>(u)] = uv(rng);
    p[static_cast<size_t>(w)] = wv(rng);
    p[static_cast<size_t>(sel[k])] = 1.0;
    p[static_cast<size_t>(aux0 + k)] = values[static_cast<size_t>(k)].value(p);
    REQUIRE(feasible(m, p));
    CHECK(picked.value(p) ==
          doctest::Approx(values[static_cast<size_t>(k)].value(p)).epsilon(1e-9));
    p[static_cast<size_t>(aux0 + (k + 1) % 3)] = 0.37;
    CHECK_FALSE(feasible(m, p));
  }
}

TEST_CASE("absolute disjunction block") {
  MiqpModel m;
  ModelBuild b(m);
  const VarId xa = b.add_continuous("xa", -10.0, 10.0);
  const VarId xb = b.add_continuous("xb", 0.0, 10.0);
  const auto ind =
      b.abs_disjunction(LinExpr::variable(xa), LinExpr::variable(xb), "abs");

  auto point = [&](double a, double bb, int sgn, int suc) {
    std::vector<double> p = zeros(m);
    p[static_cast<size_t>(xa)] = a;
    p[static_cast<size_t>(xb)] = bb;
    p[static_cast<size_t>(ind.delta_sgn)] = sgn;
    p[static_cast<size_t>(ind.delta_suc)] = suc;
    return p;
  };

  // a=5 >= b=3: only (sgn=1, suc=1) certifies; suc=0 pins |a| <= b.
  CHECK(feasible(m, point(5, 3, 1, 1)));
  CHECK_FALSE(feasible(m, point(5, 3, 0, 1)));
  CHECK_FALSE(feasible(m, point(5, 3, 0, 0)));
  CHECK_FALSE(feasible(m, point(5, 3, 1, 0)));

  // a=-5: the negative branch.
  CHECK(feasible(m, point(-5, 3, 0, 1)));
  CHECK_FALSE(feasible(m, point(-5, 3, 1, 1)));

  // a=1 < b=3: success is infeasible, failure branch holds.
  CHECK_FALSE(feasible(m, point(1, 3, 1, 1)));
  CHECK_FALSE(feasible(m, point(1, 3, 0, 1)));
  CHECK(feasible(m, point(1, 3, 0, 0)));
  CHECK(feasible(m, point(1, 3, 1, 0)));

  // Boundary: |a| = b is feasible on both branches.
  CHECK(feasible(m, point(3, 3, 1, 1)));
  CHECK(feasible(m, point(3, 3, 1, 0)));
}

TEST_CASE("absolute disjunction rows deactivate over the whole box") {
  MiqpModel m;
  ModelBuild b(m);
  const VarId xa = b.add_continuous("xa", -7.0, 9.0);
  const VarId xb = b.add_continuous("xb", 0.0, 6.0);
  const auto ind = b.abs_disjunction(LinExpr::variable(xa, 0.5) + 1.0,
                                     LinExpr::variable(xb, 2.0), "abs");
  const auto& cs = m.constraints;
  REQUIRE(cs.size() == 4);

  using probe::holds_over_box;
  const auto fix = [&](int sgn, int suc) {
    return std::map<VarId, double>{{ind.delta_sgn, double(sgn)}, {ind.delta_suc, double(suc)}};
  };
  // r1 active only at (1,1); r2 active only at (0,1); r3/r4 active at suc=0.
  CHECK(holds_over_box(cs[0], m.vars, fix(0, 1)));
  CHECK(holds_over_box(cs[0], m.vars, fix(1, 0)));
  CHECK(holds_over_box(cs[0], m.vars, fix(0, 0)));
  CHECK(holds_over_box(cs[1], m.vars, fix(1, 1)));
  CHECK(holds_over_box(cs[1], m.vars, fix(1, 0)));
  CHECK(holds_over_box(cs[1], m.vars, fix(0, 0)));
  CHECK(holds_over_box(cs[2], m.vars, fix(0, 1)));
  CHECK(holds_over_box(cs[2], m.vars, fix(1, 1)));
  CHECK(holds_over_box(cs[3], m.vars, fix(0, 1)));
  CHECK(holds_over_box(cs[3], m.vars, fix(1, 1)));
}

TEST_CASE("transforms are purely additive") {
  MiqpModel m;
  ModelBuild b(m);
  const VarId x = b.add_continuous("x", -1.0, 1.0);
  std::vector<VarId> sel{b.add_binary("d0"), b.add_binary("d1")};
  b.add_one_hot(sel, "onehot");
  b.continuous_times_trig(x, sel, {0.0, 90.0}, TrigFn::Sin, "xs");
  const std::vector<LinConstraint> snapshot = m.constraints;

  b.abs_disjunction(LinExpr::variable(x), LinExpr(0.5), "abs");
  REQUIRE(m.constraints.size() > snapshot.size());
  for (size_t i = 0; i < snapshot.size(); ++i) {
    CHECK(m.constraints[i].name == snapshot[i].name);
    CHECK(m.constraints[i].rhs == snapshot[i].rhs);
    CHECK(m.constraints[i].expr.terms().size() == snapshot[i].expr.terms().size());
  }
}
