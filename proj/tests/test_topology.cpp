#include <algorithm>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "moto2d/topology.hpp"

using namespace moto2d;

namespace {

using Grid = std::pair<int, int>;

std::vector<Grid> grids(const std::vector<Arrangement>& arr) {
  std::vector<Grid> out;
  for (const Arrangement& a : arr) out.push_back({a.n_w, a.n_h});
  return out;
}

// Oracle for the constrained cases: the unconstrained grid list filtered by
// the stated outline bounds. Written against the frozen full list so the
// filter logic is independent of the implementation under test.
std::vector<Grid> filter_by_bounds(const std::vector<Grid>& all, double sub_w, double sub_h,
                                   double span_x, double span_y) {
  std::vector<Grid> out;
  for (const Grid& g : all)
    if (g.first * sub_w <= span_x && g.second * sub_h <= span_y) out.push_back(g);
  return out;
}

ElementSpec battery(int n_sub, double sub_w, double sub_h, double sub_mass, int n_com = 1) {
  ElementSpec e;
  e.name = "bp";
  e.type = ElemType::BP;
  e.mass = n_sub * sub_mass;
  e.shape = ShapeKind::Subsystem;
  e.n_sub = n_sub;
  e.sub_w = sub_w;
  e.sub_h = sub_h;
  e.sub_mass = sub_mass;
  e.n_com = n_com;
  return e;
}

ElementSpec rect_elem(std::string name, double w, double h, double mass) {
  ElementSpec e;
  e.name = std::move(name);
  e.type = ElemType::INV;
  e.mass = mass;
  e.shape = ShapeKind::Rect;
  e.w = w;
  e.h = h;
  return e;
}

// All grids with n_w*n_h <= 6, ascending (n_b, n_w).
const std::vector<Grid> kAllSix = {{1, 1}, {1, 2}, {2, 1}, {1, 3}, {3, 1}, {1, 4}, {2, 2},
                                   {4, 1}, {1, 5}, {5, 1}, {1, 6}, {2, 3}, {3, 2}, {6, 1}};

}  // namespace

TEST_CASE("six modules with generous bounds yield all fourteen grids in order") {
  const ElementSpec e = battery(6, 0.2, 0.1, 1.0);
  const DesignSpace space(0.0, 5.0, 0.0, 5.0);
  const std::vector<Arrangement> arr = enumerate_arrangements(e, space);
  REQUIRE(arr.size() == 14);
  CHECK(grids(arr) == kAllSix);
  for (size_t i = 1; i < arr.size(); ++i) {
    const bool ordered = std::make_pair(arr[i - 1].n_b, arr[i - 1].n_w) <
                         std::make_pair(arr[i].n_b, arr[i].n_w);
    CHECK(ordered);
  }
  const Arrangement& two_by_three = arr[11];
  CHECK(two_by_three.n_w == 2);
  CHECK(two_by_three.n_h == 3);
  CHECK(two_by_three.n_b == 6);
  CHECK(two_by_three.w == doctest::Approx(0.4));
  CHECK(two_by_three.h == doctest::Approx(0.3));
  CHECK(two_by_three.mass == doctest::Approx(6.0));
}

TEST_CASE("single module has exactly the unit grid") {
  const ElementSpec e = battery(1, 0.2, 0.1, 2.5);
  const std::vector<Arrangement> arr = enumerate_arrangements(e, DesignSpace(0, 1, 0, 1));
  REQUIRE(arr.size() == 1);
  CHECK(arr[0].n_w == 1);
  CHECK(arr[0].n_h == 1);
  CHECK(arr[0].mass == doctest::Approx(2.5));
}

TEST_CASE("outline bounds filter the grid list") {
  const ElementSpec e = battery(6, 0.2, 0.1, 1.0);
  SUBCASE("height-limited") {
    const DesignSpace space(0.0, 2.0, 0.0, 0.25);
    CHECK(grids(enumerate_arrangements(e, space)) ==
          filter_by_bounds(kAllSix, 0.2, 0.1, 2.0, 0.25));
  }
  SUBCASE("width-limited") {
    const DesignSpace space(0.0, 0.45, 0.0, 5.0);
    CHECK(grids(enumerate_arrangements(e, space)) ==
          filter_by_bounds(kAllSix, 0.2, 0.1, 0.45, 5.0));
  }
  SUBCASE("both-limited") {
    const DesignSpace space(0.0, 0.45, 0.0, 0.25);
    CHECK(grids(enumerate_arrangements(e, space)) ==
          filter_by_bounds(kAllSix, 0.2, 0.1, 0.45, 0.25));
  }
}

TEST_CASE("square modules drop transposed duplicates only when the twin fits") {
  const ElementSpec e = battery(6, 0.1, 0.1, 1.0);
  SUBCASE("generous space keeps the n_w <= n_h representative") {
    const std::vector<Grid> expect = {{1, 1}, {1, 2}, {1, 3}, {1, 4},
                                      {2, 2}, {1, 5}, {1, 6}, {2, 3}};
    CHECK(grids(enumerate_arrangements(e, DesignSpace(0, 5, 0, 5))) == expect);
  }
  SUBCASE("flat space keeps the wide outlines whose tall twins cannot fit") {
    const std::vector<Grid> expect = {{1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}, {6, 1}};
    CHECK(grids(enumerate_arrangements(e, DesignSpace(0, 0.7, 0, 0.15))) == expect);
  }
}

TEST_CASE("module mass cap filters heavy grids") {
  ElementSpec e = battery(6, 0.2, 0.1, 1.0);
  e.mass = 3.5;  // only grids up to 3 modules stay under the element mass
  const std::vector<Grid> expect = {{1, 1}, {1, 2}, {2, 1}, {1, 3}, {3, 1}};
  CHECK(grids(enumerate_arrangements(e, DesignSpace(0, 5, 0, 5))) == expect);
}

TEST_CASE("components have no arrangements") {
  const ElementSpec e = rect_elem("inv", 0.2, 0.1, 3.0);
  CHECK_THROWS_AS(enumerate_arrangements(e, DesignSpace(0, 1, 0, 1)), BuildError);
  try {
    enumerate_arrangements(e, DesignSpace(0, 1, 0, 1));
  } catch (const BuildError& err) {
    CHECK(err.where == "inv");
    CHECK(std::string(err.what()).find("no arrangements") != std::string::npos);
  }
}

TEST_CASE("topology validation rejects malformed inputs") {
  const DesignSpace space(0.0, 1.0, 0.0, 0.6);

  auto reject = [&](Topology t, const std::string& where_hint) {
    bool threw = false;
    try {
      validate_topology(t, space);
    } catch (const BuildError& err) {
      threw = true;
      CHECK(err.where == where_hint);
    }
    CHECK(threw);
  };

  SUBCASE("empty design space is rejected at construction") {
    CHECK_THROWS_AS(DesignSpace(1.0, 1.0, 0.0, 1.0), std::invalid_argument);
  }
  SUBCASE("empty name") {
    Topology t{{rect_elem("", 0.1, 0.1, 1.0)}};
    reject(t, "topology");
  }
  SUBCASE("duplicate name") {
    Topology t{{rect_elem("inv", 0.1, 0.1, 1.0), rect_elem("inv", 0.1, 0.1, 1.0)}};
    reject(t, "inv");
  }
  SUBCASE("nonpositive mass") {
    Topology t{{rect_elem("inv", 0.1, 0.1, 0.0)}};
    reject(t, "inv");
  }
  SUBCASE("nonexistent elements are skipped") {
    ElementSpec e = rect_elem("inv", 0.1, 0.1, 0.0);
    e.exists = false;
    CHECK_NOTHROW(validate_topology(Topology{{e}}, space));
  }
  SUBCASE("module mass exceeding element mass") {
    ElementSpec e = battery(4, 0.1, 0.1, 1.0);
    e.mass = 3.0;
    reject(Topology{{e}}, "bp");
  }
  SUBCASE("cluster count out of range") {
    ElementSpec lo = battery(4, 0.1, 0.1, 1.0, 0);
    reject(Topology{{lo}}, "bp");
    ElementSpec hi = battery(4, 0.1, 0.1, 1.0, 5);
    reject(Topology{{hi}}, "bp");
  }
  SUBCASE("fixed subsystem") {
    ElementSpec e = battery(4, 0.1, 0.1, 1.0);
    e.fixed = true;
    reject(Topology{{e}}, "bp");
  }
  SUBCASE("module larger than the design space") {
    ElementSpec e = battery(4, 1.2, 0.1, 1.0);
    reject(Topology{{e}}, "bp");
  }
  SUBCASE("rect larger than the design space") {
    Topology t{{rect_elem("inv", 1.2, 0.8, 1.0)}};
    reject(t, "inv");
  }
  SUBCASE("rect fitting only rotated is accepted") {
    Topology t{{rect_elem("inv", 0.9, 0.3, 1.0)}};
    CHECK_NOTHROW(validate_topology(t, space));
  }
  SUBCASE("circle with nonpositive radius") {
    ElementSpec e;
    e.name = "mm";
    e.type = ElemType::MM;
    e.mass = 1.0;
    e.shape = ShapeKind::Circle;
    e.r = 0.0;
    reject(Topology{{e}}, "mm");
  }
  SUBCASE("component with module count") {
    ElementSpec e = rect_elem("inv", 0.1, 0.1, 1.0);
    e.n_sub = 2;
    e.sub_w = e.sub_h = 0.05;
    e.sub_mass = 0.5;
    e.shape = ShapeKind::Circle;
    reject(Topology{{e}}, "inv");
  }
}
