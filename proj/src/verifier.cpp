#include "moto2d/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "moto2d/geometry.hpp"

namespace moto2d {

namespace {

// One concrete shape of a placement: a component or one subsystem cluster.
struct Shape {
  std::string label;
  bool is_rect = true;
  Rect rect;
  Circle circle;
  double mass = 0.0;
  bool fixed = false;
  int elem = -1;  // topology element index
  int sub = -1;   // owning subsystem element index, -1 for components
  int ord = 0;    // 1-based cluster ordinal within its subsystem
  int n_b = 0;    // modules in the cluster

  Vec2 center() const { return is_rect ? rect.center() : circle.center(); }
};

void require(bool ok, const std::string& what) {
  if (!ok) throw BuildError("placement", what);
}

bool finite(double v) { return std::isfinite(v); }

// Structural validation and shape extraction; throws BuildError when the
// placement does not line up with the topology.
std::vector<Shape> build_shapes(const Placement& p, const Topology& topo, double geo_tol) {
  std::vector<Shape> out;
  std::vector<const ElementSpec*> live;
  for (const ElementSpec& e : topo.elements)
    if (e.exists) live.push_back(&e);
  require(p.elements.size() == live.size(), "element count does not match the topology");
  for (size_t i = 0; i < live.size(); ++i) {
    const ElementSpec& e = *live[i];
    const PlacedElement& pe = p.elements[i];
    require(pe.name == e.name, "element order/name mismatch at '" + pe.name + "'");
    require(finite(pe.x) && finite(pe.y) && finite(pe.theta_deg),
            "non-finite pose for '" + pe.name + "'");
    if (e.is_subsystem()) {
      require(!pe.clusters.empty(), "subsystem '" + e.name + "' has no clusters");
      require(static_cast<int>(pe.clusters.size()) == e.n_com,
              "subsystem '" + e.name + "' cluster count differs from n_com");
      int ord = 0;
      for (const PlacedCluster& pc : pe.clusters) {
        ++ord;
        require(finite(pc.x) && finite(pc.y) && finite(pc.theta_deg),
                "non-finite cluster pose in '" + e.name + "'");
        const Arrangement& ar = pc.arrangement;
        require(ar.n_w >= 1 && ar.n_h >= 1 && ar.n_w * ar.n_h <= e.n_sub,
                "cluster grid outside the enumerable set in '" + e.name + "'");
        Shape s;
        s.label = e.name + ".c" + std::to_string(ord);
        s.is_rect = true;
        s.rect = Rect(ar.n_w * e.sub_w, ar.n_h * e.sub_h, pc.x, pc.y, pc.theta_deg);
        s.n_b = ar.n_w * ar.n_h;
        s.mass = s.n_b * e.sub_mass;
        s.elem = static_cast<int>(&e - topo.elements.data());
        s.sub = s.elem;
        s.ord = ord;
        out.push_back(std::move(s));
      }
    } else {
      require(pe.clusters.empty(), "component '" + e.name + "' carries clusters");
      if (e.fixed)
        require(std::abs(pe.x - e.fx) <= geo_tol && std::abs(pe.y - e.fy) <= geo_tol,
                "fixed element '" + e.name + "' was moved");
      Shape s;
      s.label = e.name;
      s.mass = e.mass;
      s.fixed = e.fixed;
      s.elem = static_cast<int>(&e - topo.elements.data());
      if (e.shape == ShapeKind::Rect) {
        s.is_rect = true;
        s.rect = Rect(e.w, e.h, pe.x, pe.y, pe.theta_deg);
      } else {
        s.is_rect = false;
        s.circle = Circle(e.r, pe.x, pe.y);
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

double rect_outside(const Rect& r, const DesignSpace& sp) {
  double worst = 0.0;
  for (const Vec2& c : r.corners()) {
    worst = std::max({worst, sp.x_min - c.x, c.x - sp.x_max, sp.y_min - c.y, c.y - sp.y_max});
  }
  return worst;
}

double circle_outside(const Circle& c, const DesignSpace& sp) {
  return std::max({0.0, sp.x_min - (c.x - c.r), (c.x + c.r) - sp.x_max, sp.y_min - (c.y - c.r),
                   (c.y + c.r) - sp.y_max});
}

bool pair_separated(const Shape& a, const Shape& b) {
  if (a.is_rect && b.is_rect) return rects_separated(a.rect, b.rect);
  if (a.is_rect) return rect_circle_separated(a.rect, b.circle);
  if (b.is_rect) return rect_circle_separated(b.rect, a.circle);
  return circles_separated(a.circle, b.circle);
}

double pair_penetration(const Shape& a, const Shape& b) {
  if (a.is_rect && b.is_rect) return rect_rect_penetration(a.rect, b.rect);
  if (a.is_rect) return rect_circle_penetration(a.rect, b.circle);
  if (b.is_rect) return rect_circle_penetration(b.rect, a.circle);
  return circle_circle_penetration(a.circle, b.circle);
}

// Support half-extent of r along a unit direction u.
double support_half(const Rect& r, Vec2 u) {
  return 0.5 * r.w * std::abs(u.dot(r.u1())) + 0.5 * r.h * std::abs(u.dot(r.u2()));
}

// Face abutment: along one axis of a the gap sits in [0, eps] (within
// geo_tol) while the other-axis projections overlap. The overlap must clear
// geo_tol so corner contact cannot sneak in on rounding dust.
bool abutting(const Rect& a, const Rect& b, double eps, double geo_tol) {
  const Vec2 v = b.center() - a.center();
  const Vec2 ax[2] = {a.u1(), a.u2()};
  const double half[2] = {0.5 * a.w, 0.5 * a.h};
  for (int k = 0; k < 2; ++k) {
    const double gap = std::abs(v.dot(ax[k])) - (half[k] + support_half(b, ax[k]));
    const double lat = (half[1 - k] + support_half(b, ax[1 - k])) - std::abs(v.dot(ax[1 - k]));
    if (gap >= -geo_tol && gap <= eps + geo_tol && lat > geo_tol) return true;
  }
  return false;
}

// Positive measure of how far a pair is from abutting, for violation records.
double abut_defect(const Rect& a, const Rect& b, double eps, double geo_tol) {
  const Vec2 v = b.center() - a.center();
  const Vec2 ax[2] = {a.u1(), a.u2()};
  const double half[2] = {0.5 * a.w, 0.5 * a.h};
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2; ++k) {
    const double gap = std::abs(v.dot(ax[k])) - (half[k] + support_half(b, ax[k]));
    const double lat = (half[1 - k] + support_half(b, ax[1 - k])) - std::abs(v.dot(ax[1 - k]));
    double d = 0.0;
    if (gap > eps) d = gap - eps;
    if (gap < 0.0) d = std::max(d, -gap);
    if (lat <= geo_tol) d = std::max(d, geo_tol - lat);
    best = std::min(best, d);
  }
  return std::max(best, 1e-9);
}

struct UnionFind {
  std::vector<int> up;
  explicit UnionFind(int n) : up(static_cast<size_t>(n)) {
    std::iota(up.begin(), up.end(), 0);
  }
  int find(int a) { return up[static_cast<size_t>(a)] == a ? a : up[static_cast<size_t>(a)] = find(up[static_cast<size_t>(a)]); }
  void join(int a, int b) { up[static_cast<size_t>(find(a))] = find(b); }
};

}  // namespace

double objective_of(const Placement& placement, const Topology& topo,
                    const VehicleParams& vehicle, const BuildOptions& options) {
  const std::vector<Shape> shapes = build_shapes(placement, topo, 1e-6);
  double m = vehicle.chassis_mass + vehicle.rider_mass;
  double sx = vehicle.chassis_mass * vehicle.chassis_x + vehicle.rider_mass * vehicle.rider_x;
  double sy = vehicle.chassis_mass * vehicle.chassis_y + vehicle.rider_mass * vehicle.rider_y;
  double mm_term = 0.0;
  for (const Shape& s : shapes) {
    const Vec2 c = s.center();
    m += s.mass;
    sx += s.mass * c.x;
    sy += s.mass * c.y;
    if (s.sub < 0 && topo.elements[static_cast<size_t>(s.elem)].type == ElemType::MM) {
      const double dx = c.x - options.rear_wheel_x;
      const double dy = c.y - options.rear_wheel_y;
      mm_term += (dx * dx + dy * dy) / (options.l_n_mm * options.l_n_mm);
    }
  }
  const double dx = sx / m - options.ideal_x;
  const double dy = sy / m - options.ideal_y;
  return (dx * dx + dy * dy) / (options.l_n * options.l_n) + mm_term;
}

VerificationReport verify(const Placement& placement, const Topology& topo,
                          const DesignSpace& space, const VehicleParams& vehicle,
                          const BuildOptions& options, const VerifyTolerances& tol) {
  const double eps =
      tol.epsilon_contiguity > 0.0 ? tol.epsilon_contiguity : options.epsilon_contiguity;
  const std::vector<Shape> shapes = build_shapes(placement, topo, tol.geo_tol);

  VerificationReport rep;
  for (const char* k :
       {"bounds", "overlap", "contiguity", "connectivity", "mass", "orientation", "objective"})
    rep.categories[k] = true;
  auto flag = [&](const std::string& cat, const std::string& subject, double magnitude,
                  std::string detail) {
    rep.categories[cat] = false;
    rep.violations.push_back({cat, subject, magnitude, std::move(detail)});
  };

  // Bounds: free outlines stay inside the design space; structurally fixed
  // elements (wheels, hub motors) may straddle it.
  for (const Shape& s : shapes) {
    if (s.fixed) continue;
    const double out =
        s.is_rect ? rect_outside(s.rect, space) : circle_outside(s.circle, space);
    if (out > tol.geo_tol)
      flag("bounds", s.label, out, "outline leaves the design space by " + std::to_string(out));
  }
  // The motor center box applies to a single free motor.
  int n_mm = 0;
  for (const ElementSpec& e : topo.elements)
    if (e.exists && !e.is_subsystem() && e.type == ElemType::MM) ++n_mm;
  const bool mm_box = options.mm_x_max > options.mm_x_min && options.mm_y_max > options.mm_y_min;
  if (n_mm == 1 && mm_box) {
    for (const Shape& s : shapes) {
      if (s.sub >= 0 || s.fixed || topo.elements[static_cast<size_t>(s.elem)].type != ElemType::MM)
        continue;
      const Vec2 c = s.center();
      const double out = std::max({0.0, options.mm_x_min - c.x, c.x - options.mm_x_max,
                                   options.mm_y_min - c.y, c.y - options.mm_y_max});
      if (out > tol.geo_tol)
        flag("bounds", s.label, out, "motor center leaves its box by " + std::to_string(out));
    }
  }

  // Pairwise separation. Fixed-fixed pairs are structural and skipped;
  // same-subsystem cluster pairs belong to the contiguity check.
  for (size_t i = 0; i < shapes.size(); ++i) {
    for (size_t j = i + 1; j < shapes.size(); ++j) {
      const Shape& a = shapes[i];
      const Shape& b = shapes[j];
      if (a.fixed && b.fixed) continue;
      const bool same_sub = a.sub >= 0 && a.sub == b.sub;
      if (same_sub) continue;
      if (!pair_separated(a, b)) {
        const double pen = std::max(pair_penetration(a, b), 1e-9);
        flag("overlap", a.label + "/" + b.label, pen,
             "penetration depth " + std::to_string(pen));
      }
    }
  }

  // Contiguity and connectivity per subsystem.
  for (size_t ei = 0; ei < topo.elements.size(); ++ei) {
    const ElementSpec& e = topo.elements[ei];
    if (!e.exists || !e.is_subsystem()) continue;
    std::vector<const Shape*> clusters;
    for (const Shape& s : shapes)
      if (s.sub == static_cast<int>(ei)) clusters.push_back(&s);
    UnionFind uf(static_cast<int>(clusters.size()));
    std::vector<bool> has_partner(clusters.size(), false);
    for (size_t i = 0; i < clusters.size(); ++i) {
      for (size_t j = i + 1; j < clusters.size(); ++j) {
        const Rect& ra = clusters[i]->rect;
        const Rect& rb = clusters[j]->rect;
        if (!rects_separated(ra, rb)) {
          const double pen = std::max(rect_rect_penetration(ra, rb), 1e-9);
          flag("contiguity", clusters[i]->label + "/" + clusters[j]->label, pen,
               "clusters overlap by " + std::to_string(pen));
        }
        if (abutting(ra, rb, eps, tol.geo_tol)) {
          rep.abutments[e.name].emplace_back(clusters[i]->ord, clusters[j]->ord);
          has_partner[i] = has_partner[j] = true;
          uf.join(static_cast<int>(i), static_cast<int>(j));
        }
      }
    }
    if (clusters.size() >= 2) {
      for (size_t i = 0; i < clusters.size(); ++i) {
        if (has_partner[i]) continue;
        double defect = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < clusters.size(); ++j)
          if (j != i)
            defect = std::min(defect,
                              abut_defect(clusters[i]->rect, clusters[j]->rect, eps, tol.geo_tol));
        flag("contiguity", clusters[i]->label, defect, "cluster abuts no other cluster");
      }
      int components = 0;
      for (size_t i = 0; i < clusters.size(); ++i)
        if (uf.find(static_cast<int>(i)) == static_cast<int>(i)) ++components;
      if (components > 1) {
        rep.warnings.push_back({"connectivity", e.name, static_cast<double>(components - 1),
                                "abutment graph splits into " + std::to_string(components) +
                                    " components"});
      }
    }

    // Mass equivalence: cluster modules must carry exactly the declared mass.
    double msum = 0.0;
    for (const Shape* s : clusters) msum += s->mass;
    const double mdiff = std::abs(msum - e.mass);
    if (mdiff > 1e-9 * std::max(1.0, e.mass))
      flag("mass", e.name, mdiff,
           "cluster masses sum to " + std::to_string(msum) + ", declared " +
               std::to_string(e.mass));

    // Orientation coupling: every cluster pair differs by a right angle or
    // none (modulo rectangle symmetry).
    for (size_t i = 0; i < clusters.size(); ++i) {
      for (size_t j = i + 1; j < clusters.size(); ++j) {
        const double da = std::abs(normalize_angle_deg(clusters[i]->rect.theta_deg) -
                                   normalize_angle_deg(clusters[j]->rect.theta_deg));
        const double rem = std::fmod(da, 90.0);
        const double dist = std::min(rem, 90.0 - rem);
        if (dist > 1e-6)
          flag("orientation", clusters[i]->label + "/" + clusters[j]->label, dist,
               "angle delta " + std::to_string(da) + " deg is not a multiple of 90");
      }
    }
  }

  rep.objective_recomputed = objective_of(placement, topo, vehicle, options);
  const double odiff = std::abs(placement.objective - rep.objective_recomputed);
  if (odiff > tol.objective_rel_tol * std::max(1.0, std::abs(rep.objective_recomputed)))
    flag("objective", "objective", odiff,
         "reported " + std::to_string(placement.objective) + ", recomputed " +
             std::to_string(rep.objective_recomputed));

  rep.pass = true;
  for (const auto& [k, ok] : rep.categories) rep.pass = rep.pass && ok;
  return rep;
}

std::string VerificationReport::summary() const {
  std::ostringstream os;
  os << (pass ? "PASS" : "FAIL");
  for (const auto& [k, ok] : categories) os << "  " << k << (ok ? ":ok" : ":FAIL");
  os << "\n";
  for (const Violation& v : violations)
    os << "  violation [" << v.category << "] " << v.subject << ": " << v.detail << "\n";
  for (const Violation& w : warnings)
    os << "  warning [" << w.category << "] " << w.subject << ": " << w.detail << "\n";
  return os.str();
}

}  // namespace moto2d
