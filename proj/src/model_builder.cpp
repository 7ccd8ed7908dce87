#include "moto2d/model_builder.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "moto2d/linearize.hpp"

namespace moto2d {

namespace {

// One candidate (width, height, mass) of a rectangular body. sel is invalid
// when the body has a single unconditional option.
struct DimOpt {
  VarId sel = kInvalidVar;
  double w = 0.0, h = 0.0, mass = 0.0;
  int n_b = 0;
};

// Uniform view of everything that occupies space: free/fixed components and
// subsystem clusters. Position is an expression so fixed bodies are constants.
struct Body {
  std::string name;
  bool is_rect = true;
  bool fixed = false;
  LinExpr x, y;
  std::vector<VarId> angle_sel;  // rects; empty means the angle is constant
  std::vector<double> angles;
  double fixed_angle = 0.0;
  std::vector<DimOpt> dims;  // rects, size >= 1
  double radius = 0.0;       // circles
  std::vector<VarId> proj_sel;  // circles; empty if no pair consults it
  std::vector<double> proj_deg;
  int elem = -1;      // topology element index
  int sub_elem = -1;  // owning subsystem element index (clusters only)
  int ord = 0;        // 1-based cluster ordinal
  int meta_cluster = -1;
};

// Structural skeleton shared by predict_model_size and assemble so the two
// walk identical body/pair lists.
struct Proto {
  bool is_rect = true;
  bool fixed = false;
  bool angle_selected = false;
  bool theta_p = false;
  int dim_count = 1;
  int elem = -1;
  int sub_elem = -1;
  int ord = 0;
};

bool pair_emitted(const Proto& a, const Proto& b) { return !(a.fixed && b.fixed); }

std::vector<Proto> proto_bodies(const Topology& topo, const DesignSpace& space) {
  std::vector<Proto> out;
  for (size_t ei = 0; ei < topo.elements.size(); ++ei) {
    const ElementSpec& e = topo.elements[ei];
    if (!e.exists) continue;
    if (e.is_subsystem()) {
      const int k = static_cast<int>(enumerate_arrangements(e, space).size());
      for (int i = 1; i <= e.n_com; ++i) {
        Proto p;
        p.is_rect = true;
        p.angle_selected = true;
        p.dim_count = k;
        p.elem = static_cast<int>(ei);
        p.sub_elem = static_cast<int>(ei);
        p.ord = i;
        out.push_back(p);
      }
    } else {
      Proto p;
      p.is_rect = e.shape == ShapeKind::Rect;
      p.fixed = e.fixed;
      p.angle_selected = p.is_rect && !e.fixed;
      p.elem = static_cast<int>(ei);
      out.push_back(p);
    }
  }
  // A circle needs its projected-angle one-hot when some separation pair
  // consults it: every rect pair does, and a circle pair reads the
  // lower-index circle's axis.
  for (size_t i = 0; i < out.size(); ++i) {
    if (out[i].is_rect) continue;
    for (size_t j = 0; j < out.size() && !out[i].theta_p; ++j) {
      if (j == i || !pair_emitted(out[i], out[j])) continue;
      if (out[j].is_rect || j > i) out[i].theta_p = true;
    }
  }
  return out;
}

void check_scheme(const AngleScheme& scheme) {
  if (scheme.n_a < 2 || scheme.n_a % 2 != 0)
    throw BuildError("angle_scheme", "N_a must be even and at least 2");
  if (scheme.n_pa < 2) throw BuildError("angle_scheme", "N_pa must be at least 2");
  if (static_cast<int>(scheme.rect_angles_deg.size()) != scheme.n_a ||
      static_cast<int>(scheme.projected_angles_deg.size()) != scheme.n_pa)
    throw BuildError("angle_scheme", "angle lists do not match N_a / N_pa");
}

// Structural validation beyond per-element invariants: arrangement sets must
// exist, module masses must tile the subsystem mass exactly (the module-count
// equivalence row assumes it), and some grid combination must reach N_sub.
void check_subsystems(const Topology& topo, const DesignSpace& space) {
  for (const ElementSpec& e : topo.elements) {
    if (!e.exists || !e.is_subsystem()) continue;
    const std::vector<Arrangement> arr = enumerate_arrangements(e, space);
    if (arr.empty()) throw BuildError(e.name, "no module arrangement fits the design space");
    if (std::abs(e.n_sub * e.sub_mass - e.mass) > 1e-9 * std::max(1.0, e.mass))
      throw BuildError(e.name, "subsystem mass must equal n_sub * sub_mass");
    std::vector<char> reach(static_cast<size_t>(e.n_sub) + 1, 0);
    reach[0] = 1;
    for (int c = 0; c < e.n_com; ++c) {
      std::vector<char> next(reach.size(), 0);
      for (size_t s = 0; s < reach.size(); ++s) {
        if (!reach[s]) continue;
        for (const Arrangement& a : arr)
          if (s + static_cast<size_t>(a.n_b) < next.size()) next[s + a.n_b] = 1;
      }
      reach.swap(next);
    }
    if (!reach[static_cast<size_t>(e.n_sub)])
      throw BuildError(e.name, "no combination of module grids distributes " +
                                   std::to_string(e.n_sub) + " modules over " +
                                   std::to_string(e.n_com) + " clusters");
  }
}

struct Ctx {
  ModelBuild& b;
  const DesignSpace& space;
  const AngleScheme& scheme;
  const BuildOptions& options;
  std::vector<Body> bodies;
  // Projections of same-subsystem cluster pairs, reused by the contiguity
  // rows: [0..1] axes of the lower body, [2..3] axes of the higher.
  std::map<std::pair<int, int>, std::array<LinExpr, 4>> cluster_proj;
};

LinExpr dim_expr(const Body& r, bool width, double scale) {
  if (r.dims.size() == 1) return LinExpr(scale * (width ? r.dims[0].w : r.dims[0].h));
  LinExpr e;
  for (const DimOpt& d : r.dims) e.add_term(d.sel, scale * (width ? d.w : d.h));
  return e;
}

double proj_bound(const Ctx& c, const LinExpr& vx, const LinExpr& vy) {
  const Interval rx = vx.range(c.b.model().vars);
  const Interval ry = vy.range(c.b.model().vars);
  return std::hypot(rx.max_abs(), ry.max_abs()) + 1e-6;
}

// v projected on the body's axis (1: u1, 2: u2). A selected angle goes
// through a selector gadget and is materialized into one bounded variable so
// downstream big-M sizes see the true |v| bound, not the sum of per-angle
// auxiliary ranges.
LinExpr projection(Ctx& c, const Body& r, int axis, const LinExpr& vx, const LinExpr& vy,
                   const std::string& name) {
  if (r.angle_sel.empty()) {
    const double ca = cos_deg(r.fixed_angle);
    const double sa = sin_deg(r.fixed_angle);
    return axis == 1 ? vx * ca + vy * sa : vx * -sa + vy * ca;
  }
  std::vector<LinExpr> vals;
  vals.reserve(r.angles.size());
  for (double a : r.angles) {
    const double ca = cos_deg(a);
    const double sa = sin_deg(a);
    vals.push_back(axis == 1 ? vx * ca + vy * sa : vx * -sa + vy * ca);
  }
  const LinExpr sel = c.b.selector_value(r.angle_sel, vals, name + ".sel");
  const double bound = proj_bound(c, vx, vy);
  const VarId p = c.b.add_continuous(name, -bound, bound);
  c.b.add_constraint(LinExpr::variable(p) - sel, Relation::Equal, 0.0, name + ".def");
  return LinExpr::variable(p);
}

// |cos(theta_b - theta_a)| and |sin(theta_b - theta_a)| as one affine pair;
// AND binaries are shared between the two and across every use in the pair.
std::pair<LinExpr, LinExpr> trig_abs_pair(Ctx& c, const Body& a, const Body& b) {
  LinExpr ce, se;
  if (!a.angle_sel.empty() && !b.angle_sel.empty()) {
    for (size_t i = 0; i < a.angle_sel.size(); ++i) {
      for (size_t j = 0; j < b.angle_sel.size(); ++j) {
        const VarId both = c.b.and_binary(a.angle_sel[i], b.angle_sel[j]);
        const double d = b.angles[j] - a.angles[i];
        ce.add_term(both, std::abs(cos_deg(d)));
        se.add_term(both, std::abs(sin_deg(d)));
      }
    }
  } else if (!a.angle_sel.empty()) {
    for (size_t i = 0; i < a.angle_sel.size(); ++i) {
      const double d = b.fixed_angle - a.angles[i];
      ce.add_term(a.angle_sel[i], std::abs(cos_deg(d)));
      se.add_term(a.angle_sel[i], std::abs(sin_deg(d)));
    }
  } else if (!b.angle_sel.empty()) {
    for (size_t j = 0; j < b.angle_sel.size(); ++j) {
      const double d = b.angles[j] - a.fixed_angle;
      ce.add_term(b.angle_sel[j], std::abs(cos_deg(d)));
      se.add_term(b.angle_sel[j], std::abs(sin_deg(d)));
    }
  } else {
    const double d = b.fixed_angle - a.fixed_angle;
    ce = LinExpr(std::abs(cos_deg(d)));
    se = LinExpr(std::abs(sin_deg(d)));
  }
  return {ce, se};
}

// The four-row disjunction block, once per dimension option of whichever body
// owns the trig-scaled dims; rows of unselected options are released by a
// slack sized to dominate every row's own big-M.
void disjunction_over_dims(Ctx& c, const LinExpr& a, const Body& trig_owner,
                           const LinExpr& lin_dims, const LinExpr& tw, const LinExpr& th,
                           double shrink, VarId sgn, VarId suc, const std::string& name) {
  for (size_t s = 0; s < trig_owner.dims.size(); ++s) {
    const DimOpt& d = trig_owner.dims[s];
    const LinExpr b = lin_dims + (0.5 * d.w) * tw + (0.5 * d.h) * th - shrink;
    if (d.sel == kInvalidVar) {
      c.b.abs_disjunction_rows(a, b, sgn, suc, LinExpr(), name);
    } else {
      const double ms =
          std::max(c.b.size_big_m(a - b), c.b.size_big_m(a + b));
      const LinExpr slack = LinExpr(ms) - LinExpr::variable(d.sel, ms);
      c.b.abs_disjunction_rows(a, b, sgn, suc, slack, name + ".s" + std::to_string(s));
    }
  }
}

void emit_rect_rect(Ctx& c, int bi, int bj) {
  Body& a = c.bodies[bi];
  Body& b = c.bodies[bj];
  const bool same_sub = a.sub_elem >= 0 && a.sub_elem == b.sub_elem;
  const std::string pn = "sep." + a.name + "." + b.name;
  const LinExpr vx = b.x - a.x;
  const LinExpr vy = b.y - a.y;
  std::array<LinExpr, 4> p = {projection(c, a, 1, vx, vy, pn + ".pa1"),
                              projection(c, a, 2, vx, vy, pn + ".pa2"),
                              projection(c, b, 1, vx, vy, pn + ".pb1"),
                              projection(c, b, 2, vx, vy, pn + ".pb2")};
  const auto [ce, se] = trig_abs_pair(c, a, b);

  // Condition i: projection onto one face normal exceeds the owner's half
  // dimension (linear in its selection) plus the other body's trig-scaled
  // half extents. 1/2 use a's axes, 3/4 use b's.
  struct Cond {
    int axis;
    const Body* lin;
    bool lin_w;
    const Body* trig;
    bool cos_on_w;
  };
  const Cond conds[4] = {{0, &a, true, &b, true},
                         {1, &a, false, &b, false},
                         {2, &b, true, &a, true},
                         {3, &b, false, &a, false}};
  LinExpr suc_sum;
  for (int ci = 0; ci < 4; ++ci) {
    const Cond& cd = conds[ci];
    const std::string cn = pn + ".c" + std::to_string(ci + 1);
    const VarId sgn = c.b.add_binary(cn + "_sgn");
    const VarId suc = c.b.add_binary(cn + "_suc");
    suc_sum += LinExpr::variable(suc);
    const LinExpr lin = dim_expr(*cd.lin, cd.lin_w, 0.5);
    const LinExpr& tw = cd.cos_on_w ? ce : se;
    const LinExpr& th = cd.cos_on_w ? se : ce;
    disjunction_over_dims(c, p[cd.axis], *cd.trig, lin, tw, th, 0.0, sgn, suc, cn);
  }
  c.b.add_constraint(suc_sum, Relation::GreaterEq, 1.0, pn + ".any");
  if (same_sub) c.cluster_proj.emplace(std::make_pair(bi, bj), std::move(p));
}

void emit_rect_circle(Ctx& c, Body& r, Body& z, const std::string& pn) {
  const LinExpr vx = z.x - r.x;
  const LinExpr vy = z.y - r.y;
  const LinExpr p1 = projection(c, r, 1, vx, vy, pn + ".p1");
  const LinExpr p2 = projection(c, r, 2, vx, vy, pn + ".p2");
  // Projection of v, rotated into the rect frame, onto the selected axis.
  std::vector<LinExpr> vals;
  vals.reserve(z.proj_deg.size());
  for (double a : z.proj_deg) vals.push_back(p1 * cos_deg(a) + p2 * sin_deg(a));
  const LinExpr sel = c.b.selector_value(z.proj_sel, vals, pn + ".axis");
  const double bound = proj_bound(c, vx, vy);
  const VarId av = c.b.add_continuous(pn + ".a", -bound, bound);
  c.b.add_constraint(LinExpr::variable(av) - sel, Relation::Equal, 0.0, pn + ".a_def");
  LinExpr cp, sp;
  for (size_t k = 0; k < z.proj_sel.size(); ++k) {
    cp.add_term(z.proj_sel[k], std::abs(cos_deg(z.proj_deg[k])));
    sp.add_term(z.proj_sel[k], std::abs(sin_deg(z.proj_deg[k])));
  }
  const VarId sgn = c.b.add_binary(pn + "_sgn");
  const VarId suc = c.b.add_binary(pn + "_suc");
  disjunction_over_dims(c, LinExpr::variable(av), r, LinExpr(z.radius), cp, sp, 0.0, sgn, suc,
                        pn);
  c.b.add_constraint(LinExpr::variable(suc), Relation::GreaterEq, 1.0, pn + ".any");
}

void emit_circle_circle(Ctx& c, Body& a, Body& b, const std::string& pn) {
  const LinExpr vx = b.x - a.x;
  const LinExpr vy = b.y - a.y;
  std::vector<LinExpr> vals;
  vals.reserve(a.proj_deg.size());
  for (double ang : a.proj_deg) vals.push_back(vx * cos_deg(ang) + vy * sin_deg(ang));
  const LinExpr sel = c.b.selector_value(a.proj_sel, vals, pn + ".axis");
  const double bound = proj_bound(c, vx, vy);
  const VarId av = c.b.add_continuous(pn + ".a", -bound, bound);
  c.b.add_constraint(LinExpr::variable(av) - sel, Relation::Equal, 0.0, pn + ".a_def");
  const VarId sgn = c.b.add_binary(pn + "_sgn");
  const VarId suc = c.b.add_binary(pn + "_suc");
  c.b.abs_disjunction_rows(LinExpr::variable(av), LinExpr(a.radius + b.radius), sgn, suc,
                           LinExpr(), pn);
  c.b.add_constraint(LinExpr::variable(suc), Relation::GreaterEq, 1.0, pn + ".any");
}

// One proximity row of the contiguity block, deactivated by the inactive
// orientation case and, when present, by an unselected chain link.
void eq16_row(Ctx& c, LinExpr base, double rhs, const LinExpr& gate, const LinExpr* link_gate,
              const std::string& name) {
  const double m = c.b.size_big_m(base - rhs);
  base -= m * gate;
  if (link_gate) base -= m * *link_gate;
  c.b.add_constraint(std::move(base), Relation::LessEq, rhs, name);
}

// Contiguity for a cluster pair: delta_s picks the touching axis of d. There
// |proj| is capped at S + eps with S the sum of half extents, and the
// separation rows supply |proj| >= S, so the face gap lands in [0, eps]. On
// the other axis |proj| <= S - eps/2 forces a lateral overlap. Caps bound
// both signs, which rules out corner contact. The orientation indicator picks
// which of z's dims face which axis of d.
void emit_eq16(Ctx& c, const Body& d, const Body& z, const LinExpr& pd1, const LinExpr& pd2,
               VarId ori, const LinExpr* link_gate, const std::string& pn) {
  const double eps = c.options.epsilon_contiguity;
  const VarId ds = c.b.add_binary(pn + "_axis", 50);
  // Extra slack granted to the lateral cap when the axis is the touching one.
  const LinExpr lift1 = (LinExpr(1.0) - LinExpr::variable(ds)) * (1.5 * eps);
  const LinExpr lift2 = LinExpr::variable(ds) * (1.5 * eps);
  for (int cs = 0; cs < 2; ++cs) {
    const bool same = cs == 0;
    const LinExpr l1 = dim_expr(z, same, 1.0);   // along u1_d: w_z if same else h_z
    const LinExpr l2 = dim_expr(z, !same, 1.0);  // along u2_d: h_z if same else w_z
    const LinExpr s1 = dim_expr(d, true, 0.5) + 0.5 * l1;
    const LinExpr s2 = dim_expr(d, false, 0.5) + 0.5 * l2;
    const LinExpr gate =
        same ? LinExpr(1.0) - LinExpr::variable(ori) : LinExpr::variable(ori);
    const std::string sn = pn + (same ? ".same" : ".perp");
    eq16_row(c, pd1 - s1 + lift1, eps, gate, link_gate, sn + ".u1p");
    eq16_row(c, -pd1 - s1 + lift1, eps, gate, link_gate, sn + ".u1n");
    eq16_row(c, pd2 - s2 + lift2, eps, gate, link_gate, sn + ".u2p");
    eq16_row(c, -pd2 - s2 + lift2, eps, gate, link_gate, sn + ".u2n");
  }
}

}  // namespace

ModelSizePrediction predict_model_size(const Topology& topo, const DesignSpace& space,
                                       const AngleScheme& scheme) {
  validate_topology(topo, space);
  check_scheme(scheme);
  check_subsystems(topo, space);
  const int na = scheme.n_a;
  const int npa = scheme.n_pa;
  const std::vector<Proto> bodies = proto_bodies(topo, space);

  ModelSizePrediction out;
  int& cv = out.continuous_vars;
  int& bv = out.binary_vars;
  int& rows = out.constraints;

  for (const Proto& p : bodies) {
    if (!p.fixed) cv += 2;
    if (p.angle_selected) {
      bv += na;
      rows += 1;
    }
    if (p.theta_p) {
      bv += npa;
      rows += 1;
    }
    if (p.sub_elem >= 0 && p.dim_count >= 2) {
      bv += p.dim_count;
      rows += 1;
    }
  }

  for (size_t i = 0; i < bodies.size(); ++i) {
    for (size_t j = i + 1; j < bodies.size(); ++j) {
      const Proto& a = bodies[i];
      const Proto& b = bodies[j];
      if (!pair_emitted(a, b)) continue;
      const int proj_cost_cv = 2 * (na + 1);
      const int proj_cost_rows = 2 * (4 * na + 1);
      if (a.is_rect && b.is_rect) {
        if (a.angle_selected) {
          cv += proj_cost_cv;
          rows += proj_cost_rows;
        }
        if (b.angle_selected) {
          cv += proj_cost_cv;
          rows += proj_cost_rows;
        }
        if (a.angle_selected && b.angle_selected) {
          bv += na * na;
          rows += 3 * na * na;
        }
        bv += 8;
        rows += 8 * (a.dim_count + b.dim_count) + 1;
      } else if (a.is_rect || b.is_rect) {
        const Proto& r = a.is_rect ? a : b;
        if (r.angle_selected) {
          cv += proj_cost_cv;
          rows += proj_cost_rows;
        }
        cv += npa + 1;
        rows += 4 * npa + 1;
        bv += 2;
        rows += 4 * r.dim_count + 1;
      } else {
        cv += npa + 1;
        rows += 4 * npa + 1;
        bv += 2;
        rows += 4 + 1;
      }
    }
  }

  for (const ElementSpec& e : topo.elements) {
    if (!e.exists || !e.is_subsystem()) continue;
    const int n = e.n_com;
    rows += 1;  // module-count equivalence
    for (int i = 3; i <= n; ++i) {
      bv += i - 1;
      rows += 1;
    }
    const int pairs = n * (n - 1) / 2;
    bv += pairs * 2;               // orientation indicator + touching axis pick
    rows += pairs * (na + 2 + 8);  // coupling, indicator rows, contiguity rows
    rows += n - 1;                 // lexicographic symmetry break
  }

  cv += 2;   // CoG
  rows += 2;
  for (const Proto& p : bodies) {
    if (p.sub_elem >= 0 && p.dim_count >= 2) {
      cv += 2 * p.dim_count;
      rows += 8 * p.dim_count;
    }
  }
  return out;
}

MiqpModel assemble(const Topology& topo, const DesignSpace& space, const AngleScheme& scheme,
                   const VehicleParams& vehicle, const BuildOptions& options) {
  validate_topology(topo, space);
  check_scheme(scheme);
  check_subsystems(topo, space);
  try {
    vehicle.validate();
  } catch (const std::invalid_argument& e) {
    throw BuildError("vehicle", e.what());
  }
  if (!(options.l_n > 0.0) || !(options.l_n_mm > 0.0))
    throw BuildError("options", "normalization lengths must be positive");
  if (!(options.epsilon_contiguity > 0.0))
    throw BuildError("options", "contiguity tolerance must be positive");
  for (const ElementSpec& e : topo.elements)
    if (e.exists && e.is_subsystem() &&
        options.epsilon_contiguity >= std::min(e.sub_w, e.sub_h))
      throw BuildError(e.name, "contiguity tolerance must be below the module dims");
  const bool mm_box = options.mm_x_max > options.mm_x_min && options.mm_y_max > options.mm_y_min;

  MiqpModel model;
  ModelBuild build(model);
  Ctx c{build, space, scheme, options, {}, {}};
  const std::vector<Proto> protos = proto_bodies(topo, space);

  // Bodies and their own variables, in element order.
  for (const Proto& p : protos) {
    const ElementSpec& e = topo.elements[static_cast<size_t>(p.elem)];
    Body body;
    body.is_rect = p.is_rect;
    body.fixed = p.fixed;
    body.elem = p.elem;
    body.sub_elem = p.sub_elem;
    body.ord = p.ord;
    body.name = p.sub_elem >= 0 ? e.name + ".c" + std::to_string(p.ord) : e.name;
    if (p.fixed) {
      body.x = LinExpr(e.fx);
      body.y = LinExpr(e.fy);
      body.fixed_angle = normalize_angle_deg(e.fixed_theta_deg);
    } else {
      double xlo = space.x_min, xhi = space.x_max, ylo = space.y_min, yhi = space.y_max;
      if (e.type == ElemType::MM && mm_box) {
        xlo = std::max(xlo, options.mm_x_min);
        xhi = std::min(xhi, options.mm_x_max);
        ylo = std::max(ylo, options.mm_y_min);
        yhi = std::min(yhi, options.mm_y_max);
        if (xlo > xhi || ylo > yhi)
          throw BuildError(e.name, "MM box does not intersect the design space");
      }
      body.x = LinExpr::variable(c.b.add_continuous(body.name + ".x", xlo, xhi));
      body.y = LinExpr::variable(c.b.add_continuous(body.name + ".y", ylo, yhi));
    }
    if (p.angle_selected) {
      for (int k = 0; k < scheme.n_a; ++k)
        body.angle_sel.push_back(c.b.add_binary(body.name + ".th" + std::to_string(k), 80));
      body.angles = scheme.rect_angles_deg;
      c.b.add_one_hot(body.angle_sel, body.name + ".th.onehot");
    }
    if (p.theta_p) {
      for (int k = 0; k < scheme.n_pa; ++k)
        body.proj_sel.push_back(c.b.add_binary(body.name + ".pr" + std::to_string(k), 70));
      body.proj_deg = scheme.projected_angles_deg;
      c.b.add_one_hot(body.proj_sel, body.name + ".pr.onehot");
    }
    if (p.is_rect) {
      if (p.sub_elem >= 0) {
        const std::vector<Arrangement> arr = enumerate_arrangements(e, space);
        std::vector<VarId> sel;
        for (size_t s = 0; s < arr.size(); ++s) {
          DimOpt d{kInvalidVar, arr[s].w, arr[s].h, arr[s].mass, arr[s].n_b};
          if (arr.size() >= 2) {
            d.sel = c.b.add_binary(body.name + ".arr" + std::to_string(s), 90);
            sel.push_back(d.sel);
          }
          body.dims.push_back(d);
        }
        if (!sel.empty()) c.b.add_one_hot(sel, body.name + ".arr.onehot");
      } else {
        body.dims.push_back({kInvalidVar, e.w, e.h, e.mass});
      }
    } else {
      body.radius = e.r;
    }
    c.bodies.push_back(std::move(body));
  }

  // Pairwise separation. Pairs of two fixed bodies are exempt: their overlap
  // state is decided by the input (the hub motor sits inside the rear wheel).
  for (size_t i = 0; i < c.bodies.size(); ++i) {
    for (size_t j = i + 1; j < c.bodies.size(); ++j) {
      Body& a = c.bodies[i];
      Body& b = c.bodies[j];
      if (a.fixed && b.fixed) continue;
      if (a.is_rect && b.is_rect) {
        emit_rect_rect(c, static_cast<int>(i), static_cast<int>(j));
      } else {
        const std::string pn = "sep." + a.name + "." + b.name;
        if (a.is_rect || b.is_rect) {
          emit_rect_circle(c, a.is_rect ? a : b, a.is_rect ? b : a, pn);
        } else {
          emit_circle_circle(c, a, b, pn);
        }
      }
    }
  }

  // Cluster blocks, one subsystem at a time.
  for (size_t ei = 0; ei < topo.elements.size(); ++ei) {
    const ElementSpec& e = topo.elements[ei];
    if (!e.exists || !e.is_subsystem()) continue;
    std::vector<int> members;
    for (size_t bi = 0; bi < c.bodies.size(); ++bi)
      if (c.bodies[bi].sub_elem == static_cast<int>(ei)) members.push_back(static_cast<int>(bi));
    const int n = static_cast<int>(members.size());

    LinExpr modules;
    for (int bi : members)
      for (const DimOpt& d : c.bodies[static_cast<size_t>(bi)].dims) {
        if (d.sel == kInvalidVar)
          modules += LinExpr(static_cast<double>(d.n_b));
        else
          modules.add_term(d.sel, static_cast<double>(d.n_b));
      }
    c.b.add_constraint(std::move(modules), Relation::Equal, static_cast<double>(e.n_sub),
                       e.name + ".modules");

    // Chain links: cluster 2 abuts cluster 1 unconditionally; cluster i >= 3
    // abuts exactly one earlier cluster, chosen by a one-hot.
    std::map<std::pair<int, int>, VarId> link;
    for (int i = 3; i <= n; ++i) {
      std::vector<VarId> group;
      for (int j = 1; j < i; ++j) {
        const VarId v = c.b.add_binary(e.name + ".link." + std::to_string(i) + "." +
                                           std::to_string(j),
                                       60);
        link.emplace(std::make_pair(i, j), v);
        group.push_back(v);
      }
      c.b.add_one_hot(group, e.name + ".link." + std::to_string(i) + ".onehot");
    }

    for (int jo = 1; jo < n; ++jo) {
      for (int io = 0; io < jo; ++io) {
        const int bi = members[static_cast<size_t>(io)];
        const int bj = members[static_cast<size_t>(jo)];
        const Body& lo = c.bodies[static_cast<size_t>(bi)];
        const Body& hi = c.bodies[static_cast<size_t>(bj)];
        const std::string pn = "clu." + lo.name + "." + hi.name;

        // Orientations equal or perpendicular.
        for (int k = 0; k < scheme.n_a; ++k) {
          const int kp = c.scheme.perp_index(k);
          c.b.add_constraint(LinExpr::variable(lo.angle_sel[static_cast<size_t>(k)]) -
                                 LinExpr::variable(hi.angle_sel[static_cast<size_t>(k)]) -
                                 LinExpr::variable(hi.angle_sel[static_cast<size_t>(kp)]),
                             Relation::LessEq, 0.0, pn + ".ori_couple" + std::to_string(k));
        }

        // Indicator: 1 iff the two one-hots select the same angle.
        const VarId ori = c.b.add_binary(pn + "_ori", 50);
        LinExpr same_sum;
        for (int k = 0; k < scheme.n_a; ++k)
          same_sum += LinExpr::variable(c.b.and_binary(
              lo.angle_sel[static_cast<size_t>(k)], hi.angle_sel[static_cast<size_t>(k)]));
        c.b.add_constraint(2.0 * same_sum - LinExpr::variable(ori), Relation::LessEq, 1.0,
                           pn + ".ori_hi");
        c.b.add_constraint(same_sum - LinExpr::variable(ori), Relation::GreaterEq, 0.0,
                           pn + ".ori_lo");

        LinExpr link_gate;
        const LinExpr* gate = nullptr;
        if (jo + 1 >= 3) {
          link_gate = LinExpr(1.0) - LinExpr::variable(link.at({jo + 1, io + 1}));
          gate = &link_gate;
        }
        // Delta theta in {0, 90} keeps both clusters on lo's axes, so one
        // symmetric contiguity block covers the pair.
        const auto& proj = c.cluster_proj.at({bi, bj});
        emit_eq16(c, lo, hi, proj[0], proj[1], ori, gate, pn + ".near");
      }
    }

    // Approximate lexicographic (x, y) order over cluster centers.
    for (int i = 0; i + 1 < n; ++i) {
      const Body& lo = c.bodies[static_cast<size_t>(members[static_cast<size_t>(i)])];
      const Body& hi = c.bodies[static_cast<size_t>(members[static_cast<size_t>(i + 1)])];
      c.b.add_constraint(lo.x + lo.y * (1.0 / 1024.0) - hi.x - hi.y * (1.0 / 1024.0),
                         Relation::LessEq, 0.0,
                         e.name + ".sym" + std::to_string(i + 1));
    }
  }

  // Center of gravity: m_total * cog = sum of mass-weighted centers. Cluster
  // mass depends on the selected arrangement, so those products go through
  // the per-binary selector gadget.
  double total_mass = vehicle.chassis_mass + vehicle.rider_mass;
  for (const ElementSpec& e : topo.elements)
    if (e.exists) total_mass += e.mass;

  LinExpr sum_x(vehicle.chassis_mass * vehicle.chassis_x + vehicle.rider_mass * vehicle.rider_x);
  LinExpr sum_y(vehicle.chassis_mass * vehicle.chassis_y + vehicle.rider_mass * vehicle.rider_y);
  for (const Body& body : c.bodies) {
    if (body.sub_elem < 0) {
      const double m = topo.elements[static_cast<size_t>(body.elem)].mass;
      sum_x += m * body.x;
      sum_y += m * body.y;
    } else if (body.dims.size() == 1) {
      sum_x += body.dims[0].mass * body.x;
      sum_y += body.dims[0].mass * body.y;
    } else {
      std::vector<VarId> sel;
      std::vector<LinExpr> vx, vy;
      for (const DimOpt& d : body.dims) {
        sel.push_back(d.sel);
        vx.push_back(d.mass * body.x);
        vy.push_back(d.mass * body.y);
      }
      sum_x += c.b.selector_value(sel, vx, body.name + ".mx");
      sum_y += c.b.selector_value(sel, vy, body.name + ".my");
    }
  }
  const Interval rx = sum_x.range(model.vars);
  const Interval ry = sum_y.range(model.vars);
  const VarId x_cog = c.b.add_continuous("cog.x", rx.lo / total_mass - 1e-6,
                                         rx.hi / total_mass + 1e-6);
  const VarId y_cog = c.b.add_continuous("cog.y", ry.lo / total_mass - 1e-6,
                                         ry.hi / total_mass + 1e-6);
  c.b.add_constraint(LinExpr::variable(x_cog, total_mass) - sum_x, Relation::Equal, 0.0,
                     "cog.x.def");
  c.b.add_constraint(LinExpr::variable(y_cog, total_mass) - sum_y, Relation::Equal, 0.0,
                     "cog.y.def");

  const double wn = 1.0 / (options.l_n * options.l_n);
  model.add_squared_objective(LinExpr::variable(x_cog) - options.ideal_x, wn);
  model.add_squared_objective(LinExpr::variable(y_cog) - options.ideal_y, wn);
  int n_mm = 0;
  const double wm = 1.0 / (options.l_n_mm * options.l_n_mm);
  for (const Body& body : c.bodies) {
    if (topo.elements[static_cast<size_t>(body.elem)].type != ElemType::MM || body.sub_elem >= 0)
      continue;
    ++n_mm;
    model.add_squared_objective(body.x - options.rear_wheel_x, wm);
    model.add_squared_objective(body.y - options.rear_wheel_y, wm);
  }

  // Metadata for decoding, verification and reporting.
  ModelMeta& meta = model.meta;
  for (size_t ei = 0; ei < topo.elements.size(); ++ei) {
    const ElementSpec& e = topo.elements[ei];
    if (!e.exists) continue;
    ElementMeta em;
    em.name = e.name;
    em.type = e.type;
    em.shape = e.is_subsystem() ? ShapeKind::Subsystem : e.shape;
    em.w = e.w;
    em.h = e.h;
    em.r = e.r;
    em.mass = e.mass;
    em.fixed = e.fixed;
    em.fx = e.fx;
    em.fy = e.fy;
    if (e.is_subsystem()) {
      SubsystemMeta sm;
      sm.name = e.name;
      sm.n_sub = e.n_sub;
      sm.sub_w = e.sub_w;
      sm.sub_h = e.sub_h;
      sm.sub_mass = e.sub_mass;
      sm.total_mass = e.mass;
      for (size_t bi = 0; bi < c.bodies.size(); ++bi) {
        Body& body = c.bodies[bi];
        if (body.sub_elem != static_cast<int>(ei)) continue;
        ClusterMeta cm;
        cm.subsystem = e.name;
        cm.index = body.ord;
        cm.x = body.x.terms().front().var;
        cm.y = body.y.terms().front().var;
        cm.angle_sel = body.angle_sel;
        cm.angles_deg = body.angles;
        for (const DimOpt& d : body.dims)
          if (d.sel != kInvalidVar) cm.arr_sel.push_back(d.sel);
        cm.arrangements = enumerate_arrangements(e, space);
        sm.cluster_ids.push_back(static_cast<int>(meta.clusters.size()));
        body.meta_cluster = static_cast<int>(meta.clusters.size());
        meta.clusters.push_back(std::move(cm));
      }
      meta.subsystems.push_back(std::move(sm));
    } else {
      for (const Body& body : c.bodies) {
        if (body.elem != static_cast<int>(ei)) continue;
        if (!body.fixed) {
          em.x = body.x.terms().front().var;
          em.y = body.y.terms().front().var;
        }
        if (body.is_rect) {
          em.angle_sel = body.angle_sel;
          em.angles_deg =
              body.angle_sel.empty() ? std::vector<double>{body.fixed_angle} : body.angles;
        } else {
          em.angle_sel = body.proj_sel;
          em.angles_deg = body.proj_deg;
        }
        break;
      }
    }
    meta.elements.push_back(std::move(em));
  }
  meta.x_cog = x_cog;
  meta.y_cog = y_cog;
  meta.total_mass = total_mass;
  meta.chassis_mass = vehicle.chassis_mass;
  meta.chassis_x = vehicle.chassis_x;
  meta.chassis_y = vehicle.chassis_y;
  meta.rider_mass = vehicle.rider_mass;
  meta.rider_x = vehicle.rider_x;
  meta.rider_y = vehicle.rider_y;
  meta.l_n = options.l_n;
  meta.l_n_mm = options.l_n_mm;
  meta.n_mm = n_mm;
  meta.ideal_x = options.ideal_x;
  meta.ideal_y = options.ideal_y;
  meta.rear_wx = options.rear_wheel_x;
  meta.rear_wy = options.rear_wheel_y;
  meta.epsilon_contiguity = options.epsilon_contiguity;
  return model;
}

}  // namespace moto2d
