#include "moto2d/placement.hpp"

#include <cmath>
#include <cstdlib>

namespace moto2d {

namespace {

double norm_deg(double a) {
  a = std::fmod(a, 360.0);
  if (a < 0.0) a += 360.0;
  return a;
}

size_t argmax(const std::vector<VarId>& sel, const std::vector<double>& sol) {
  size_t best = 0;
  double bv = -1.0;
  for (size_t k = 0; k < sel.size(); ++k) {
    const double v = sol[static_cast<size_t>(sel[k])];
    if (v > bv) {
      bv = v;
      best = k;
    }
  }
  return best;
}

double selected_angle(const std::vector<VarId>& sel, const std::vector<double>& angles,
                      const std::vector<double>& sol) {
  if (sel.empty()) return angles.empty() ? 0.0 : angles.front();
  return angles[argmax(sel, sol)];
}

// Collapse a variable's bounds onto a required value; false when the value
// falls outside them.
bool pin(MiqpModel& m, VarId id, double v, double tol = 1e-9) {
  VarInfo& vi = m.vars.info(id);
  if (v < vi.lb - tol || v > vi.ub + tol) return false;
  const double c = std::min(std::max(v, vi.lb), vi.ub);
  vi.lb = vi.ub = c;
  return true;
}

bool pin_onehot(MiqpModel& m, const std::vector<VarId>& sel, size_t chosen) {
  for (size_t k = 0; k < sel.size(); ++k)
    if (!pin(m, sel[k], k == chosen ? 1.0 : 0.0)) return false;
  return true;
}

// Index of the entry matching `deg` modulo full turns, or npos.
size_t angle_index(const std::vector<double>& angles, double deg) {
  for (size_t k = 0; k < angles.size(); ++k)
    if (std::abs(norm_deg(angles[k]) - norm_deg(deg)) < 1e-6) return k;
  return static_cast<size_t>(-1);
}

size_t arrangement_index(const std::vector<Arrangement>& arrs, const Arrangement& want) {
  for (size_t k = 0; k < arrs.size(); ++k)
    if (arrs[k].n_w == want.n_w && arrs[k].n_h == want.n_h) return k;
  return static_cast<size_t>(-1);
}

}  // namespace

Placement decode_placement(const MiqpModel& model, const std::vector<double>& solution) {
  if (static_cast<VarId>(solution.size()) != model.vars.size())
    throw BuildError("placement", "solution vector size mismatch");
  Placement out;
  const ModelMeta& meta = model.meta;
  for (const ElementMeta& em : meta.elements) {
    PlacedElement pe;
    pe.name = em.name;
    if (em.shape == ShapeKind::Subsystem) {
      const SubsystemMeta* sm = nullptr;
      for (const SubsystemMeta& s : meta.subsystems)
        if (s.name == em.name) sm = &s;
      double msum = 0.0, mx = 0.0, my = 0.0;
      for (int ci : sm->cluster_ids) {
        const ClusterMeta& cm = meta.clusters[static_cast<size_t>(ci)];
        PlacedCluster pc;
        pc.x = solution[static_cast<size_t>(cm.x)];
        pc.y = solution[static_cast<size_t>(cm.y)];
        pc.theta_deg = selected_angle(cm.angle_sel, cm.angles_deg, solution);
        const size_t ai = cm.arr_sel.empty() ? 0 : argmax(cm.arr_sel, solution);
        pc.arrangement = cm.arrangements[ai];
        msum += pc.arrangement.mass;
        mx += pc.arrangement.mass * pc.x;
        my += pc.arrangement.mass * pc.y;
        pe.clusters.push_back(pc);
      }
      if (msum > 0.0) {
        pe.x = mx / msum;
        pe.y = my / msum;
      }
    } else if (em.fixed) {
      pe.x = em.fx;
      pe.y = em.fy;
      pe.theta_deg = selected_angle(em.angle_sel, em.angles_deg, solution);
    } else {
      pe.x = solution[static_cast<size_t>(em.x)];
      pe.y = solution[static_cast<size_t>(em.y)];
      pe.theta_deg = selected_angle(em.angle_sel, em.angles_deg, solution);
    }
    out.elements.push_back(std::move(pe));
  }
  out.objective = model.objective_value(solution);
  return out;
}

std::optional<std::vector<double>> lift_placement(const MiqpModel& model, const Placement& p,
                                                  const BnbOptions& opts) {
  if (p.elements.size() != model.meta.elements.size()) return std::nullopt;
  MiqpModel pinned = model;
  const ModelMeta& meta = pinned.meta;
  for (size_t ei = 0; ei < meta.elements.size(); ++ei) {
    const ElementMeta& em = meta.elements[ei];
    const PlacedElement& pe = p.elements[ei];
    if (pe.name != em.name) return std::nullopt;
    if (em.shape == ShapeKind::Subsystem) {
      const SubsystemMeta* sm = nullptr;
      for (const SubsystemMeta& s : meta.subsystems)
        if (s.name == em.name) sm = &s;
      if (pe.clusters.size() != sm->cluster_ids.size()) return std::nullopt;
      for (size_t k = 0; k < pe.clusters.size(); ++k) {
        const ClusterMeta& cm = meta.clusters[static_cast<size_t>(sm->cluster_ids[k])];
        const PlacedCluster& pc = pe.clusters[k];
        if (!pin(pinned, cm.x, pc.x) || !pin(pinned, cm.y, pc.y)) return std::nullopt;
        const size_t ak = angle_index(cm.angles_deg, pc.theta_deg);
        if (ak == static_cast<size_t>(-1)) return std::nullopt;
        if (!pin_onehot(pinned, cm.angle_sel, ak)) return std::nullopt;
        if (!cm.arr_sel.empty()) {
          const size_t ri = arrangement_index(cm.arrangements, pc.arrangement);
          if (ri == static_cast<size_t>(-1)) return std::nullopt;
          if (!pin_onehot(pinned, cm.arr_sel, ri)) return std::nullopt;
        } else if (cm.arrangements.size() == 1 &&
                   arrangement_index(cm.arrangements, pc.arrangement) != 0) {
          return std::nullopt;
        }
      }
    } else if (em.fixed) {
      if (std::abs(pe.x - em.fx) > 1e-9 || std::abs(pe.y - em.fy) > 1e-9) return std::nullopt;
    } else {
      if (!pin(pinned, em.x, pe.x) || !pin(pinned, em.y, pe.y)) return std::nullopt;
      if (em.shape == ShapeKind::Rect && !em.angle_sel.empty()) {
        const size_t ak = angle_index(em.angles_deg, pe.theta_deg);
        if (ak == static_cast<size_t>(-1)) return std::nullopt;
        if (!pin_onehot(pinned, em.angle_sel, ak)) return std::nullopt;
      }
      // Circle projection axes stay free: they are separation certificates,
      // not geometry.
    }
  }
  const SolveResult res = branch_and_bound(pinned, opts);
  if (!res.has_incumbent()) return std::nullopt;
  return res.incumbent;
}

}  // namespace moto2d
