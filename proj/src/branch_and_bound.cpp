#include "moto2d/branch_and_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <memory>
#include <queue>

namespace moto2d {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPruneEps = 1e-9;

struct Node {
  double bound = -kInf;  // inherited relaxation bound
  int depth = 0;
  long id = 0;
  bool retried = false;  // set after a numerical-failure requeue
  std::vector<std::pair<VarId, signed char>> fixings;
  std::shared_ptr<const Eigen::VectorXd> warm;
  // Pseudo-cost bookkeeping: the edge that created this node, so the observed
  // bound movement can be credited back to the branched variable.
  VarId pc_var = kInvalidVar;
  double pc_dist = 0.0;
  signed char pc_side = 0;
};

// Per-direction pseudo-costs: mean bound improvement per unit of fractional
// distance closed, learned from strong-branch probes and node evaluations.
struct PseudoCosts {
  std::vector<double> sum[2];
  std::vector<int> cnt[2];
  double global_sum[2] = {0.0, 0.0};
  long global_cnt[2] = {0, 0};

  explicit PseudoCosts(size_t n) {
    sum[0].assign(n, 0.0);
    sum[1].assign(n, 0.0);
    cnt[0].assign(n, 0);
    cnt[1].assign(n, 0);
  }
  void record(VarId v, int side, double improvement, double dist) {
    const double unit = improvement / std::max(dist, 1e-6);
    sum[side][static_cast<size_t>(v)] += unit;
    cnt[side][static_cast<size_t>(v)] += 1;
    global_sum[side] += unit;
    global_cnt[side] += 1;
  }
  int reliability(VarId v) const {
    return std::min(cnt[0][static_cast<size_t>(v)], cnt[1][static_cast<size_t>(v)]);
  }
  double estimate(VarId v, int side, double dist) const {
    const size_t i = static_cast<size_t>(v);
    if (cnt[side][i] > 0) return dist * sum[side][i] / cnt[side][i];
    if (global_cnt[side] > 0)
      return dist * global_sum[side] / static_cast<double>(global_cnt[side]);
    return 0.0;
  }
};

struct NodeOrder {
  // Min-heap on (bound, id): best bound first, then creation order.
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

enum class PropagateOutcome { Ok, Infeasible };

// Activity-based bound tightening over the node box. Binaries snap to the
// nearest integer bound when an endpoint becomes fractional.
PropagateOutcome propagate(const MiqpModel& model, Eigen::VectorXd& lb, Eigen::VectorXd& ub,
                           double feas_tol) {
  const int rounds = 4;
  for (int round = 0; round < rounds; ++round) {
    bool changed = false;
    for (const LinConstraint& c : model.constraints) {
      double lo = c.expr.constant(), hi = lo;
      for (const LinTerm& t : c.expr.terms()) {
        const double a = t.coef * lb[t.var];
        const double b = t.coef * ub[t.var];
        lo += std::min(a, b);
        hi += std::max(a, b);
      }
      const bool need_le = c.rel != Relation::GreaterEq;  // expr <= rhs
      const bool need_ge = c.rel != Relation::LessEq;     // expr >= rhs
      if (need_le && lo > c.rhs + feas_tol) return PropagateOutcome::Infeasible;
      if (need_ge && hi < c.rhs - feas_tol) return PropagateOutcome::Infeasible;

      for (const LinTerm& t : c.expr.terms()) {
        if (t.coef == 0.0) continue;
        const double wlo = std::min(t.coef * lb[t.var], t.coef * ub[t.var]);
        const bool binary = model.vars[t.var].kind == VarKind::Binary;
        if (need_le) {
          // t.coef * x <= rhs - (lo - wlo)
          const double cap = c.rhs - (lo - wlo);
          if (t.coef > 0.0) {
            double nu = cap / t.coef;
            if (binary && nu < 1.0 - feas_tol) nu = std::min(nu, 0.0);
            if (nu < ub[t.var] - 1e-12) {
              ub[t.var] = std::max(nu, lb[t.var]);
              changed = true;
            }
            if (nu < lb[t.var] - feas_tol) return PropagateOutcome::Infeasible;
          } else {
            double nl = cap / t.coef;
            if (binary && nl > feas_tol) nl = std::max(nl, 1.0);
            if (nl > lb[t.var] + 1e-12) {
              lb[t.var] = std::min(nl, ub[t.var]);
              changed = true;
            }
            if (nl > ub[t.var] + feas_tol) return PropagateOutcome::Infeasible;
          }
        }
        if (need_ge) {
          // t.coef * x >= rhs - (hi - whi)
          const double whi = std::max(t.coef * lb[t.var], t.coef * ub[t.var]);
          const double floor_v = c.rhs - (hi - whi);
          if (t.coef > 0.0) {
            double nl = floor_v / t.coef;
            if (binary && nl > feas_tol) nl = std::max(nl, 1.0);
            if (nl > lb[t.var] + 1e-12) {
              lb[t.var] = std::min(nl, ub[t.var]);
              changed = true;
            }
            if (nl > ub[t.var] + feas_tol) return PropagateOutcome::Infeasible;
          } else {
            double nu = floor_v / t.coef;
            if (binary && nu < 1.0 - feas_tol) nu = std::min(nu, 0.0);
            if (nu < ub[t.var] - 1e-12) {
              ub[t.var] = std::max(nu, lb[t.var]);
              changed = true;
            }
            if (nu < lb[t.var] - feas_tol) return PropagateOutcome::Infeasible;
          }
        }
      }
    }
    if (!changed) break;
  }
  return PropagateOutcome::Ok;
}

std::vector<VarId> binary_ids(const MiqpModel& model) {
  std::vector<VarId> out;
  for (VarId i = 0; i < model.vars.size(); ++i)
    if (model.vars[i].kind == VarKind::Binary) out.push_back(i);
  return out;
}

// Selection one-hots: equality rows of unit-coefficient binaries summing to
// one. The dive heuristic rounds these by argmax, which keeps them coherent.
std::vector<std::vector<VarId>> one_hot_groups(const MiqpModel& model) {
  std::vector<std::vector<VarId>> groups;
  for (const LinConstraint& c : model.constraints) {
    if (c.rel != Relation::Equal || c.rhs != 1.0 || c.expr.constant() != 0.0) continue;
    if (c.expr.terms().size() < 2) continue;
    bool ok = true;
    for (const LinTerm& t : c.expr.terms())
      if (t.coef != 1.0 || model.vars[t.var].kind != VarKind::Binary) {
        ok = false;
        break;
      }
    if (!ok) continue;
    std::vector<VarId> g;
    for (const LinTerm& t : c.expr.terms()) g.push_back(t.var);
    groups.push_back(std::move(g));
  }
  return groups;
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::GapLimit: return "gap_limit";
    case SolveStatus::TimeLimit: return "time_limit";
    case SolveStatus::NodeLimit: return "node_limit";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

double relative_gap(double objective, double bound) {
  if (!std::isfinite(objective) || !std::isfinite(bound)) return kInf;
  return std::max(0.0, objective - bound) / std::max(std::abs(objective), 1e-12);
}

QpResult solve_qp_relaxation(const MiqpModel& model,
                             const std::vector<std::pair<VarId, double>>& fixings) {
  RelaxationSolver solver(model);
  Eigen::VectorXd lb = solver.form().lb;
  Eigen::VectorXd ub = solver.form().ub;
  for (const auto& [var, val] : fixings) lb[var] = ub[var] = val;
  return solver.solve(lb, ub);
}

WarmStartCheck validate_warm_start(const MiqpModel& model, const std::vector<double>& hint,
                                   double feas_tol) {
  WarmStartCheck out;
  if (static_cast<VarId>(hint.size()) != model.vars.size()) {
    out.reason = "dimension mismatch";
    return out;
  }
  if (const auto v = model.check_point(hint, feas_tol)) {
    out.reason = v->constraint;
    return out;
  }
  out.accepted = true;
  out.objective = model.objective_value(hint);
  return out;
}

SolveResult branch_and_bound(const MiqpModel& model, const BnbOptions& opts,
                             const std::vector<double>* warm_hint) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  RelaxationSolver solver(model);
  const Eigen::VectorXd& root_lb = solver.form().lb;
  const Eigen::VectorXd& root_ub = solver.form().ub;
  const std::vector<VarId> binaries = binary_ids(model);
  const std::vector<std::vector<VarId>> groups = one_hot_groups(model);
  PseudoCosts pc(static_cast<size_t>(model.vars.size()));

  // Diving heuristic: round selection groups by argmax and loose binaries by
  // proximity, re-solving between passes so dependent certificates settle.
  // Returns a validated integral point and its objective.
  const auto attempt_dive = [&](Eigen::VectorXd dlb, Eigen::VectorXd dub,
                                const Eigen::VectorXd& start)
      -> std::optional<std::pair<std::vector<double>, double>> {
    Eigen::VectorXd xcur = start;
    for (int pass = 0; pass < 12; ++pass) {
      bool changed = false;
      for (const auto& g : groups) {
        VarId best = kInvalidVar;
        double best_val = -1.0;
        bool decided = false;
        for (VarId v : g) {
          if (dlb[v] > 0.5) {
            decided = true;
            break;
          }
          if (dub[v] < 0.5) continue;
          if (xcur[v] > best_val) {
            best_val = xcur[v];
            best = v;
          }
        }
        if (decided || best == kInvalidVar) continue;
        dlb[best] = 1.0;
        changed = true;
      }
      for (VarId v : binaries) {
        if (dub[v] - dlb[v] <= 1e-12) continue;
        const double r = std::round(xcur[v]);
        if (std::abs(xcur[v] - r) <= 0.1) {
          dlb[v] = dub[v] = r;
          changed = true;
        }
      }
      if (!changed) {
        VarId pick = kInvalidVar;
        double most = -1.0;
        for (VarId v : binaries) {
          if (dub[v] - dlb[v] <= 1e-12) continue;
          const double d = std::abs(xcur[v] - 0.5);
          if (d > most) {
            most = d;
            pick = v;
          }
        }
        if (pick == kInvalidVar) break;
        dlb[pick] = dub[pick] = xcur[pick] >= 0.5 ? 1.0 : 0.0;
      }
      if (propagate(model, dlb, dub, opts.feas_tol) == PropagateOutcome::Infeasible)
        return std::nullopt;
      const QpResult r = solver.solve(dlb, dub, &xcur);
      if (r.status != QpStatus::Optimal) return std::nullopt;
      xcur = r.x;
      bool integral = true;
      for (VarId v : binaries)
        if (std::abs(xcur[v] - std::round(xcur[v])) > opts.int_tol) {
          integral = false;
          break;
        }
      if (integral) {
        std::vector<double> cand(xcur.data(), xcur.data() + xcur.size());
        for (VarId v : binaries) cand[static_cast<size_t>(v)] = std::round(cand[static_cast<size_t>(v)]);
        const WarmStartCheck wsc = validate_warm_start(model, cand, opts.feas_tol);
        if (!wsc.accepted) return std::nullopt;
        return std::make_pair(std::move(cand), wsc.objective);
      }
    }
    return std::nullopt;
  };

  SolveResult res;
  double incumbent_obj = kInf;
  std::vector<double> incumbent;
  if (warm_hint) {
    const WarmStartCheck w = validate_warm_start(model, *warm_hint, opts.feas_tol);
    if (w.accepted) {
      incumbent = *warm_hint;
      incumbent_obj = w.objective;
    }
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  // Nodes whose relaxation failed twice: they keep their inherited bound and
  // are only discharged by the incumbent.
  std::vector<Node> stuck;
  long next_id = 0;
  long nodes_evaluated = 0;
  open.push(Node{-kInf, 0, next_id++, false, {}, nullptr});

  std::vector<Node> plunge_stack;
  const auto global_bound = [&]() {
    double b = open.empty() ? kInf : open.top().bound;
    for (const Node& nd : stuck) b = std::min(b, nd.bound);
    for (const Node& nd : plunge_stack) b = std::min(b, nd.bound);
    return b;
  };

  const auto finish = [&](SolveStatus status, double bound) {
    res.status = status;
    res.incumbent = incumbent;
    res.objective = incumbent.empty() ? 0.0 : incumbent_obj;
    res.bound = bound;
    res.gap = incumbent.empty() ? kInf : relative_gap(incumbent_obj, bound);
    res.nodes = nodes_evaluated;
    res.wall_time_s = elapsed();
    return res;
  };

  bool plunging = incumbent.empty();

  while (!open.empty() || !plunge_stack.empty()) {
    Node node;
    if (!plunge_stack.empty()) {
      node = std::move(plunge_stack.back());
      plunge_stack.pop_back();
    } else {
      node = open.top();
      open.pop();
    }

    // Sharpen the stale-bound prune before paying for the relaxation.
    if (!incumbent.empty() && node.bound >= incumbent_obj - kPruneEps) continue;

    const double lower_frontier = std::min(node.bound, global_bound());
    if (!incumbent.empty() && opts.gap_tol > 0.0 &&
        relative_gap(incumbent_obj, lower_frontier) <= opts.gap_tol)
      return finish(SolveStatus::GapLimit, lower_frontier);
    if (opts.time_limit_s > 0.0 && elapsed() > opts.time_limit_s)
      return finish(SolveStatus::TimeLimit, lower_frontier);
    if (opts.node_limit > 0 && nodes_evaluated >= opts.node_limit)
      return finish(SolveStatus::NodeLimit, lower_frontier);

    ++nodes_evaluated;
    if (opts.log_progress && nodes_evaluated % 1000 == 0) {
      std::cerr << "bnb: nodes=" << nodes_evaluated << " incumbent="
                << (incumbent.empty() ? std::string("-") : std::to_string(incumbent_obj))
                << " bound=" << lower_frontier
                << " gap=" << (incumbent.empty() ? kInf : relative_gap(incumbent_obj,
                                                                       lower_frontier))
                << " open=" << open.size() << " stuck=" << stuck.size() << " openb="
                << (open.empty() ? kInf : open.top().bound) << " stuckb="
                << [&] {
                     double b = kInf;
                     for (const Node& nd : stuck) b = std::min(b, nd.bound);
                     return b;
                   }()
                << " time=" << elapsed() << "s\n";
    }

    Eigen::VectorXd lb = root_lb, ub = root_ub;
    for (const auto& [var, val] : node.fixings) lb[var] = ub[var] = double(val);
    if (propagate(model, lb, ub, opts.feas_tol) == PropagateOutcome::Infeasible) continue;

    const QpResult relax = solver.solve(lb, ub, node.warm ? node.warm.get() : nullptr);
    if (relax.status == QpStatus::Infeasible) continue;

    if (relax.status == QpStatus::NumericalFailure) {
      // A stalled solve still certifies its best Lagrangian bound; that is
      // often enough to discharge the node outright.
      const double nb = std::max(node.bound, relax.safe_bound);
      if (!incumbent.empty() && nb >= incumbent_obj - kPruneEps) continue;
      if (!node.retried) {
        // Requeue once with a perturbed start (no warm vector).
        Node again = node;
        again.retried = true;
        again.warm = nullptr;
        again.bound = nb;
        again.id = next_id++;
        open.push(std::move(again));
      } else {
        // Branch without pruning; children keep the certified bound.
        VarId bv = kInvalidVar;
        for (VarId v : binaries)
          if (ub[v] - lb[v] > 0.5) {
            bv = v;
            break;
          }
        if (bv == kInvalidVar) {
          node.bound = nb;
          stuck.push_back(std::move(node));
        } else {
          for (int side = 0; side <= 1; ++side) {
            Node child;
            child.bound = nb;
            child.depth = node.depth + 1;
            child.id = next_id++;
            child.fixings = node.fixings;
            child.fixings.emplace_back(bv, static_cast<signed char>(side));
            open.push(std::move(child));
          }
        }
      }
      continue;
    }

    double node_bound =
        std::max({node.bound, relax.objective - relax.bound_slack, relax.safe_bound});
    if (opts.node_observer)
      opts.node_observer(node.bound, node_bound, incumbent.empty() ? kInf : incumbent_obj,
                         std::min(node_bound, global_bound()));

    // Credit the observed bound movement to the edge that created this node.
    if (node.pc_var != kInvalidVar)
      pc.record(node.pc_var, node.pc_side, std::max(0.0, node_bound - node.bound), node.pc_dist);

    if (!incumbent.empty() && node_bound >= incumbent_obj - kPruneEps) continue;

    // Fractional binaries, structural choices first.
    struct Cand {
      VarId v;
      double frac;
      int prio;
    };
    std::vector<Cand> cands;
    for (VarId v : binaries) {
      if (ub[v] - lb[v] <= 1e-12) continue;
      const double f = std::abs(relax.x[v] - std::round(relax.x[v]));
      if (f > opts.int_tol) cands.push_back({v, f, model.vars[v].branch_priority});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      if (a.prio != b.prio) return a.prio > b.prio;
      return a.frac > b.frac;
    });
    const VarId branch_var = cands.empty() ? kInvalidVar : cands[0].v;

    if (branch_var == kInvalidVar) {
      // Integral relaxation: round and validate as incumbent.
      std::vector<double> cand(relax.x.data(), relax.x.data() + relax.x.size());
      for (VarId v : binaries) cand[static_cast<size_t>(v)] = std::round(cand[static_cast<size_t>(v)]);
      const WarmStartCheck w = validate_warm_start(model, cand, opts.feas_tol);
      double cand_obj;
      if (w.accepted) {
        cand_obj = w.objective;
      } else {
        // Fall back to the raw relaxation point.
        cand.assign(relax.x.data(), relax.x.data() + relax.x.size());
        const WarmStartCheck raw = validate_warm_start(model, cand, opts.feas_tol);
        if (!raw.accepted) {
          // QP converged but the point check rejects (tolerance mismatch).
          // Branch deeper so children re-solve on tighter boxes; an all-fixed
          // node keeps flooring the global bound from the stuck list instead
          // of being dropped.
          VarId dv = kInvalidVar;
          for (VarId v : binaries)
            if (ub[v] - lb[v] > 0.5) {
              dv = v;
              break;
            }
          if (dv == kInvalidVar) {
            node.bound = node_bound;
            stuck.push_back(std::move(node));
          } else {
            const auto deadlock_warm = std::make_shared<const Eigen::VectorXd>(relax.x);
            for (int side = 0; side <= 1; ++side) {
              Node child;
              child.bound = node_bound;
              child.depth = node.depth + 1;
              child.id = next_id++;
              child.fixings = node.fixings;
              child.fixings.emplace_back(dv, static_cast<signed char>(side));
              child.warm = deadlock_warm;
              open.push(std::move(child));
            }
          }
          continue;
        }
        cand_obj = raw.objective;
      }
      if (cand_obj < incumbent_obj - 1e-12) {
        incumbent = std::move(cand);
        incumbent_obj = cand_obj;
        if (plunging) {
          plunging = false;
          for (Node& pn : plunge_stack) open.push(std::move(pn));
          plunge_stack.clear();
        }
      }
      continue;
    }

    // Reliability branching: unreliable candidates get both child relaxations
    // solved outright; the rest are scored by learned pseudo-costs. Probe
    // results are recycled as child bounds and warm starts.
    struct Side {
      bool probed = false;
      bool infeasible = false;
      double bound = -kInf;
      std::shared_ptr<const Eigen::VectorXd> x;
    };
    struct Choice {
      VarId v = kInvalidVar;
      double score = -1.0;
      Side side[2];
    } chosen;

    const double unit = 1.0 + std::abs(node_bound);
    const double plateau_tol = 1e-7 * unit;
    const double inf_gain =
        incumbent.empty() ? unit : std::max(incumbent_obj - node_bound, plateau_tol);

    const auto probe = [&](VarId v, int side) {
      Side out;
      out.probed = true;
      Eigen::VectorXd plb = lb, pub = ub;
      plb[v] = pub[v] = static_cast<double>(side);
      if (propagate(model, plb, pub, opts.feas_tol) == PropagateOutcome::Infeasible) {
        out.infeasible = true;
        return out;
      }
      const QpResult r = solver.solve(plb, pub, &relax.x);
      if (r.status == QpStatus::Infeasible) {
        out.infeasible = true;
        return out;
      }
      out.bound = std::max(node_bound, r.status == QpStatus::Optimal
                                           ? std::max(r.objective - r.bound_slack, r.safe_bound)
                                           : r.safe_bound);
      if (r.status == QpStatus::Optimal) out.x = std::make_shared<const Eigen::VectorXd>(r.x);
      return out;
    };

    int probes_left = 4;
    for (const Cand& cand : cands) {
      Choice cur;
      cur.v = cand.v;
      const double dist[2] = {relax.x[cand.v], 1.0 - relax.x[cand.v]};
      double gain[2];
      if (probes_left > 0 && pc.reliability(cand.v) < 2) {
        --probes_left;
        for (int s = 0; s < 2; ++s) {
          cur.side[s] = probe(cand.v, s);
          gain[s] =
              cur.side[s].infeasible ? inf_gain : std::max(0.0, cur.side[s].bound - node_bound);
          pc.record(cand.v, s, gain[s], dist[s]);
        }
      } else {
        for (int s = 0; s < 2; ++s) gain[s] = std::max(0.0, pc.estimate(cand.v, s, dist[s]));
      }
      cur.score = std::max(gain[0], 1e-9 * unit) * std::max(gain[1], 1e-9 * unit);
      if (cur.score > chosen.score) chosen = std::move(cur);
      // A candidate that moves the bound on both sides is good enough.
      if (chosen.v == cand.v && std::min(gain[0], gain[1]) > plateau_tol) break;
    }

    if (chosen.side[0].infeasible && chosen.side[1].infeasible) continue;

    const auto warm_ptr = std::make_shared<const Eigen::VectorXd>(relax.x);
    const int preferred = relax.x[chosen.v] >= 0.5 ? 1 : 0;
    Node kids[2];
    bool live[2];
    for (int side = 0; side <= 1; ++side) {
      const Side& pr = chosen.side[side];
      live[side] = !pr.infeasible;
      if (!live[side]) continue;
      kids[side].bound = pr.probed ? pr.bound : node_bound;
      if (!incumbent.empty() && kids[side].bound >= incumbent_obj - kPruneEps) {
        live[side] = false;
        continue;
      }
      kids[side].depth = node.depth + 1;
      kids[side].fixings = node.fixings;
      kids[side].fixings.emplace_back(chosen.v, static_cast<signed char>(side));
      kids[side].warm = pr.x ? pr.x : warm_ptr;
      if (!pr.probed) {
        // Probed edges were already credited; plain edges learn at pop time.
        kids[side].pc_var = chosen.v;
        kids[side].pc_side = static_cast<signed char>(side);
        kids[side].pc_dist = side == 1 ? 1.0 - relax.x[chosen.v] : relax.x[chosen.v];
      }
    }
    int dive = preferred;
    if (!live[dive]) dive = 1 - preferred;
    for (int side = 0; side <= 1; ++side) {
      if (!live[side]) continue;
      kids[side].id = next_id++;
      if (plunging && side == dive)
        plunge_stack.push_back(std::move(kids[side]));
      else
        open.push(std::move(kids[side]));
    }
  }

  if (incumbent.empty()) return finish(SolveStatus::Infeasible, kInf);

  // Tree exhausted: every open node was discharged against the incumbent, so
  // the incumbent is optimal up to the pruning epsilon.
  const double residual = global_bound();
  const double bound = std::isfinite(residual) ? std::min(residual, incumbent_obj) : incumbent_obj;
  const SolveStatus st =
      relative_gap(incumbent_obj, bound) <= opts.gap_tol ? SolveStatus::Optimal
                                                         : SolveStatus::GapLimit;
  return finish(st, bound);
}

}  // namespace moto2d
