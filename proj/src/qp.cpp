#include "moto2d/qp.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace moto2d {

namespace {

// Below this width a variable counts as fixed and leaves the barrier.
constexpr double kFixedWidth = 1e-12;

void row_ranges(const Eigen::SparseMatrix<double>& m, const Eigen::VectorXd& lb,
                const Eigen::VectorXd& ub, Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
  lo = Eigen::VectorXd::Zero(m.rows());
  hi = Eigen::VectorXd::Zero(m.rows());
  for (int j = 0; j < m.cols(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, j); it; ++it) {
      const double a = it.value() * lb[j];
      const double b = it.value() * ub[j];
      lo[it.row()] += std::min(a, b);
      hi[it.row()] += std::max(a, b);
    }
}

}  // namespace

QpForm QpForm::compile(const MiqpModel& model) {
  QpForm f;
  f.n = model.vars.size();
  f.lb.resize(f.n);
  f.ub.resize(f.n);
  for (VarId i = 0; i < f.n; ++i) {
    f.lb[i] = model.vars[i].lb;
    f.ub[i] = model.vars[i].ub;
    if (!std::isfinite(f.lb[i]) || !std::isfinite(f.ub[i]))
      throw std::invalid_argument("QpForm: unbounded variable " + model.vars[i].name);
  }

  std::vector<Eigen::Triplet<double>> qt;
  for (const QuadTerm& t : model.objective.quad) {
    if (t.a == t.b) {
      qt.emplace_back(t.a, t.a, 2.0 * t.coef);
    } else {
      qt.emplace_back(t.a, t.b, t.coef);
      qt.emplace_back(t.b, t.a, t.coef);
    }
  }
  f.Q.resize(f.n, f.n);
  f.Q.setFromTriplets(qt.begin(), qt.end());

  f.c = Eigen::VectorXd::Zero(f.n);
  for (const LinTerm& t : model.objective.linear.terms()) f.c[t.var] += t.coef;
  f.c0 = model.objective.linear.constant() + model.objective_constant;

  std::vector<Eigen::Triplet<double>> at, gt;
  std::vector<double> bv, hv;
  for (const LinConstraint& cst : model.constraints) {
    const double rhs = cst.rhs - cst.expr.constant();
    const int sign = cst.rel == Relation::GreaterEq ? -1 : 1;
    if (cst.rel == Relation::Equal) {
      const int r = static_cast<int>(bv.size());
      for (const LinTerm& t : cst.expr.terms()) at.emplace_back(r, t.var, t.coef);
      bv.push_back(rhs);
    } else {
      const int r = static_cast<int>(hv.size());
      for (const LinTerm& t : cst.expr.terms()) gt.emplace_back(r, t.var, sign * t.coef);
      hv.push_back(sign * rhs);
    }
  }
  f.A.resize(static_cast<int>(bv.size()), f.n);
  f.A.setFromTriplets(at.begin(), at.end());
  f.b = Eigen::Map<Eigen::VectorXd>(bv.data(), static_cast<int>(bv.size()));
  f.G.resize(static_cast<int>(hv.size()), f.n);
  f.G.setFromTriplets(gt.begin(), gt.end());
  f.h = Eigen::Map<Eigen::VectorXd>(hv.data(), static_cast<int>(hv.size()));
  return f;
}

QpForm QpForm::elastic() const {
  const int mE = static_cast<int>(A.rows());
  const int mI = static_cast<int>(G.rows());
  QpForm e;
  e.n = n + 2 * mE + mI;
  e.Q.resize(e.n, e.n);
  e.c = Eigen::VectorXd::Zero(e.n);
  e.c.tail(2 * mE + mI).setOnes();
  e.c0 = 0.0;

  Eigen::VectorXd alo, ahi, glo, ghi;
  row_ranges(A, lb, ub, alo, ahi);
  row_ranges(G, lb, ub, glo, ghi);

  e.lb = Eigen::VectorXd::Zero(e.n);
  e.ub = Eigen::VectorXd::Zero(e.n);
  e.lb.head(n) = lb;
  e.ub.head(n) = ub;
  for (int i = 0; i < mE; ++i) {
    e.ub[n + i] = std::max(0.0, b[i] - alo[i]) + 1.0;
    e.ub[n + mE + i] = std::max(0.0, ahi[i] - b[i]) + 1.0;
  }
  for (int i = 0; i < mI; ++i) e.ub[n + 2 * mE + i] = std::max(0.0, ghi[i] - h[i]) + 1.0;

  std::vector<Eigen::Triplet<double>> at, gt;
  for (int j = 0; j < n; ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, j); it; ++it)
      at.emplace_back(static_cast<int>(it.row()), j, it.value());
  for (int i = 0; i < mE; ++i) {
    at.emplace_back(i, n + i, 1.0);
    at.emplace_back(i, n + mE + i, -1.0);
  }
  for (int j = 0; j < n; ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(G, j); it; ++it)
      gt.emplace_back(static_cast<int>(it.row()), j, it.value());
  for (int i = 0; i < mI; ++i) gt.emplace_back(i, n + 2 * mE + i, -1.0);

  e.A.resize(mE, e.n);
  e.A.setFromTriplets(at.begin(), at.end());
  e.b = b;
  e.G.resize(mI, e.n);
  e.G.setFromTriplets(gt.begin(), gt.end());
  e.h = h;
  return e;
}

struct IpmSolver::Impl {
  QpForm f;
  QpOptions opts;
  int n, mE, mI, N;

  Eigen::SparseMatrix<double> At, Gt;  // cached transposes
  Eigen::SparseMatrix<double> K;       // lower-triangular KKT skeleton
  struct BaseEntry {
    int kidx;
    double val;
    int rv, cv;  // variable ids when the entry sits in the x block, else -1
  };
  std::vector<BaseEntry> base;
  std::vector<int> diag_idx;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt;

  Impl(const QpForm& form, QpOptions o)
      : f(form),
        opts(o),
        n(form.n),
        mE(static_cast<int>(form.A.rows())),
        mI(static_cast<int>(form.G.rows())),
        N(form.n + static_cast<int>(form.A.rows()) + static_cast<int>(form.G.rows())) {
    At = f.A.transpose();
    Gt = f.G.transpose();
    build_pattern();
  }

  int find_entry(int row, int col) const {
    for (int p = K.outerIndexPtr()[col]; p < K.outerIndexPtr()[col + 1]; ++p)
      if (K.innerIndexPtr()[p] == row) return p;
    return -1;
  }

  void build_pattern() {
    std::vector<Eigen::Triplet<double>> ts;
    ts.reserve(static_cast<size_t>(N) + f.Q.nonZeros() + f.A.nonZeros() + f.G.nonZeros());
    for (int i = 0; i < N; ++i) ts.emplace_back(i, i, 0.0);
    for (int j = 0; j < n; ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator it(f.Q, j); it; ++it)
        if (it.row() >= j) ts.emplace_back(static_cast<int>(it.row()), j, 0.0);
    for (int j = 0; j < n; ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator it(f.A, j); it; ++it)
        ts.emplace_back(n + static_cast<int>(it.row()), j, 0.0);
    for (int j = 0; j < n; ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator it(f.G, j); it; ++it)
        ts.emplace_back(n + mE + static_cast<int>(it.row()), j, 0.0);
    K.resize(N, N);
    K.setFromTriplets(ts.begin(), ts.end());
    K.makeCompressed();

    diag_idx.resize(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i) diag_idx[static_cast<size_t>(i)] = find_entry(i, i);

    base.clear();
    for (int j = 0; j < n; ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator it(f.Q, j); it; ++it)
        if (it.row() >= j)
          base.push_back({find_entry(static_cast<int>(it.row()), j), it.value(),
                          static_cast<int>(it.row()), j});
    for (int j = 0; j < n; ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator it(f.A, j); it; ++it)
        base.push_back({find_entry(n + static_cast<int>(it.row()), j), it.value(), -1, j});
    for (int j = 0; j < n; ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator it(f.G, j); it; ++it)
        base.push_back({find_entry(n + mE + static_cast<int>(it.row()), j), it.value(), -1, j});

    ldlt.analyzePattern(K);
  }

  // --- per-solve state ---
  std::vector<char> fixed;
  Eigen::VectorXd lb, ub;

  void fill_kkt(const Eigen::VectorXd& dxdiag, const Eigen::VectorXd& sidiag, double reg) {
    double* v = K.valuePtr();
    std::fill(v, v + K.nonZeros(), 0.0);
    for (const BaseEntry& e : base) {
      if (e.rv >= 0 && fixed[static_cast<size_t>(e.rv)]) continue;
      if (e.cv >= 0 && fixed[static_cast<size_t>(e.cv)]) continue;
      v[e.kidx] += e.val;
    }
    for (int i = 0; i < n; ++i)
      v[diag_idx[static_cast<size_t>(i)]] += fixed[static_cast<size_t>(i)] ? 1.0 : dxdiag[i] + reg;
    for (int r = 0; r < mE; ++r) v[diag_idx[static_cast<size_t>(n + r)]] = -reg;
    for (int r = 0; r < mI; ++r) v[diag_idx[static_cast<size_t>(n + mE + r)]] = -(sidiag[r] + reg);
  }

  bool factorize(const Eigen::VectorXd& dxdiag, const Eigen::VectorXd& sidiag) {
    double reg = 1e-9;
    for (int attempt = 0; attempt < 5; ++attempt, reg *= 100.0) {
      fill_kkt(dxdiag, sidiag, reg);
      ldlt.factorize(K);
      if (ldlt.info() != Eigen::Success) continue;
      if (!ldlt.vectorD().allFinite()) continue;
      return true;
    }
    return false;
  }

  Eigen::VectorXd solve_kkt(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd sol = ldlt.solve(rhs);
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd resid = rhs - K.selfadjointView<Eigen::Lower>() * sol;
      sol += ldlt.solve(resid);
    }
    return sol;
  }

  static double step_limit(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
    double a = 1.0;
    for (int i = 0; i < v.size(); ++i)
      if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
    return a;
  }

  QpResult run(const Eigen::VectorXd& node_lb, const Eigen::VectorXd& node_ub,
               const Eigen::VectorXd* warm_x);
};

QpResult IpmSolver::Impl::run(const Eigen::VectorXd& node_lb, const Eigen::VectorXd& node_ub,
                              const Eigen::VectorXd* warm_x) {
  lb = node_lb;
  ub = node_ub;
  fixed.assign(static_cast<size_t>(n), 0);
  int n_free = 0;
  for (int i = 0; i < n; ++i) {
    if (ub[i] - lb[i] <= kFixedWidth)
      fixed[static_cast<size_t>(i)] = 1;
    else
      ++n_free;
  }

  QpResult res;
  // Starting point: strict interior of the box.
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    if (fixed[static_cast<size_t>(i)]) {
      x[i] = 0.5 * (lb[i] + ub[i]);
    } else {
      const double w = ub[i] - lb[i];
      double v = warm_x ? (*warm_x)[i] : 0.5 * (lb[i] + ub[i]);
      v = std::clamp(v, lb[i] + 0.05 * w, ub[i] - 0.05 * w);
      x[i] = v;
    }
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(mE);
  Eigen::VectorXd s(mI), z(mI);
  {
    const Eigen::VectorXd gx = f.G * x;
    for (int i = 0; i < mI; ++i) s[i] = std::max(f.h[i] - gx[i], 1.0);
    z.setOnes();
  }
  Eigen::VectorXd zl = Eigen::VectorXd::Ones(n), zu = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i)
    if (fixed[static_cast<size_t>(i)]) zl[i] = zu[i] = 0.0;

  const double scale_p =
      1.0 + std::max(mE ? f.b.cwiseAbs().maxCoeff() : 0.0, mI ? f.h.cwiseAbs().maxCoeff() : 0.0);
  const double scale_d = 1.0 + (n ? f.c.cwiseAbs().maxCoeff() : 0.0);
  const int m_total = mI + 2 * n_free;
  int stalls = 0;

  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    const Eigen::VectorXd qx = f.Q * x;
    const Eigen::VectorXd rp1 = f.A * x - f.b;
    const Eigen::VectorXd rp2 = f.G * x + s - f.h;
    Eigen::VectorXd rd = qx + f.c + At * y + Gt * z - zl + zu;
    Eigen::VectorXd g(n), t(n);
    for (int i = 0; i < n; ++i) {
      if (fixed[static_cast<size_t>(i)]) {
        rd[i] = 0.0;
        g[i] = t[i] = 1.0;  // placeholders, multipliers stay zero
      } else {
        g[i] = x[i] - lb[i];
        t[i] = ub[i] - x[i];
      }
    }

    const double gap = s.dot(z) + g.dot(zl) + t.dot(zu);
    const double obj = 0.5 * x.dot(qx) + f.c.dot(x) + f.c0;
    const double nr_p = std::max(mE ? rp1.cwiseAbs().maxCoeff() : 0.0,
                                 mI ? rp2.cwiseAbs().maxCoeff() : 0.0);
    const double nr_d = n ? rd.cwiseAbs().maxCoeff() : 0.0;

    if (!std::isfinite(gap) || !std::isfinite(nr_p) || !std::isfinite(nr_d)) break;

    // Weak-duality slack: obj - slack lower-bounds the box optimum at every
    // iterate (primal infeasibility is absorbed by the |y*rp| products), so
    // keep the best bound in case the iteration never converges.
    double slack = std::abs(gap);
    for (int i = 0; i < n; ++i)
      if (!fixed[static_cast<size_t>(i)]) slack += std::abs(rd[i]) * (ub[i] - lb[i]);
    for (int i = 0; i < mE; ++i) slack += std::abs(y[i] * rp1[i]);
    for (int i = 0; i < mI; ++i) slack += std::abs(z[i] * rp2[i]);
    if (std::isfinite(slack)) res.safe_bound = std::max(res.safe_bound, obj - slack);

    if (nr_p <= opts.kkt_tol * scale_p && nr_d <= opts.kkt_tol * scale_d &&
        gap <= 10.0 * opts.kkt_tol * (1.0 + std::abs(obj))) {
      res.status = QpStatus::Optimal;
      res.x = x;
      res.objective = obj;
      res.iterations = iter;
      res.kkt_residual = std::max({nr_p, nr_d, gap});
      res.bound_slack = slack;
      return res;
    }
    if (iter == opts.max_iter || m_total == 0) break;

    const double mu = gap / m_total;

    Eigen::VectorXd dxdiag = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
      if (!fixed[static_cast<size_t>(i)]) dxdiag[i] = zl[i] / g[i] + zu[i] / t[i];
    Eigen::VectorXd sidiag(mI);
    for (int i = 0; i < mI; ++i) sidiag[i] = s[i] / z[i];

    if (!factorize(dxdiag, sidiag)) break;

    // Affine scaling direction.
    Eigen::VectorXd rc_s = s.cwiseProduct(z);
    Eigen::VectorXd rc_l = g.cwiseProduct(zl);
    Eigen::VectorXd rc_u = t.cwiseProduct(zu);

    auto assemble_rhs = [&](const Eigen::VectorXd& rcs, const Eigen::VectorXd& rcl,
                            const Eigen::VectorXd& rcu) {
      Eigen::VectorXd rhs(N);
      for (int i = 0; i < n; ++i)
        rhs[i] = fixed[static_cast<size_t>(i)] ? 0.0 : -rd[i] - rcl[i] / g[i] + rcu[i] / t[i];
      rhs.segment(n, mE) = -rp1;
      for (int i = 0; i < mI; ++i) rhs[n + mE + i] = -rp2[i] + rcs[i] / z[i];
      return rhs;
    };

    auto extract = [&](const Eigen::VectorXd& sol, const Eigen::VectorXd& rcl,
                       const Eigen::VectorXd& rcu, Eigen::VectorXd& dx, Eigen::VectorXd& dy,
                       Eigen::VectorXd& dz, Eigen::VectorXd& ds, Eigen::VectorXd& dzl,
                       Eigen::VectorXd& dzu) {
      dx = sol.head(n);
      for (int i = 0; i < n; ++i)
        if (fixed[static_cast<size_t>(i)]) dx[i] = 0.0;
      dy = sol.segment(n, mE);
      dz = sol.tail(mI);
      ds = -rp2 - f.G * dx;
      dzl.resize(n);
      dzu.resize(n);
      for (int i = 0; i < n; ++i) {
        if (fixed[static_cast<size_t>(i)]) {
          dzl[i] = dzu[i] = 0.0;
        } else {
          dzl[i] = -(rcl[i] + zl[i] * dx[i]) / g[i];
          dzu[i] = -(rcu[i] - zu[i] * dx[i]) / t[i];
        }
      }
    };

    Eigen::VectorXd dx, dy, dz, ds, dzl, dzu;
    extract(solve_kkt(assemble_rhs(rc_s, rc_l, rc_u)), rc_l, rc_u, dx, dy, dz, ds, dzl,
            dzu);

    // Affine step lengths and centering parameter.
    double ap = std::min({step_limit(s, ds), step_limit(g, dx), step_limit(t, -dx)});
    double ad = std::min({step_limit(z, dz), step_limit(zl, dzl), step_limit(zu, dzu)});
    const double mu_aff = ((s + ap * ds).dot(z + ad * dz) + (g + ap * dx).dot(zl + ad * dzl) +
                           (t - ap * dx).dot(zu + ad * dzu)) /
                          m_total;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 1e-8, 1.0);

    // Corrector.
    rc_s += ds.cwiseProduct(dz) - Eigen::VectorXd::Constant(mI, sigma * mu);
    rc_l += dx.cwiseProduct(dzl) - Eigen::VectorXd::Constant(n, sigma * mu);
    rc_u += (-dx).cwiseProduct(dzu) - Eigen::VectorXd::Constant(n, sigma * mu);
    for (int i = 0; i < n; ++i)
      if (fixed[static_cast<size_t>(i)]) rc_l[i] = rc_u[i] = 0.0;

    extract(solve_kkt(assemble_rhs(rc_s, rc_l, rc_u)), rc_l, rc_u, dx, dy, dz, ds, dzl,
            dzu);

    constexpr double tau = 0.995;
    ap = tau * std::min({step_limit(s, ds), step_limit(g, dx), step_limit(t, -dx)});
    ad = tau * std::min({step_limit(z, dz), step_limit(zl, dzl), step_limit(zu, dzu)});
    ap = std::min(ap, 1.0);
    ad = std::min(ad, 1.0);

    if (ap < 1e-10 && ad < 1e-10) {
      if (++stalls >= 3) break;
    } else {
      stalls = 0;
    }

    x += ap * dx;
    s += ap * ds;
    y += ad * dy;
    z += ad * dz;
    zl += ad * dzl;
    zu += ad * dzu;
    res.iterations = iter + 1;
  }

  res.status = QpStatus::NumericalFailure;
  res.x = x;
  res.objective = 0.5 * x.dot(f.Q * x) + f.c.dot(x) + f.c0;
  return res;
}

IpmSolver::IpmSolver(const QpForm& form, QpOptions opts)
    : impl_(std::make_unique<Impl>(form, opts)) {}
IpmSolver::~IpmSolver() = default;
IpmSolver::IpmSolver(IpmSolver&&) noexcept = default;
IpmSolver& IpmSolver::operator=(IpmSolver&&) noexcept = default;

QpResult IpmSolver::solve(const Eigen::VectorXd& lb, const Eigen::VectorXd& ub,
                          const Eigen::VectorXd* warm_x) {
  return impl_->run(lb, ub, warm_x);
}

const QpForm& IpmSolver::form() const { return impl_->f; }

RelaxationSolver::RelaxationSolver(const MiqpModel& model, QpOptions opts)
    : form_(QpForm::compile(model)),
      elastic_form_(form_.elastic()),
      main_(form_, opts),
      phase1_(elastic_form_, opts),
      feas_tol_(1e-7) {}

QpResult RelaxationSolver::solve(const Eigen::VectorXd& lb, const Eigen::VectorXd& ub,
                                 const Eigen::VectorXd* warm_x) {
  QpResult main = main_.solve(lb, ub, warm_x);
  if (main.status == QpStatus::Optimal) return main;

  Eigen::VectorXd elb = elastic_form_.lb;
  Eigen::VectorXd eub = elastic_form_.ub;
  elb.head(form_.n) = lb;
  eub.head(form_.n) = ub;
  const QpResult p1 = phase1_.solve(elb, eub);
  // The phase-1 objective is the total violation; its safe bound certifies
  // infeasibility even when phase-1 itself stalls.
  if (p1.safe_bound > feas_tol_) {
    QpResult res;
    res.status = QpStatus::Infeasible;
    res.infeasibility = std::max(p1.safe_bound, 0.0);
    res.safe_bound = std::numeric_limits<double>::infinity();
    res.iterations = main.iterations + p1.iterations;
    return res;
  }
  return main;  // feasible but unconverged: caller decides
}

}  // namespace moto2d
