#include "snperm/splitqp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "snperm/spectral.hpp"

namespace snperm::splitqp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void SparseRows::add_row(const std::vector<int>& idx, const std::vector<double>& val, double b) {
  col_idx.insert(col_idx.end(), idx.begin(), idx.end());
  vals.insert(vals.end(), val.begin(), val.end());
  row_ptr.push_back(static_cast<int>(col_idx.size()));
  rhs.push_back(b);
}

void SparseRows::apply(const std::vector<double>& x, std::vector<double>& y) const {
  y.assign(num_rows(), 0.0);
  for (int r = 0; r < num_rows(); ++r) {
    double s = 0.0;
    for (int t = row_ptr[r]; t < row_ptr[r + 1]; ++t) s += vals[t] * x[col_idx[t]];
    y[r] = s;
  }
}

void SparseRows::apply_transpose_add(const std::vector<double>& w, std::vector<double>& y) const {
  for (int r = 0; r < num_rows(); ++r) {
    const double wr = w[r];
    if (wr == 0.0) continue;
    for (int t = row_ptr[r]; t < row_ptr[r + 1]; ++t) y[col_idx[t]] += vals[t] * wr;
  }
}

double SparseQP::objective(const std::vector<double>& x) const {
  std::vector<double> hx(num_vars, 0.0);
  if (hessian_apply) hessian_apply(x, hx);
  double f = 0.5 * dot(x, hx);
  if (!linear.empty()) f += dot(linear, x);
  return f;
}

namespace {

// Internal stacked view: rows of [eq; ineq; active bounds] with box [lo, up].
struct Stacked {
  SparseRows rows;  // all constraint rows
  std::vector<double> lo, up;
  std::vector<char> is_eq;
};

Stacked stack_constraints(const SparseQP& qp) {
  Stacked s;
  s.rows.cols = qp.num_vars;
  for (int r = 0; r < qp.eq.num_rows(); ++r) {
    std::vector<int> idx(qp.eq.col_idx.begin() + qp.eq.row_ptr[r],
                         qp.eq.col_idx.begin() + qp.eq.row_ptr[r + 1]);
    std::vector<double> val(qp.eq.vals.begin() + qp.eq.row_ptr[r],
                            qp.eq.vals.begin() + qp.eq.row_ptr[r + 1]);
    s.rows.add_row(idx, val, qp.eq.rhs[r]);
    s.lo.push_back(qp.eq.rhs[r]);
    s.up.push_back(qp.eq.rhs[r]);
    s.is_eq.push_back(1);
  }
  for (int r = 0; r < qp.ineq.num_rows(); ++r) {
    std::vector<int> idx(qp.ineq.col_idx.begin() + qp.ineq.row_ptr[r],
                         qp.ineq.col_idx.begin() + qp.ineq.row_ptr[r + 1]);
    std::vector<double> val(qp.ineq.vals.begin() + qp.ineq.row_ptr[r],
                            qp.ineq.vals.begin() + qp.ineq.row_ptr[r + 1]);
    s.rows.add_row(idx, val, qp.ineq.rhs[r]);
    s.lo.push_back(-kInf);
    s.up.push_back(qp.ineq.rhs[r]);
    s.is_eq.push_back(0);
  }
  if (!qp.var_lb.empty() || !qp.var_ub.empty()) {
    for (int v = 0; v < qp.num_vars; ++v) {
      const double lb = qp.var_lb.empty() ? -kInf : qp.var_lb[v];
      const double ub = qp.var_ub.empty() ? kInf : qp.var_ub[v];
      if (lb == -kInf && ub == kInf) continue;
      s.rows.add_row({v}, {1.0}, 0.0);
      s.lo.push_back(lb);
      s.up.push_back(ub);
      s.is_eq.push_back(0);
    }
  }
  return s;
}

// Dense LU with partial pivoting; solves in place. Returns false if singular.
bool dense_solve(std::vector<double>& a, int n, std::vector<double>& b) {
  std::vector<int> piv(n);
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(a[static_cast<size_t>(k) * n + k]);
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(a[static_cast<size_t>(i) * n + k]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best < 1e-300) return false;
    piv[k] = p;
    if (p != k)
      for (int j = 0; j < n; ++j)
        std::swap(a[static_cast<size_t>(k) * n + j], a[static_cast<size_t>(p) * n + j]);
    const double pivot = a[static_cast<size_t>(k) * n + k];
    for (int i = k + 1; i < n; ++i) {
      const double f = a[static_cast<size_t>(i) * n + k] / pivot;
      a[static_cast<size_t>(i) * n + k] = f;
      for (int j = k + 1; j < n; ++j)
        a[static_cast<size_t>(i) * n + j] -= f * a[static_cast<size_t>(k) * n + j];
    }
  }
  for (int k = 0; k < n; ++k) {
    if (piv[k] != k) std::swap(b[k], b[piv[k]]);
    for (int i = k + 1; i < n; ++i) b[i] -= a[static_cast<size_t>(i) * n + k] * b[k];
  }
  for (int k = n - 1; k >= 0; --k) {
    for (int j = k + 1; j < n; ++j) b[k] -= a[static_cast<size_t>(k) * n + j] * b[j];
    b[k] /= a[static_cast<size_t>(k) * n + k];
  }
  return true;
}

struct Workspace {
  const SparseQP& qp;
  const Stacked& st;
  std::vector<double> rho;       // per-row penalty
  std::vector<double> inv_prec;  // Jacobi preconditioner for the normal matrix

  void hess(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(qp.num_vars, 0.0);
    if (qp.hessian_apply) qp.hessian_apply(x, y);
  }

  // y = (H + sigma I + A^T diag(rho) A) x
  void normal_apply(const std::vector<double>& x, double sigma, std::vector<double>& y,
                    std::vector<double>& scratch_rows) const {
    hess(x, y);
    for (int i = 0; i < qp.num_vars; ++i) y[i] += sigma * x[i];
    st.rows.apply(x, scratch_rows);
    for (size_t r = 0; r < scratch_rows.size(); ++r) scratch_rows[r] *= rho[r];
    st.rows.apply_transpose_add(scratch_rows, y);
  }

  void refresh_preconditioner(double sigma) {
    const int n = qp.num_vars;
    inv_prec.assign(n, sigma);
    if (!qp.hessian_diag.empty())
      for (int i = 0; i < n && i < static_cast<int>(qp.hessian_diag.size()); ++i)
        inv_prec[i] += std::max(0.0, qp.hessian_diag[i]);
    for (int r = 0; r < st.rows.num_rows(); ++r)
      for (int t = st.rows.row_ptr[r]; t < st.rows.row_ptr[r + 1]; ++t)
        inv_prec[st.rows.col_idx[t]] += rho[r] * st.rows.vals[t] * st.rows.vals[t];
    for (double& v : inv_prec) v = 1.0 / std::max(v, 1e-300);
  }
};

// Jacobi-preconditioned conjugate gradients on the (PSD) normal operator.
int conjugate_gradient(const Workspace& ws, double sigma, const std::vector<double>& rhs,
                       std::vector<double>& x, double rel_tol, int max_iter) {
  const int n = ws.qp.num_vars;
  std::vector<double> r(n), p(n), zv(n), ap(n), scratch(ws.st.rows.num_rows());
  ws.normal_apply(x, sigma, ap, scratch);
  for (int i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
  for (int i = 0; i < n; ++i) zv[i] = ws.inv_prec[i] * r[i];
  p = zv;
  double rz = dot(r, zv);
  double rr = dot(r, r);
  const double stop = rel_tol * rel_tol * std::max(dot(rhs, rhs), 1e-300);
  int it = 0;
  for (; it < max_iter && rr > stop; ++it) {
    ws.normal_apply(p, sigma, ap, scratch);
    const double pap = dot(p, ap);
    if (pap <= 0.0) break;
    const double alpha = rz / pap;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    for (int i = 0; i < n; ++i) zv[i] = ws.inv_prec[i] * r[i];
    const double rz_new = dot(r, zv);
    const double beta = rz_new / rz;
    rz = rz_new;
    rr = dot(r, r);
    for (int i = 0; i < n; ++i) p[i] = zv[i] + beta * p[i];
  }
  return it;
}

struct Residuals {
  double prim = kInf, dual = kInf;
  double eps_prim = 0.0, eps_dual = 0.0;
  double prim_scale = 1.0, dual_scale = 1.0;
};

Residuals compute_residuals(const SparseQP& qp, const Stacked& st, const std::vector<double>& x,
                            const std::vector<double>& z, const std::vector<double>& y,
                            double eps_abs, double eps_rel) {
  Residuals res;
  std::vector<double> ax;
  st.rows.apply(x, ax);
  double rp = 0.0;
  for (size_t r = 0; r < ax.size(); ++r) rp = std::max(rp, std::abs(ax[r] - z[r]));
  std::vector<double> hx(qp.num_vars, 0.0);
  if (qp.hessian_apply) qp.hessian_apply(x, hx);
  std::vector<double> aty(qp.num_vars, 0.0);
  st.rows.apply_transpose_add(y, aty);
  double rd = 0.0, hx_inf = 0.0, aty_inf = 0.0, q_inf = 0.0;
  for (int i = 0; i < qp.num_vars; ++i) {
    const double qi = qp.linear.empty() ? 0.0 : qp.linear[i];
    rd = std::max(rd, std::abs(hx[i] + qi + aty[i]));
    hx_inf = std::max(hx_inf, std::abs(hx[i]));
    aty_inf = std::max(aty_inf, std::abs(aty[i]));
    q_inf = std::max(q_inf, std::abs(qi));
  }
  res.prim = rp;
  res.dual = rd;
  res.prim_scale = std::max({norm_inf(ax), norm_inf(z), 1e-30});
  res.dual_scale = std::max({hx_inf, aty_inf, q_inf, 1e-30});
  res.eps_prim = eps_abs + eps_rel * res.prim_scale;
  res.eps_dual = eps_abs + eps_rel * res.dual_scale;
  return res;
}

// Equality-constrained refinement on the detected active set, OSQP style:
// solve the regularized KKT system densely and iterate a couple of
// refinement passes against the unregularized one.
bool try_polish(const SparseQP& qp, const Stacked& st, const std::vector<double>& z,
                const std::vector<double>& y, const SplitQPConfig& cfg, double act_tol,
                QPSolution& sol, bool& meets_eps) {
  meets_eps = false;
  const int n = qp.num_vars;
  const int m = st.rows.num_rows();
  std::vector<int> active;
  std::vector<double> active_rhs;
  for (int r = 0; r < m; ++r) {
    bool act = st.is_eq[r] != 0;
    double b = st.up[r];
    if (!act) {
      const double slack_u = st.up[r] - z[r];
      const double slack_l = z[r] - st.lo[r];
      if (st.up[r] < kInf && slack_u < act_tol && y[r] > -act_tol) {
        act = true;
        b = st.up[r];
      } else if (st.lo[r] > -kInf && slack_l < act_tol && y[r] < act_tol) {
        act = true;
        b = st.lo[r];
      }
    }
    if (act) {
      active.push_back(r);
      active_rhs.push_back(b);
    }
  }
  const int k = static_cast<int>(active.size());
  const int dim = n + k;
  if (dim > cfg.polish_dim_limit) return false;

  // Dense H via unit applies on the input block; zero elsewhere.
  std::vector<double> kkt(static_cast<size_t>(dim) * dim, 0.0);
  const int nb = qp.num_inputs > 0 ? qp.num_inputs : n;
  {
    std::vector<double> e(n, 0.0), he(n, 0.0);
    for (int j = 0; j < nb; ++j) {
      e[j] = 1.0;
      he.assign(n, 0.0);
      if (qp.hessian_apply) qp.hessian_apply(e, he);
      for (int i = 0; i < n; ++i) kkt[static_cast<size_t>(i) * dim + j] = he[i];
      e[j] = 0.0;
    }
  }
  const double delta = 1e-7;
  for (int i = 0; i < n; ++i) kkt[static_cast<size_t>(i) * dim + i] += delta;
  for (int a = 0; a < k; ++a) {
    const int r = active[a];
    for (int t = st.rows.row_ptr[r]; t < st.rows.row_ptr[r + 1]; ++t) {
      kkt[static_cast<size_t>(n + a) * dim + st.rows.col_idx[t]] = st.rows.vals[t];
      kkt[static_cast<size_t>(st.rows.col_idx[t]) * dim + (n + a)] = st.rows.vals[t];
    }
    kkt[static_cast<size_t>(n + a) * dim + (n + a)] = -delta;
  }

  std::vector<double> rhs(dim, 0.0);
  for (int i = 0; i < n; ++i) rhs[i] = qp.linear.empty() ? 0.0 : -qp.linear[i];
  for (int a = 0; a < k; ++a) rhs[n + a] = active_rhs[a];

  std::vector<double> lu = kkt;
  std::vector<double> sol_vec = rhs;
  if (!dense_solve(lu, dim, sol_vec)) return false;

  // Refinement against the unregularized KKT matrix.
  auto kkt_unreg_apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    out.assign(dim, 0.0);
    std::vector<double> xv(v.begin(), v.begin() + n), hx(n, 0.0);
    if (qp.hessian_apply) qp.hessian_apply(xv, hx);
    for (int i = 0; i < n; ++i) out[i] = hx[i];
    for (int a = 0; a < k; ++a) {
      const int r = active[a];
      double s = 0.0;
      for (int t = st.rows.row_ptr[r]; t < st.rows.row_ptr[r + 1]; ++t) {
        s += st.rows.vals[t] * v[st.rows.col_idx[t]];
        out[st.rows.col_idx[t]] += st.rows.vals[t] * v[n + a];
      }
      out[n + a] = s;
    }
  };
  std::vector<double> resid(dim), corr(dim), tmp(dim);
  for (int pass = 0; pass < 4; ++pass) {
    kkt_unreg_apply(sol_vec, tmp);
    for (int i = 0; i < dim; ++i) resid[i] = rhs[i] - tmp[i];
    corr = resid;
    std::vector<double> lu2 = kkt;
    if (!dense_solve(lu2, dim, corr)) break;
    for (int i = 0; i < dim; ++i) sol_vec[i] += corr[i];
  }

  std::vector<double> x_pol(sol_vec.begin(), sol_vec.begin() + n);
  std::vector<double> y_pol(m, 0.0);
  for (int a = 0; a < k; ++a) y_pol[active[a]] = sol_vec[n + a];

  // OSQP flips the multiplier sign for lower-active rows implicitly through
  // the clamp; here the KKT multiplier already carries its sign.
  std::vector<double> z_pol;
  st.rows.apply(x_pol, z_pol);
  for (int r = 0; r < m; ++r) z_pol[r] = std::min(std::max(z_pol[r], st.lo[r]), st.up[r]);

  const Residuals before = compute_residuals(qp, st, sol.x, z, y, 0.0, 0.0);
  const Residuals after = compute_residuals(qp, st, x_pol, z_pol, y_pol, cfg.eps_abs, cfg.eps_rel);
  if (std::max(after.prim, after.dual) < std::max(before.prim, before.dual)) {
    sol.x = x_pol;
    sol.dual = y_pol;
    sol.primal_residual = after.prim;
    sol.dual_residual = after.dual;
    sol.polished = true;
    meets_eps = after.prim <= after.eps_prim && after.dual <= after.eps_dual;
    return true;
  }
  return false;
}

QPSolution solve_once(const SparseQP& qp, const SplitQPConfig& cfg,
                      const std::vector<double>& x0) {
  const Stacked st = stack_constraints(qp);
  const int n = qp.num_vars;
  const int m = st.rows.num_rows();

  Workspace ws{qp, st, std::vector<double>(m, cfg.rho0), {}};
  for (int r = 0; r < m; ++r)
    if (st.is_eq[r]) ws.rho[r] = cfg.rho0 * cfg.rho_eq_scale;
  ws.refresh_preconditioner(cfg.sigma);

  std::vector<double> x = x0;
  if (static_cast<int>(x.size()) != n) x.assign(n, 0.0);
  std::vector<double> z(m, 0.0), y(m, 0.0), xt(n, 0.0), zt(m);
  std::vector<double> y_snapshot(m, 0.0);
  st.rows.apply(x, z);
  for (int r = 0; r < m; ++r) z[r] = std::min(std::max(z[r], st.lo[r]), st.up[r]);

  QPSolution sol;
  sol.status = SolveStatus::max_iter_reached;
  xt = x;

  double last_prim = kInf, last_dual = kInf;
  const int check_every = 10;
  const int cg_cap = cfg.cg_max_iter > 0 ? cfg.cg_max_iter : 2 * n + 200;
  // Polish attempts are gated on decreasing residual levels; a successful
  // one finishes the solve early with near-exact residuals.
  double polish_gate = std::max(1e-4, 100.0 * cfg.eps_abs);
  int polish_budget = cfg.polish ? 6 : 0;

  auto polish_and_check = [&](int done_iters) -> bool {
    QPSolution cand;
    cand.x = x;
    const double act_tol = std::max(1e-7, 50.0 * std::max(last_prim, cfg.eps_abs));
    bool meets_eps = false;
    if (!try_polish(qp, st, z, y, cfg, act_tol, cand, meets_eps) || !meets_eps) return false;
    sol = cand;
    sol.status = SolveStatus::solved;
    sol.iterations = done_iters;
    return true;
  };

  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    // rhs = sigma x - q + A^T (rho z - y)
    std::vector<double> rhs(n, 0.0);
    for (int i = 0; i < n; ++i) rhs[i] = cfg.sigma * x[i] - (qp.linear.empty() ? 0.0 : qp.linear[i]);
    std::vector<double> w(m);
    for (int r = 0; r < m; ++r) w[r] = ws.rho[r] * z[r] - y[r];
    st.rows.apply_transpose_add(w, rhs);

    const double cg_tol =
        std::max(1e-13, std::min(1e-9, 1e-4 * std::min(last_prim, last_dual)));
    conjugate_gradient(ws, cfg.sigma, rhs, xt, cg_tol, cg_cap);

    st.rows.apply(xt, zt);
    for (int i = 0; i < n; ++i) x[i] = cfg.alpha * xt[i] + (1.0 - cfg.alpha) * x[i];
    for (int r = 0; r < m; ++r) {
      const double zr = cfg.alpha * zt[r] + (1.0 - cfg.alpha) * z[r];
      const double cand = zr + y[r] / ws.rho[r];
      const double znew = std::min(std::max(cand, st.lo[r]), st.up[r]);
      y[r] = y[r] + ws.rho[r] * (zr - znew);
      z[r] = znew;
    }

    if ((it + 1) % check_every == 0 || it + 1 == cfg.max_iter) {
      const Residuals res = compute_residuals(qp, st, x, z, y, cfg.eps_abs, cfg.eps_rel);
      last_prim = res.prim;
      last_dual = res.dual;
#ifdef SNPERM_SPLITQP_TRACE
      if ((it + 1) % 100 == 0)
        std::fprintf(stderr, "it=%d rp=%.3e(%.1e) rd=%.3e(%.1e) rho=%.2e gate=%.1e\n", it + 1,
                     res.prim, res.prim_scale, res.dual, res.dual_scale, ws.rho[m - 1],
                     polish_gate);
#endif
      if (res.prim <= res.eps_prim && res.dual <= res.eps_dual) {
        sol.status = SolveStatus::solved;
        ++it;
        break;
      }
      if (!std::isfinite(res.prim) || res.prim > 1e12 || norm_inf(y) > 1e14) {
        sol.status = SolveStatus::diverged;
        ++it;
        break;
      }
      // Primal infeasibility certificate from the accumulated dual drift:
      // A^T v ~ 0 with a strictly negative support value.
      if ((it + 1) % (20 * check_every) == 0) {
        bool valid = true;
        double vnorm = 0.0;
        std::vector<double> v(m);
        for (int r = 0; r < m; ++r) {
          v[r] = y[r] - y_snapshot[r];
          vnorm = std::max(vnorm, std::abs(v[r]));
        }
        if (vnorm > 1e-9) {
          double support = 0.0;
          for (int r = 0; r < m; ++r) {
            v[r] /= vnorm;
            if (st.lo[r] == -kInf && v[r] < -1e-8) valid = false;
            if (st.up[r] == kInf && v[r] > 1e-8) valid = false;
            if (st.up[r] < kInf) support += st.up[r] * std::max(v[r], 0.0);
            if (st.lo[r] > -kInf) support += st.lo[r] * std::min(v[r], 0.0);
          }
          std::vector<double> atv(n, 0.0);
          st.rows.apply_transpose_add(v, atv);
          if (valid && norm_inf(atv) <= 1e-8 && support < -1e-8) {
            sol.status = SolveStatus::infeasible;
            ++it;
            break;
          }
        }
        y_snapshot = y;
      }
      if (polish_budget > 0 && std::max(res.prim / res.prim_scale, res.dual / res.dual_scale) <=
                                   polish_gate) {
        --polish_budget;
        polish_gate *= 0.1;
        if (polish_and_check(it + 1)) {
          sol.objective = qp.objective(sol.x);
          return sol;
        }
      }
      if (cfg.adaptive_rho && (it + 1) % (5 * check_every) == 0) {
        const double ratio = (res.prim / res.prim_scale) / (res.dual / res.dual_scale + 1e-300);
        double scale = 1.0;
        if (ratio > 10.0) scale = 2.0;
        else if (ratio < 0.1) scale = 0.5;
        if (scale != 1.0) {
          for (double& r : ws.rho) r *= scale;
          ws.refresh_preconditioner(cfg.sigma);
        }
      }
    }
  }

  sol.x = x;
  sol.dual = y;
  sol.iterations = it;
  const Residuals res = compute_residuals(qp, st, x, z, y, cfg.eps_abs, cfg.eps_rel);
  sol.primal_residual = res.prim;
  sol.dual_residual = res.dual;

  if (cfg.polish) {
    QPSolution cand = sol;
    const double act_tol = std::max(1e-7, 50.0 * std::max(sol.primal_residual, cfg.eps_abs));
    bool meets_eps = false;
    if (try_polish(qp, st, z, y, cfg, act_tol, cand, meets_eps)) {
      cand.status = meets_eps ? SolveStatus::solved : sol.status;
      cand.iterations = sol.iterations;
      sol = cand;
    }
  }
  sol.objective = qp.objective(sol.x);
  return sol;
}

}  // namespace

QPSolution solve(const SparseQP& qp, const SplitQPConfig& cfg) {
  // Normalize the cost so the penalty parameter works at unit scale; the
  // constraint rows are already +-1 entries. Duals scale back afterwards.
  double hnorm = qp.hessian_norm_hint;
  if (hnorm <= 0.0 && qp.hessian_apply) {
    std::vector<double> probe(qp.num_vars), hp(qp.num_vars);
    Rng prng(0xabcde);
    for (double& v : probe) v = prng.uniform(-1.0, 1.0);
    for (int pw = 0; pw < 8; ++pw) {
      const double nrm = norm2(probe);
      if (nrm == 0.0) break;
      for (double& v : probe) v /= nrm;
      qp.hessian_apply(probe, hp);
      hnorm = norm2(hp);
      probe = hp;
    }
  }
  const double qnorm = qp.linear.empty() ? 0.0 : norm_inf(qp.linear);
  const double cost_scale = 1.0 / std::max({1.0, hnorm, qnorm});

  SparseQP scaled = qp;
  if (cost_scale != 1.0) {
    if (qp.hessian_apply) {
      const auto inner = qp.hessian_apply;
      scaled.hessian_apply = [inner, cost_scale](const std::vector<double>& x,
                                                 std::vector<double>& y) {
        inner(x, y);
        for (double& v : y) v *= cost_scale;
      };
    }
    for (double& v : scaled.linear) v *= cost_scale;
    for (double& v : scaled.hessian_diag) v *= cost_scale;
  }

  std::vector<double> x0 = cfg.warm_start_x;
  QPSolution best = solve_once(scaled, cfg, x0);
  int attempt = 0;
  Rng rng(cfg.seed);
  while (best.status != SolveStatus::solved && best.status != SolveStatus::infeasible &&
         attempt < cfg.restarts) {
    ++attempt;
    std::vector<double> xp = best.x;
    for (double& v : xp) v += rng.normal(0.0, 1.0 + std::abs(v) * 0.01);
    QPSolution next = solve_once(scaled, cfg, xp);
    if (next.status == SolveStatus::solved ||
        std::max(next.primal_residual, next.dual_residual) <
            std::max(best.primal_residual, best.dual_residual))
      best = next;
  }
  if (cost_scale != 1.0) {
    for (double& v : best.dual) v /= cost_scale;
    best.dual_residual /= cost_scale;  // primal residuals are scale-free
    best.objective = qp.objective(best.x);
  }
  return best;
}

std::string QPSolution::to_json() const {
  nlohmann::json j;
  j["x"] = x;
  j["dual"] = dual;
  j["primal_residual"] = primal_residual;
  j["dual_residual"] = dual_residual;
  j["objective"] = objective;
  j["iterations"] = iterations;
  j["status"] = status == SolveStatus::solved       ? "solved"
                : status == SolveStatus::diverged   ? "diverged"
                : status == SolveStatus::infeasible ? "infeasible"
                                                    : "max_iter";
  j["polished"] = polished;
  return j.dump(2);
}

SparseQP assemble(const snpoly::SNPolytope& poly, const model::LaplacianOperator& l,
                  const model::SideConstraints& side) {
  if (l.n() != poly.n) throw std::invalid_argument("assemble: operator size mismatch");
  SparseQP qp;
  qp.num_vars = poly.num_vars;
  qp.num_inputs = poly.n;
  const model::LaplacianOperator lap = l;  // value copy shares the matrix
  const int n = poly.n;
  qp.hessian_apply = [lap, n](const std::vector<double>& x, std::vector<double>& y) {
    std::vector<double> xin(x.begin(), x.begin() + n), hin;
    lap.apply_reg(xin, hin);
    y.assign(x.size(), 0.0);
    for (int i = 0; i < n; ++i) y[i] = 2.0 * hin[i];
  };
  qp.hessian_norm_hint = 2.0 * (l.norm_inf() + 2.0 * std::abs(l.mu));
  qp.hessian_diag.assign(poly.num_vars, 0.0);
  for (int i = 0; i < n; ++i)
    qp.hessian_diag[i] = 2.0 * (l.degree[i] - l.a->entries(i, i) - l.mu * (1.0 - 1.0 / n));
  qp.eq.cols = qp.ineq.cols = poly.num_vars;
  for (const auto& r : poly.eq_rows) qp.eq.add_row(r.idx, r.val, r.rhs);
  for (const auto& r : poly.ineq_rows) qp.ineq.add_row(r.idx, r.val, r.rhs);
  for (const auto& sc : side) {
    if (sc.i < 0 || sc.i >= n || sc.j < 0 || sc.j >= n)
      throw std::invalid_argument("assemble: side constraint index out of range");
    // x_i + gap <= x_j  ->  x_i - x_j <= -gap
    qp.ineq.add_row({poly.input_idx[sc.i], poly.input_idx[sc.j]}, {1.0, -1.0}, -sc.gap);
  }
  return qp;
}

SparseQP assemble_linear(const snpoly::SNPolytope& poly, const std::vector<double>& c_inputs,
                         const model::SideConstraints& side) {
  if (static_cast<int>(c_inputs.size()) != poly.n)
    throw std::invalid_argument("assemble_linear: objective length mismatch");
  model::SimilarityMatrix zero(Mat(poly.n, poly.n));
  SparseQP qp = assemble(poly, model::laplacian(zero), side);
  qp.hessian_apply = nullptr;
  qp.linear.assign(poly.num_vars, 0.0);
  for (int i = 0; i < poly.n; ++i) qp.linear[poly.input_idx[i]] = c_inputs[i];
  return qp;
}

double fiedler_fraction_mu(model::LaplacianOperator& l, double fraction) {
  if (fraction < 0.0 || fraction >= 1.0)
    throw std::invalid_argument("fiedler_fraction_mu: fraction must lie in [0,1)");
  if (!l.lambda2.has_value()) {
    const auto fr = spectral::fiedler(l);
    l.lambda2 = fr.lambda2;
  }
  return fraction * (*l.lambda2);
}

}  // namespace snperm::splitqp
