#include "snperm/frankwolfe.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "snperm/snpoly.hpp"

namespace snperm::frankwolfe {

namespace {

void check_finite(const std::vector<double>& c, const char* who) {
  for (double v : c)
    if (std::isnan(v)) throw std::invalid_argument(std::string(who) + ": NaN in objective vector");
}

double now_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

PermutationVec lmo_permutahedron(const std::vector<double>& c) {
  check_finite(c, "lmo_permutahedron");
  const int n = static_cast<int>(c.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return c[a] > c[b]; });
  PermutationVec x(n);
  for (int k = 0; k < n; ++k) x[idx[k]] = k + 1;
  return x;
}

PermutationVec lmo_tiebroken(const std::vector<double>& c) {
  check_finite(c, "lmo_tiebroken");
  const int n = static_cast<int>(c.size());
  if (n < 2) throw std::invalid_argument("lmo_tiebroken: needs n >= 2");
  if (n == 2) return {1, 2};

  // Interior positions sorted by cost descending; the k-th largest interior
  // cost is matched with the k-th smallest unused value.
  std::vector<int> interior(n - 2);
  std::iota(interior.begin(), interior.end(), 1);
  std::stable_sort(interior.begin(), interior.end(), [&](int a, int b) { return c[a] > c[b]; });
  const int m = n - 2;
  std::vector<double> d(m);
  for (int k = 0; k < m; ++k) d[k] = c[interior[k]];

  // With first/last values (alpha, beta) removed, the k-th smallest unused
  // value (1-based k) is k + [k >= alpha] + [k >= beta-1]. Suffix sums of d
  // make each candidate pair O(1).
  double base = 0.0;
  for (int k = 0; k < m; ++k) base += d[k] * (k + 1);
  std::vector<double> suffix(m + 2, 0.0);
  for (int k = m - 1; k >= 0; --k) suffix[k + 1] = suffix[k + 2] + d[k];
  auto suffix_from = [&](int t) { return (t >= 1 && t <= m) ? suffix[t] : 0.0; };

  double best = std::numeric_limits<double>::infinity();
  int best_a = 1, best_b = n;
  for (int a = 1; a < n; ++a) {
    for (int b = n; b > a; --b) {
      const double cost =
          c[0] * a + c[n - 1] * b + base + suffix_from(a) + suffix_from(b - 1);
      if (cost < best) {
        best = cost;
        best_a = a;
        best_b = b;
      }
    }
  }

  PermutationVec x(n, 0);
  x[0] = best_a;
  x[n - 1] = best_b;
  int value = 1;
  for (int k = 0; k < m; ++k) {
    while (value == best_a || value == best_b) ++value;
    x[interior[k]] = value++;
  }
  return x;
}

double side_penalty(const std::vector<double>& x, const model::SideConstraints& side, double rho) {
  double s = 0.0;
  for (const auto& sc : side) {
    const double h = x[sc.i] + sc.gap - x[sc.j];
    if (h > 0.0) s += h * h;
  }
  return rho * s;
}

void side_penalty_grad(const std::vector<double>& x, const model::SideConstraints& side, double rho,
                       std::vector<double>& g) {
  for (const auto& sc : side) {
    const double h = x[sc.i] + sc.gap - x[sc.j];
    if (h > 0.0) {
      g[sc.i] += 2.0 * rho * h;
      g[sc.j] -= 2.0 * rho * h;
    }
  }
}

namespace {

struct ObjectiveView {
  int dim = 0;
  std::function<double(const std::vector<double>&)> value;
  std::function<std::vector<double>(const std::vector<double>&)> grad;
  std::function<std::vector<double>(const std::vector<double>&)> lmo;
  std::function<std::vector<double>(const std::vector<double>&)> to_vector;
  bool convex = true;
};

ObjectiveView make_view(const model::TwoSumProblem& problem, const FWConfig& config, LmoKind lmo,
                        double rho) {
  const auto& L = problem.laplacian;
  const int n = L.n();
  ObjectiveView view;

  if (lmo == LmoKind::birkhoff) {
    birkhoff::YMatrix y = config.y.n == n ? config.y : birkhoff::YMatrix::identity_ordering(n);
    const auto scheme = config.scheme;
    view.dim = n * n;
    view.convex = (scheme == birkhoff::RegScheme::vector) || L.mu == 0.0;
    auto as_mat = [n](const std::vector<double>& flat) {
      Mat x(n, n);
      x.a = flat;
      return x;
    };
    view.value = [=, &L](const std::vector<double>& flat) {
      const Mat x = as_mat(flat);
      double f = birkhoff::matrix_reg_objective(x, y, L, L.mu, scheme).value;
      if (rho > 0.0) f += side_penalty(birkhoff::project_to_vector(x), problem.constraints, rho);
      return f;
    };
    view.grad = [=, &L](const std::vector<double>& flat) {
      const Mat x = as_mat(flat);
      Mat g = birkhoff::matrix_reg_objective(x, y, L, L.mu, scheme).gradient;
      if (rho > 0.0) {
        std::vector<double> gx(n, 0.0);
        side_penalty_grad(birkhoff::project_to_vector(x), problem.constraints, rho, gx);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) g(i, j) += gx[i] * (j + 1);
      }
      return g.a;
    };
    view.lmo = [n](const std::vector<double>& g) {
      Mat c(n, n);
      c.a = g;
      const PermutationVec pi = birkhoff::assignment_lmo(c);
      Mat v = perm_matrix(pi);
      return v.a;
    };
    view.to_vector = [n](const std::vector<double>& flat) {
      Mat x(n, n);
      x.a = flat;
      return birkhoff::project_to_vector(x);
    };
    return view;
  }

  view.dim = n;
  view.convex = true;
  view.value = [=, &problem, &L](const std::vector<double>& x) {
    double f = L.quad_reg(x);
    if (rho > 0.0) f += side_penalty(x, problem.constraints, rho);
    return f;
  };
  view.grad = [=, &problem, &L](const std::vector<double>& x) {
    std::vector<double> g;
    L.apply_reg(x, g);
    for (double& v : g) v *= 2.0;
    if (rho > 0.0) side_penalty_grad(x, problem.constraints, rho, g);
    return g;
  };
  if (lmo == LmoKind::tiebroken) {
    view.lmo = [](const std::vector<double>& g) { return perm_as_vector(lmo_tiebroken(g)); };
  } else {
    view.lmo = [](const std::vector<double>& g) { return perm_as_vector(lmo_permutahedron(g)); };
  }
  view.to_vector = [](const std::vector<double>& x) { return x; };
  return view;
}

// One Frank-Wolfe run at a fixed penalty weight, warm-started from x.
void fw_run(const ObjectiveView& view, const FWConfig& config, std::vector<double>& x,
            FWTrace& trace, int& iter_base, const std::chrono::steady_clock::time_point& t0) {
  double best_f = view.value(x);
  std::vector<double> best_x = x;

  for (int k = 0; k < config.max_iter; ++k) {
    const std::vector<double> g = view.grad(x);
    const std::vector<double> s = view.lmo(g);
    double gap = 0.0;
    for (size_t i = 0; i < x.size(); ++i) gap += g[i] * (x[i] - s[i]);
    const double f = view.value(x);
    trace.rows.push_back({iter_base + k, f, gap, now_seconds(t0)});
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
    trace.relative_gap = gap / std::max(std::abs(f), 1e-30);
    if (gap <= config.gap_tol_relative * std::abs(f) || gap <= 1e-12 * std::max(1.0, std::abs(f))) {
      trace.converged = true;
      trace.iterations = iter_base + k + 1;
      break;
    }

    std::vector<double> d(x.size());
    for (size_t i = 0; i < x.size(); ++i) d[i] = s[i] - x[i];
    // The schedule continues across penalty phases so a warm start is not
    // thrown away by an initial full-length step.
    double gamma = 2.0 / (iter_base + k + 2.0);
    if (config.step == StepRule::line_search) {
      // Golden-section on [0,1]; phi is convex for the convex objectives.
      const double invphi = 0.6180339887498949;
      double a = 0.0, b = 1.0;
      double c1 = b - invphi * (b - a), c2 = a + invphi * (b - a);
      auto phi = [&](double t) {
        std::vector<double> xt(x.size());
        for (size_t i = 0; i < x.size(); ++i) xt[i] = x[i] + t * d[i];
        return view.value(xt);
      };
      double f1 = phi(c1), f2 = phi(c2);
      for (int it = 0; it < 48; ++it) {
        if (f1 <= f2) {
          b = c2;
          c2 = c1;
          f2 = f1;
          c1 = b - invphi * (b - a);
          f1 = phi(c1);
        } else {
          a = c1;
          c1 = c2;
          f1 = f2;
          c2 = a + invphi * (b - a);
          f2 = phi(c2);
        }
      }
      const double t = 0.5 * (a + b);
      // Keep monotonicity even if the section search was misled.
      if (phi(t) <= f) gamma = t;
      else gamma = 0.0;
      if (gamma == 0.0) {
        trace.iterations = iter_base + k + 1;
        break;  // no descent along the FW direction
      }
    }
    for (size_t i = 0; i < x.size(); ++i) x[i] += gamma * d[i];
    if (!std::isfinite(view.value(x)))
      throw std::runtime_error("fw_solve: objective became non-finite");
    trace.iterations = iter_base + k + 1;
  }
  iter_base = trace.iterations;
  if (view.value(x) > best_f) x = best_x;
}

}  // namespace

FWTrace fw_solve(const model::TwoSumProblem& problem, const FWConfig& config, LmoKind lmo) {
  const auto& L = problem.laplacian;
  const int n = L.n();
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<double> rhos;
  if (problem.constraints.empty()) {
    rhos = {0.0};
  } else if (config.penalty_weight > 0.0) {
    rhos = {config.penalty_weight};
  } else {
    const double scale = std::max(1.0, L.norm_inf());
    rhos = {10.0 * scale, 100.0 * scale, 1000.0 * scale};
  }

  FWTrace trace;
  std::vector<double> x;
  if (lmo == LmoKind::birkhoff) {
    x = Mat::identity(n).a;
  } else {
    x = perm_as_vector(identity_perm(n));
  }

  int iter_base = 0;
  for (double rho : rhos) {
    const ObjectiveView view = make_view(problem, config, lmo, rho);
    trace.objective_convex = view.convex;
    trace.converged = false;
    fw_run(view, config, x, trace, iter_base, t0);
  }

  const ObjectiveView final_view = make_view(problem, config, lmo, rhos.back());
  trace.final_point.x = x;
  trace.final_point.duality_gap = trace.rows.empty() ? 0.0 : trace.rows.back().gap;
  trace.solution_vector = final_view.to_vector(x);
  trace.objective = final_view.value(x);
  trace.objective_unpenalized = L.quad_reg(trace.solution_vector);
  {
    // Feasibility of the projected vector wrt the permutahedron plus the
    // worst side-constraint violation.
    const auto rep = snpoly::permutahedron_contains(
        trace.solution_vector, perm_as_vector(identity_perm(n)), 1e-9);
    double viol = std::max(0.0, -rep.worst_prefix_slack) + std::abs(rep.sum_residual);
    for (const auto& sc : problem.constraints)
      viol = std::max(viol, trace.solution_vector[sc.i] + sc.gap - trace.solution_vector[sc.j]);
    trace.final_point.feasibility_residual = std::max(0.0, viol);
  }
  return trace;
}

}  // namespace snperm::frankwolfe
