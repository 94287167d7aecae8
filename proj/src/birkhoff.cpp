#include "snperm/birkhoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace snperm::birkhoff {

DoublyStochastic DoublyStochastic::checked(Mat m, double tol) {
  if (m.rows != m.cols) throw std::invalid_argument("DoublyStochastic: matrix must be square");
  const int n = m.rows;
  for (int i = 0; i < n; ++i) {
    double rs = 0.0, cs = 0.0;
    for (int j = 0; j < n; ++j) {
      if (m(i, j) < -tol) throw std::invalid_argument("DoublyStochastic: negative entry");
      rs += m(i, j);
      cs += m(j, i);
    }
    if (std::abs(rs - 1.0) > tol || std::abs(cs - 1.0) > tol)
      throw std::invalid_argument("DoublyStochastic: row/column sums must be 1");
  }
  DoublyStochastic d;
  d.n = n;
  d.entries = std::move(m);
  return d;
}

YMatrix YMatrix::identity_ordering(int n) {
  YMatrix y;
  y.n = n;
  y.p = 1;
  y.columns = Mat(n, 1);
  for (int i = 0; i < n; ++i) y.columns(i, 0) = i + 1;
  return y;
}

YMatrix YMatrix::sorted_uniform(int n, int p, Rng& rng) {
  YMatrix y;
  y.n = n;
  y.p = p;
  y.columns = Mat(n, p);
  std::vector<double> col(n);
  for (int c = 0; c < p; ++c) {
    for (int i = 0; i < n; ++i) col[i] = rng.uniform();
    std::sort(col.begin(), col.end());
    for (int i = 0; i < n; ++i) y.columns(i, c) = col[i];
  }
  return y;
}

bool YMatrix::columns_have_unique_entries(double tol) const {
  std::vector<double> col(n);
  for (int c = 0; c < p; ++c) {
    for (int i = 0; i < n; ++i) col[i] = columns(i, c);
    std::sort(col.begin(), col.end());
    for (int i = 1; i < n; ++i)
      if (col[i] - col[i - 1] <= tol) return false;
  }
  return true;
}

PermutationVec assignment_lmo(const Mat& c) {
  if (c.rows != c.cols) throw std::invalid_argument("assignment_lmo: cost matrix must be square");
  const int n = c.rows;
  for (double v : c.a)
    if (std::isnan(v)) throw std::invalid_argument("assignment_lmo: NaN cost");

  // Shortest augmenting paths with potentials, 1-based working arrays.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  PermutationVec pi(n);
  for (int j = 1; j <= n; ++j) pi[p[j] - 1] = j;
  return pi;
}

std::vector<double> project_to_vector(const Mat& x) {
  if (x.rows != x.cols) throw std::invalid_argument("project_to_vector: matrix must be square");
  const int n = x.rows;
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i] += x(i, j) * (j + 1);
  return out;
}

std::vector<double> project_to_vector(const DoublyStochastic& x) {
  return project_to_vector(x.entries);
}

RegObjective matrix_reg_objective(const Mat& x, const YMatrix& y, const model::LaplacianOperator& l,
                                  double mu, RegScheme scheme) {
  const int n = l.n();
  if (x.rows != n || x.cols != n) throw std::invalid_argument("matrix_reg_objective: shape mismatch");
  if (y.n != n) throw std::invalid_argument("matrix_reg_objective: Y row count mismatch");
  const int p = y.p;

  const Mat xy = matmul(x, y.columns);  // n x p
  Mat lxy(n, p);                        // column-wise Laplacian applies
  std::vector<double> col(n), lcol(n);
  double value = 0.0;
  for (int c = 0; c < p; ++c) {
    for (int i = 0; i < n; ++i) col[i] = xy(i, c);
    l.apply(col, lcol);
    if (scheme == RegScheme::vector && mu != 0.0) {
      double mean = 0.0;
      for (double t : col) mean += t;
      mean /= n;
      for (int i = 0; i < n; ++i) lcol[i] -= mu * (col[i] - mean);
    }
    for (int i = 0; i < n; ++i) {
      lxy(i, c) = lcol[i];
      value += col[i] * lcol[i];
    }
  }
  value /= p;

  // grad = (2/p) * Op(X Y) Y^T  (+ matrix-scheme penalty gradient below)
  RegObjective out;
  out.gradient = Mat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int c = 0; c < p; ++c) s += lxy(i, c) * y.columns(j, c);
      out.gradient(i, j) = 2.0 * s / p;
    }

  if (scheme == RegScheme::matrix && mu != 0.0) {
    // -(mu/p) ||P X||_F^2, P X = X with column means removed.
    double pen = 0.0;
    for (int j = 0; j < n; ++j) {
      double mean = 0.0;
      for (int i = 0; i < n; ++i) mean += x(i, j);
      mean /= n;
      for (int i = 0; i < n; ++i) {
        const double d = x(i, j) - mean;
        pen += d * d;
        out.gradient(i, j) -= 2.0 * mu / p * d;
      }
    }
    value -= mu / p * pen;
  }
  out.value = value;
  return out;
}

double mu_upper_bound(const model::LaplacianOperator& l, const YMatrix& y, RegScheme scheme) {
  if (!l.lambda2.has_value())
    throw std::invalid_argument("mu_upper_bound: lambda2 not cached on operator");
  if (scheme == RegScheme::vector) return *l.lambda2;
  // lambda2(L) * lambda_min(Y Y^T); rank-deficient Y (p < n) gives 0.
  Mat yyt(y.n, y.n);
  for (int i = 0; i < y.n; ++i)
    for (int j = 0; j < y.n; ++j) {
      double s = 0.0;
      for (int c = 0; c < y.p; ++c) s += y.columns(i, c) * y.columns(j, c);
      yyt(i, j) = s;
    }
  const std::vector<double> ev = symmetric_eigenvalues(yyt);
  const double lmin = std::max(0.0, ev.front());
  return *l.lambda2 * lmin;
}

DoublyStochastic random_doubly_stochastic(int n, Rng& rng) {
  Mat m(n, n);
  for (double& v : m.a) v = rng.uniform(0.05, 1.0);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      double rs = 0.0;
      for (int j = 0; j < n; ++j) rs += m(i, j);
      for (int j = 0; j < n; ++j) m(i, j) /= rs;
    }
    for (int j = 0; j < n; ++j) {
      double cs = 0.0;
      for (int i = 0; i < n; ++i) cs += m(i, j);
      for (int i = 0; i < n; ++i) m(i, j) /= cs;
      worst = std::max(worst, std::abs(cs - 1.0));
    }
    if (worst <= 1e-10) break;
  }
  return DoublyStochastic::checked(std::move(m), 1e-8);
}

std::vector<double> symmetric_eigenvalues(const Mat& a) {
  if (a.rows != a.cols) throw std::invalid_argument("symmetric_eigenvalues: matrix must be square");
  const int n = a.rows;
  Mat m = a;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale += m(i, i) * m(i, i);
    if (off <= 1e-26 * std::max(1.0, scale)) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(m(p, q)) < 1e-300) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = m(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace snperm::birkhoff
