#include "snperm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace snperm::spectral {

namespace {

// Implicit-shift QL for a symmetric tridiagonal matrix; eigenvalues returned
// in d (ascending), eigenvectors accumulated in the columns of z.
void tridiag_eig(std::vector<double>& d, std::vector<double>& e, Mat& z) {
  const int n = static_cast<int>(d.size());
  if (n == 0) return;
  e.push_back(0.0);
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-300 + 2.3e-16 * dd) break;
      }
      if (m != l) {
        if (iter++ == 50) throw std::runtime_error("tridiag_eig: too many iterations");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        for (int i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int k = 0; k < n; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
        if (r == 0.0 && m - 1 >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  // Sort ascending, carrying eigenvectors along.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });
  std::vector<double> ds(n);
  Mat zs(z.rows, n);
  for (int c = 0; c < n; ++c) {
    ds[c] = d[order[c]];
    for (int r = 0; r < z.rows; ++r) zs(r, c) = z(r, order[c]);
  }
  d = std::move(ds);
  z = std::move(zs);
}

void orthogonalize(std::vector<double>& w, const std::vector<std::vector<double>>& basis) {
  for (const auto& q : basis) {
    const double c = dot(w, q);
    for (size_t i = 0; i < w.size(); ++i) w[i] -= c * q[i];
  }
}

}  // namespace

FiedlerResult fiedler(const model::LaplacianOperator& l, double tol, int max_iter) {
  const int n = l.n();
  FiedlerResult res;
  if (n <= 1) {
    res.lambda2 = 0.0;
    res.vector.assign(n, 0.0);
    res.converged = true;
    res.disconnected = true;
    return res;
  }

  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  const std::vector<double> ones_unit(n, inv_sqrt_n);
  double sigma = l.norm_inf();  // = 2 max degree, Gershgorin bound on L
  if (sigma == 0.0) {
    // Edgeless graph: L = 0, every direction is an eigenvector. Return the
    // degenerate constant so downstream orderings fall back to index order.
    res.lambda2 = 0.0;
    res.vector.assign(n, 0.0);
    res.converged = true;
    res.disconnected = true;
    return res;
  }

  // y = (sigma I - L) x
  int matvecs = 0;
  auto apply_shifted = [&](const std::vector<double>& x, std::vector<double>& y) {
    l.apply(x, y);
    for (int i = 0; i < n; ++i) y[i] = sigma * x[i] - y[i];
    ++matvecs;
  };

  if (n == 2) {
    res.vector = {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)};
    std::vector<double> ly = l.apply(res.vector);
    res.lambda2 = dot(res.vector, ly);
    res.residual = 0.0;
    res.converged = true;
    res.disconnected = res.lambda2 <= 1e-10 * std::max(1.0, sigma);
    res.iterations = 1;
    return res;
  }

  const int max_basis = std::min(n - 1, 120);
  Rng rng(0x5ee5eed5eedULL);
  std::vector<double> start(n);
  for (int i = 0; i < n; ++i) start[i] = rng.uniform(-1.0, 1.0);

  std::vector<double> best_ritz;
  double best_theta = -1.0;

  const int max_restarts = std::max(2, max_iter / std::max(1, max_basis));
  for (int restart = 0; restart < max_restarts && matvecs < max_iter; ++restart) {
    std::vector<std::vector<double>> V;
    std::vector<double> alpha, beta;
    std::vector<double> v = start;
    // Project out the trivial eigenvector and normalize.
    {
      const double c = dot(v, ones_unit);
      for (int i = 0; i < n; ++i) v[i] -= c * ones_unit[i];
      const double nv = norm2(v);
      if (nv < 1e-14) {  // degenerate start, perturb
        for (int i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
        const double c2 = dot(v, ones_unit);
        for (int i = 0; i < n; ++i) v[i] -= c2 * ones_unit[i];
      }
      const double nv2 = norm2(v);
      for (int i = 0; i < n; ++i) v[i] /= nv2;
    }

    bool breakdown = false;
    for (int k = 0; k < max_basis && matvecs < max_iter; ++k) {
      V.push_back(v);
      std::vector<double> w(n);
      apply_shifted(v, w);
      const double a = dot(w, v);
      alpha.push_back(a);
      for (int i = 0; i < n; ++i) w[i] -= a * v[i];
      if (k > 0)
        for (int i = 0; i < n; ++i) w[i] -= beta.back() * V[k - 1][i];
      // Full reorthogonalization against 1 and the whole basis.
      {
        const double c = dot(w, ones_unit);
        for (int i = 0; i < n; ++i) w[i] -= c * ones_unit[i];
      }
      orthogonalize(w, V);
      orthogonalize(w, V);
      const double b = norm2(w);
      if (b < 1e-12 * sigma) {
        breakdown = true;
        break;
      }
      beta.push_back(b);
      for (int i = 0; i < n; ++i) v[i] = w[i] / b;
    }

    const int k = static_cast<int>(alpha.size());
    if (k == 0) break;
    std::vector<double> d = alpha;
    std::vector<double> e(k, 0.0);
    for (int i = 0; i + 1 < k; ++i) e[i] = beta[i];
    e.resize(k > 0 ? k - 1 : 0);
    Mat z = Mat::identity(k);
    std::vector<double> esub(e);
    tridiag_eig(d, esub, z);

    // Largest Ritz pair of the shifted operator.
    const int top = k - 1;
    std::vector<double> ritz(n, 0.0);
    for (int c = 0; c < k; ++c) {
      const double s = z(c, top);
      for (int i = 0; i < n; ++i) ritz[i] += s * V[c][i];
    }
    const double nr = norm2(ritz);
    for (int i = 0; i < n; ++i) ritz[i] /= nr;
    const double theta = d[top];

    std::vector<double> ly = l.apply(ritz);
    const double lam = dot(ritz, ly);
    double rnorm = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = ly[i] - lam * ritz[i];
      rnorm += r * r;
    }
    rnorm = std::sqrt(rnorm);

    if (theta > best_theta) {
      best_theta = theta;
      best_ritz = ritz;
      res.lambda2 = lam;
      res.residual = rnorm;
    }
    if (rnorm <= tol * std::max(1.0, sigma) || breakdown) {
      res.converged = rnorm <= 10.0 * tol * std::max(1.0, sigma);
      break;
    }
    start = ritz;  // thick-restart style: continue from the best Ritz vector
  }

  // Fallback: plain shifted power iteration if Lanczos never converged.
  if (!res.converged && !best_ritz.empty()) {
    std::vector<double> v = best_ritz;
    std::vector<double> w(n);
    for (int it = 0; it < 2000 && matvecs < max_iter + 2000; ++it) {
      apply_shifted(v, w);
      const double c = dot(w, ones_unit);
      for (int i = 0; i < n; ++i) w[i] -= c * ones_unit[i];
      const double nw = norm2(w);
      if (nw == 0.0) break;
      for (int i = 0; i < n; ++i) v[i] = w[i] / nw;
      if (it % 16 == 15) {
        std::vector<double> ly = l.apply(v);
        const double lam = dot(v, ly);
        double rnorm = 0.0;
        for (int i = 0; i < n; ++i) {
          const double r = ly[i] - lam * v[i];
          rnorm += r * r;
        }
        rnorm = std::sqrt(rnorm);
        if (rnorm < res.residual) {
          best_ritz = v;
          res.lambda2 = lam;
          res.residual = rnorm;
        }
        if (rnorm <= 10.0 * tol * std::max(1.0, sigma)) {
          res.converged = true;
          break;
        }
      }
    }
  }

  res.vector = best_ritz.empty() ? std::vector<double>(n, 0.0) : best_ritz;
  res.iterations = matvecs;
  if (std::abs(res.lambda2) < 1e-8 * std::max(1.0, sigma)) {
    res.disconnected = true;
    if (res.lambda2 < 0.0) res.lambda2 = 0.0;
  }
  return res;
}

SpectralOrderResult spectral_order(const model::SimilarityMatrix& a, double tol, int max_iter) {
  SpectralOrderResult out;
  model::LaplacianOperator l = model::laplacian(a);
  out.fiedler = fiedler(l, tol, max_iter);
  const int n = a.n;
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const auto& y = out.fiedler.vector;
  std::stable_sort(idx.begin(), idx.end(), [&](int p, int q) { return y[p] < y[q]; });
  out.order.assign(n, 0);
  for (int r = 0; r < n; ++r) out.order[idx[r]] = r + 1;
  return out;
}

}  // namespace snperm::spectral
