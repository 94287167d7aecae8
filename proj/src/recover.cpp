#include "snperm/recover.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "snperm/snpoly.hpp"

namespace snperm::recover {

PermutationVec order_round(const std::vector<double>& x) {
  for (double v : x)
    if (std::isnan(v)) throw std::invalid_argument("order_round: NaN input");
  const int n = static_cast<int>(x.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return x[a] < x[b]; });
  PermutationVec pi(n);
  for (int r = 0; r < n; ++r) pi[idx[r]] = r + 1;
  return pi;
}

RoundResult sample_round(const std::vector<double>& x, int trials, double variance, Rng& rng,
                         const model::LaplacianOperator& l) {
  if (trials < 1) throw std::invalid_argument("sample_round: trials must be >= 1");
  RoundResult best;
  best.perm = order_round(x);
  best.two_sum = model::two_sum(l, best.perm);
  if (variance <= 0.0) return best;
  const double sd = std::sqrt(variance);
  std::vector<double> xt(x.size());
  for (int t = 0; t < trials; ++t) {
    for (size_t i = 0; i < x.size(); ++i) xt[i] = x[i] + rng.normal(0.0, sd);
    PermutationVec pi = order_round(xt);
    const double val = model::two_sum(l, pi);
    if (val < best.two_sum) {
      best.two_sum = val;
      best.perm = std::move(pi);
    }
  }
  return best;
}

std::vector<double> rescale_to_rank_range(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  if (n == 0) return {};
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<double> out(n, 0.5 * (n + 1));
  if (hi - lo <= 1e-300) return out;
  const double scale = (n - 1) / (hi - lo);
  for (int i = 0; i < n; ++i) out[i] = 1.0 + (x[i] - lo) * scale;
  return out;
}

namespace {

// First lambda at which the k-th majorization prefix of (y - lambda*pi)/(w - lambda)
// becomes tight, as a root of the piecewise-linear excess
//   F(lambda) = [top-k sum of (a_p - lambda c_p)] + lambda T_k - w T_k,
// where a is y arranged by descending vertex value and c = (n, n-1, ..., 1).
// F is nondecreasing and convex with F(0) = -slack_k <= 0; a discrete Newton
// from the right lands exactly on the crossing.
double prefix_crossing(const std::vector<double>& a, int k, double w, double slack_tol) {
  const int n = static_cast<int>(a.size());
  std::vector<double> v(n);
  std::vector<int> ord(n);
  double tk = 0.0;
  for (int i = 1; i <= k; ++i) tk += n + 1 - i;

  auto eval = [&](double lam, double& a_sel, double& c_sel) {
    for (int p = 0; p < n; ++p) v[p] = a[p] - lam * (n - p);
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(), [&](int p, int q) { return v[p] > v[q]; });
    a_sel = 0.0;
    c_sel = 0.0;
    for (int t = 0; t < k; ++t) {
      a_sel += a[ord[t]];
      c_sel += n - ord[t];
    }
    return a_sel - lam * c_sel + lam * tk - w * tk - slack_tol;
  };

  double a_sel, c_sel;
  double lam = w;
  double f = eval(lam, a_sel, c_sel);
  if (f <= 0.0) return w;  // never binds before the weight runs out
  for (int it = 0; it < 200; ++it) {
    const double denom = tk - c_sel;
    if (denom <= 0.0) break;  // canonical piece: constant and nonpositive
    const double next = (w * tk + slack_tol - a_sel) / denom;
    if (!(next < lam)) break;
    lam = next;
    f = eval(lam, a_sel, c_sel);
    if (std::abs(f) <= 1e-13 * std::max(1.0, w * tk)) break;
    if (f <= 0.0) break;  // landed on the feasible side of the crossing
  }
  return std::max(0.0, std::min(lam, w));
}

}  // namespace

Decomposition decompose(const std::vector<double>& x, double tol) {
  const int n = static_cast<int>(x.size());
  const auto vref = perm_as_vector(identity_perm(n));
  const auto rep = snpoly::permutahedron_contains(x, vref, tol);
  if (!rep.member) throw std::invalid_argument("decompose: point is not in the permutahedron");

  Decomposition out;
  std::vector<double> y = x;
  double w = 1.0;
  const double slack_tol = 1e-11 * std::max(1.0, static_cast<double>(n));
  const double finish_tol = 1e-9 * std::max(1.0, static_cast<double>(n));

  for (int term = 0; term <= n; ++term) {
    const PermutationVec pi = order_round(y);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(y[i] - w * pi[i]));
    const bool last_slot = term == n;
    if (worst <= finish_tol * std::max(1.0, w) || last_slot || w <= slack_tol) {
      out.weights.push_back(w);
      out.perms.push_back(pi);
      break;
    }

    // Arrange y by descending vertex value; position p carries rank n-p.
    std::vector<double> a(n);
    for (int i = 0; i < n; ++i) a[n - pi[i]] = y[i];

    double lam = w;
    for (int k = 1; k < n; ++k) lam = std::min(lam, prefix_crossing(a, k, w, slack_tol));
    lam = std::max(lam, 0.0);
    if (lam <= 0.0) lam = std::min(w, slack_tol);  // numerical stall guard

    out.weights.push_back(lam);
    out.perms.push_back(pi);
    for (int i = 0; i < n; ++i) y[i] -= lam * pi[i];
    w -= lam;
    if (w <= 1e-15) break;
  }

  // Normalize away the last drops of weight drift and report the error.
  double total = 0.0;
  for (double wi : out.weights) total += wi;
  if (total > 0.0)
    for (double& wi : out.weights) wi /= total;
  std::vector<double> rec(n, 0.0);
  for (size_t t = 0; t < out.perms.size(); ++t)
    for (int i = 0; i < n; ++i) rec[i] += out.weights[t] * out.perms[t][i];
  double err = 0.0;
  for (int i = 0; i < n; ++i) err = std::max(err, std::abs(rec[i] - x[i]));
  out.reconstruction_error = err;
  return out;
}

}  // namespace snperm::recover
