#include "snperm/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace snperm::model {

SimilarityMatrix::SimilarityMatrix(Mat m) {
  if (m.rows != m.cols) throw std::invalid_argument("SimilarityMatrix: matrix must be square");
  for (int i = 0; i < m.rows; ++i)
    for (int j = i + 1; j < m.cols; ++j)
      if (std::abs(m(i, j) - m(j, i)) > 1e-9)
        throw std::invalid_argument("SimilarityMatrix: matrix must be symmetric");
  n = m.rows;
  entries = std::move(m);
}

void LaplacianOperator::apply(const std::vector<double>& x, std::vector<double>& y) const {
  const int m = n();
  y.assign(m, 0.0);
  const Mat& A = a->entries;
  for (int i = 0; i < m; ++i) {
    double s = degree[i] * x[i];
    const double* row = &A.a[static_cast<size_t>(i) * m];
    for (int j = 0; j < m; ++j) s -= row[j] * x[j];
    y[i] = s;
  }
}

void LaplacianOperator::apply_reg(const std::vector<double>& x, std::vector<double>& y) const {
  apply(x, y);
  if (mu != 0.0) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n();
    for (int i = 0; i < n(); ++i) y[i] -= mu * (x[i] - mean);
  }
}

std::vector<double> LaplacianOperator::apply(const std::vector<double>& x) const {
  std::vector<double> y;
  apply(x, y);
  return y;
}

double LaplacianOperator::quad(const std::vector<double>& x) const {
  std::vector<double> y;
  apply(x, y);
  return dot(x, y);
}

double LaplacianOperator::quad_reg(const std::vector<double>& x) const {
  std::vector<double> y;
  apply_reg(x, y);
  return dot(x, y);
}

double LaplacianOperator::norm_inf() const {
  double d = 0.0;
  for (double v : degree) d = std::max(d, v);
  return 2.0 * d;
}

LaplacianOperator laplacian(const SimilarityMatrix& a) {
  LaplacianOperator l;
  l.a = std::make_shared<SimilarityMatrix>(a);
  l.degree.assign(a.n, 0.0);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) l.degree[i] += a.entries(i, j);
  return l;
}

double two_sum(const LaplacianOperator& l, const PermutationVec& pi) {
  if (static_cast<int>(pi.size()) != l.n()) throw std::invalid_argument("two_sum: size mismatch");
  return two_sum(l, perm_as_vector(pi));
}

double two_sum(const LaplacianOperator& l, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != l.n()) throw std::invalid_argument("two_sum: size mismatch");
  return l.quad(x);
}

int r_score(const SimilarityMatrix& a, double tol) {
  // For i > j (1-based) both reference entries exist: row i-1 >= j and
  // column j+1 <= i, so comparisons against the diagonal are included.
  const Mat& A = a.entries;
  int violations = 0;
  for (int i = 1; i < a.n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (A(i, j) > A(i - 1, j) + tol) ++violations;
      if (A(i, j) > A(i, j + 1) + tol) ++violations;
    }
  }
  return violations;
}

double kendall_tau(const PermutationVec& pi, const PermutationVec& sigma) {
  if (pi.size() != sigma.size()) throw std::invalid_argument("kendall_tau: length mismatch");
  const int n = static_cast<int>(pi.size());
  if (n < 2) return 1.0;
  long long concordant = 0, discordant = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int s = (pi[i] - pi[j]) * (sigma[i] - sigma[j]);
      if (s > 0) ++concordant;
      else if (s < 0) ++discordant;
    }
  const double pairs = 0.5 * n * (n - 1);
  return static_cast<double>(concordant - discordant) / pairs;
}

double spectral_lower_bound(double lambda2, int n) {
  const double c_n = static_cast<double>(n) * (static_cast<double>(n) * n - 1.0) / 12.0;
  return lambda2 * c_n;
}

double spectral_lower_bound(const LaplacianOperator& l) {
  if (!l.lambda2.has_value())
    throw std::invalid_argument("spectral_lower_bound: lambda2 not available on operator");
  return spectral_lower_bound(*l.lambda2, l.n());
}

SideConstraints sample_ordering_constraints(const PermutationVec& pi_true, int count, Rng& rng) {
  const int n = static_cast<int>(pi_true.size());
  if (count < 0) throw std::invalid_argument("sample_ordering_constraints: count must be >= 0");
  const long long max_pairs = static_cast<long long>(n) * (n - 1) / 2;
  if (count > max_pairs)
    throw std::invalid_argument("sample_ordering_constraints: count exceeds n(n-1)/2");
  SideConstraints out;
  std::set<std::pair<int, int>> seen;
  while (static_cast<int>(out.size()) < count) {
    int i = static_cast<int>(rng.uniform_int(0, n - 1));
    int j = static_cast<int>(rng.uniform_int(0, n - 1));
    if (i == j) continue;
    if (pi_true[j] - pi_true[i] <= 0) std::swap(i, j);
    if (!seen.insert({i, j}).second) continue;
    out.push_back({i, j, static_cast<double>(pi_true[j] - pi_true[i])});
  }
  return out;
}

SimilarityMatrix permute(const SimilarityMatrix& a, const PermutationVec& pi) {
  if (static_cast<int>(pi.size()) != a.n) throw std::invalid_argument("permute: size mismatch");
  Mat b(a.n, a.n);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) b(pi[i] - 1, pi[j] - 1) = a.entries(i, j);
  return SimilarityMatrix(std::move(b));
}

}  // namespace snperm::model
