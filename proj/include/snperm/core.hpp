#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace snperm {

// A permutation of {1,...,n}; entry i is the rank/position assigned to
// object i, matching the vector convention of the 2-SUM objective.
using PermutationVec = std::vector<int>;

inline bool is_permutation_vec(const PermutationVec& p) {
  const int n = static_cast<int>(p.size());
  std::vector<char> seen(static_cast<size_t>(n) + 1, 0);
  for (int v : p) {
    if (v < 1 || v > n || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

inline PermutationVec identity_perm(int n) {
  PermutationVec p(n);
  std::iota(p.begin(), p.end(), 1);
  return p;
}

// pi -> n+1-pi, the reversal of the ordering.
inline PermutationVec reverse_perm(const PermutationVec& p) {
  PermutationVec q(p.size());
  const int n = static_cast<int>(p.size());
  for (size_t i = 0; i < p.size(); ++i) q[i] = n + 1 - p[i];
  return q;
}

inline std::vector<double> perm_as_vector(const PermutationVec& p) {
  return std::vector<double>(p.begin(), p.end());
}

// Minimal dense row-major matrix.
struct Mat {
  int rows = 0, cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0)
      : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline Mat matmul(const Mat& A, const Mat& B) {
  if (A.cols != B.rows) throw std::invalid_argument("matmul: shape mismatch");
  Mat C(A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = 0; k < A.cols; ++k) {
      const double aik = A(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < B.cols; ++j) C(i, j) += aik * B(k, j);
    }
  return C;
}

inline Mat transpose(const Mat& A) {
  Mat T(A.cols, A.rows);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) T(j, i) = A(i, j);
  return T;
}

// Row i has its one in column pi(i), so that X * (1,...,n)^T = pi.
inline Mat perm_matrix(const PermutationVec& p) {
  const int n = static_cast<int>(p.size());
  Mat X(n, n);
  for (int i = 0; i < n; ++i) X(i, p[i] - 1) = 1.0;
  return X;
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded generator with explicitly-coded distributions. The standard
// distributions are implementation-defined, which would break golden
// files; everything here is pinned to mt19937_64 output words.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [lo, hi] via rejection.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    const uint64_t range = static_cast<uint64_t>(hi - lo) + 1;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return lo + static_cast<int64_t>(x % range);
  }

  // Box-Muller without caching, so the draw count stays predictable.
  double normal(double mean = 0.0, double stddev = 1.0) {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double two_pi = 6.283185307179586476925286766559;
    return mean + stddev * r * std::cos(two_pi * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(uniform_int(0, static_cast<int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

  PermutationVec random_permutation(int n) {
    PermutationVec p = identity_perm(n);
    shuffle(p);
    return p;
  }

  // Independent child stream; safe for parallel trials.
  Rng substream(uint64_t key) const { return Rng(splitmix64(seed_ ^ splitmix64(key))); }

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  std::mt19937_64 gen_;
};

// A point in the ambient space of a relaxation, with the certificates
// produced by the solver that found it.
struct RelaxedPoint {
  std::vector<double> x;
  double feasibility_residual = 0.0;
  double duality_gap = 0.0;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_inf(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace snperm
