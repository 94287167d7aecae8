#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "snperm/core.hpp"

namespace snperm::model {

struct SimilarityMatrix {
  int n = 0;
  Mat entries;  // symmetric, nonnegative

  SimilarityMatrix() = default;
  explicit SimilarityMatrix(Mat m);  // throws if not square/symmetric within 1e-9
};

// Matrix-free graph Laplacian L = diag(A 1) - A, with the vector
// regularization Q = L - mu P folded in (P centers, so Qx = Lx - mu(x - mean)).
struct LaplacianOperator {
  std::shared_ptr<const SimilarityMatrix> a;
  std::vector<double> degree;  // A 1
  double mu = 0.0;
  std::optional<double> lambda2;  // cached Fiedler value

  int n() const { return a ? a->n : 0; }
  void apply(const std::vector<double>& x, std::vector<double>& y) const;      // y = L x
  void apply_reg(const std::vector<double>& x, std::vector<double>& y) const;  // y = (L - mu P) x
  std::vector<double> apply(const std::vector<double>& x) const;
  double quad(const std::vector<double>& x) const;      // x^T L x
  double quad_reg(const std::vector<double>& x) const;  // x^T (L - mu P) x
  double norm_inf() const;                              // max row sum of |L| = 2 max degree
};

LaplacianOperator laplacian(const SimilarityMatrix& a);

// One row of side information: x_i + gap <= x_j (0-based positions).
struct SideConstraint {
  int i = 0;
  int j = 0;
  double gap = 0.0;
};

using SideConstraints = std::vector<SideConstraint>;

inline SideConstraint tiebreak_constraint(int n) { return {0, n - 1, 1.0}; }

enum class PolytopeChoice { permutahedron, birkhoff };

struct TwoSumProblem {
  LaplacianOperator laplacian;
  SideConstraints constraints;
  PolytopeChoice polytope = PolytopeChoice::permutahedron;
};

// pi^T L pi. The double-sum form of the objective is exactly twice this for
// symmetric A; two_sum_double_sum exposes that convention for comparisons.
double two_sum(const LaplacianOperator& l, const PermutationVec& pi);
double two_sum(const LaplacianOperator& l, const std::vector<double>& x);
inline double two_sum_double_sum(const LaplacianOperator& l, const PermutationVec& pi) {
  return 2.0 * two_sum(l, pi);
}

// Counts violations of the staircase conditions a_ij <= a_(i-1)j and
// a_ij <= a_i(j+1) over the strict lower triangle, each side separately.
int r_score(const SimilarityMatrix& a, double tol = 1e-12);

// tau-a: (concordant - discordant) / (n(n-1)/2).
double kendall_tau(const PermutationVec& pi, const PermutationVec& sigma);

// lambda2 * n(n^2-1)/12, a valid lower bound on the discrete 2-SUM optimum.
// Requires lambda2 cached on the operator.
double spectral_lower_bound(const LaplacianOperator& l);
double spectral_lower_bound(double lambda2, int n);

// Random consistent ordering constraints: pairs (i,j) with
// pi_true(j) - pi_true(i) > 0 and gap equal to that difference, so the true
// ordering satisfies every row with equality. Duplicate pairs are rejected.
SideConstraints sample_ordering_constraints(const PermutationVec& pi_true, int count, Rng& rng);

// B[pi(i)-1][pi(j)-1] = A[i][j]: the matrix reordered by the labeling pi.
SimilarityMatrix permute(const SimilarityMatrix& a, const PermutationVec& pi);

}  // namespace snperm::model
