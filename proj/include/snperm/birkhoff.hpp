#pragma once

#include <vector>

#include "snperm/core.hpp"
#include "snperm/model.hpp"

namespace snperm::birkhoff {

struct DoublyStochastic {
  int n = 0;
  Mat entries;

  // Throws if entries are negative beyond tol or row/column sums drift from 1.
  static DoublyStochastic checked(Mat m, double tol = 1e-8);
};

// Columns are used to average the quadratic over several orderings; each
// column must have no repeated elements for the regularization result to
// bite.
struct YMatrix {
  int n = 0, p = 0;
  Mat columns;  // n x p

  static YMatrix identity_ordering(int n);  // single column (1,...,n)
  // p columns of sorted uniform[0,1] samples.
  static YMatrix sorted_uniform(int n, int p, Rng& rng);
  bool columns_have_unique_entries(double tol = 0.0) const;
};

// Exact minimizer of <C, X> over permutation matrices, as the column
// assignment pi (row i -> column pi(i)). O(n^3) shortest augmenting paths;
// scanning order makes ties deterministic (a constant matrix yields the
// identity).
PermutationVec assignment_lmo(const Mat& c);

// x_i = sum_j j * X_ij, the linear projection onto the permutahedron.
std::vector<double> project_to_vector(const DoublyStochastic& x);
std::vector<double> project_to_vector(const Mat& x);

enum class RegScheme { vector, matrix };

// Objective and gradient of the Birkhoff relaxations:
//   vector: (1/p) Tr(Y^T X^T (L - mu P) X Y)
//   matrix: (1/p) Tr(Y^T X^T L X Y) - (mu/p) ||P X||_F^2
// The matrix scheme's penalty is concave, so that variant is only convex for
// mu below lambda2(L) * lambda_min(Y Y^T).
struct RegObjective {
  double value = 0.0;
  Mat gradient;
};

RegObjective matrix_reg_objective(const Mat& x, const YMatrix& y, const model::LaplacianOperator& l,
                                  double mu, RegScheme scheme);

// Largest admissible mu for each scheme (lambda2 must be cached on l).
double mu_upper_bound(const model::LaplacianOperator& l, const YMatrix& y, RegScheme scheme);

// Sinkhorn normalization of a positive random matrix; 100 sweeps, tol 1e-10.
DoublyStochastic random_doubly_stochastic(int n, Rng& rng);

// Eigenvalues of a dense symmetric matrix by cyclic Jacobi, ascending.
std::vector<double> symmetric_eigenvalues(const Mat& a);

}  // namespace snperm::birkhoff
