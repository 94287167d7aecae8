#pragma once

#include <vector>

#include "snperm/core.hpp"
#include "snperm/model.hpp"

namespace snperm::recover {

// Rank vector of x (ascending, ties by index): x_i < x_j implies pi_i < pi_j.
PermutationVec order_round(const std::vector<double>& x);

struct RoundResult {
  PermutationVec perm;
  double two_sum = 0.0;
};

// Best of the plain rounding and `trials` Gaussian-perturbed roundings,
// scored by the 2-SUM objective. variance = 0 reduces to order_round.
RoundResult sample_round(const std::vector<double>& x, int trials, double variance, Rng& rng,
                         const model::LaplacianOperator& l);

// Order-preserving affine map onto [1, n]. Regularized relaxations can
// return points with a much smaller spread than a permutation; rescaling
// first makes the fixed perturbation variance meaningful at any scale.
std::vector<double> rescale_to_rank_range(const std::vector<double>& x);

struct Decomposition {
  std::vector<double> weights;        // nonnegative, sums to 1
  std::vector<PermutationVec> perms;  // at most n+1 of them
  double reconstruction_error = 0.0;  // max-norm of x - sum w_i pi_i
};

// Greedy ratio peeling: repeatedly subtract the co-ordered vertex with the
// largest weight that keeps the residual inside the rescaled permutahedron.
// The step length is the exact first crossing of a majorization prefix,
// found by a discrete Newton iteration on each prefix, so every peel makes a
// new prefix tight and at most n+1 terms are produced.
Decomposition decompose(const std::vector<double>& x, double tol = 1e-9);

}  // namespace snperm::recover
