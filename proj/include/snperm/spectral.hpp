#pragma once

#include <vector>

#include "snperm/core.hpp"
#include "snperm/model.hpp"

namespace snperm::spectral {

struct FiedlerResult {
  double lambda2 = 0.0;
  std::vector<double> vector;  // unit norm, orthogonal to the all-ones vector
  int iterations = 0;          // matrix-vector products spent
  double residual = 0.0;       // ||L y - lambda2 y||_2
  bool converged = false;
  bool disconnected = false;   // lambda2 ~ 0
};

// Second-smallest eigenpair of L, computed by Lanczos on sigma*I - L
// restricted to the complement of the all-ones vector, with full
// reorthogonalization. sigma = 2*max(degree) is a Gershgorin bound, so the
// shifted operator is PSD and the wanted pair is its top one. Falls back to
// shifted power iteration if the Lanczos sweep stalls.
FiedlerResult fiedler(const model::LaplacianOperator& l, double tol = 1e-10, int max_iter = 5000);

struct SpectralOrderResult {
  PermutationVec order;
  FiedlerResult fiedler;
};

// Ranks the Fiedler vector ascending (ties by index).
SpectralOrderResult spectral_order(const model::SimilarityMatrix& a, double tol = 1e-10,
                                   int max_iter = 5000);

}  // namespace snperm::spectral
