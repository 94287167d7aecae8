#pragma once

#include <vector>

#include "snperm/birkhoff.hpp"
#include "snperm/core.hpp"
#include "snperm/model.hpp"

namespace snperm::frankwolfe {

enum class StepRule { harmonic_2_over_k_plus_2, line_search };
enum class LmoKind { permutahedron, tiebroken, birkhoff };

struct FWConfig {
  int max_iter = 2000;
  double gap_tol_relative = 0.01;  // stop when gap/|f| drops below this
  StepRule step = StepRule::harmonic_2_over_k_plus_2;
  // Weight of the quadratic hinge penalty carrying the side constraints.
  // 0 selects the automatic {10,100,1000}*||L||_inf escalation sweep.
  double penalty_weight = 0.0;
  // Birkhoff-only options; an empty Y means the single column (1,...,n).
  birkhoff::YMatrix y;
  birkhoff::RegScheme scheme = birkhoff::RegScheme::vector;
};

struct FWIterRow {
  int iter = 0;
  double objective = 0.0;  // penalized objective actually being minimized
  double gap = 0.0;
  double seconds = 0.0;
};

struct FWTrace {
  std::vector<FWIterRow> rows;
  RelaxedPoint final_point;             // ambient iterate (length n or n^2)
  std::vector<double> solution_vector;  // length n: x, or X*(1,...,n) for Birkhoff
  double objective = 0.0;               // penalized objective at the returned iterate
  double objective_unpenalized = 0.0;   // quadratic part only
  double relative_gap = 0.0;
  int iterations = 0;
  bool converged = false;
  // False for the matrix-regularized Birkhoff objective, whose penalty term
  // is concave; the reported gap is then only a stationarity certificate.
  bool objective_convex = true;
};

// Exact minimizer of c.x over the permutahedron: the k-th largest cost gets
// value k (stable, so a constant c returns the identity).
PermutationVec lmo_permutahedron(const std::vector<double>& c);

// Exact minimizer of c.x over permutations with x_1 + 1 <= x_n, by an O(n^2)
// scan of the value pair placed at the two pinned positions with the rest
// matched by sorting.
PermutationVec lmo_tiebroken(const std::vector<double>& c);

FWTrace fw_solve(const model::TwoSumProblem& problem, const FWConfig& config, LmoKind lmo);

// Hinge penalty sum rho * sum max(0, x_i + gap - x_j)^2 and its gradient.
double side_penalty(const std::vector<double>& x, const model::SideConstraints& side, double rho);
void side_penalty_grad(const std::vector<double>& x, const model::SideConstraints& side, double rho,
                       std::vector<double>& grad_inout);

}  // namespace snperm::frankwolfe
