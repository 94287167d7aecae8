#pragma once

#include <functional>
#include <string>
#include <vector>

#include "snperm/core.hpp"
#include "snperm/model.hpp"
#include "snperm/snpoly.hpp"

namespace snperm::splitqp {

// Row-compressed constraint block.
struct SparseRows {
  int cols = 0;
  std::vector<int> row_ptr{0};
  std::vector<int> col_idx;
  std::vector<double> vals;
  std::vector<double> rhs;

  int num_rows() const { return static_cast<int>(rhs.size()); }
  void add_row(const std::vector<int>& idx, const std::vector<double>& val, double b);
  // y = R x
  void apply(const std::vector<double>& x, std::vector<double>& y) const;
  // y += R^T w
  void apply_transpose_add(const std::vector<double>& w, std::vector<double>& y) const;
};

// min 1/2 x^T H x + q^T x  s.t.  eq rows = rhs, ineq rows <= rhs, lb <= x <= ub.
// H is matrix-free and, for the seriation problems, supported on the leading
// input block only.
struct SparseQP {
  int num_vars = 0;
  int num_inputs = 0;  // leading block carrying the quadratic
  std::function<void(const std::vector<double>&, std::vector<double>&)> hessian_apply;
  std::vector<double> linear;  // empty means zero
  SparseRows eq;
  SparseRows ineq;
  std::vector<double> var_lb, var_ub;  // empty means free
  // Optional conditioning hints from the assembler: an estimate of ||H||_inf
  // for cost normalization and the Hessian diagonal for preconditioning.
  double hessian_norm_hint = 0.0;
  std::vector<double> hessian_diag;

  double objective(const std::vector<double>& x) const;
};

struct SplitQPConfig {
  double eps_abs = 1e-8;
  double eps_rel = 1e-8;
  int max_iter = 50000;
  uint64_t seed = 1;    // used only when restarts > 0
  int restarts = 0;     // extra attempts from perturbed starts on failure
  double rho0 = 1.0;          // starting penalty
  double rho_eq_scale = 10.0; // extra stiffness on equality rows
  double sigma = 1e-6;        // proximal regularization
  double alpha = 1.6;         // over-relaxation
  bool adaptive_rho = true;   // ratio test 10, scale factor 2
  bool polish = true;
  int polish_dim_limit = 900;  // dense KKT cutoff
  int cg_max_iter = 0;         // 0 picks 2*num_vars + 200
  std::vector<double> warm_start_x;
};

enum class SolveStatus { solved, max_iter_reached, diverged, infeasible };

struct QPSolution {
  std::vector<double> x;
  std::vector<double> dual;  // stacked eq then ineq (then bound) multipliers
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::max_iter_reached;
  bool polished = false;

  std::string to_json() const;
};

QPSolution solve(const SparseQP& qp, const SplitQPConfig& config = {});

// The seriation QP: quadratic x^T (L - mu P) x on the polytope inputs plus
// side rows -x_i + x_j >= gap.
SparseQP assemble(const snpoly::SNPolytope& poly, const model::LaplacianOperator& l,
                  const model::SideConstraints& side);

// Linear objective c^T x_in over the same feasible set (H = 0).
SparseQP assemble_linear(const snpoly::SNPolytope& poly, const std::vector<double>& c_inputs,
                         const model::SideConstraints& side);

// mu = fraction * lambda2; computes and caches lambda2 on the operator if
// missing. Rejects fraction >= 1 (the convexity boundary) or < 0.
double fiedler_fraction_mu(model::LaplacianOperator& l, double fraction);

}  // namespace snperm::splitqp
