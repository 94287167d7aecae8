#pragma once

#include <string>
#include <vector>

#include "snperm/core.hpp"
#include "snperm/sortnet.hpp"

namespace snperm::snpoly {

struct SparseRow {
  std::vector<int> idx;
  std::vector<double> val;
  double rhs = 0.0;
};

// Extended formulation of the convex hull of permutations of v. Variables:
// the n network inputs first, then two fresh variables per comparator in
// comparator order. Wire outputs are aliases of the last variable on each
// wire, so num_vars = n + 2m exactly.
struct SNPolytope {
  int n = 0;
  int num_vars = 0;
  std::vector<int> input_idx;   // wire -> x^in variable
  std::vector<int> output_idx;  // wire -> x^out variable (aliased)
  struct CompVars {
    int in_top, in_bottom, out_top, out_bottom;
  };
  std::vector<CompVars> comparator_vars;
  // m comparator sum-equalities followed by n output-pinning equalities.
  std::vector<SparseRow> eq_rows;
  // 2m rows of the form row.x <= rhs (out_top <= in_top, out_top <= in_bottom).
  std::vector<SparseRow> ineq_rows;
  std::vector<double> v;
};

struct MembershipReport {
  bool member = false;
  double worst_prefix_slack = 0.0;  // min over k of allowed_k - achieved_k
  double sum_residual = 0.0;        // sum(x) - sum(v)
};

SNPolytope build_polytope(const sortnet::ComparatorNetwork& net, const std::vector<double>& v);

// Forward-simulates the comparators to fill in every internal variable.
// x must be a permutation of v; the result satisfies all constraints exactly.
std::vector<double> lift(const std::vector<double>& x, const sortnet::ComparatorNetwork& net,
                         const SNPolytope& poly);

std::vector<double> project_input(const SNPolytope& poly, const std::vector<double>& full_point);

// Majorization prefix test: sort x descending into z, then x is in the hull
// iff sum(z) = sum(v) and every prefix of z stays below the matching prefix
// of v read from the top.
MembershipReport permutahedron_contains(const std::vector<double>& x, const std::vector<double>& v,
                                        double tol = 1e-9);

// Max violation over all polytope rows; 0 for feasible points.
double constraint_residual(const SNPolytope& poly, const std::vector<double>& point);

// Fixed-format MPS with a QMATRIX section. The file encodes
//   min  x^T Q x + c^T x  subject to the polytope rows and side rows,
// where QMATRIX holds 2Q so that readers using the c^T x + 1/2 x^T Q' x
// convention reproduce the same objective. Quadratic support is restricted
// to the input variables.
struct QuadObjective {
  // Dense symmetric matrix on the inputs (n x n), may be empty for Q = 0.
  Mat q_inputs;
  // Linear term over all variables (may be empty, or length n to mean
  // inputs only).
  std::vector<double> linear;
};

struct SideConstraintRow {
  int i = 0;  // 0-based input position
  int j = 0;
  double gap = 0.0;  // x_i + gap <= x_j
};

std::string export_problem(const SNPolytope& poly, const QuadObjective& obj,
                           const std::vector<SideConstraintRow>& side);

// MatrixMarket coordinate triples for the equality or inequality block.
// Column num_vars+1 carries the right-hand side.
std::string dump_constraints_mm(const SNPolytope& poly, bool equalities);

}  // namespace snperm::snpoly
