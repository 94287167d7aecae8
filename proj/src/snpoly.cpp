#include "snperm/snpoly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace snperm::snpoly {

namespace {

bool is_ascending(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[i - 1]) return false;
  return true;
}

bool is_permutation_of(const std::vector<double>& x, const std::vector<double>& v, double tol) {
  if (x.size() != v.size()) return false;
  std::vector<double> s = x;
  std::sort(s.begin(), s.end());
  for (size_t i = 0; i < s.size(); ++i)
    if (std::abs(s[i] - v[i]) > tol) return false;
  return true;
}

// Fixed-format MPS field layout: code in cols 2-3, names at 5-12, 15-22,
// 40-47, values at 25-36 and 50-61.
void mps_line2(std::string& out, const char* code, const std::string& n1, const std::string& n2,
               double val) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), " %-2s %-8s  %-8s  %-12.6g\n", code, n1.c_str(), n2.c_str(), val);
  out += buf;
}

std::string col_name(int j) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "X%07d", j + 1);
  return buf;
}
std::string eq_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "E%07d", i + 1);
  return buf;
}
std::string ineq_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "L%07d", i + 1);
  return buf;
}
std::string side_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "S%07d", i + 1);
  return buf;
}

}  // namespace

SNPolytope build_polytope(const sortnet::ComparatorNetwork& net, const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != net.n)
    throw std::invalid_argument("build_polytope: |v| must equal wire count");
  if (!is_ascending(v)) throw std::invalid_argument("build_polytope: v must be ascending");

  SNPolytope poly;
  poly.n = net.n;
  poly.v = v;
  poly.num_vars = net.n + 2 * net.num_comparators();
  poly.input_idx.resize(net.n);
  poly.output_idx.resize(net.n);

  // current[w] tracks the variable carried by wire w between comparators.
  std::vector<int> current(net.n);
  for (int w = 0; w < net.n; ++w) {
    poly.input_idx[w] = w;
    current[w] = w;
  }

  int next_var = net.n;
  poly.comparator_vars.reserve(net.comparators.size());
  poly.eq_rows.reserve(net.comparators.size() + net.n);
  poly.ineq_rows.reserve(2 * net.comparators.size());

  for (const auto& c : net.comparators) {
    SNPolytope::CompVars cv;
    cv.in_top = current[c.top];
    cv.in_bottom = current[c.bottom];
    cv.out_top = next_var++;
    cv.out_bottom = next_var++;
    current[c.top] = cv.out_top;
    current[c.bottom] = cv.out_bottom;
    poly.comparator_vars.push_back(cv);

    // in_top + in_bottom = out_top + out_bottom
    SparseRow eq;
    eq.idx = {cv.in_top, cv.in_bottom, cv.out_top, cv.out_bottom};
    eq.val = {1.0, 1.0, -1.0, -1.0};
    eq.rhs = 0.0;
    poly.eq_rows.push_back(std::move(eq));

    // out_top <= in_top, out_top <= in_bottom
    SparseRow r1, r2;
    r1.idx = {cv.out_top, cv.in_top};
    r1.val = {1.0, -1.0};
    r1.rhs = 0.0;
    r2.idx = {cv.out_top, cv.in_bottom};
    r2.val = {1.0, -1.0};
    r2.rhs = 0.0;
    poly.ineq_rows.push_back(std::move(r1));
    poly.ineq_rows.push_back(std::move(r2));
  }

  for (int w = 0; w < net.n; ++w) {
    poly.output_idx[w] = current[w];
    SparseRow eq;
    eq.idx = {current[w]};
    eq.val = {1.0};
    eq.rhs = v[w];
    poly.eq_rows.push_back(std::move(eq));
  }
  return poly;
}

std::vector<double> lift(const std::vector<double>& x, const sortnet::ComparatorNetwork& net,
                         const SNPolytope& poly) {
  if (static_cast<int>(x.size()) != poly.n)
    throw std::invalid_argument("lift: input length mismatch");
  if (!is_permutation_of(x, poly.v, 1e-9))
    throw std::invalid_argument("lift: x is not a permutation of v");
  std::vector<double> point(poly.num_vars, 0.0);
  std::vector<double> cur(x);
  for (int w = 0; w < poly.n; ++w) point[poly.input_idx[w]] = x[w];
  for (size_t k = 0; k < net.comparators.size(); ++k) {
    const auto& c = net.comparators[k];
    const auto& cv = poly.comparator_vars[k];
    const double a = cur[c.top];
    const double b = cur[c.bottom];
    point[cv.out_top] = std::min(a, b);
    point[cv.out_bottom] = std::max(a, b);
    cur[c.top] = std::min(a, b);
    cur[c.bottom] = std::max(a, b);
  }
  return point;
}

std::vector<double> project_input(const SNPolytope& poly, const std::vector<double>& full_point) {
  if (static_cast<int>(full_point.size()) != poly.num_vars)
    throw std::invalid_argument("project_input: point length mismatch");
  std::vector<double> x(poly.n);
  for (int w = 0; w < poly.n; ++w) x[w] = full_point[poly.input_idx[w]];
  return x;
}

MembershipReport permutahedron_contains(const std::vector<double>& x, const std::vector<double>& v,
                                        double tol) {
  if (x.size() != v.size())
    throw std::invalid_argument("permutahedron_contains: length mismatch");
  MembershipReport rep;
  const size_t n = x.size();
  std::vector<double> z = x;
  std::sort(z.begin(), z.end(), std::greater<double>());
  double prefix_z = 0.0, prefix_v = 0.0, sum_v = 0.0;
  double worst = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < n; ++k) {
    prefix_z += z[k];
    prefix_v += v[n - 1 - k];  // largest entries of v first
    sum_v += v[k];
    if (k + 1 < n) worst = std::min(worst, prefix_v - prefix_z);
  }
  if (n == 1) worst = 0.0;
  rep.worst_prefix_slack = worst;
  rep.sum_residual = prefix_z - sum_v;
  rep.member = (worst >= -tol) && (std::abs(rep.sum_residual) <= tol);
  return rep;
}

double constraint_residual(const SNPolytope& poly, const std::vector<double>& point) {
  double worst = 0.0;
  for (const auto& r : poly.eq_rows) {
    double s = -r.rhs;
    for (size_t t = 0; t < r.idx.size(); ++t) s += r.val[t] * point[r.idx[t]];
    worst = std::max(worst, std::abs(s));
  }
  for (const auto& r : poly.ineq_rows) {
    double s = -r.rhs;
    for (size_t t = 0; t < r.idx.size(); ++t) s += r.val[t] * point[r.idx[t]];
    worst = std::max(worst, s);
  }
  return worst;
}

std::string export_problem(const SNPolytope& poly, const QuadObjective& obj,
                           const std::vector<SideConstraintRow>& side) {
  const int n = poly.n;
  if (obj.q_inputs.rows != 0 && (obj.q_inputs.rows != n || obj.q_inputs.cols != n))
    throw std::invalid_argument("export_problem: quadratic block must be n x n on the inputs");
  if (!obj.linear.empty() && static_cast<int>(obj.linear.size()) != n &&
      static_cast<int>(obj.linear.size()) != poly.num_vars)
    throw std::invalid_argument("export_problem: linear term has unsupported length");
  for (const auto& s : side)
    if (s.i < 0 || s.i >= n || s.j < 0 || s.j >= n || s.i == s.j)
      throw std::invalid_argument("export_problem: side constraint index out of range");

  std::string out;
  out += "NAME          SNPERM\n";
  out += "ROWS\n";
  out += " N  COST\n";
  for (size_t i = 0; i < poly.eq_rows.size(); ++i) out += " E  " + eq_name(static_cast<int>(i)) + "\n";
  for (size_t i = 0; i < poly.ineq_rows.size(); ++i)
    out += " L  " + ineq_name(static_cast<int>(i)) + "\n";
  for (size_t i = 0; i < side.size(); ++i) out += " L  " + side_name(static_cast<int>(i)) + "\n";

  // COLUMNS wants the nonzeros grouped per column: transpose the rows.
  struct Entry {
    std::string row;
    double val;
  };
  std::vector<std::vector<Entry>> cols(poly.num_vars);
  for (size_t i = 0; i < poly.eq_rows.size(); ++i)
    for (size_t t = 0; t < poly.eq_rows[i].idx.size(); ++t)
      cols[poly.eq_rows[i].idx[t]].push_back({eq_name(static_cast<int>(i)), poly.eq_rows[i].val[t]});
  for (size_t i = 0; i < poly.ineq_rows.size(); ++i)
    for (size_t t = 0; t < poly.ineq_rows[i].idx.size(); ++t)
      cols[poly.ineq_rows[i].idx[t]].push_back(
          {ineq_name(static_cast<int>(i)), poly.ineq_rows[i].val[t]});
  // Side rows encode x_i + gap <= x_j as x_i - x_j <= -gap.
  for (size_t i = 0; i < side.size(); ++i) {
    cols[side[i].i].push_back({side_name(static_cast<int>(i)), 1.0});
    cols[side[i].j].push_back({side_name(static_cast<int>(i)), -1.0});
  }
  if (!obj.linear.empty())
    for (size_t j = 0; j < obj.linear.size(); ++j)
      if (obj.linear[j] != 0.0) cols[j].push_back({"COST", obj.linear[j]});

  out += "COLUMNS\n";
  for (int j = 0; j < poly.num_vars; ++j) {
    if (cols[j].empty()) {
      // Keep every column present so readers agree on the dimension.
      mps_line2(out, "", col_name(j), "COST", 0.0);
      continue;
    }
    for (const auto& e : cols[j]) mps_line2(out, "", col_name(j), e.row, e.val);
  }

  out += "RHS\n";
  for (size_t i = 0; i < poly.eq_rows.size(); ++i)
    if (poly.eq_rows[i].rhs != 0.0)
      mps_line2(out, "", "RHS", eq_name(static_cast<int>(i)), poly.eq_rows[i].rhs);
  for (size_t i = 0; i < poly.ineq_rows.size(); ++i)
    if (poly.ineq_rows[i].rhs != 0.0)
      mps_line2(out, "", "RHS", ineq_name(static_cast<int>(i)), poly.ineq_rows[i].rhs);
  for (size_t i = 0; i < side.size(); ++i)
    mps_line2(out, "", "RHS", side_name(static_cast<int>(i)), -side[i].gap);

  out += "BOUNDS\n";
  for (int j = 0; j < poly.num_vars; ++j) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), " FR %-8s  %-8s\n", "BND", col_name(j).c_str());
    out += buf;
  }

  if (obj.q_inputs.rows == n) {
    out += "QMATRIX\n";
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (obj.q_inputs(i, j) != 0.0)
          mps_line2(out, "", col_name(i), col_name(j), 2.0 * obj.q_inputs(i, j));
  }
  out += "ENDATA\n";
  return out;
}

std::string dump_constraints_mm(const SNPolytope& poly, bool equalities) {
  const auto& rows = equalities ? poly.eq_rows : poly.ineq_rows;
  size_t nnz = 0;
  for (const auto& r : rows) nnz += r.idx.size() + (r.rhs != 0.0 ? 1 : 0);
  std::ostringstream os;
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << "% column " << poly.num_vars + 1 << " holds the right-hand side\n";
  os << rows.size() << ' ' << poly.num_vars + 1 << ' ' << nnz << '\n';
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t t = 0; t < rows[i].idx.size(); ++t)
      os << i + 1 << ' ' << rows[i].idx[t] + 1 << ' ' << rows[i].val[t] << '\n';
    if (rows[i].rhs != 0.0) os << i + 1 << ' ' << poly.num_vars + 1 << ' ' << rows[i].rhs << '\n';
  }
  return os.str();
}

}  // namespace snperm::snpoly
