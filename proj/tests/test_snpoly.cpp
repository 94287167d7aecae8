#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "snperm/snpoly.hpp"
#include "snperm/sortnet.hpp"

using namespace snperm;
using namespace snperm::snpoly;
using snperm::sortnet::bitonic_network;
using snperm::sortnet::odd_even_network;

namespace {

std::vector<double> iota_v(int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = i + 1;
  return v;
}

// Random point in the hull of permutations of (1..n), as a convex combination
// of random vertices.
std::vector<double> random_hull_point(int n, Rng& rng, int verts = 6) {
  std::vector<double> x(n, 0.0), w(verts);
  double total = 0.0;
  for (double& wi : w) {
    wi = rng.uniform(0.01, 1.0);
    total += wi;
  }
  for (int v = 0; v < verts; ++v) {
    const PermutationVec p = rng.random_permutation(n);
    for (int i = 0; i < n; ++i) x[i] += w[v] / total * p[i];
  }
  return x;
}

}  // namespace

TEST_CASE("construction counts: num_vars = n + 2m, m+n equalities, 2m inequalities") {
  sortnet::ComparatorNetwork one;
  one.n = 2;
  one.comparators.push_back({0, 1, 0});
  const auto poly2 = build_polytope(one, {1, 2});
  CHECK(poly2.num_vars == 4);
  CHECK(poly2.eq_rows.size() == 3);  // 1 comparator + 2 output pins
  CHECK(poly2.ineq_rows.size() == 2);

  sortnet::ComparatorNetwork trivial;
  trivial.n = 1;
  const auto poly1 = build_polytope(trivial, {7.0});
  CHECK(poly1.num_vars == 1);
  CHECK(poly1.eq_rows.size() == 1);
  CHECK(poly1.ineq_rows.empty());

  const auto net4 = bitonic_network(4);
  const auto poly4 = build_polytope(net4, iota_v(4));
  CHECK(poly4.num_vars == 16);

  for (int n : {3, 5, 8, 11}) {
    for (int kind = 0; kind < 2; ++kind) {
      const auto net = kind == 0 ? bitonic_network(n) : odd_even_network(n);
      const auto poly = build_polytope(net, iota_v(n));
      const int m = net.num_comparators();
      CHECK(poly.num_vars == n + 2 * m);
      CHECK(static_cast<int>(poly.eq_rows.size()) == m + n);
      CHECK(static_cast<int>(poly.ineq_rows.size()) == 2 * m);
    }
  }

  CHECK_THROWS_AS(build_polytope(one, {2, 1}), std::invalid_argument);
  CHECK_THROWS_AS(build_polytope(one, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("lift simulates the network and lands on the constraints") {
  sortnet::ComparatorNetwork one;
  one.n = 2;
  one.comparators.push_back({0, 1, 0});
  const auto poly = build_polytope(one, {1, 2});
  CHECK(lift({2, 1}, one, poly) == std::vector<double>{2, 1, 1, 2});
  CHECK(lift({1, 2}, one, poly) == std::vector<double>{1, 2, 1, 2});

  const auto net = bitonic_network(4);
  const auto poly4 = build_polytope(net, iota_v(4));
  const auto point = lift({4, 3, 2, 1}, net, poly4);
  CHECK(constraint_residual(poly4, point) == 0.0);
  for (int w = 0; w < 4; ++w) CHECK(point[poly4.output_idx[w]] == w + 1);

  CHECK_THROWS_AS(lift({1, 1, 2, 3}, net, poly4), std::invalid_argument);
}

TEST_CASE("project_input round-trips lifted permutations") {
  const auto net = bitonic_network(5);
  const auto poly = build_polytope(net, iota_v(5));
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const PermutationVec p = rng.random_permutation(5);
    const auto x = perm_as_vector(p);
    CHECK(project_input(poly, lift(x, net, poly)) == x);
  }
}

TEST_CASE("membership prefix test") {
  const auto v3 = iota_v(3);
  CHECK(permutahedron_contains({2, 2, 2}, v3).member);
  CHECK(permutahedron_contains({3, 2, 1}, v3).member);
  const auto rep = permutahedron_contains({3, 3, 0}, v3);
  CHECK_FALSE(rep.member);
  CHECK(rep.worst_prefix_slack == doctest::Approx(-1.0));
  CHECK(rep.sum_residual == doctest::Approx(0.0));
  CHECK_THROWS_AS(permutahedron_contains({1, 2}, v3), std::invalid_argument);
  // Repeats in v are allowed.
  CHECK(permutahedron_contains({1.5, 1.5, 1.0}, {1, 1.5, 1.5}).member);
}

TEST_CASE("hull projection: lifts are feasible, feasible points project inside") {
  Rng rng(123);
  for (int n = 3; n <= 6; ++n) {
    const auto net = bitonic_network(n);
    const auto poly = build_polytope(net, iota_v(n));
    oracles::for_each_permutation(n, [&](const PermutationVec& p) {
      const auto point = lift(perm_as_vector(p), net, poly);
      CHECK(constraint_residual(poly, point) <= 1e-12);
    });
    // Convex combinations of lifted vertices stay feasible and project into
    // the hull.
    for (int t = 0; t < 125; ++t) {
      std::vector<double> point(poly.num_vars, 0.0);
      double total = 0.0;
      std::vector<double> w(5);
      for (double& wi : w) {
        wi = rng.uniform(0.01, 1.0);
        total += wi;
      }
      for (int v = 0; v < 5; ++v) {
        const auto vert = lift(perm_as_vector(rng.random_permutation(n)), net, poly);
        for (int i = 0; i < poly.num_vars; ++i) point[i] += w[v] / total * vert[i];
      }
      CHECK(constraint_residual(poly, point) <= 1e-9);
      CHECK(permutahedron_contains(project_input(poly, point), iota_v(n), 1e-9).member);
    }
  }
}

TEST_CASE("norm is maximized exactly at the vertices") {
  Rng rng(99);
  for (int t = 0; t < 500; ++t) {
    const int n = 2 + static_cast<int>(rng.uniform_int(0, 6));
    const auto x = random_hull_point(n, rng);
    const double vert_norm = norm2(perm_as_vector(identity_perm(n)));
    CHECK(norm2(x) <= vert_norm + 1e-9);
    std::vector<double> sorted_x = x;
    std::sort(sorted_x.begin(), sorted_x.end());
    bool is_vertex = true;
    for (int i = 0; i < n; ++i)
      if (std::abs(sorted_x[i] - (i + 1)) > 1e-9) is_vertex = false;
    if (std::abs(norm2(x) - vert_norm) <= 1e-9) CHECK(is_vertex);
    else CHECK_FALSE(is_vertex);
  }
}

TEST_CASE("membership agrees with an exhaustive hull oracle") {
  Rng rng(2025);
  for (int n = 3; n <= 5; ++n) {
    std::vector<std::vector<double>> verts;
    oracles::for_each_permutation(n, [&](const PermutationVec& p) {
      verts.push_back(perm_as_vector(p));
    });
    const std::vector<double> bary(n, (n + 1) / 2.0);
    for (int t = 0; t < 70; ++t) {
      std::vector<double> x;
      bool expect_member;
      if (t % 2 == 0) {
        x = random_hull_point(n, rng);
        expect_member = true;
      } else {
        // Push past a vertex: outside by construction.
        const auto p = perm_as_vector(rng.random_permutation(n));
        x.resize(n);
        for (int i = 0; i < n; ++i) x[i] = p[i] + 0.08 * (p[i] - bary[i]);
        expect_member = false;
      }
      auto dist2 = [&](const std::vector<double>& y) {
        return oracles::hull_qp_oracle(
                   verts,
                   [&](const std::vector<double>& z) {
                     double s = 0.0;
                     for (int i = 0; i < n; ++i) s += (z[i] - x[i]) * (z[i] - x[i]);
                     return s;
                   },
                   [&](const std::vector<double>& z) {
                     std::vector<double> g(n);
                     for (int i = 0; i < n; ++i) g[i] = 2.0 * (z[i] - x[i]);
                     return g;
                   },
                   4000, 1e-13)
            .value;
      };
      const bool member = permutahedron_contains(x, iota_v(n), 1e-9).member;
      CHECK(member == expect_member);
      if (member) CHECK(dist2(x) <= 1e-8);
      else CHECK(dist2(x) > 1e-8);
    }
  }
}

TEST_CASE("MPS export round-trips through a reference reader") {
  sortnet::ComparatorNetwork one;
  one.n = 2;
  one.comparators.push_back({0, 1, 0});
  const auto poly = build_polytope(one, {1, 2});

  SUBCASE("LP with zero objective") {
    const auto text = export_problem(poly, {}, {});
    const auto mps = oracles::parse_mps(text);
    CHECK(mps.col_names.size() == 4);
    CHECK(mps.row_names.size() == 5);  // 3 equalities + 2 inequalities
    CHECK(mps.qmatrix.empty());
    for (const auto& c : mps.col_names) CHECK(mps.bound_kind.at(c) == 'F');
  }

  SUBCASE("identity quadratic on the inputs") {
    QuadObjective obj;
    obj.q_inputs = Mat::identity(2);
    const auto mps = oracles::parse_mps(export_problem(poly, obj, {}));
    REQUIRE(mps.qmatrix.size() == 2);
    // Doubled for the 1/2 x^T Q x reader convention.
    CHECK(std::get<2>(mps.qmatrix[0]) == doctest::Approx(2.0));
    CHECK(std::get<2>(mps.qmatrix[1]) == doctest::Approx(2.0));
  }

  SUBCASE("side constraints add rows, empty ones do not") {
    const auto plain = oracles::parse_mps(export_problem(poly, {}, {}));
    const auto with = oracles::parse_mps(export_problem(poly, {}, {{0, 1, 1.0}}));
    CHECK(with.row_names.size() == plain.row_names.size() + 1);
    CHECK(with.rhs.at("S0000001") == doctest::Approx(-1.0));
  }

  SUBCASE("coefficients survive the round trip") {
    const auto net = bitonic_network(3);
    const auto poly3 = build_polytope(net, iota_v(3));
    QuadObjective obj;
    obj.q_inputs = Mat(3, 3);
    obj.q_inputs(0, 0) = 1.5;
    obj.q_inputs(0, 2) = obj.q_inputs(2, 0) = -0.25;
    obj.linear = {0.5, 0.0, -2.0};
    const auto mps = oracles::parse_mps(export_problem(poly3, obj, {{0, 2, 1.0}}));
    CHECK(static_cast<int>(mps.col_names.size()) == poly3.num_vars);
    CHECK(mps.row_names.size() == poly3.eq_rows.size() + poly3.ineq_rows.size() + 1);
    // Equality rows: coefficient of the first comparator sum constraint.
    const auto& col0 = mps.col_entries.at("X0000001");
    CHECK(col0.at("COST") == doctest::Approx(0.5));
    int qcount = 0;
    for (const auto& [c1, c2, v] : mps.qmatrix) {
      (void)c1;
      (void)c2;
      (void)v;
      ++qcount;
    }
    CHECK(qcount == 3);  // diagonal + two symmetric off-diagonal entries
  }
}

TEST_CASE("constraint dump in coordinate form") {
  const auto net = bitonic_network(3);
  const auto poly = build_polytope(net, iota_v(3));
  const auto eq_text = dump_constraints_mm(poly, true);
  CHECK(eq_text.find("%%MatrixMarket matrix coordinate real general") == 0);
  std::istringstream in(eq_text);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);  // comment
  std::getline(in, line);  // sizes
  std::istringstream sz(line);
  int rows, cols;
  long long nnz;
  sz >> rows >> cols >> nnz;
  CHECK(rows == static_cast<int>(poly.eq_rows.size()));
  CHECK(cols == poly.num_vars + 1);
}
