#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "snperm/birkhoff.hpp"
#include "snperm/snpoly.hpp"
#include "snperm/spectral.hpp"

using namespace snperm;
using namespace snperm::birkhoff;

namespace {

model::SimilarityMatrix random_similarity(int n, Rng& rng) {
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a(i, j) = a(j, i) = rng.uniform(0.0, 1.0);
  return model::SimilarityMatrix(std::move(a));
}

double assignment_cost(const Mat& c, const PermutationVec& pi) {
  double s = 0.0;
  for (int i = 0; i < c.rows; ++i) s += c(i, pi[i] - 1);
  return s;
}

}  // namespace

TEST_CASE("assignment solves the textbook cases") {
  Mat diag_cheap(3, 3, 10.0);
  for (int i = 0; i < 3; ++i) diag_cheap(i, i) = 0.0;
  CHECK(assignment_lmo(diag_cheap) == identity_perm(3));

  Mat c(3, 3);
  const double vals[3][3] = {{1, 2, 3}, {2, 4, 6}, {3, 6, 9}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c(i, j) = vals[i][j];
  const auto pi = assignment_lmo(c);
  CHECK(pi == PermutationVec{3, 2, 1});
  CHECK(assignment_cost(c, pi) == doctest::Approx(10.0));

  CHECK(assignment_lmo(Mat(4, 4, 3.5)) == identity_perm(4));

  Mat bad(2, 2);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(assignment_lmo(bad), std::invalid_argument);
}

TEST_CASE("assignment equals brute force on random costs") {
  Rng rng(606);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng.uniform_int(0, 5));
    Mat c(n, n);
    for (double& v : c.a) v = rng.uniform(-5.0, 5.0);
    const auto pi = assignment_lmo(c);
    CHECK(is_permutation_vec(pi));
    const double brute = oracles::brute_force_min(
        n, [&](const PermutationVec& p) { return assignment_cost(c, p); });
    CHECK(assignment_cost(c, pi) == doctest::Approx(brute).epsilon(1e-9));
  }
}

TEST_CASE("projection onto the permutahedron") {
  CHECK(project_to_vector(Mat::identity(4)) == std::vector<double>{1, 2, 3, 4});

  Mat flat(3, 3, 1.0 / 3.0);
  const auto center = project_to_vector(flat);
  for (double v : center) CHECK(v == doctest::Approx(2.0));

  Rng rng(9);
  const auto pi = rng.random_permutation(6);
  CHECK(project_to_vector(perm_matrix(pi)) == perm_as_vector(pi));

  const auto v50 = perm_as_vector(identity_perm(50));
  for (int t = 0; t < 1000; ++t) {
    const int n = 3 + static_cast<int>(rng.uniform_int(0, 47));
    const auto ds = random_doubly_stochastic(n, rng);
    const auto x = project_to_vector(ds);
    CHECK(snpoly::permutahedron_contains(x, perm_as_vector(identity_perm(n)), 1e-7).member);
  }
  (void)v50;
}

TEST_CASE("regularized objective values") {
  Rng rng(12);
  const int n = 5;
  const auto sim = random_similarity(n, rng);
  auto l = model::laplacian(sim);
  const auto y1 = YMatrix::identity_ordering(n);

  // mu = 0 at a vertex reduces to the 2-SUM value.
  const auto pi = rng.random_permutation(n);
  const auto at_vertex = matrix_reg_objective(perm_matrix(pi), y1, l, 0.0, RegScheme::vector);
  CHECK(at_vertex.value == doctest::Approx(model::two_sum(l, pi)).epsilon(1e-10));

  // Vector scheme with p = 1 equals the regularized quadratic at X*(1..n).
  l.mu = 0.4;
  for (int t = 0; t < 10; ++t) {
    const auto ds = random_doubly_stochastic(n, rng);
    const auto obj = matrix_reg_objective(ds.entries, y1, l, 0.4, RegScheme::vector);
    const auto x = project_to_vector(ds);
    CHECK(obj.value == doctest::Approx(l.quad_reg(x)).epsilon(1e-9));
  }

  // Barycenter: the projected vector is constant, so the centering penalty
  // vanishes and so does the Laplacian term.
  Mat flat(n, n, 1.0 / n);
  const auto at_center = matrix_reg_objective(flat, y1, l, 0.4, RegScheme::vector);
  CHECK(at_center.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gradients match central finite differences") {
  Rng rng(77);
  const int n = 4;
  const auto sim = random_similarity(n, rng);
  auto l = model::laplacian(sim);
  const auto f = spectral::fiedler(l);
  l.lambda2 = f.lambda2;
  YMatrix y = YMatrix::sorted_uniform(n, 2, rng);

  for (auto scheme : {RegScheme::vector, RegScheme::matrix}) {
    const double mu = 0.3 * f.lambda2;
    for (int t = 0; t < 5; ++t) {
      Mat x(n, n);
      for (double& v : x.a) v = rng.uniform(0.0, 1.0);
      const auto obj = matrix_reg_objective(x, y, l, mu, scheme);
      const double h = 1e-5;
      for (int probe = 0; probe < 6; ++probe) {
        const int i = static_cast<int>(rng.uniform_int(0, n - 1));
        const int j = static_cast<int>(rng.uniform_int(0, n - 1));
        Mat xp = x, xm = x;
        xp(i, j) += h;
        xm(i, j) -= h;
        const double fd = (matrix_reg_objective(xp, y, l, mu, scheme).value -
                           matrix_reg_objective(xm, y, l, mu, scheme).value) /
                          (2.0 * h);
        CHECK(obj.gradient(i, j) ==
              doctest::Approx(fd).epsilon(1e-5).scale(std::max(1.0, std::abs(fd))));
      }
    }
  }
}

TEST_CASE("centered norm peaks only at permutation matrices") {
  Rng rng(31337);
  for (int n : {3, 4, 5}) {
    YMatrix y = YMatrix::sorted_uniform(n, 2, rng);
    REQUIRE(y.columns_have_unique_entries(1e-12));
    auto centered_norm = [&](const Mat& x) {
      const Mat xy = matmul(x, y.columns);
      double s = 0.0;
      for (int c = 0; c < y.p; ++c) {
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += xy(i, c);
        mean /= n;
        for (int i = 0; i < n; ++i) s += (xy(i, c) - mean) * (xy(i, c) - mean);
      }
      return std::sqrt(s);
    };
    double perm_value = -1.0;
    oracles::for_each_permutation(n, [&](const PermutationVec& p) {
      const double v = centered_norm(perm_matrix(p));
      if (perm_value < 0) perm_value = v;
      CHECK(v == doctest::Approx(perm_value).epsilon(1e-9));
    });
    for (int t = 0; t < 500; ++t) {
      const auto ds = random_doubly_stochastic(n, rng);
      CHECK(centered_norm(ds.entries) < perm_value - 1e-9);
    }
  }
}

TEST_CASE("admissible regularization bounds") {
  Rng rng(8);
  const int n = 6;
  auto l = model::laplacian(random_similarity(n, rng));
  const auto f = spectral::fiedler(l);
  l.lambda2 = f.lambda2;

  CHECK(mu_upper_bound(l, YMatrix::identity_ordering(n), RegScheme::vector) ==
        doctest::Approx(f.lambda2));
  // Rank-deficient Y: the matrix scheme admits no regularization at all.
  CHECK(mu_upper_bound(l, YMatrix::identity_ordering(n), RegScheme::matrix) ==
        doctest::Approx(0.0).epsilon(1e-9));

  YMatrix wide = YMatrix::sorted_uniform(n, 3 * n, rng);
  Mat yyt(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int c = 0; c < wide.p; ++c) s += wide.columns(i, c) * wide.columns(j, c);
      yyt(i, j) = s;
    }
  const auto eig = oracles::jacobi_eig(yyt);
  CHECK(mu_upper_bound(l, wide, RegScheme::matrix) ==
        doctest::Approx(f.lambda2 * eig.values.front()).epsilon(1e-6));
}

TEST_CASE("sinkhorn sampling satisfies the polytope invariants") {
  Rng rng(55);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + static_cast<int>(rng.uniform_int(0, 18));
    const auto ds = random_doubly_stochastic(n, rng);  // checked() inside
    CHECK(ds.n == n);
  }
}
