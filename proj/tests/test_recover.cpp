#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "snperm/recover.hpp"

using namespace snperm;
using namespace snperm::recover;

namespace {

std::vector<double> random_hull_point(int n, Rng& rng, int verts = 8) {
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

TEST_CASE("order_round ranks with index tie-break") {
  CHECK(order_round({1.2, 3.4, 2.2}) == PermutationVec{1, 3, 2});
  CHECK(order_round({2, 4, 1, 3}) == PermutationVec{2, 4, 1, 3});
  CHECK(order_round({0.5, 0.5, 0.5}) == identity_perm(3));
  CHECK_THROWS_AS(order_round({std::nan(""), 1.0}), std::invalid_argument);

  // Invariant under strictly monotone transformations.
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + static_cast<int>(rng.uniform_int(0, 8));
    std::vector<double> x(n);
    for (double& v : x) v = rng.uniform(-4.0, 4.0);
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) y[i] = std::exp(0.5 * x[i]) + 3.0;
    CHECK(order_round(x) == order_round(y));
  }
}

TEST_CASE("sample_round never loses to plain rounding") {
  Rng rng(66);
  Mat a(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) a(i, j) = a(j, i) = rng.uniform(0.0, 1.0);
  const auto l = model::laplacian(model::SimilarityMatrix(a));

  for (int t = 0; t < 50; ++t) {
    const auto x = random_hull_point(6, rng);
    Rng trial_rng(900 + t);
    const auto rr = sample_round(x, 20, 0.5, trial_rng, l);
    const auto base = order_round(x);
    CHECK(rr.two_sum <= model::two_sum(l, base) + 1e-12);
  }

  // Zero variance collapses to order_round regardless of the trial count.
  const auto x = random_hull_point(6, rng);
  Rng trial_rng(1);
  const auto rr = sample_round(x, 7, 0.0, trial_rng, l);
  CHECK(rr.perm == order_round(x));

  // Seeded runs repeat exactly.
  Rng r1(31), r2(31);
  const auto a1 = sample_round(x, 25, 0.5, r1, l);
  const auto a2 = sample_round(x, 25, 0.5, r2, l);
  CHECK(a1.perm == a2.perm);
  CHECK(a1.two_sum == a2.two_sum);
}

TEST_CASE("sample_round golden run") {
  Mat a(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (i != j) a(i, j) = 1.0 / (1 + std::abs(i - j));
  const auto l = model::laplacian(model::SimilarityMatrix(a));
  Rng rng(7);
  const auto rr = sample_round({2.5, 3.1, 2.9, 1.5, 5.0}, 10, 0.5, rng, l);
  CHECK(rr.perm == PermutationVec{1, 4, 2, 3, 5});
  CHECK(rr.two_sum == doctest::Approx(17.116666666667).epsilon(1e-10));
}

TEST_CASE("decompose: vertices, midpoints and random hull points") {
  {
    const auto d = decompose({2.0, 4.0, 1.0, 3.0});
    REQUIRE(d.weights.size() == 1);
    CHECK(d.weights[0] == doctest::Approx(1.0));
    CHECK(d.perms[0] == PermutationVec{2, 4, 1, 3});
  }
  {
    const auto d = decompose({1.5, 1.5});
    REQUIRE(d.weights.size() == 2);
    CHECK(d.weights[0] == doctest::Approx(0.5));
    CHECK(d.weights[1] == doctest::Approx(0.5));
    const bool ab = d.perms[0] == PermutationVec{1, 2} && d.perms[1] == PermutationVec{2, 1};
    const bool ba = d.perms[0] == PermutationVec{2, 1} && d.perms[1] == PermutationVec{1, 2};
    CHECK((ab || ba));
  }
  CHECK_THROWS_AS(decompose({9.0, 1.0, 1.0}), std::invalid_argument);

  Rng rng(404);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng.uniform_int(0, 4));
    const auto x = random_hull_point(n, rng);
    const auto d = decompose(x);
    CHECK(d.reconstruction_error <= 1e-9);
    CHECK(static_cast<int>(d.perms.size()) <= n + 1);
  }
}

TEST_CASE("decompose edge shapes") {
  // Singleton and barycenter.
  {
    const auto d = decompose({1.0});
    REQUIRE(d.weights.size() == 1);
    CHECK(d.perms[0] == PermutationVec{1});
  }
  for (int n : {3, 5, 8}) {
    const std::vector<double> bary(n, 0.5 * (n + 1));
    const auto d = decompose(bary);
    CHECK(d.reconstruction_error <= 1e-9);
    CHECK(static_cast<int>(d.perms.size()) <= n + 1);
  }
  // Vertex nudged inward along the segment to the barycenter stays valid.
  Rng rng(77);
  for (int t = 0; t < 40; ++t) {
    const int n = 3 + static_cast<int>(rng.uniform_int(0, 5));
    const auto p = rng.random_permutation(n);
    std::vector<double> x(n);
    const double eps = rng.uniform(1e-10, 1e-4);
    for (int i = 0; i < n; ++i) x[i] = p[i] + eps * (0.5 * (n + 1) - p[i]);
    const auto d = decompose(x);
    CHECK(d.reconstruction_error <= 1e-8);
    CHECK(static_cast<int>(d.perms.size()) <= n + 1);
  }
  // Heavy ties: midpoints of a vertex and a transposition of it.
  for (int t = 0; t < 40; ++t) {
    const int n = 4 + static_cast<int>(rng.uniform_int(0, 4));
    const auto p = rng.random_permutation(n);
    auto q = p;
    const int a = static_cast<int>(rng.uniform_int(0, n - 2));
    std::swap(q[a], q[a + 1]);
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = 0.5 * (p[i] + q[i]);
    const auto d = decompose(x);
    CHECK(d.reconstruction_error <= 1e-8);
    CHECK(static_cast<int>(d.perms.size()) <= n + 1);
  }
}

TEST_CASE("decompose contract over many larger points") {
  Rng rng(7);
  for (int t = 0; t < 500; ++t) {
    const int n = 2 + static_cast<int>(rng.uniform_int(0, 6));
    const auto x = random_hull_point(n, rng);
    const auto d = decompose(x);
    CHECK(static_cast<int>(d.perms.size()) <= n + 1);
    double total = 0.0;
    for (double w : d.weights) {
      CHECK(w >= -1e-12);
      CHECK(w <= 1.0 + 1e-12);
      total += w;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(d.reconstruction_error <= 1e-8);
    for (const auto& p : d.perms) CHECK(is_permutation_vec(p));
  }
}
