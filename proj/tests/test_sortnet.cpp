#include <doctest.h>

#include <algorithm>

#include "snperm/sortnet.hpp"
#include "snperm/core.hpp"

using namespace snperm;
using namespace snperm::sortnet;

TEST_CASE("bitonic comparator counts match the closed form") {
  CHECK(bitonic_network(1).num_comparators() == 0);
  CHECK(bitonic_network(2).num_comparators() == 1);
  CHECK(bitonic_network(4).num_comparators() == 6);
  CHECK(bitonic_network(8).num_comparators() == 24);
  // n = 2^k has exactly n*k*(k+1)/4 comparators.
  for (int k = 1; k <= 6; ++k) {
    const int n = 1 << k;
    CHECK(bitonic_network(n).num_comparators() == n * k * (k + 1) / 4);
  }
}

TEST_CASE("odd-even comparator counts") {
  CHECK(odd_even_network(2).num_comparators() == 1);
  CHECK(odd_even_network(4).num_comparators() == 5);
  CHECK(odd_even_network(8).num_comparators() == 19);
  // Strictly fewer comparators than bitonic from n = 4 upward.
  for (int k = 2; k <= 6; ++k) {
    const int n = 1 << k;
    CHECK(odd_even_network(n).num_comparators() < bitonic_network(n).num_comparators());
  }
}

TEST_CASE("apply runs the comparators") {
  const auto net = bitonic_network(4);
  CHECK(sortnet::apply(net, {1, 2, 3, 4}) == std::vector<double>{1, 2, 3, 4});
  CHECK(sortnet::apply(net, {4, 3, 2, 1}) == std::vector<double>{1, 2, 3, 4});
  ComparatorNetwork empty;
  empty.n = 3;
  CHECK(sortnet::apply(empty, {3, 1, 2}) == std::vector<double>{3, 1, 2});
  CHECK_THROWS_AS(sortnet::apply(net, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("0-1 principle verification") {
  for (int n = 1; n <= 16; ++n) {
    CAPTURE(n);
    CHECK(verify_sorts(bitonic_network(n)));
    CHECK(verify_sorts(odd_even_network(n)));
  }
  ComparatorNetwork empty;
  empty.n = 1;
  CHECK(verify_sorts(empty));

  auto broken = bitonic_network(4);
  broken.comparators.erase(broken.comparators.begin());
  CHECK_FALSE(verify_sorts(broken));

  ComparatorNetwork too_big;
  too_big.n = 21;
  CHECK_THROWS_AS(verify_sorts(too_big), std::invalid_argument);
}

TEST_CASE("random vectors sort like std::sort") {
  Rng rng(20240811);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_int(0, 63));
    std::vector<double> x(n);
    for (double& v : x) v = rng.uniform(-100.0, 100.0);
    std::vector<double> expect = x;
    std::sort(expect.begin(), expect.end());
    const auto& net = (trial % 2 == 0) ? bitonic_network(n) : odd_even_network(n);
    CHECK(sortnet::apply(net, x) == expect);
  }
}

TEST_CASE("stage labels are conflict-free and ordered") {
  for (int n : {5, 8, 13, 32}) {
    for (auto kind : {0, 1}) {
      const auto net = kind == 0 ? bitonic_network(n) : odd_even_network(n);
      int last_stage = 0;
      std::vector<int> wire_stage(n, -1);
      for (const auto& c : net.comparators) {
        CHECK(c.stage >= last_stage);
        last_stage = c.stage;
        CHECK(c.top < c.bottom);
        CHECK(c.bottom < n);
        CHECK(wire_stage[c.top] < c.stage);
        CHECK(wire_stage[c.bottom] < c.stage);
        wire_stage[c.top] = c.stage;
        wire_stage[c.bottom] = c.stage;
      }
    }
  }
}

TEST_CASE("network text dump is stable") {
  const auto net = bitonic_network(4);
  CHECK(to_text(net) ==
        "4 6\n"
        "0 0 1\n"
        "0 2 3\n"
        "1 0 3\n"
        "1 1 2\n"
        "2 0 1\n"
        "2 2 3\n");
}
