#include <doctest.h>

#include <cstdio>

#include "snperm/io.hpp"

using namespace snperm;
using namespace snperm::io;

TEST_CASE("matrix formats round trip") {
  Mat m(3, 4);
  double v = 0.0;
  for (double& e : m.a) e = (v += 0.25);
  m(1, 2) = 0.0;

  for (auto fmt : {MatrixFormat::matrix_market, MatrixFormat::matrix_market_array,
                   MatrixFormat::csv}) {
    const auto text = matrix_to_string(m, fmt);
    const Mat back = matrix_from_string(text);
    REQUIRE(back.rows == m.rows);
    REQUIRE(back.cols == m.cols);
    for (size_t i = 0; i < m.a.size(); ++i) CHECK(back.a[i] == doctest::Approx(m.a[i]));
  }

  Mat b01(2, 3);
  b01(0, 0) = 1;
  b01(1, 2) = 1;
  const Mat back = matrix_from_string(matrix_to_string(b01, MatrixFormat::binary01));
  CHECK(back.a == b01.a);
  CHECK_THROWS_AS(matrix_to_string(m, MatrixFormat::binary01), std::invalid_argument);
}

TEST_CASE("symmetric MatrixMarket input is mirrored") {
  const char* text =
      "%%MatrixMarket matrix coordinate real symmetric\n"
      "3 3 2\n"
      "2 1 1.5\n"
      "3 3 2.0\n";
  const Mat m = matrix_from_string(text);
  CHECK(m(1, 0) == 1.5);
  CHECK(m(0, 1) == 1.5);
  CHECK(m(2, 2) == 2.0);
}

TEST_CASE("permutation and constraint files") {
  const std::string dir = "./io_test_tmp";
  std::remove((dir + "_perm.txt").c_str());
  write_permutation(dir + "_perm.txt", {3, 1, 2});
  CHECK(read_permutation(dir + "_perm.txt") == PermutationVec{3, 1, 2});

  write_text_file(dir + "_bad.txt", "1 1 2\n");
  CHECK_THROWS_AS(read_permutation(dir + "_bad.txt"), std::invalid_argument);

  model::SideConstraints side{{0, 4, 2.0}, {3, 1, 1.0}};
  write_constraints(dir + "_cons.txt", side);
  const auto back = read_constraints(dir + "_cons.txt");
  REQUIRE(back.size() == 2);
  CHECK(back[0].i == 0);
  CHECK(back[0].j == 4);
  CHECK(back[0].gap == 2.0);
  CHECK(back[1].i == 3);

  CHECK_THROWS_AS(read_matrix("./does_not_exist.mtx"), std::invalid_argument);

  for (const char* suffix : {"_perm.txt", "_bad.txt", "_cons.txt"})
    std::remove((dir + suffix).c_str());
}

TEST_CASE("format names parse") {
  CHECK(format_from_name("mm") == MatrixFormat::matrix_market);
  CHECK(format_from_name("mm-array") == MatrixFormat::matrix_market_array);
  CHECK(format_from_name("csv") == MatrixFormat::csv);
  CHECK(format_from_name("bin01") == MatrixFormat::binary01);
  CHECK(format_from_name("") == MatrixFormat::auto_detect);
  CHECK_THROWS_AS(format_from_name("xlsx"), std::invalid_argument);
}
