#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gymlab/core.hpp"
#include "gymlab/space.hpp"

using namespace gymlab;

TEST_CASE("interval cells and reference measure") {
  const auto X = SpaceModel::interval(-1.0, 1.0, 8);
  CHECK(X.cells() == 8);
  CHECK(X.cell_width() == doctest::Approx(0.25));
  double total = 0.0;
  for (std::size_t c = 0; c < X.cells(); ++c) total += X.measure(c);
  CHECK(total == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(X.total_measure() == doctest::Approx(2.0));
  CHECK(X.cell_lo(0) == -1.0);
  CHECK(X.cell_hi(7) == 1.0);
}

TEST_CASE("cell_of uses half-open cells and maps the right end to the last cell") {
  const auto X = SpaceModel::interval(0.0, 1.0, 4);
  CHECK(X.cell_of(0.0) == 0);
  CHECK(X.cell_of(0.25) == 1);
  CHECK(X.cell_of(0.2499) == 0);
  CHECK(X.cell_of(1.0) == 3);
}

TEST_CASE("interval metric is the distance between centers") {
  const auto X = SpaceModel::interval(0.0, 2.0, 4);
  CHECK(X.distance(0, 3) == doctest::Approx(1.5));
  CHECK(X.distance(2, 2) == 0.0);
  CHECK(X.coordinate(0) >= 0.0);
  CHECK(X.coordinate(3) <= 1.0);
}

TEST_CASE("point clouds carry weights and a checked metric") {
  const auto P = SpaceModel::point_cloud({"a", "b", "c"}, {0.5, 1.0, 2.0}, {0, 1, 2, 1, 0, 1, 2, 1, 0});
  CHECK(P.cells() == 3);
  CHECK(P.total_measure() == doctest::Approx(3.5));
  CHECK(P.distance(0, 2) == 2.0);
  CHECK_FALSE(P.is_interval());
  // triangle inequality violated
  CHECK_THROWS_AS(SpaceModel::point_cloud({"a", "b", "c"}, {1, 1, 1}, {0, 1, 5, 1, 0, 1, 5, 1, 0}), ValidationError);
  // asymmetric
  CHECK_THROWS_AS(SpaceModel::point_cloud({"a", "b"}, {1, 1}, {0, 1, 2, 0}), ValidationError);
}

TEST_CASE("degenerate models are rejected") {
  CHECK_THROWS(SpaceModel::interval(1.0, 0.0, 4));
  CHECK_THROWS(SpaceModel::interval(0.0, 1.0, 0));
  CHECK_THROWS(SpaceModel::point_cloud({"a"}, {0.0}, {0.0}));
}

TEST_CASE("pairwise summation is accurate on cancelling input") {
  std::vector<double> v;
  for (int i = 0; i < 100000; ++i) v.push_back(0.1);
  CHECK(std::abs(pairwise_sum(v) - 10000.0) < 1e-9);
  const double inf[] = {1.0, kInf, 2.0};
  CHECK(extended_sum(inf) == kInf);
  const double bad[] = {1.0, -kInf};
  CHECK_THROWS(extended_sum(bad));
}

TEST_CASE("decimal strings round-trip bit for bit") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, kInf, -kInf}) CHECK(parse_double(format_double(v)) == v);
  CHECK_THROWS(parse_double("1.0x"));
}
