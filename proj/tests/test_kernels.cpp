#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "gymlab/acceptance.hpp"
#include "gymlab/kernels.hpp"

using namespace gymlab;

namespace {

DiscreteGYM sample(std::uint64_t seed, std::size_t cells, std::size_t dim) {
  std::mt19937_64 rng(seed);
  auto X = make_space(SpaceModel::interval(0.0, 1.0, cells));
  return acceptance::random_gym(rng, X, dim, 6 * cells);
}

/// Naive left-to-right reference: sum_i w_i f(cell_i, xi_i, eta_i).
double naive_pair(const HomFn& f, const DiscreteGYM& mu) {
  long double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto a = mu.atom(i);
    s += a.w * f(a.cell, a.xi, a.eta);
  }
  return double(s);
}

}  // namespace

TEST_CASE("parallel pairing equals the serial reference and a naive sum") {
  const auto mu = sample(1, 3000, 2);
  const auto battery = standard_battery(mu.space(), 2);
  const auto par = kernels::pair_many(battery.members(), mu);
  const auto ser = kernels::serial::pair_many(battery.members(), mu);
  REQUIRE(par.size() == battery.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(std::abs(par[i] - ser[i]) <= 1e-12 * (1.0 + std::abs(ser[i])));
    CHECK(std::abs(par[i] - naive_pair(battery.members()[i], mu)) <= 1e-12 * (1.0 + std::abs(par[i])));
    CHECK(kernels::pair(battery.members()[i], mu) == par[i]);
  }
}

TEST_CASE("results do not depend on the thread count") {
  const auto mu = sample(2, 2000, 3);
  const auto f = HomFn::euclid_norm(3);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double one = kernels::pair(f, mu);
  omp_set_num_threads(std::max(saved, 4));
  const double many = kernels::pair(f, mu);
  omp_set_num_threads(saved);
  CHECK(one == many);
}

TEST_CASE("+inf pairings are absorbing") {
  auto X = make_space(SpaceModel::interval(0.0, 1.0, 2));
  const DiscreteGYM mu(X, 1, {Atom{0, {0.0}, 1.0, 0.5}, Atom{1, {1.0}, 0.0, 1.0}});
  CHECK(kernels::pair(HomFn::pr_moment(1, 2.0), mu) == kInf);
  CHECK(kernels::serial::pair(HomFn::pr_moment(1, 2.0), mu) == kInf);
}

TEST_CASE("xi_only drops the eta coordinate") {
  auto X = make_space(SpaceModel::interval(0.0, 1.0, 1));
  const DiscreteGYM mu(X, 1, {Atom{0, {3.0}, 4.0, 1.0}});
  // canonical atom is (0.6, 0.8) with weight 5
  CHECK(kernels::pair(HomFn::eta_part(1), mu, true) == 0.0);
  CHECK(kernels::pair(HomFn::euclid_norm(1), mu, true) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("exceptions thrown inside parallel regions reach the caller") {
  const auto mu = sample(3, 500, 1);
  const auto bad = HomFn::raw(
      1,
      [](std::size_t c, std::span<const double>, double) -> double {
        if (c == 377) throw std::runtime_error("boom");
        return 0.0;
      },
      1.0, {1.0});
  CHECK_THROWS_WITH(kernels::pair(bad, mu), "boom");
  CHECK_THROWS_AS(kernels::pair(HomFn::xi_norm(2), mu), DimensionError);
}

TEST_CASE("grid maxima and step increments agree with the serial kernels") {
  const auto grid = DirectionGrid::sphere(3, 12);
  const auto f = HomFn::linear(2, {1.0, -2.0, 0.5, 0.5}, {0.3, -1.0});
  CHECK(kernels::grid_abs_max(f, grid, 2) == kernels::serial::grid_abs_max(f, grid, 2));  // a max is order-free

  std::mt19937_64 rng(4);
  auto X = make_space(SpaceModel::interval(0.0, 1.0, 300));
  const auto sys = acceptance::random_system(rng, X, 2, {0.0, 0.25, 0.5, 1.0}, 3);
  const auto h = HomFn::xi_norm(2);
  const auto par = kernels::step_increments(h, sys.master(), 2);
  const auto ser = kernels::serial::step_increments(h, sys.master(), 2);
  REQUIRE(par.size() == 3);
  for (std::size_t s = 0; s < 3; ++s) {
    CHECK(std::abs(par[s] - ser[s]) <= 1e-12);
    // naive oracle over joint atoms
    long double acc = 0.0;
    for (std::size_t i = 0; i < sys.master().size(); ++i) {
      const auto a = sys.master().atom(i);
      acc += a.w * std::hypot(a.xi[2 * s + 2] - a.xi[2 * s], a.xi[2 * s + 3] - a.xi[2 * s + 1]);
    }
    CHECK(std::abs(par[s] - double(acc)) <= 1e-12);
  }
}
