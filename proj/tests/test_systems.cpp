#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gymlab/acceptance.hpp"
#include "gymlab/systems.hpp"

using namespace gymlab;

namespace {

SpacePtr unit(std::size_t cells) { return make_space(SpaceModel::interval(0.0, 1.0, cells)); }

DiscreteMeasure constant(SpacePtr X, double v) { return DiscreteMeasure(X, 1, std::vector<double>(X->cells(), v), {}); }

SystemGYM linear_system(SpacePtr X, std::vector<double> times, double v) {
  std::vector<std::pair<double, DiscreteMeasure>> s;
  for (double t : times) s.emplace_back(t, constant(X, t * v));
  return from_path(s);
}

SystemGYM jump_system(SpacePtr X, std::vector<double> times, double t_jump, double mass) {
  std::vector<std::pair<double, DiscreteMeasure>> s;
  for (double t : times) {
    std::vector<std::pair<std::size_t, Vec>> sing;
    if (t >= t_jump) sing.push_back({X->cell_of(0.5), {mass}});
    s.emplace_back(t, DiscreteMeasure(X, 1, std::vector<double>(X->cells(), 0.0), sing));
  }
  return from_path(s);
}

double gap(const DiscreteGYM& a, const DiscreteGYM& b) { return wstar_gap(a, b, standard_battery(a.space(), a.dim())); }

/// Exhaustive oracle for ac_modulus: best subset of grid steps of total length <= delta.
double modulus_bruteforce(const std::vector<double>& times, const std::vector<double>& inc, double delta) {
  const std::size_t n = inc.size();
  double best = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
    double len = 0.0, val = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) len += times[i + 1] - times[i], val += inc[i];
    if (len <= delta + 1e-12) best = std::max(best, val);
  }
  return best;
}

}  // namespace

TEST_CASE("time grid") {
  const TimeGrid g({0.0, 0.25, 1.0}, -1.0);
  CHECK(g.horizon() == 1.0);
  CHECK(g.rho(0.0) == 0);
  CHECK(g.rho(0.2) == 0);
  CHECK(g.rho(0.25) == 1);
  CHECK(g.rho(1.0) == 2);
  CHECK_THROWS(g.rho(1.5));
  CHECK_THROWS(TimeGrid({0.0, 0.0, 1.0}, -1.0));
  CHECK_THROWS(TimeGrid({0.0}, -1.0));
  CHECK_THROWS(TimeGrid({0.0, 2.0}, 1.0));
}

TEST_CASE("from_path, marginals and bar_path") {
  auto X = unit(4);
  const auto sys = linear_system(X, {0.0, 0.5, 1.0}, 1.0);
  const double half[] = {0.5};
  CHECK(gap(marginal(sys, half), lift_measure(constant(X, 0.5))) <= 1e-12);
  const double all[] = {0.0, 0.5, 1.0};
  CHECK(marginal(sys, all) == sys.master());
  // off-grid times read the last grid time at or before them
  const double off[] = {0.7};
  CHECK(gap(marginal(sys, off), marginal(sys, half)) == 0.0);

  std::mt19937_64 rng(1);
  std::vector<std::pair<double, DiscreteMeasure>> samples;
  for (double t : {0.0, 0.3, 0.9}) samples.emplace_back(t, acceptance::random_measure(rng, X, 2, 2));
  const auto path = bar_path(from_path(samples));
  REQUIRE(path.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t j = 0; j < 2; ++j) {
        CHECK(std::abs(path[i].ac(c)[j] - samples[i].second.ac(c)[j]) <= 1e-12);
        CHECK(std::abs(path[i].singular(c)[j] - samples[i].second.singular(c)[j]) <= 1e-12);
      }
}

TEST_CASE("jump systems carry the jump on eta = 0 joint atoms") {
  auto X = unit(4);
  const auto sys = jump_system(X, {0.0, 1.0}, 0.5, 1.0);
  bool found = false;
  for (const auto& a : sys.master().atoms())
    if (a.eta == 0.0) {
      found = true;
      CHECK(a.cell == X->cell_of(0.5));
      CHECK(a.xi[0] == 0.0);
      CHECK(a.xi[1] * a.w == doctest::Approx(1.0));
    }
  CHECK(found);
}

TEST_CASE("marginal consistency under coordinate projection") {
  std::mt19937_64 rng(2);
  auto X = acceptance::random_interval(rng, 5);
  const auto sys = acceptance::random_system(rng, X, 2, {0.0, 0.4, 1.0}, 3);
  const auto first = HomMap::linear(4, {Vec{1, 0, 0, 0}, Vec{0, 1, 0, 0}});
  const auto battery = standard_battery(*X, 2);
  const double t1[] = {0.0}, t12[] = {0.0, 1.0};
  for (const auto& f : battery.members()) {
    const double a = pair(f, marginal(sys, t1));
    const double b = pair(HomFn::compose(f, first), marginal(sys, t12));
    CHECK(std::abs(a - b) <= 1e-12);
  }
  const std::size_t blocks[] = {2};
  const double t3[] = {1.0};
  CHECK(gap(select_blocks(sys.master(), 2, blocks), marginal(sys, t3)) <= 1e-12);
}

TEST_CASE("variation examples") {
  auto X = unit(4);
  CHECK(std::abs(variation(linear_system(X, {0.0, 0.25, 0.5, 1.0}, 1.0), 0.0, 1.0).value - 1.0) <= 1e-12);
  CHECK(std::abs(variation(jump_system(X, {0.0, 0.5, 1.0}, 0.5, 1.0), 0.0, 1.0).value - 1.0) <= 1e-12);

  // anticorrelated master: the marginals are symmetric but the joint moves by 2
  auto Y = unit(1);
  const DiscreteGYM master(Y, 2, {Atom{0, {1.0, -1.0}, 1.0, 0.5}, Atom{0, {-1.0, 1.0}, 1.0, 0.5}});
  const SystemGYM anti(TimeGrid({0.0, 1.0}, -1.0), master, 1);
  CHECK(variation(anti, 0.0, 1.0).value == doctest::Approx(2.0).epsilon(1e-15));
  for (const auto& b : bar_path(anti)) CHECK(std::abs(b.ac(0)[0]) <= 1e-15);

  const auto two = 2.0 * HomFn::xi_norm(1);
  const auto sys = linear_system(X, {0.0, 0.5, 1.0}, 3.0);
  CHECK(variation(sys, two, 0.0, 1.0).value == doctest::Approx(2.0 * variation(sys, 0.0, 1.0).value));
  CHECK(variation(sys, 0.2, 0.4).value == 0.0);
  CHECK_THROWS(variation(sys, HomFn::min(HomFn::xi_norm(1), HomFn::eta_part(1)), 0.0, 1.0));
}

TEST_CASE("additivity on random systems") {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 10; ++it) {
    auto X = acceptance::random_interval(rng, 4);
    const auto sys = acceptance::random_system(rng, X, 1, {0.0, 0.2, 0.3, 0.7, 1.0}, 2);
    const auto& A = sys.grid().times();
    for (std::size_t i = 0; i < A.size(); ++i)
      for (std::size_t j = i; j < A.size(); ++j)
        for (std::size_t k = j; k < A.size(); ++k)
          CHECK(std::abs(variation(sys, A[i], A[k]).value - variation(sys, A[i], A[j]).value -
                         variation(sys, A[j], A[k]).value) <= 1e-12);
  }
}

TEST_CASE("absolute-continuity modulus") {
  auto X = unit(4);
  std::vector<double> times;
  for (int i = 0; i <= 8; ++i) times.push_back(i / 8.0);
  const auto lin = linear_system(X, times, 2.0);
  for (double d : {0.125, 0.25, 0.5, 1.0}) CHECK(ac_modulus(lin, d) == doctest::Approx(2.0 * d).epsilon(1e-14));
  const auto jump = jump_system(X, times, 0.5, 1.5);
  for (double d : {0.125, 0.3, 1.0}) CHECK(ac_modulus(jump, d) == doctest::Approx(1.5));
  CHECK(ac_modulus(jump, 0.01) == 0.0);
  CHECK(ac_modulus(linear_system(X, times, 0.0), 0.5) == 0.0);

  // the DP against exhaustive enumeration on uneven grids
  std::mt19937_64 rng(4);
  for (int it = 0; it < 20; ++it) {
    std::vector<double> ts = {0.0};
    const int steps = 4 + int(rng() % 9);
    for (int i = 0; i < steps; ++i) ts.push_back(ts.back() + 0.05 + 0.2 * double(rng() % 1000) / 1000.0);
    auto Y = acceptance::random_interval(rng, 3);
    const auto sys = acceptance::random_system(rng, Y, 1, ts, 2);
    const auto inc = step_increments(sys, HomFn::xi_norm(1));
    for (double frac : {0.1, 0.33, 0.6}) {
      const double d = frac * (ts.back() - ts.front());
      CHECK(std::abs(ac_modulus(sys, d) - modulus_bruteforce(ts, inc, d)) <= 1e-12);
    }
  }
}

TEST_CASE("difference quotients") {
  auto X = unit(3);
  const auto sys = linear_system(X, {0.0, 0.5, 1.0}, 2.0);
  CHECK(gap(diff_quotient(sys, 0.0, 0.5), lift_measure(constant(X, 2.0))) <= 1e-12);
  CHECK(gap(diff_quotient(sys, 0.5, 1.0), lift_measure(constant(X, 2.0))) <= 1e-12);
  const auto flat = linear_system(X, {0.0, 1.0}, 0.0);
  CHECK(gap(diff_quotient(flat, 0.0, 1.0), lift_measure(constant(X, 0.0))) <= 1e-12);
  CHECK_THROWS(diff_quotient(sys, 0.5, 0.5));

  const auto path = linear_path(X, 1, {}, {1.0, -2.0, 0.5}, 0.0, 1.0);
  const auto q = diff_quotient(path, 0.2, 0.7);
  CHECK(gap(q, lift_measure(DiscreteMeasure(X, 1, {1.0, -2.0, 0.5}, {}))) <= 1e-12);
}

TEST_CASE("derivative estimates") {
  auto X = unit(3);
  const auto path = linear_path(X, 1, {0.5, 0.5, 0.5}, {1.0, -2.0, 0.5}, 0.0, 1.0);
  const auto battery = standard_battery(*X, 1);
  const std::vector<double> eps = {0.125, 0.0625, 0.03125};
  const auto rep = derivative_estimate(path, 0.5, eps, battery, 1e-9);
  REQUIRE(rep.converged);
  for (double r : rep.residuals) CHECK(r <= 1e-12);
  CHECK(wstar_gap(*rep.estimate, lift_measure(DiscreteMeasure(X, 1, {1.0, -2.0, 0.5}, {})), battery) <= 1e-12);
  // barycentre quotients approach the barycentre of the derivative
  const double t0[] = {0.5};
  const auto b0 = barycentre(path.joint(t0));
  const auto bd = barycentre(*rep.estimate);
  for (double e : eps) {
    const double t1[] = {0.5 + e};
    const auto b1 = barycentre(path.joint(t1));
    for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs((b1.ac(c)[0] - b0.ac(c)[0]) / e - bd.ac(c)[0]) <= 1e-9);
  }

  // a grid system is constant inside a grid step
  const GridOracle grid(linear_system(X, {0.0, 0.5, 1.0}, 1.0));
  const auto inside = derivative_estimate(grid, 0.25, {0.1, 0.05, 0.01}, battery, 1e-9);
  REQUIRE(inside.converged);
  CHECK(wstar_gap(*inside.estimate, lift_measure(constant(X, 0.0)), battery) <= 1e-12);

  // a jump has no derivative at the jump time
  const auto jump = jump_path(X, {1.0}, 1, 0.5, 0.0, 1.0);
  const auto bad = derivative_estimate(jump, 0.5, eps, battery, 1e-6);
  CHECK_FALSE(bad.converged);
  CHECK_FALSE(bad.witness.empty());
}

TEST_CASE("variation against the integrated derivative") {
  auto X = unit(4);
  const auto h = HomFn::xi_norm(1);
  const auto lin = linear_path(X, 1, {}, {1.0, 1.0, 1.0, 1.0}, 0.0, 1.0);
  const auto g = variation_integral_gap(lin, h, 0.0, 1.0, 0.125, 1e-9);
  CHECK(g.lhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.rhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.inequality_holds);
  const auto g2 = variation_integral_gap(lin, 2.0 * h, 0.0, 1.0, 0.125, 1e-9);
  CHECK(g2.lhs == doctest::Approx(2.0 * g.lhs));
  CHECK(g2.rhs == doctest::Approx(2.0 * g.rhs));

  const auto jump = jump_path(X, {1.0}, 2, 0.5, 0.0, 1.0);
  const auto j = variation_integral_gap(jump, h, 0.0, 1.0, 0.125, 1e-9);
  CHECK(std::abs(j.rhs) <= 1e-12);
  CHECK(j.lhs == doctest::Approx(1.0));
  CHECK(j.inequality_holds);
}
