#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gymlab/acceptance.hpp"
#include "gymlab/gym.hpp"

using namespace gymlab;

namespace {

SpacePtr unit(std::size_t cells) { return make_space(SpaceModel::interval(0.0, 1.0, cells)); }

DiscreteGYM half_half(SpacePtr X) { return lift_young(YoungPart::uniform_mixture(X, {{1.0}, {-1.0}}, {0.5, 0.5})); }

/// sum_i w_i f(atom_i) with a plain loop.
double direct(const HomFn& f, const DiscreteGYM& mu) {
  double s = 0.0;
  for (const auto& a : mu.atoms()) s += a.w * f(a.cell, a.xi, a.eta);
  return s;
}

}  // namespace

TEST_CASE("construction canonicalizes onto the unit sphere and merges duplicates") {
  auto X = unit(2);
  const DiscreteGYM mu(X, 1, {Atom{1, {3.0}, 4.0, 1.0}, Atom{0, {1.0}, 1.0, 1.0}, Atom{0, {2.0}, 2.0, 0.5}});
  REQUIRE(mu.size() == 2);
  CHECK(mu.cells()[0] == 0);
  const auto a0 = mu.atom(0);
  CHECK(a0.xi[0] == doctest::Approx(std::sqrt(0.5)));
  CHECK(a0.w == doctest::Approx(2.0 * std::sqrt(2.0)));
  const auto a1 = mu.atom(1);
  CHECK(a1.xi[0] == doctest::Approx(0.6));
  CHECK(a1.eta == doctest::Approx(0.8));
  CHECK(a1.w == doctest::Approx(5.0));
  CHECK_THROWS(DiscreteGYM(X, 1, {Atom{0, {0.0}, 0.0, 1.0}}));
  // negative eta is stored and reported, not rejected
  CHECK(validate(DiscreteGYM(X, 1, {Atom{0, {1.0}, -1.0, 1.0}})).negative_eta_atoms == 1);
  CHECK_THROWS(DiscreteGYM(X, 1, {Atom{0, {1.0}, 1.0, 0.0}}));
  CHECK_THROWS(DiscreteGYM(X, 1, {Atom{2, {1.0}, 1.0, 1.0}}));
}

TEST_CASE("lift of a measure: examples of the mass formula") {
  auto X = unit(4);
  const DiscreteMeasure zero(X, 1);
  const auto mu0 = lift_measure(zero);
  CHECK(mu0.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(mu0.atom(i).xi[0] == 0.0);
    CHECK(mu0.atom(i).eta == 1.0);
    CHECK(mu0.atom(i).w == doctest::Approx(0.25));
  }
  CHECK(norm_star(mu0) == doctest::Approx(1.0).epsilon(1e-15));

  for (std::size_t n : {1u, 3u, 17u, 128u}) {
    auto Y = unit(n);
    const DiscreteMeasure three(Y, 1, std::vector<double>(n, 3.0), {});
    CHECK(std::abs(norm_star(lift_measure(three)) - std::sqrt(10.0)) <= 1e-12);
  }
  auto Z = unit(8);
  const DiscreteMeasure sing(Z, 1, std::vector<double>(8, 0.0), {{Z->cell_of(0.5), {2.0}}});
  CHECK(std::abs(norm_star(lift_measure(sing)) - 3.0) <= 1e-12);
}

TEST_CASE("Young lifts") {
  auto X = unit(4);
  const auto a = lift_young(YoungPart::uniform_mixture(X, {{0.0}}, {1.0}));
  CHECK(a == lift_measure(DiscreteMeasure(X, 1)));
  auto Y = make_space(SpaceModel::interval(-1.0, 1.0, 6));
  CHECK(std::abs(pair(HomFn::xi_norm(1), half_half(Y)) - 2.0) <= 1e-12);
  // norm is sum m sqrt(1 + |xi|^2)
  const auto nu = YoungPart::uniform_mixture(Y, {{2.0}, {-0.5}}, {0.25, 0.75});
  double expect = 0.0;
  for (const auto& at : nu.atoms()) expect += at.mass * std::sqrt(1.0 + at.xi[0] * at.xi[0]);
  CHECK(std::abs(norm_star(lift_young(nu)) - expect) <= 1e-12);
}

TEST_CASE("pairing examples") {
  std::mt19937_64 rng(1);
  auto X = acceptance::random_interval(rng, 10);
  const auto mu = acceptance::random_gym(rng, X, 2, 40);
  CHECK(std::abs(pair(HomFn::eta_part(2), mu) - X->total_measure()) <= 1e-12);
  CHECK(std::abs(norm_star(mu) - pair(HomFn::euclid_norm(2), mu)) <= 1e-12);
  CHECK(std::abs(norm_star(mu) - direct(HomFn::euclid_norm(2), mu)) <= 1e-12);

  auto Y = make_space(SpaceModel::interval(0.0, 1.0, 3));
  const DiscreteGYM conc = superpose(lift_measure(DiscreteMeasure(Y, 1)), DiscreteGYM(Y, 1, {Atom{1, {1.0}, 0.0, 0.5}}));
  CHECK(pair(HomFn::pr_moment(1, 2.0), conc) == kInf);
  CHECK(pair(HomFn::pr_moment(1, 2.0), lift_measure(DiscreteMeasure(Y, 1))) == 0.0);
  CHECK_THROWS_AS(pair(HomFn::xi_norm(2), conc), DimensionError);
  // pair_xi sets eta = 0
  CHECK(pair_xi(HomFn::euclid_norm(1), conc) == doctest::Approx(0.5));
}

TEST_CASE("validate") {
  std::mt19937_64 rng(2);
  auto X = acceptance::random_interval(rng, 6);
  const DiscreteMeasure p = acceptance::random_measure(rng, X, 2, 3);
  CHECK(validate(lift_measure(p)).passed);

  auto Y = unit(2);
  const DiscreteGYM only_inf(Y, 1, {Atom{0, {1.0}, 0.0, 1.0}, Atom{1, {-1.0}, 0.0, 1.0}});
  CHECK_FALSE(validate(only_inf).passed);

  const double lam = 0.5;
  const DiscreteGYM off(Y, 1, {Atom{0, {0.0}, 1.0, lam * (1.0 + 1e-6)}, Atom{1, {0.0}, 1.0, lam}});
  const auto rep = validate(off);
  CHECK_FALSE(rep.passed);
  CHECK(rep.cell_defects[0] == doctest::Approx(1e-6 * lam).epsilon(1e-6));
  CHECK(rep.max_projection_defect == doctest::Approx(1e-6 * lam).epsilon(1e-6));
  CHECK(std::abs(rep.cell_defects[1]) <= 1e-15);
}

TEST_CASE("images under homogeneous maps") {
  std::mt19937_64 rng(3);
  auto X = acceptance::random_interval(rng, 5);
  const auto mu = acceptance::random_gym(rng, X, 1, 30);
  const auto same = image(mu, HomMap::identity(1));
  CHECK(wstar_gap(mu, same, standard_battery(*X, 1)) <= 1e-12);
  const auto doubled = image(mu, HomMap::linear(1, {Vec{2.0}}));
  CHECK(std::abs(pair(HomFn::xi_norm(1), doubled) - 2.0 * pair(HomFn::xi_norm(1), mu)) <= 1e-12);
  // psi_0 removes the concentration part
  const auto young_only = image(mu, HomMap::young_projection(1));
  const auto expected = lift_young(decompose(mu).young);
  CHECK(wstar_gap(young_only, expected, standard_battery(*X, 1)) <= 1e-12);
}

TEST_CASE("decompose and recompose") {
  auto X = unit(3);
  const double lam = 1.0 / 3.0;
  const DiscreteGYM mu = ensure_valid(
      DiscreteGYM(X, 2, {Atom{0, {0.8, 0.0}, 0.6, lam / 0.6}, Atom{1, {0.0, 0.0}, 1.0, lam}, Atom{2, {0.0, 0.0}, 1.0, lam}}));
  const auto parts = decompose(mu);
  REQUIRE(parts.young.atoms().size() == 3);
  CHECK(parts.varifold.atoms().empty());
  const auto& y0 = parts.young.atoms()[0];
  CHECK(y0.xi[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(y0.xi[1] == 0.0);
  CHECK(y0.mass == doctest::Approx(lam).epsilon(1e-14));

  std::mt19937_64 rng(4);
  auto Y = acceptance::random_interval(rng, 8);
  const auto nu = acceptance::random_gym(rng, Y, 2, 50);
  const auto again = recompose(decompose(nu).young, decompose(nu).varifold);
  CHECK(wstar_gap(nu, again, standard_battery(*Y, 2)) <= 1e-12);
  CHECK(decompose(lift_measure(acceptance::random_measure(rng, Y, 2, 0))).varifold.atoms().empty());
  auto Z = unit(2);
  CHECK_THROWS_AS(decompose(DiscreteGYM(Z, 1, {Atom{0, {1.0}, 0.0, 1.0}})), ValidationError);
}

TEST_CASE("barycentre") {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 20; ++it) {
    auto X = acceptance::random_interval(rng, 6);
    const auto p = acceptance::random_measure(rng, X, 2, 3);
    const auto b = barycentre(lift_measure(p));
    for (std::size_t c = 0; c < X->cells(); ++c)
      for (std::size_t j = 0; j < 2; ++j) {
        CHECK(std::abs(b.ac(c)[j] - p.ac(c)[j]) <= 1e-12 * (1.0 + std::abs(p.ac(c)[j])));
        CHECK(std::abs(b.singular(c)[j] - p.singular(c)[j]) <= 1e-12 * (1.0 + std::abs(p.singular(c)[j])));
      }
  }
  auto Y = unit(4);
  const auto sym = barycentre(half_half(Y));
  for (std::size_t c = 0; c < 4; ++c) CHECK(std::abs(sym.ac(c)[0]) <= 1e-15);
  for (int it = 0; it < 100; ++it) {
    auto X = acceptance::random_interval(rng, 6);
    const auto mu = acceptance::random_gym(rng, X, 2, 24);
    CHECK(barycentre(mu).total_variation() <= norm_star(mu) + 1e-12);
  }
}

TEST_CASE("project_x") {
  std::mt19937_64 rng(6);
  auto X = acceptance::random_interval(rng, 6);
  const auto mu = acceptance::random_gym(rng, X, 2, 30);
  const auto eta = project_x(HomMap(2, {HomFn::eta_part(2)}), mu);
  for (std::size_t c = 0; c < X->cells(); ++c) CHECK(std::abs(eta.mass[c] - X->measure(c)) <= 1e-12);
  const auto xi = project_x(HomMap::identity(2), mu);
  const auto cm = barycentre(mu).cell_masses();
  for (std::size_t i = 0; i < cm.size(); ++i) CHECK(std::abs(xi.mass[i] - cm[i]) <= 1e-12);
  // |project_x(h, mu)| <= sum w |h(atom)|
  const auto h = HomMap::linear(2, {Vec{1.0, -2.0}, Vec{0.5, 0.5}, Vec{0.0, 3.0}}, Vec{1.0, 0.0, -1.0});
  double bound = 0.0;
  for (const auto& a : mu.atoms()) {
    Vec out(3);
    h.apply(a.cell, a.xi, a.eta, out);
    bound += a.w * norm2(out);
  }
  CHECK(project_x(h, mu).total_variation() <= bound + 1e-12);
}

TEST_CASE("Jensen gap") {
  auto X = make_space(SpaceModel::interval(-1.0, 1.0, 4));
  CHECK(jensen_gap(HomFn::xi_norm(1), half_half(X)) == doctest::Approx(2.0).epsilon(1e-14));
  std::mt19937_64 rng(7);
  auto Y = acceptance::random_interval(rng, 5);
  const auto mu = acceptance::random_gym(rng, Y, 2, 20);
  CHECK(std::abs(jensen_gap(HomFn::linear(Vec{1.0, -1.0}, 0.5), mu)) <= 1e-12);
  CHECK_THROWS(jensen_gap(HomFn::min(HomFn::xi_norm(1), HomFn::eta_part(1)), half_half(X)));
}

TEST_CASE("contact support") {
  auto X = unit(2);
  // double well: | |xi| - eta | with convex envelope (|xi| - eta)+
  const auto well = HomFn::raw(
      1, [](std::size_t, std::span<const double> x, double e) { return std::abs(std::abs(x[0]) - e); }, 1, {1});
  const auto cof = HomFn::positive_part(HomFn::xi_norm(1) - HomFn::eta_part(1));
  const auto on_wells = half_half(X);
  CHECK(contact_support_check(well, cof, on_wells, 1e-12));
  CHECK(std::abs(pair(well, on_wells) - pair(cof, on_wells)) <= 1e-15);
  const auto inside = lift_measure(DiscreteMeasure(X, 1));
  CHECK_FALSE(contact_support_check(well, cof, inside, 1e-12));
  CHECK(contact_support_check(HomFn::xi_norm(1), HomFn::xi_norm(1), inside, 1e-12));
  // cof above f is refused
  CHECK_THROWS_AS(contact_support_check(cof, well, inside, 1e-12), PreconditionError);
}

TEST_CASE("weak* gap") {
  std::mt19937_64 rng(8);
  auto X = acceptance::random_interval(rng, 5);
  const auto mu = acceptance::random_gym(rng, X, 1, 20);
  const auto battery = standard_battery(*X, 1);
  CHECK(wstar_gap(mu, mu, battery) == 0.0);
  // oracle: sum 2^-i |<f_i, a> - <f_i, b>|
  const auto other = half_half(X);
  double expect = 0.0;
  for (std::size_t i = 0; i < battery.size(); ++i)
    expect += std::ldexp(1.0, -int(i)) * std::abs(direct(battery.members()[i], mu) - direct(battery.members()[i], other));
  CHECK(std::abs(wstar_gap(mu, other, battery) - expect) <= 1e-12);
  CHECK_THROWS(wstar_gap(mu, other, Battery({})));
}

TEST_CASE("battery construction") {
  auto X = unit(5);
  for (std::size_t d : {1u, 2u, 3u}) {
    const auto b = standard_battery(*X, d);
    CHECK(b.size() == 20);
    CHECK(b.dim() == d);
    const auto small = standard_battery(*X, d, 6);
    CHECK(small.size() == 6);
  }
  CHECK_THROWS(Battery({2.0 * HomFn::xi_norm(1)}));
  CHECK_THROWS(Battery({HomFn::raw(1, [](std::size_t, std::span<const double> x, double) { return x[0] * x[0]; }, 1, {0})}));
}

TEST_CASE("disintegration") {
  auto X = unit(3);
  const auto lam = lift_measure(DiscreteMeasure(X, 1, {0.5, -1.0, 2.0}, {}));
  for (const auto& d : disintegrate(decompose(lam).young)) {
    REQUIRE(d.values.size() == 1);
    CHECK(d.probabilities[0] == doctest::Approx(1.0));
  }
  for (const auto& d : disintegrate(YoungPart::uniform_mixture(X, {{1.0}, {-1.0}}, {0.5, 0.5}))) {
    REQUIRE(d.values.size() == 2);
    CHECK(d.probabilities[0] == doctest::Approx(0.5));
    CHECK(d.probabilities[1] == doctest::Approx(0.5));
  }
  std::mt19937_64 rng(9);
  auto Y = acceptance::random_interval(rng, 7);
  for (const auto& d : disintegrate(decompose(acceptance::random_gym(rng, Y, 2, 40)).young)) {
    double s = 0.0;
    for (double p : d.probabilities) s += p;
    CHECK(std::abs(s - 1.0) <= 1e-12);
  }
}

TEST_CASE("flat norm") {
  auto X = unit(4);
  CHECK(flat_norm(DiscreteMeasure(X, 1)) == 0.0);
  // +1 in cell 0 and -1 in cell 1 (width 1/4): |total| = 0, cumulative 1 on one edge
  const DiscreteMeasure dipole(X, 1, {4.0, -4.0, 0.0, 0.0}, {});
  CHECK(flat_norm(dipole) == doctest::Approx(0.25));
}
