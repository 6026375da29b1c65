#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gymlab/acceptance.hpp"
#include "gymlab/io.hpp"

using namespace gymlab;

namespace {

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("numbers are decimal strings that round-trip exactly") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, double(int(rng() % 40)) - 20);
    const auto j = io::num(v);
    REQUIRE(j.is_string());
    CHECK(io::get_num(j, "v") == v);
  }
  CHECK(io::get_num(io::Json(0.5), "v") == 0.5);
  CHECK(message_of([] { io::get_num(io::Json(true), "weight"); }).find("'weight'") != std::string::npos);
}

TEST_CASE("spaces") {
  const auto I = SpaceModel::interval(-1.0, 2.0, 7);
  CHECK(*io::space_from_json(io::to_json(I)) == I);
  const auto P = SpaceModel::point_cloud({"a", "b"}, {0.5, 1.5}, {0.0, 2.0, 2.0, 0.0});
  CHECK(*io::space_from_json(io::to_json(P)) == P);
  CHECK(message_of([] { io::space_from_json(io::Json{{"kind", "interval"}, {"lo", "0"}, {"hi", "1"}}); })
            .find("'cells'") != std::string::npos);
}

TEST_CASE("gym.v1, measure.v1 and sgy.v1 round-trips") {
  std::mt19937_64 rng(6);
  for (int it = 0; it < 20; ++it) {
    auto X = acceptance::random_interval(rng, 5);
    const std::size_t d = 1 + rng() % 3;
    const auto mu = acceptance::random_gym(rng, X, d, 4);
    const auto back = io::gym_from_json(io::to_json(mu));
    CHECK(back == mu);
    CHECK(wstar_gap(back, mu, standard_battery(*X, d)) == 0.0);

    const auto p = acceptance::random_measure(rng, X, d, 2);
    const auto pb = io::measure_from_json(io::to_json(p));
    CHECK(lift_measure(pb) == lift_measure(p));

    const auto s = acceptance::random_system(rng, X, d, {0.0, 0.3, 1.0}, 2);
    const auto sb = io::system_from_json(io::to_json(s));
    CHECK(sb.master() == s.master());
    CHECK(sb.grid().times() == s.grid().times());
    CHECK(io::to_json(sb).dump() == io::to_json(s).dump());
  }
}

TEST_CASE("step.v1 round-trip") {
  auto X = make_space(SpaceModel::interval(0.0, 1.0, 2));
  const StepFunction u(X, 1, {0.0, 0.1, 0.5, 1.0}, {3.0, -1.0, 0.25});
  const auto back = io::step_from_json(io::to_json(u));
  CHECK(back.edges() == u.edges());
  CHECK(back.values() == u.values());
  CHECK(back.lift() == u.lift());
}

TEST_CASE("homfn.v1 is bit-stable") {
  const auto lin = HomFn::linear(2, {1.0, -0.5, 0.25, 2.0}, {0.0, 1.0});
  const auto f = HomFn::combination(
      {0.5, 2.0, 1.0},
      {HomFn::max(lin, HomFn::xi_norm(2)), HomFn::positive_part(HomFn::pr_moment(2, 2.0)),
       HomFn::compose(HomFn::euclid_norm(1), HomMap::linear(2, {Vec{1.0, 1.0}}, Vec{0.5}))});
  const auto my = HomFn::compose(moreau_yosida(HomFn::min(HomFn::xi_norm(1), HomFn::eta_part(1)), 3.0,
                                               DirectionGrid::circle(64)),
                                 HomMap::linear(2, {Vec{1.0, -1.0}}));
  for (const auto& g : {f, my, 0.1 * HomFn::zero(2) - HomFn::eta_part(2)}) {
    const auto j = io::to_json(g);
    const auto back = io::homfn_from_json(j, 2);
    CHECK(io::to_json(back).dump() == j.dump());
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n;
    for (int i = 0; i < 200; ++i) {
      const Vec xi = {n(rng), n(rng)};
      const double eta = std::abs(n(rng));
      const std::size_t c = rng() % 2;
      const double a = g(c, xi, eta), b = back(c, xi, eta);
      CHECK((a == b || (std::isinf(a) && std::isinf(b))));
    }
  }
  const auto raw = HomFn::raw(1, [](std::size_t, std::span<const double> x, double) { return x[0]; }, 1.0, {0.0});
  CHECK(message_of([&] { io::to_json(raw); }).find("raw") != std::string::npos);
}

TEST_CASE("parse errors name the field") {
  CHECK(message_of([] { io::gym_from_json(io::Json{{"schema", "measure.v1"}}); }).find("gym.v1") != std::string::npos);
  CHECK(message_of([] { io::gym_from_json(io::Json{{"schema", "gym.v1"}, {"dim", 1}}); }).find("'space'") !=
        std::string::npos);
  io::Json sgy = {{"schema", "sgy.v1"}, {"dim", 1}};
  sgy["times"] = io::Json::array({"0", "1"});
  const auto m1 = message_of([&] { io::system_from_json(sgy); });
  INFO(m1);
  CHECK(m1.find("'master'") != std::string::npos);
  io::Json node = io::Json::object();
  node["kind"] = "wibble";
  node["dim"] = 2;
  const auto m2 = message_of([&] { io::homfn_from_json(io::Json{{"schema", "homfn.v1"}, {"node", node}}); });
  INFO(m2);
  CHECK(m2.find("wibble") != std::string::npos);
  auto X = make_space(SpaceModel::interval(0.0, 1.0, 1));
  auto j = io::to_json(DiscreteGYM(X, 1, {Atom{0, {0.0}, 1.0, 1.0}}));
  j["atoms"][0]["w"] = "-1";
  CHECK_THROWS(io::gym_from_json(j));
}

TEST_CASE("csv quoting") {
  io::CsvWriter w({"a", "b"});
  w.row({"1", "x,y"});
  w.row({"say \"hi\"", "line\nbreak"});
  CHECK(w.str() == "a,b\n1,\"x,y\"\n\"say \"\"hi\"\"\",\"line\nbreak\"\n");
  CHECK_THROWS_AS(w.row({"only"}), DimensionError);
}
