// Parallel kernels against their serial references on growing inputs.
// Prints one CSV line per (kernel, size): timings and the result difference.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "gymlab/acceptance.hpp"
#include "gymlab/kernels.hpp"

using namespace gymlab;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

DiscreteGYM big_gym(std::size_t cells, std::size_t per_cell, std::size_t dim) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0), w(0.1, 1.0);
  auto X = make_space(SpaceModel::interval(0.0, 1.0, cells));
  std::vector<Atom> atoms;
  for (std::size_t c = 0; c < cells; ++c)
    for (std::size_t i = 0; i < per_cell; ++i) {
      Vec xi(dim);
      for (double& x : xi) x = u(rng);
      atoms.push_back({c, std::move(xi), 1.0, X->measure(c) / double(per_cell)});
    }
  return DiscreteGYM(std::move(X), dim, atoms);
}

}  // namespace

int main() {
  std::printf("kernel,atoms,threads,serial_s,parallel_s,speedup,max_abs_diff\n");
  for (std::size_t cells : {1000u, 10000u, 100000u}) {
    const auto mu = big_gym(cells, 8, 3);
    const auto battery = standard_battery(mu.space(), 3);
    std::vector<double> a, b;
    const double ts = best_of(3, [&] { a = kernels::serial::pair_many(battery.members(), mu); });
    const double tp = best_of(3, [&] { b = kernels::pair_many(battery.members(), mu); });
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
    std::printf("pair_many,%zu,%d,%.6f,%.6f,%.2f,%.3g\n", mu.size(), kernels::max_threads(), ts, tp, ts / tp, diff);
  }
  for (std::size_t cells : {1000u, 10000u, 50000u}) {
    std::mt19937_64 rng(11);
    auto X = make_space(SpaceModel::interval(0.0, 1.0, cells));
    std::vector<double> times;
    for (int i = 0; i <= 8; ++i) times.push_back(i / 8.0);
    const auto sys = acceptance::random_system(rng, X, 2, times, 4);
    const auto h = HomFn::xi_norm(2);
    std::vector<double> a, b;
    const double ts = best_of(3, [&] { a = kernels::serial::step_increments(h, sys.master(), 2); });
    const double tp = best_of(3, [&] { b = kernels::step_increments(h, sys.master(), 2); });
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
    std::printf("step_increments,%zu,%d,%.6f,%.6f,%.2f,%.3g\n", sys.master().size(), kernels::max_threads(), ts, tp,
                ts / tp, diff);
  }
  return 0;
}
