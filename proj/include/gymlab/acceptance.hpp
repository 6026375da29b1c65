#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gymlab/approx.hpp"
#include "gymlab/gym.hpp"
#include "gymlab/systems.hpp"

namespace gymlab::acceptance {

struct Options {
  std::uint64_t seed = 0;
  /// Multiplies every tolerance; 0 turns the suite into a residual listing.
  double tolerance_scale = 1.0;
};

struct Result {
  std::string id;
  std::string title;
  bool passed = false;
  double value = 0.0;      // worst observed residual (or the checked quantity)
  double tolerance = 0.0;  // bound it was checked against
  double seconds = 0.0;
  double budget = 0.0;     // runtime limit in seconds
  std::string detail;
};

std::vector<std::string> ids();
Result run(const std::string& id, const Options& opt);
std::vector<Result> run_all(const Options& opt);

// Seeded generators shared with the unit tests.
SpacePtr random_interval(std::mt19937_64& rng, std::size_t max_cells);
DiscreteMeasure random_measure(std::mt19937_64& rng, SpacePtr X, std::size_t dim, std::size_t max_singular);
/// Valid measure: random Young atoms per cell plus random eta = 0 atoms.
DiscreteGYM random_gym(std::mt19937_64& rng, SpacePtr X, std::size_t dim, std::size_t max_atoms);
/// Valid system with joint atoms over `times`.
SystemGYM random_system(std::mt19937_64& rng, SpacePtr X, std::size_t dim, std::vector<double> times,
                        std::size_t atoms_per_cell);
/// Convex one-homogeneous test function from the combinator algebra.
HomFn random_convex(std::mt19937_64& rng, std::size_t dim, std::size_t cells);

/// Young lift of u(t) = t * (+-1) with probability 1/2 each, jointly over `times`.
SystemGYM correlated_oscillation_limit(SpacePtr X, std::vector<double> times);
/// Joint lift of u(t, x) = t w(k x) (plus `bump` added at `bump_time`) over `times`.
SystemGYM correlated_oscillation(SpacePtr X, double k, std::vector<double> times, double bump_time = -1.0,
                                 double bump = 0.0);

}  // namespace gymlab::acceptance
