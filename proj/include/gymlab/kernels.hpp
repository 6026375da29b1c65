#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP implementation and a
// plain serial reference in `serial::` that the tests and the benchmark
// compare against. Parallel kernels write per-item results into buffers and
// reduce them with pairwise_sum, so results do not depend on thread count.

#include <cstddef>
#include <span>
#include <vector>

#include "gymlab/homfn.hpp"

namespace gymlab {
class DiscreteGYM;
}

namespace gymlab::kernels {

/// w_i * f(atom_i) for every atom (eta dropped to 0 when `xi_only`).
std::vector<double> weighted_values(const HomFn& f, const DiscreteGYM& mu, bool xi_only = false);

/// Sum of weighted_values with +inf absorbing.
double pair(const HomFn& f, const DiscreteGYM& mu, bool xi_only = false);

/// Row i holds pair(fs[i], mu).
std::vector<double> pair_many(std::span<const HomFn> fs, const DiscreteGYM& mu);

/// max over cells x directions of |f|.
double grid_abs_max(const HomFn& f, const DirectionGrid& grid, std::size_t cells);

/// Per-step h-increments of a joint measure whose state stacks `steps + 1`
/// blocks of size `block`: out[s] = sum_atoms w h(cell, xi_{s+1} - xi_s, 0).
std::vector<double> step_increments(const HomFn& h, const DiscreteGYM& master, std::size_t block);

namespace serial {
double pair(const HomFn& f, const DiscreteGYM& mu, bool xi_only = false);
std::vector<double> pair_many(std::span<const HomFn> fs, const DiscreteGYM& mu);
double grid_abs_max(const HomFn& f, const DirectionGrid& grid, std::size_t cells);
std::vector<double> step_increments(const HomFn& h, const DiscreteGYM& master, std::size_t block);
}  // namespace serial

int max_threads();

}  // namespace gymlab::kernels
