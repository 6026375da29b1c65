#include "gymlab/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>

#include "gymlab/gym.hpp"

namespace gymlab::kernels {

namespace {

/// Exceptions may not cross an OpenMP region; keep the first and rethrow.
class ErrorSlot {
 public:
  template <class F>
  void run(F&& body) noexcept {
    try {
      body();
    } catch (...) {
      std::lock_guard lock(mu_);
      if (!err_) err_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (err_) std::rethrow_exception(err_);
  }

 private:
  std::mutex mu_;
  std::exception_ptr err_;
};

void check_cells(const HomFn& f, const DiscreteGYM& mu) {
  if (f.dim() != mu.dim()) throw DimensionError("test function and measure have different Xi dimensions");
  if (f.cells() != 0 && f.cells() != mu.space().cells())
    throw DimensionError("test function cell fields do not match the space");
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

std::vector<double> weighted_values(const HomFn& f, const DiscreteGYM& mu, bool xi_only) {
  check_cells(f, mu);
  const auto n = static_cast<std::ptrdiff_t>(mu.size());
  std::vector<double> out(mu.size());
  ErrorSlot err;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    err.run([&] {
      const AtomRef a = mu.atom(std::size_t(i));
      const double v = f(a.cell, a.xi, xi_only ? 0.0 : a.eta);
      out[i] = v == kInf ? kInf : a.w * v;
    });
  }
  err.rethrow();
  return out;
}

double pair(const HomFn& f, const DiscreteGYM& mu, bool xi_only) {
  return extended_sum(weighted_values(f, mu, xi_only));
}

std::vector<double> pair_many(std::span<const HomFn> fs, const DiscreteGYM& mu) {
  for (const auto& f : fs) check_cells(f, mu);
  const std::size_t m = fs.size();
  const std::size_t n = mu.size();
  std::vector<double> vals(m * n);
  ErrorSlot err;
  const auto total = static_cast<std::ptrdiff_t>(m * n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    err.run([&] {
      const std::size_t i = std::size_t(k) / n;
      const AtomRef a = mu.atom(std::size_t(k) % n);
      const double v = fs[i](a.cell, a.xi, a.eta);
      vals[k] = v == kInf ? kInf : a.w * v;
    });
  }
  err.rethrow();
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i)
    out[i] = extended_sum(std::span<const double>(vals).subspan(i * n, n));
  return out;
}

double grid_abs_max(const HomFn& f, const DirectionGrid& grid, std::size_t cells) {
  if (grid.dim() != f.dim() + 1) throw DimensionError("grid must live on the sphere of Xi x R");
  const std::size_t nc = std::max<std::size_t>(cells, 1);
  const auto total = static_cast<std::ptrdiff_t>(nc * grid.size());
  const std::size_t d = f.dim();
  double best = 0.0;
  ErrorSlot err;
#pragma omp parallel for schedule(static) reduction(max : best)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    err.run([&] {
      const auto dir = grid[std::size_t(k) % grid.size()];
      const double v = f(std::size_t(k) / grid.size(), dir.first(d), dir[d]);
      if (!std::isfinite(v)) throw Error("test function is not finite on the sphere grid");
      best = std::max(best, std::abs(v));
    });
  }
  err.rethrow();
  return best;
}

std::vector<double> step_increments(const HomFn& h, const DiscreteGYM& master, std::size_t block) {
  if (h.dim() != block) throw DimensionError("increment function has the wrong Xi dimension");
  if (block == 0 || master.dim() % block != 0 || master.dim() / block < 2)
    throw DimensionError("joint measure does not stack at least two time blocks");
  if (h.cells() != 0 && h.cells() != master.space().cells())
    throw DimensionError("test function cell fields do not match the space");
  const std::size_t steps = master.dim() / block - 1;
  const std::size_t n = master.size();
  std::vector<double> vals(steps * n);
  ErrorSlot err;
  const auto total = static_cast<std::ptrdiff_t>(steps * n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    err.run([&] {
      const std::size_t s = std::size_t(k) / n;
      const AtomRef a = master.atom(std::size_t(k) % n);
      double buf[16];
      std::vector<double> big;
      double* d = buf;
      if (block > 16) {
        big.resize(block);
        d = big.data();
      }
      for (std::size_t j = 0; j < block; ++j) d[j] = a.xi[(s + 1) * block + j] - a.xi[s * block + j];
      const double v = h(a.cell, std::span<const double>(d, block), 0.0);
      if (!std::isfinite(v)) throw Error("increment function is not finite");
      vals[k] = a.w * v;
    });
  }
  err.rethrow();
  std::vector<double> out(steps);
  for (std::size_t s = 0; s < steps; ++s) out[s] = pairwise_sum(std::span<const double>(vals).subspan(s * n, n));
  return out;
}

namespace serial {

double pair(const HomFn& f, const DiscreteGYM& mu, bool xi_only) {
  check_cells(f, mu);
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const AtomRef a = mu.atom(i);
    const double v = f(a.cell, a.xi, xi_only ? 0.0 : a.eta);
    if (v == kInf) return kInf;
    s += a.w * v;
  }
  return s;
}

std::vector<double> pair_many(std::span<const HomFn> fs, const DiscreteGYM& mu) {
  std::vector<double> out;
  out.reserve(fs.size());
  for (const auto& f : fs) out.push_back(serial::pair(f, mu, false));
  return out;
}

double grid_abs_max(const HomFn& f, const DirectionGrid& grid, std::size_t cells) {
  if (grid.dim() != f.dim() + 1) throw DimensionError("grid must live on the sphere of Xi x R");
  const std::size_t d = f.dim();
  double best = 0.0;
  for (std::size_t c = 0; c < std::max<std::size_t>(cells, 1); ++c)
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double v = f(c, grid[i].first(d), grid[i][d]);
      if (!std::isfinite(v)) throw Error("test function is not finite on the sphere grid");
      best = std::max(best, std::abs(v));
    }
  return best;
}

std::vector<double> step_increments(const HomFn& h, const DiscreteGYM& master, std::size_t block) {
  if (block == 0 || master.dim() % block != 0 || master.dim() / block < 2)
    throw DimensionError("joint measure does not stack at least two time blocks");
  const std::size_t steps = master.dim() / block - 1;
  std::vector<double> out(steps, 0.0);
  Vec d(block);
  for (std::size_t i = 0; i < master.size(); ++i) {
    const AtomRef a = master.atom(i);
    for (std::size_t s = 0; s < steps; ++s) {
      for (std::size_t j = 0; j < block; ++j) d[j] = a.xi[(s + 1) * block + j] - a.xi[s * block + j];
      out[s] += a.w * h(a.cell, d, 0.0);
    }
  }
  return out;
}

}  // namespace serial

}  // namespace gymlab::kernels
