#include <algorithm>
#include <cmath>

#include "gymlab/systems.hpp"

namespace gymlab {

PathOracle::PathOracle(SpacePtr space, std::size_t dim, double lo, double hi, Breaks breaks, Value value,
                       Singular singular, std::string label)
    : space_(std::move(space)),
      dim_(dim),
      lo_(lo),
      hi_(hi),
      breaks_(std::move(breaks)),
      value_(std::move(value)),
      singular_(std::move(singular)),
      label_(std::move(label)) {
  if (!space_ || !space_->is_interval()) throw PreconditionError("path oracle requires an interval space");
  if (dim_ == 0) throw DimensionError("path oracle needs a positive Xi dimension");
  if (!(lo_ < hi_)) throw PreconditionError("path oracle needs lo < hi");
  if (!value_) throw PreconditionError("path oracle needs a value function");
}

DiscreteGYM PathOracle::joint(std::span<const double> times) const {
  const std::size_t m = times.size();
  if (m == 0) throw PreconditionError("joint: empty time tuple");
  for (std::size_t i = 0; i < m; ++i) {
    if (times[i] < lo_ || times[i] > hi_) throw PreconditionError("joint: time outside the oracle's range");
    if (i > 0 && !(times[i] > times[i - 1])) throw PreconditionError("joint: times must be strictly increasing");
  }
  const auto& X = *space_;
  const std::size_t jd = dim_ * m;
  std::vector<std::size_t> cells;
  std::vector<double> coords;
  std::vector<double> weights;
  std::vector<double> edges;
  Vec z(jd + 1);
  for (std::size_t c = 0; c < X.cells(); ++c) {
    const double a = X.cell_lo(c), b = X.cell_hi(c);
    edges.assign({a, b});
    if (breaks_) {
      for (double t : times)
        for (double x : breaks_(t, c))
          if (x > a && x < b) edges.push_back(x);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      const double len = edges[k + 1] - edges[k];
      if (!(len > 0.0)) continue;
      const double mid = 0.5 * (edges[k] + edges[k + 1]);
      for (std::size_t i = 0; i < m; ++i) value_(times[i], c, mid, std::span<double>(z).subspan(i * dim_, dim_));
      z[jd] = 1.0;
      cells.push_back(c);
      coords.insert(coords.end(), z.begin(), z.end());
      weights.push_back(len);
    }
    if (singular_) {
      std::fill(z.begin(), z.end(), 0.0);
      for (std::size_t i = 0; i < m; ++i) singular_(times[i], c, std::span<double>(z).subspan(i * dim_, dim_));
      if (norm2(z) > 0.0) {
        cells.push_back(c);
        coords.insert(coords.end(), z.begin(), z.end());
        weights.push_back(1.0);
      }
    }
  }
  return DiscreteGYM::from_flat(space_, jd, std::move(cells), std::move(coords), std::move(weights));
}

PathOracle linear_path(SpacePtr space, std::size_t dim, std::vector<double> p0, std::vector<double> v, double lo,
                       double hi) {
  const std::size_t n = space->cells() * dim;
  if (p0.empty()) p0.assign(n, 0.0);
  if (p0.size() != n || v.size() != n) throw DimensionError("linear_path: profiles must have cells x dim entries");
  auto value = [p0 = std::move(p0), v = std::move(v), dim](double t, std::size_t c, double, std::span<double> out) {
    for (std::size_t j = 0; j < dim; ++j) out[j] = p0[c * dim + j] + t * v[c * dim + j];
  };
  return PathOracle(std::move(space), dim, lo, hi, nullptr, std::move(value), nullptr, "linear");
}

PathOracle jump_path(SpacePtr space, Vec mass, std::size_t cell, double t_jump, double lo, double hi) {
  if (cell >= space->cells()) throw PreconditionError("jump_path: cell out of range");
  if (norm2(mass) == 0.0) throw PreconditionError("jump_path: zero jump mass");
  const std::size_t dim = mass.size();
  auto value = [dim](double, std::size_t, double, std::span<double> out) {
    for (std::size_t j = 0; j < dim; ++j) out[j] = 0.0;
  };
  auto singular = [mass, cell, t_jump](double t, std::size_t c, std::span<double> out) {
    if (c == cell && t >= t_jump)
      for (std::size_t j = 0; j < mass.size(); ++j) out[j] = mass[j];
  };
  return PathOracle(std::move(space), dim, lo, hi, nullptr, std::move(value), std::move(singular), "jump");
}

}  // namespace gymlab
