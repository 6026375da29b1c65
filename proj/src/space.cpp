#include "gymlab/space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gymlab {

SpaceModel::SpaceModel(std::variant<Interval, PointCloud> m) : model_(std::move(m)) {
  if (const auto* iv = std::get_if<Interval>(&model_)) {
    total_ = iv->hi - iv->lo;
  } else {
    const auto& pc = std::get<PointCloud>(model_);
    total_ = pairwise_sum(pc.weights);
  }
}

SpaceModel SpaceModel::interval(double lo, double hi, std::size_t cells) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || !(hi > lo))
    throw ValidationError("interval space needs finite lo < hi");
  if (cells == 0) throw ValidationError("interval space needs at least one cell");
  return SpaceModel(Interval{lo, hi, cells});
}

SpaceModel SpaceModel::point_cloud(std::vector<std::string> labels, std::vector<double> weights,
                                   std::vector<double> distances) {
  const std::size_t n = weights.size();
  if (n == 0) throw ValidationError("point cloud needs at least one point");
  if (labels.size() != n) throw ValidationError("point cloud: one label per point");
  if (distances.size() != n * n) throw ValidationError("point cloud: distance matrix must be n*n");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w))
      throw ValidationError("point cloud: weights must be finite and strictly positive");
  const double tol = 1e-12;
  for (std::size_t i = 0; i < n; ++i) {
    if (distances[i * n + i] != 0.0) throw ValidationError("point cloud: nonzero diagonal distance");
    for (std::size_t j = 0; j < n; ++j) {
      const double dij = distances[i * n + j];
      if (!(dij >= 0.0) || !std::isfinite(dij))
        throw ValidationError("point cloud: distances must be finite and nonnegative");
      if (dij != distances[j * n + i]) throw ValidationError("point cloud: distance matrix not symmetric");
      for (std::size_t k = 0; k < n; ++k)
        if (dij > distances[i * n + k] + distances[k * n + j] + tol)
          throw ValidationError("point cloud: triangle inequality violated");
    }
  }
  return SpaceModel(PointCloud{std::move(labels), std::move(weights), std::move(distances)});
}

std::size_t SpaceModel::cells() const {
  if (const auto* iv = std::get_if<Interval>(&model_)) return iv->cells;
  return std::get<PointCloud>(model_).weights.size();
}

double SpaceModel::measure(std::size_t cell) const {
  if (const auto* iv = std::get_if<Interval>(&model_)) return (iv->hi - iv->lo) / double(iv->cells);
  return std::get<PointCloud>(model_).weights.at(cell);
}

double SpaceModel::distance(std::size_t a, std::size_t b) const {
  if (const auto* iv = std::get_if<Interval>(&model_)) {
    return std::abs(double(a) - double(b)) * (iv->hi - iv->lo) / double(iv->cells);
  }
  const auto& pc = std::get<PointCloud>(model_);
  return pc.distances.at(a * pc.weights.size() + b);
}

double SpaceModel::coordinate(std::size_t cell) const {
  const std::size_t n = cells();
  if (is_interval()) return (double(cell) + 0.5) / double(n);
  return n == 1 ? 0.5 : double(cell) / double(n - 1);
}

const Interval& SpaceModel::as_interval() const {
  if (const auto* iv = std::get_if<Interval>(&model_)) return *iv;
  throw PreconditionError("operation requires an interval space");
}

const PointCloud& SpaceModel::as_point_cloud() const {
  if (const auto* pc = std::get_if<PointCloud>(&model_)) return *pc;
  throw PreconditionError("operation requires a point-cloud space");
}

double SpaceModel::cell_width() const {
  const auto& iv = as_interval();
  return (iv.hi - iv.lo) / double(iv.cells);
}

double SpaceModel::cell_lo(std::size_t cell) const {
  const auto& iv = as_interval();
  return iv.lo + (iv.hi - iv.lo) * double(cell) / double(iv.cells);
}

double SpaceModel::cell_hi(std::size_t cell) const {
  const auto& iv = as_interval();
  if (cell + 1 == iv.cells) return iv.hi;
  return iv.lo + (iv.hi - iv.lo) * double(cell + 1) / double(iv.cells);
}

std::size_t SpaceModel::cell_of(double x) const {
  const auto& iv = as_interval();
  if (x < iv.lo || x > iv.hi) throw PreconditionError("point outside the interval");
  auto c = static_cast<std::size_t>(std::floor((x - iv.lo) / (iv.hi - iv.lo) * double(iv.cells)));
  c = std::min(c, iv.cells - 1);
  // floor can be off by one at cell boundaries; settle against the exact edges
  while (c > 0 && x < cell_lo(c)) --c;
  while (c + 1 < iv.cells && x >= cell_hi(c)) ++c;
  return c;
}

}  // namespace gymlab
