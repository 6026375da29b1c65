#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "gymlab/core.hpp"

namespace gymlab {

/// [lo, hi] split into `cells` equal cells; lambda is Lebesgue measure and the
/// metric is the distance between cell centers.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t cells = 1;
  bool operator==(const Interval&) const = default;
};

/// Finite metric space with positive point weights. `distances` is row-major n*n.
struct PointCloud {
  std::vector<std::string> labels;
  std::vector<double> weights;
  std::vector<double> distances;
  bool operator==(const PointCloud&) const = default;
};

/// The compact metric space X with its reference measure lambda, discretized
/// into cells. A cell is the finest addressable location.
class SpaceModel {
 public:
  static SpaceModel interval(double lo, double hi, std::size_t cells);
  static SpaceModel point_cloud(std::vector<std::string> labels, std::vector<double> weights,
                                std::vector<double> distances);

  std::size_t cells() const;
  double measure(std::size_t cell) const;
  double total_measure() const { return total_; }
  double distance(std::size_t a, std::size_t b) const;

  /// Position of the cell normalized to [0, 1]; used to build smooth cell fields.
  double coordinate(std::size_t cell) const;

  bool is_interval() const { return std::holds_alternative<Interval>(model_); }
  const Interval& as_interval() const;
  const PointCloud& as_point_cloud() const;

  // Interval-only geometry.
  double cell_lo(std::size_t cell) const;
  double cell_hi(std::size_t cell) const;
  double cell_width() const;
  /// Cell whose half-open range [lo, hi) contains x; x == hi maps to the last cell.
  std::size_t cell_of(double x) const;

  bool operator==(const SpaceModel& other) const { return model_ == other.model_; }

 private:
  explicit SpaceModel(std::variant<Interval, PointCloud> m);
  std::variant<Interval, PointCloud> model_;
  double total_ = 0.0;
};

using SpacePtr = std::shared_ptr<const SpaceModel>;

inline SpacePtr make_space(SpaceModel s) { return std::make_shared<const SpaceModel>(std::move(s)); }

}  // namespace gymlab
