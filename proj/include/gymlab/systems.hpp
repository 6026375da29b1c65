#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gymlab/gym.hpp"

namespace gymlab {

/// Strictly increasing times a_0 < ... < a_k (k >= 1) inside [0, T].
class TimeGrid {
 public:
  TimeGrid(std::vector<double> times, double horizon);
  const std::vector<double>& times() const { return times_; }
  double horizon() const { return horizon_; }
  std::size_t size() const { return times_.size(); }
  double front() const { return times_.front(); }
  double back() const { return times_.back(); }
  /// Largest j with a_j <= t. Throws outside [a_0, a_k].
  std::size_t rho(double t) const;
  bool operator==(const TimeGrid&) const = default;

 private:
  std::vector<double> times_;
  double horizon_;
};

/// A compatible system on a finite time grid, stored as one joint measure
/// whose state stacks the values at every grid time.
class SystemGYM {
 public:
  /// `master.dim()` must equal `dim * grid.size()`.
  SystemGYM(TimeGrid grid, DiscreteGYM master, std::size_t dim);
  const TimeGrid& grid() const { return grid_; }
  const DiscreteGYM& master() const { return master_; }
  std::size_t dim() const { return dim_; }
  const SpaceModel& space() const { return master_.space(); }

 private:
  TimeGrid grid_;
  DiscreteGYM master_;
  std::size_t dim_;
};

/// Joint lift of (p(a_0), ..., p(a_k)) with respect to lambda plus the
/// singular parts; singular masses of one cell form one joint atom.
SystemGYM from_path(const std::vector<std::pair<double, DiscreteMeasure>>& samples, double horizon = -1.0);

/// Coordinate projection onto `times`; off-grid times use the grid value at
/// the largest a_j <= t.
DiscreteGYM marginal(const SystemGYM& sys, std::span<const double> times);

/// Projection of a joint measure with `blocks` stacked states onto the listed blocks.
DiscreteGYM select_blocks(const DiscreteGYM& joint, std::size_t dim, std::span<const std::size_t> blocks);

std::vector<DiscreteMeasure> bar_path(const SystemGYM& sys);

struct VariationReport {
  double value = 0.0;
  std::vector<double> partition;
  std::vector<double> contributions;
};

/// Var_h over [a, b] for the grid system: the sum of per-step pairings
/// <h(xi_i - xi_{i-1}), mu_{a_{i-1} a_i}> over grid points a < a_i <= b.
VariationReport variation(const SystemGYM& sys, const HomFn& h, double a, double b);
/// h = |.|
VariationReport variation(const SystemGYM& sys, double a, double b);

/// Per-step increments of h over the whole grid (step i joins a_i and a_{i+1}).
std::vector<double> step_increments(const SystemGYM& sys, const HomFn& h);

/// Largest summed increment over nonoverlapping grid-aligned intervals of
/// total length <= delta.
double ac_modulus(const SystemGYM& sys, double delta);

/// Image of the pair marginal under (x, xi, eta) -> (x, (xi_2 - xi_1)/(t2 - t1), eta).
DiscreteGYM diff_quotient(const SystemGYM& sys, double t1, double t2);

/// Samples joint measures of a (possibly continuous-time) system on demand.
class SystemOracle {
 public:
  virtual ~SystemOracle() = default;
  virtual const SpacePtr& space() const = 0;
  virtual std::size_t dim() const = 0;
  virtual double lo() const = 0;
  virtual double hi() const = 0;
  /// Joint measure for strictly increasing times inside [lo, hi].
  virtual DiscreteGYM joint(std::span<const double> times) const = 0;
  virtual std::string describe() const { return "oracle"; }
};

DiscreteGYM diff_quotient(const SystemOracle& oracle, double t1, double t2);

/// Serves a grid system through piecewise-constant interpolation.
class GridOracle final : public SystemOracle {
 public:
  explicit GridOracle(SystemGYM sys);
  const SpacePtr& space() const override { return sys_.master().space_ptr(); }
  std::size_t dim() const override { return sys_.dim(); }
  double lo() const override { return sys_.grid().front(); }
  double hi() const override { return sys_.grid().back(); }
  DiscreteGYM joint(std::span<const double> times) const override;
  std::string describe() const override { return "grid"; }

 private:
  SystemGYM sys_;
};

/// Path u(t, x) on an interval space that is piecewise constant in x, plus an
/// optional singular vector mass per cell. Joints are computed by exact
/// sub-cell quadrature over the merged breakpoints of all queried times.
class PathOracle final : public SystemOracle {
 public:
  /// Interior breakpoints of u(t, .) in the cell, sorted.
  using Breaks = std::function<std::vector<double>(double t, std::size_t cell)>;
  /// Value of u(t, x) on the piece containing x (called at piece midpoints).
  using Value = std::function<void(double t, std::size_t cell, double x, std::span<double> out)>;
  /// Singular vector mass of u(t) attached to the cell (zero for none).
  using Singular = std::function<void(double t, std::size_t cell, std::span<double> out)>;

  PathOracle(SpacePtr space, std::size_t dim, double lo, double hi, Breaks breaks, Value value,
             Singular singular = nullptr, std::string label = "path");
  const SpacePtr& space() const override { return space_; }
  std::size_t dim() const override { return dim_; }
  double lo() const override { return lo_; }
  double hi() const override { return hi_; }
  DiscreteGYM joint(std::span<const double> times) const override;
  std::string describe() const override { return label_; }

 private:
  SpacePtr space_;
  std::size_t dim_;
  double lo_, hi_;
  Breaks breaks_;
  Value value_;
  Singular singular_;
  std::string label_;
};

/// p(t) = p0 + t v for cellwise constant densities (row-major cells x dim).
PathOracle linear_path(SpacePtr space, std::size_t dim, std::vector<double> p0, std::vector<double> v, double lo,
                       double hi);

/// Zero before `t_jump`, then a singular mass `mass` in `cell`.
PathOracle jump_path(SpacePtr space, Vec mass, std::size_t cell, double t_jump, double lo, double hi);

struct DerivativeReport {
  bool converged = false;
  bool left_converged = false;
  bool right_converged = false;
  std::vector<double> eps;
  std::vector<std::vector<double>> left;   // [schedule][member]
  std::vector<std::vector<double>> right;  // [schedule][member]
  std::vector<double> residuals;           // per member
  std::optional<DiscreteGYM> estimate;     // final right quotient when converged
  std::optional<DiscreteGYM> last_left;
  std::optional<DiscreteGYM> last_right;
  std::string witness;                     // empty when converged
};

/// Left and right difference quotients at t0 along the schedule; converged
/// when both one-sided pairing sequences settle within tol and agree.
DerivativeReport derivative_estimate(const SystemOracle& oracle, double t0, const std::vector<double>& eps_schedule,
                                     const Battery& battery, double tol);

struct IntegralGap {
  double lhs = 0.0;  // Var_h on the dt grid
  double rhs = 0.0;  // midpoint integral of <h, derivative>
  double gap = 0.0;  // lhs - rhs
  std::size_t nodes = 0;
  std::size_t failed_nodes = 0;
  bool inequality_holds = false;  // rhs <= lhs + tol
};

IntegralGap variation_integral_gap(const SystemOracle& oracle, const HomFn& h, double a, double b, double dt,
                                   double tol);

}  // namespace gymlab
