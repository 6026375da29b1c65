#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gymlab/gym.hpp"
#include "gymlab/systems.hpp"

namespace gymlab {

/// Strictly decreasing scales sigma_n with 0 < sigma_n < min(1, lambda(X)).
class DensitySchedule {
 public:
  explicit DensitySchedule(std::vector<double> sigma);
  /// sigma_n = 2^-n for n = first..last.
  static DensitySchedule dyadic(int first, int last);
  const std::vector<double>& sigma() const { return sigma_; }
  double operator[](std::size_t n) const { return sigma_.at(n); }
  std::size_t size() const { return sigma_.size(); }
  void check_against(const SpaceModel& X) const;

 private:
  std::vector<double> sigma_;
};

/// Function that is constant on the pieces of a refinement of an interval
/// space. `edges` runs from lo to hi; piece i is [edges[i], edges[i+1]).
class StepFunction {
 public:
  StepFunction(SpacePtr parent, std::size_t dim, std::vector<double> edges, std::vector<double> values);
  const SpacePtr& parent() const { return parent_; }
  std::size_t dim() const { return dim_; }
  std::size_t pieces() const { return edges_.size() - 1; }
  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& values() const { return values_; }
  std::span<const double> value(std::size_t piece) const {
    return std::span<const double>(values_).subspan(piece * dim_, dim_);
  }
  std::size_t parent_cell(std::size_t piece) const { return parent_cells_[piece]; }
  /// Integral of sqrt(1 + |u|^2).
  double lifted_norm() const;
  /// delta_u as a measure on the parent cells.
  DiscreteGYM lift() const;

 private:
  SpacePtr parent_;
  std::size_t dim_;
  std::vector<double> edges_;
  std::vector<double> values_;
  std::vector<std::size_t> parent_cells_;
};

struct DensityResult {
  StepFunction u;
  double sigma = 0.0;
  /// Smallest |u| over the concentration carriers (+inf when there are none).
  double min_concentration_value = kInf;
  double carrier_measure = 0.0;
  std::size_t carriers = 0;
};

/// Level-n approximant u_n whose lift approaches mu weakly* as sigma_n -> 0.
/// Varifold mass of a cell is carried by a subcell at its left end of length
/// at most sigma_n lambda^inf where u_n takes values of size >= 1/sigma_n.
DensityResult density_approximate(const DiscreteGYM& mu, std::size_t n, const DensitySchedule& schedule);

/// One period of a periodic step profile: values on [breaks[j], breaks[j+1])
/// with breaks[0] = 0 and breaks.back() = period.
struct PeriodicProfile {
  std::vector<double> breaks;
  std::vector<double> values;
  double period() const { return breaks.back(); }
  double operator()(double y) const;
  /// +1 on [2k, 2k+1), -1 on [2k-1, 2k).
  static PeriodicProfile square_wave();
};

/// u(t, x) = s(t) w(x / s(t)) (zero where s(t) = 0) on an interval space.
/// Refuses queries that would need more than `max_pieces` pieces per cell.
PathOracle oscillation_path(PeriodicProfile w, std::function<double(double)> scale, SpacePtr space, double lo,
                            double hi, std::size_t max_pieces = 64);

/// delta of u(x) = w(k x) on an interval space (exact cell quadrature).
DiscreteGYM oscillation_lift(const PeriodicProfile& w, double k, SpacePtr space);

/// Lift of u_k = (mass / len) direction on [x0, x0 + len], zero elsewhere.
DiscreteGYM concentration_sequence(SpacePtr space, const Vec& direction, double mass, double x0, double len);

/// Lift of an interval-space function given by sorted breakpoints and values
/// evaluated at piece midpoints.
DiscreteGYM lift_piecewise(SpacePtr space, std::size_t dim, std::vector<double> breaks,
                           const std::function<void(double x, std::span<double> out)>& value);

struct MonitoredFunctional {
  std::string id;
  std::size_t member = 0;
  std::vector<double> times;  // one time or an adjacent pair
  double residual = 0.0;      // spread over the selected subsequence
  double limit = 0.0;         // value at the last selected element
};

struct LimitReport {
  std::vector<std::size_t> selected;
  std::vector<MonitoredFunctional> functionals;
  std::vector<double> theta;  // times of D where every functional settled
  std::optional<SystemGYM> limit;
  bool variation_bound = false;  // Var(limit) <= C
  bool norm_bound = false;       // |limit_t| <= C_* + C on D
  double limit_variation = 0.0;
  double max_residual = 0.0;
};

/// Finite-battery Helly extraction: narrows a subsequence functional by
/// functional toward the upper cluster point, then assembles the limit when
/// the last two selected masters agree atomwise within tol.
LimitReport helly_extract(const std::vector<SystemGYM>& seq, const Battery& battery, const std::vector<double>& D,
                          double tol, double C, double C_star);

/// min_k Var_h(mu^k) - Var_h(limit) over the whole grid, after checking that
/// the last element's battery pairings on D match the limit within tol.
double semicontinuity_margin(const std::vector<SystemGYM>& seq, const SystemGYM& limit, const HomFn& h,
                             const std::vector<double>& D, const Battery& battery, double tol);

}  // namespace gymlab
