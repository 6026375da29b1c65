#include "gymlab/approx.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace gymlab {

// -------------------------------------------------------------- schedules

DensitySchedule::DensitySchedule(std::vector<double> sigma) : sigma_(std::move(sigma)) {
  if (sigma_.empty()) throw ValidationError("density schedule is empty");
  for (std::size_t i = 0; i < sigma_.size(); ++i) {
    if (!(sigma_[i] > 0.0 && sigma_[i] < 1.0)) throw ValidationError("sigma_n must lie in (0, 1)");
    if (i > 0 && !(sigma_[i] < sigma_[i - 1])) throw ValidationError("sigma_n must decrease strictly");
  }
}

DensitySchedule DensitySchedule::dyadic(int first, int last) {
  std::vector<double> s;
  for (int n = first; n <= last; ++n) s.push_back(std::ldexp(1.0, -n));
  return DensitySchedule(std::move(s));
}

void DensitySchedule::check_against(const SpaceModel& X) const {
  if (!(sigma_.front() < X.total_measure())) throw PreconditionError("sigma_n must stay below lambda(X)");
}

// ----------------------------------------------------------- step functions

StepFunction::StepFunction(SpacePtr parent, std::size_t dim, std::vector<double> edges, std::vector<double> values)
    : parent_(std::move(parent)), dim_(dim), edges_(std::move(edges)), values_(std::move(values)) {
  if (!parent_ || !parent_->is_interval()) throw PreconditionError("step function needs an interval parent space");
  if (edges_.size() < 2) throw ValidationError("step function needs at least one piece");
  if (values_.size() != pieces() * dim_) throw DimensionError("step function values do not match its pieces");
  const auto& I = parent_->as_interval();
  if (edges_.front() != I.lo || edges_.back() != I.hi) throw ValidationError("step function must cover the space");
  for (std::size_t i = 1; i < edges_.size(); ++i)
    if (!(edges_[i] > edges_[i - 1])) throw ValidationError("step function edges must increase");
  for (double v : values_)
    if (!std::isfinite(v)) throw ValidationError("step function values must be finite");
  parent_cells_.resize(pieces());
  for (std::size_t i = 0; i < pieces(); ++i) parent_cells_[i] = parent_->cell_of(0.5 * (edges_[i] + edges_[i + 1]));
}

double StepFunction::lifted_norm() const {
  std::vector<double> parts(pieces());
  for (std::size_t i = 0; i < pieces(); ++i) {
    const double a = norm2(value(i));
    parts[i] = (edges_[i + 1] - edges_[i]) * std::sqrt(1.0 + a * a);
  }
  return pairwise_sum(parts);
}

DiscreteGYM StepFunction::lift() const {
  std::vector<double> coords;
  std::vector<double> weights(pieces());
  coords.reserve(pieces() * (dim_ + 1));
  for (std::size_t i = 0; i < pieces(); ++i) {
    coords.insert(coords.end(), value(i).begin(), value(i).end());
    coords.push_back(1.0);
    weights[i] = edges_[i + 1] - edges_[i];
  }
  return DiscreteGYM::from_flat(parent_, dim_, parent_cells_, std::move(coords), std::move(weights));
}

// ------------------------------------------------------ density algorithm

namespace {

using Key = std::vector<long long>;

Key cube_key(std::span<const double> v, double side) {
  Key k(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) k[j] = static_cast<long long>(std::floor(v[j] / side));
  return k;
}

struct YoungBin {
  double mass = 0.0;
  Vec moment;
  Vec first;
  std::size_t count = 0;
};

struct DirBin {
  double mass = 0.0;
  Vec heaviest;
  double heaviest_mass = -1.0;
};

}  // namespace

DensityResult density_approximate(const DiscreteGYM& mu, std::size_t n, const DensitySchedule& schedule) {
  const auto& X = mu.space();
  const auto parts = decompose(mu);
  if (!X.is_interval()) {
    if (!parts.varifold.atoms().empty())
      throw PreconditionError("density_approximate: concentration needs a nonatomic reference measure");
    throw PreconditionError("density_approximate: requires an interval space");
  }
  schedule.check_against(X);
  const double sigma = schedule[n];
  const std::size_t d = mu.dim();
  const double side = sigma / std::sqrt(double(d));

  std::vector<std::map<Key, YoungBin>> young(X.cells());
  std::vector<std::map<Key, DirBin>> dirs(X.cells());
  for (const auto& a : parts.young.atoms()) {
    auto& b = young[a.cell][cube_key(a.xi, side)];
    if (b.count == 0) {
      b.moment.assign(d, 0.0);
      b.first = a.xi;
    }
    b.mass += a.mass;
    for (std::size_t j = 0; j < d; ++j) b.moment[j] += a.mass * a.xi[j];
    ++b.count;
  }
  for (const auto& a : parts.varifold.atoms()) {
    auto& b = dirs[a.cell][cube_key(a.direction, side)];
    b.mass += a.mass;
    if (a.mass > b.heaviest_mass) {
      b.heaviest_mass = a.mass;
      b.heaviest = a.direction;
    }
  }

  DensityResult out{StepFunction(mu.space_ptr(), d, {X.as_interval().lo, X.as_interval().hi}, Vec(d, 0.0))};
  out.sigma = sigma;
  std::vector<double> edges = {X.cell_lo(0)};
  std::vector<double> values;
  auto push = [&](double right, std::span<const double> v) {
    if (!(right > edges.back())) return;
    edges.push_back(right);
    values.insert(values.end(), v.begin(), v.end());
  };

  for (std::size_t c = 0; c < X.cells(); ++c) {
    const double a = X.cell_lo(c), b = X.cell_hi(c), lam = X.measure(c);
    double x = a;
    double lam_inf = 0.0;
    for (const auto& [k, bin] : dirs[c]) lam_inf += bin.mass;
    if (lam_inf > 0.0) {
      const double ell = std::min({sigma * lam_inf, sigma, lam / 2.0});
      const double height = lam_inf / ell;
      double acc = 0.0;
      std::size_t j = 0;
      for (const auto& [k, bin] : dirs[c]) {
        acc += bin.mass;
        const double right = (++j == dirs[c].size()) ? a + ell : a + ell * (acc / lam_inf);
        Vec v(bin.heaviest);
        for (double& t : v) t *= height;
        push(right, v);
      }
      x = a + ell;
      out.min_concentration_value = std::min(out.min_concentration_value, height);
      out.carrier_measure += ell;
      out.carriers += dirs[c].size();
    }
    // Young part on the rest of the cell: dyadic pieces of width <= sigma,
    // each split by the bin probabilities.
    const double rest = b - x;
    std::size_t pieces = 1;
    while (rest / double(pieces) > sigma) pieces *= 2;
    std::vector<std::pair<double, Vec>> bins;
    double total = 0.0;
    for (const auto& [k, bin] : young[c]) {
      Vec rep = bin.first;
      if (bin.count > 1)
        for (std::size_t t = 0; t < d; ++t) rep[t] = bin.moment[t] / bin.mass;
      bins.emplace_back(bin.mass, std::move(rep));
      total += bin.mass;
    }
    for (std::size_t p = 0; p < pieces; ++p) {
      const double lo = x + rest * double(p) / double(pieces);
      const double hi = (p + 1 == pieces) ? b : x + rest * double(p + 1) / double(pieces);
      double acc = 0.0;
      for (std::size_t j = 0; j < bins.size(); ++j) {
        acc += bins[j].first;
        const double right = (j + 1 == bins.size()) ? hi : lo + (hi - lo) * (acc / total);
        push(right, bins[j].second);
      }
    }
  }
  out.u = StepFunction(mu.space_ptr(), d, std::move(edges), std::move(values));
  return out;
}

// ------------------------------------------------------------ generators

double PeriodicProfile::operator()(double y) const {
  const double P = period();
  double r = y - P * std::floor(y / P);
  if (r >= P) r -= P;
  const auto it = std::upper_bound(breaks.begin(), breaks.end(), r);
  const std::size_t j = static_cast<std::size_t>(it - breaks.begin()) - 1;
  return values[std::min(j, values.size() - 1)];
}

PeriodicProfile PeriodicProfile::square_wave() { return {{0.0, 1.0, 2.0}, {1.0, -1.0}}; }

namespace {

void check_profile(const PeriodicProfile& w) {
  if (w.breaks.size() < 2 || w.values.size() + 1 != w.breaks.size() || w.breaks.front() != 0.0)
    throw ValidationError("periodic profile needs breaks 0 = b_0 < ... < b_m = period and m values");
  for (std::size_t i = 1; i < w.breaks.size(); ++i)
    if (!(w.breaks[i] > w.breaks[i - 1])) throw ValidationError("profile breaks must increase");
}

/// Points of (a, b) where x / s crosses a profile break.
std::vector<double> profile_breaks(const PeriodicProfile& w, double s, double a, double b) {
  std::vector<double> out;
  const double P = w.period();
  const double y0 = std::min(a / s, b / s), y1 = std::max(a / s, b / s);
  const auto m0 = static_cast<long long>(std::floor(y0 / P)) - 1;
  const auto m1 = static_cast<long long>(std::ceil(y1 / P)) + 1;
  for (long long m = m0; m <= m1; ++m)
    for (std::size_t j = 0; j + 1 < w.breaks.size(); ++j) {
      const double x = s * (double(m) * P + w.breaks[j]);
      if (x > a && x < b) out.push_back(x);
    }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

PathOracle oscillation_path(PeriodicProfile w, std::function<double(double)> scale, SpacePtr space, double lo,
                            double hi, std::size_t max_pieces) {
  check_profile(w);
  if (!scale) scale = [](double t) { return t - 1.0; };
  const double width = space->cell_width();
  const double per_period = double(w.values.size());
  auto breaks = [w, scale, space, width, per_period, max_pieces](double t, std::size_t c) {
    const double s = scale(t);
    if (s == 0.0) return std::vector<double>{};
    const double estimate = width / (std::abs(s) * w.period()) * per_period + 1.0;
    if (estimate > double(max_pieces))
      throw PreconditionError("oscillation_path: t = " + format_double(t) + " needs ~" + format_double(estimate) +
                              " pieces per cell (limit " + std::to_string(max_pieces) + ")");
    return profile_breaks(w, s, space->cell_lo(c), space->cell_hi(c));
  };
  auto value = [w, scale](double t, std::size_t, double x, std::span<double> out) {
    const double s = scale(t);
    out[0] = s == 0.0 ? 0.0 : s * w(x / s);
  };
  return PathOracle(std::move(space), 1, lo, hi, std::move(breaks), std::move(value), nullptr, "oscillation");
}

DiscreteGYM lift_piecewise(SpacePtr space, std::size_t dim, std::vector<double> breaks,
                           const std::function<void(double x, std::span<double> out)>& value) {
  if (!space->is_interval()) throw PreconditionError("lift_piecewise: requires an interval space");
  std::sort(breaks.begin(), breaks.end());
  const auto& X = *space;
  std::vector<std::size_t> cells;
  std::vector<double> coords;
  std::vector<double> weights;
  Vec z(dim + 1);
  auto it = breaks.begin();
  for (std::size_t c = 0; c < X.cells(); ++c) {
    const double a = X.cell_lo(c), b = X.cell_hi(c);
    double left = a;
    while (it != breaks.end() && *it <= a) ++it;
    auto emit = [&](double right) {
      if (!(right > left)) return;
      value(0.5 * (left + right), std::span<double>(z).first(dim));
      z[dim] = 1.0;
      cells.push_back(c);
      coords.insert(coords.end(), z.begin(), z.end());
      weights.push_back(right - left);
      left = right;
    };
    for (; it != breaks.end() && *it < b; ++it) emit(*it);
    emit(b);
  }
  return DiscreteGYM::from_flat(space, dim, std::move(cells), std::move(coords), std::move(weights));
}

DiscreteGYM oscillation_lift(const PeriodicProfile& w, double k, SpacePtr space) {
  check_profile(w);
  if (!(k > 0.0)) throw PreconditionError("oscillation_lift: frequency must be positive");
  const auto& I = space->as_interval();
  auto br = profile_breaks(w, 1.0 / k, I.lo, I.hi);
  return lift_piecewise(std::move(space), 1, std::move(br), [&](double x, std::span<double> out) { out[0] = w(k * x); });
}

DiscreteGYM concentration_sequence(SpacePtr space, const Vec& direction, double mass, double x0, double len) {
  if (std::abs(norm2(direction) - 1.0) > 1e-12) throw ValidationError("concentration_sequence: direction must be unit");
  if (!(mass > 0.0) || !(len > 0.0)) throw PreconditionError("concentration_sequence: mass and length must be positive");
  const auto& I = space->as_interval();
  if (x0 < I.lo || x0 + len > I.hi) throw PreconditionError("concentration_sequence: carrier leaves the space");
  const double h = mass / len;
  return lift_piecewise(std::move(space), direction.size(), {x0, x0 + len}, [&](double x, std::span<double> out) {
    const bool in = x > x0 && x < x0 + len;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = in ? h * direction[j] : 0.0;
  });
}

}  // namespace gymlab
