#include "gymlab/systems.hpp"

#include <algorithm>
#include <cmath>

#include "gymlab/kernels.hpp"

namespace gymlab {

// ------------------------------------------------------------------ grids

TimeGrid::TimeGrid(std::vector<double> times, double horizon) : times_(std::move(times)), horizon_(horizon) {
  if (times_.size() < 2) throw ValidationError("time grid needs at least two times");
  for (double t : times_)
    if (!std::isfinite(t)) throw ValidationError("time grid entries must be finite");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (!(times_[i] > times_[i - 1])) throw ValidationError("time grid must be strictly increasing");
  if (horizon_ < 0.0) horizon_ = times_.back();
  if (times_.front() < 0.0 || times_.back() > horizon_) throw ValidationError("time grid must lie in [0, T]");
}

std::size_t TimeGrid::rho(double t) const {
  if (!(t >= times_.front() && t <= times_.back()))
    throw PreconditionError("time " + format_double(t) + " lies outside the grid");
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  return static_cast<std::size_t>(it - times_.begin()) - 1;
}

SystemGYM::SystemGYM(TimeGrid grid, DiscreteGYM master, std::size_t dim)
    : grid_(std::move(grid)), master_(std::move(master)), dim_(dim) {
  if (dim_ == 0 || master_.dim() != dim_ * grid_.size())
    throw DimensionError("system master must stack one Xi block per grid time");
}

// ------------------------------------------------------------ construction

SystemGYM from_path(const std::vector<std::pair<double, DiscreteMeasure>>& samples, double horizon) {
  if (samples.size() < 2) throw PreconditionError("from_path: need at least two samples");
  const auto& space = samples.front().second.space_ptr();
  const std::size_t d = samples.front().second.dim();
  std::vector<double> times;
  for (const auto& [t, p] : samples) {
    if (!(p.space() == *space) || p.dim() != d) throw DimensionError("from_path: samples live on different spaces");
    times.push_back(t);
  }
  TimeGrid grid(times, horizon);
  const std::size_t m = samples.size();
  const std::size_t jd = d * m;
  std::vector<std::size_t> cells;
  std::vector<double> coords;
  std::vector<double> weights;
  for (std::size_t c = 0; c < space->cells(); ++c) {
    cells.push_back(c);
    for (const auto& s : samples) coords.insert(coords.end(), s.second.ac(c).begin(), s.second.ac(c).end());
    coords.push_back(1.0);
    weights.push_back(space->measure(c));
    bool any = false;
    for (const auto& s : samples) any = any || s.second.has_singular(c);
    if (any) {
      cells.push_back(c);
      for (const auto& s : samples)
        coords.insert(coords.end(), s.second.singular(c).begin(), s.second.singular(c).end());
      coords.push_back(0.0);
      weights.push_back(1.0);
    }
  }
  return SystemGYM(std::move(grid), DiscreteGYM::from_flat(space, jd, cells, coords, weights), d);
}

DiscreteGYM select_blocks(const DiscreteGYM& joint, std::size_t dim, std::span<const std::size_t> blocks) {
  if (dim == 0 || joint.dim() % dim != 0) throw DimensionError("select_blocks: joint does not stack blocks");
  const std::size_t nb = joint.dim() / dim;
  for (std::size_t b : blocks)
    if (b >= nb) throw DimensionError("select_blocks: block index out of range");
  const std::size_t out = dim * blocks.size();
  const std::size_t n = joint.size();
  std::vector<std::size_t> cells(joint.cells().begin(), joint.cells().end());
  std::vector<double> coords(n * (out + 1));
  std::vector<double> weights(joint.weights().begin(), joint.weights().end());
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = joint.atom(i);
    double* z = coords.data() + i * (out + 1);
    for (std::size_t k = 0; k < blocks.size(); ++k)
      for (std::size_t j = 0; j < dim; ++j) z[k * dim + j] = a.xi[blocks[k] * dim + j];
    z[out] = a.eta;
  }
  return DiscreteGYM::from_flat(joint.space_ptr(), out, std::move(cells), std::move(coords), std::move(weights));
}

DiscreteGYM marginal(const SystemGYM& sys, std::span<const double> times) {
  if (times.empty()) throw PreconditionError("marginal: empty time tuple");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw PreconditionError("marginal: times must be strictly increasing");
  std::vector<std::size_t> blocks;
  for (double t : times) blocks.push_back(sys.grid().rho(t));
  return select_blocks(sys.master(), sys.dim(), blocks);
}

std::vector<DiscreteMeasure> bar_path(const SystemGYM& sys) {
  std::vector<DiscreteMeasure> out;
  for (double t : sys.grid().times()) {
    const double ts[] = {t};
    out.push_back(barycentre(marginal(sys, ts)));
  }
  return out;
}

// --------------------------------------------------------------- variation

std::vector<double> step_increments(const SystemGYM& sys, const HomFn& h) {
  return kernels::step_increments(h, sys.master(), sys.dim());
}

namespace {

void require_subadditive(const HomFn& h, std::size_t cells) {
  const auto rep = classify(h, 512, 0x7a11ULL, cells);
  if (!(rep.homogeneity_defect <= 1e-10) || !(rep.triangle_defect <= 1e-10))
    throw PreconditionError("variation: h fails subadditivity sampling");
}

VariationReport variation_from_steps(const SystemGYM& sys, const std::vector<double>& inc, double a, double b) {
  const auto& A = sys.grid().times();
  if (!(a <= b) || a < A.front() || b > A.back()) throw PreconditionError("variation: need a0 <= a <= b <= ak");
  VariationReport rep;
  rep.partition.push_back(a);
  for (std::size_t i = 1; i < A.size(); ++i) {
    if (A[i] > a && A[i] <= b) {
      rep.contributions.push_back(inc[i - 1]);
      if (A[i] != a) rep.partition.push_back(A[i]);
    }
  }
  if (rep.partition.back() != b) rep.partition.push_back(b);
  rep.value = pairwise_sum(rep.contributions);
  return rep;
}

}  // namespace

VariationReport variation(const SystemGYM& sys, const HomFn& h, double a, double b) {
  require_subadditive(h, sys.space().cells());
  return variation_from_steps(sys, step_increments(sys, h), a, b);
}

VariationReport variation(const SystemGYM& sys, double a, double b) {
  return variation_from_steps(sys, step_increments(sys, HomFn::xi_norm(sys.dim())), a, b);
}

double ac_modulus(const SystemGYM& sys, double delta) {
  if (!(delta > 0.0)) throw PreconditionError("ac_modulus: delta must be positive");
  const auto& A = sys.grid().times();
  if (delta > A.back() - A.front() + 1e-12 * (A.back() - A.front()))
    throw PreconditionError("ac_modulus: delta exceeds the grid span");
  // Splitting an interval at a grid point never lowers the summed increment
  // (subadditivity of |.|), so families of single steps suffice: a 0/1
  // knapsack with real costs, solved exactly on the Pareto frontier.
  const auto inc = step_increments(sys, HomFn::xi_norm(sys.dim()));
  const double slack = 1e-12 * (A.back() - A.front());
  std::vector<std::pair<double, double>> front = {{0.0, 0.0}};  // (length, value)
  for (std::size_t i = 0; i < inc.size(); ++i) {
    const double len = A[i + 1] - A[i];
    std::vector<std::pair<double, double>> cand = front;
    for (const auto& [l, v] : front)
      if (l + len <= delta + slack) cand.emplace_back(l + len, v + inc[i]);
    std::sort(cand.begin(), cand.end(), [](const auto& x, const auto& y) {
      return x.first < y.first || (x.first == y.first && x.second > y.second);
    });
    front.clear();
    for (const auto& p : cand)
      if (front.empty() || p.second > front.back().second) front.push_back(p);
  }
  return front.back().second;
}

// ---------------------------------------------------------------- quotients

namespace {

HomMap quotient_map(std::size_t d, double dt) {
  std::vector<Vec> rows;
  for (std::size_t j = 0; j < d; ++j) {
    Vec r(2 * d, 0.0);
    r[j] = -1.0 / dt;
    r[d + j] = 1.0 / dt;
    rows.push_back(std::move(r));
  }
  return HomMap::linear(2 * d, rows);
}

}  // namespace

DiscreteGYM diff_quotient(const SystemGYM& sys, double t1, double t2) {
  if (!(t1 < t2)) throw PreconditionError("diff_quotient: need t1 < t2");
  const double ts[] = {t1, t2};
  return image(marginal(sys, ts), quotient_map(sys.dim(), t2 - t1));
}

DiscreteGYM diff_quotient(const SystemOracle& oracle, double t1, double t2) {
  if (!(t1 < t2)) throw PreconditionError("diff_quotient: need t1 < t2");
  const double ts[] = {t1, t2};
  return image(oracle.joint(ts), quotient_map(oracle.dim(), t2 - t1));
}

GridOracle::GridOracle(SystemGYM sys) : sys_(std::move(sys)) {}

DiscreteGYM GridOracle::joint(std::span<const double> times) const { return marginal(sys_, times); }

// ------------------------------------------------------------- derivative

namespace {

void probe_compatibility(const SystemOracle& oracle, double t0, double eps, const Battery& battery) {
  const std::size_t d = oracle.dim();
  const double t3[] = {t0 - eps, t0, t0 + eps};
  const double tl[] = {t0 - eps, t0};
  const double tr[] = {t0, t0 + eps};
  const auto j3 = oracle.joint(t3);
  const std::size_t bl[] = {0, 1}, br[] = {1, 2};
  const auto q = quotient_map(d, eps);
  const std::pair<DiscreteGYM, DiscreteGYM> checks[] = {
      {image(select_blocks(j3, d, bl), q), image(oracle.joint(tl), q)},
      {image(select_blocks(j3, d, br), q), image(oracle.joint(tr), q)},
  };
  for (const auto& [a, b] : checks) {
    const auto pa = battery_pairings(battery, a);
    const auto pb = battery_pairings(battery, b);
    for (std::size_t i = 0; i < pa.size(); ++i)
      if (std::abs(pa[i] - pb[i]) > 1e-10 * (1.0 + std::abs(pa[i])))
        throw Error("derivative_estimate: oracle joints are not projection-compatible");
  }
}

}  // namespace

DerivativeReport derivative_estimate(const SystemOracle& oracle, double t0, const std::vector<double>& eps_schedule,
                                     const Battery& battery, double tol) {
  if (eps_schedule.size() < 2) throw PreconditionError("derivative_estimate: schedule needs two entries");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] > 0.0)) throw PreconditionError("derivative_estimate: schedule must be positive");
    if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1]))
      throw PreconditionError("derivative_estimate: schedule must decrease");
  }
  if (!(t0 - eps_schedule.front() >= oracle.lo() && t0 + eps_schedule.front() <= oracle.hi()))
    throw PreconditionError("derivative_estimate: t0 is not interior for this schedule");
  if (battery.size() == 0) throw PreconditionError("derivative_estimate: empty battery");
  if (battery.dim() != oracle.dim()) throw DimensionError("derivative_estimate: battery dimension mismatch");
  probe_compatibility(oracle, t0, eps_schedule.front(), battery);

  DerivativeReport rep;
  rep.eps = eps_schedule;
  for (double e : eps_schedule) {
    auto l = diff_quotient(oracle, t0 - e, t0);
    auto r = diff_quotient(oracle, t0, t0 + e);
    rep.left.push_back(battery_pairings(battery, l));
    rep.right.push_back(battery_pairings(battery, r));
    rep.last_left = std::move(l);
    rep.last_right = std::move(r);
  }
  const std::size_t n = rep.eps.size();
  const std::size_t m = battery.size();
  rep.residuals.assign(m, 0.0);
  rep.left_converged = rep.right_converged = true;
  double worst = -1.0;
  std::size_t worst_i = 0;
  std::string worst_kind;
  for (std::size_t i = 0; i < m; ++i) {
    const double dl = std::abs(rep.left[n - 1][i] - rep.left[n - 2][i]);
    const double dr = std::abs(rep.right[n - 1][i] - rep.right[n - 2][i]);
    const double lr = std::abs(rep.left[n - 1][i] - rep.right[n - 1][i]);
    if (!(dl <= tol)) rep.left_converged = false;
    if (!(dr <= tol)) rep.right_converged = false;
    rep.residuals[i] = std::max({dl, dr, lr});
    if (rep.residuals[i] > worst) {
      worst = rep.residuals[i];
      worst_i = i;
      worst_kind = dl >= dr && dl >= lr ? "left not Cauchy" : (dr >= lr ? "right not Cauchy" : "one-sided limits differ");
    }
  }
  rep.converged = worst <= tol;
  if (rep.converged) {
    rep.estimate = rep.last_right;
  } else {
    rep.witness = "member " + std::to_string(worst_i) + ": " + worst_kind + " (residual " + format_double(worst) + ")";
  }
  return rep;
}

IntegralGap variation_integral_gap(const SystemOracle& oracle, const HomFn& h, double a, double b, double dt,
                                   double tol) {
  if (!(dt > 0.0) || !(a < b)) throw PreconditionError("variation_integral_gap: need a < b and dt > 0");
  if (a < oracle.lo() || b > oracle.hi()) throw PreconditionError("variation_integral_gap: [a, b] outside the oracle");
  if (h.dim() != oracle.dim()) throw DimensionError("variation_integral_gap: h dimension mismatch");
  const auto steps = static_cast<std::size_t>(std::llround((b - a) / dt));
  if (steps == 0 || std::abs(steps * dt - (b - a)) > 1e-9 * (b - a))
    throw PreconditionError("variation_integral_gap: dt must divide b - a");

  IntegralGap out;
  std::vector<double> times(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) times[i] = a + (b - a) * double(i) / double(steps);
  const SystemGYM sys(TimeGrid(times, oracle.hi()), oracle.joint(times), oracle.dim());
  out.lhs = variation(sys, h, a, b).value;

  const auto& X = *oracle.space();
  const auto battery = standard_battery(X, oracle.dim(), 6);
  std::vector<double> schedule;
  for (int j = 0; j < 4; ++j) schedule.push_back(dt / 4.0 * std::ldexp(1.0, -j));
  std::vector<double> integrand(steps);
  out.nodes = steps;
  for (std::size_t m = 0; m < steps; ++m) {
    const double t = a + (b - a) * (double(m) + 0.5) / double(steps);
    const auto rep = derivative_estimate(oracle, t, schedule, battery, tol);
    if (rep.converged) {
      integrand[m] = pair_xi(h, *rep.estimate);
    } else {
      ++out.failed_nodes;
      integrand[m] = 0.5 * (pair_xi(h, *rep.last_left) + pair_xi(h, *rep.last_right));
    }
  }
  if (double(out.failed_nodes) > 0.05 * double(out.nodes))
    throw Error("variation_integral_gap: derivative estimate failed at " + std::to_string(out.failed_nodes) + " of " +
                std::to_string(out.nodes) + " nodes");
  out.rhs = (b - a) / double(steps) * pairwise_sum(integrand);
  out.gap = out.lhs - out.rhs;
  out.inequality_holds = out.rhs <= out.lhs + tol;
  return out;
}

}  // namespace gymlab
