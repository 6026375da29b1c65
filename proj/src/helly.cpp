#include <algorithm>
#include <cmath>

#include "gymlab/approx.hpp"

namespace gymlab {

namespace {

void check_common_grid(const std::vector<SystemGYM>& seq, const char* what) {
  if (seq.empty()) throw PreconditionError(std::string(what) + ": empty sequence");
  for (const auto& s : seq)
    if (!(s.grid() == seq.front().grid()) || !(s.space() == seq.front().space()) || s.dim() != seq.front().dim())
      throw DimensionError(std::string(what) + ": sequence elements use different grids or spaces");
}

HomMap increment_map(std::size_t d) {
  std::vector<Vec> rows;
  for (std::size_t j = 0; j < d; ++j) {
    Vec r(2 * d, 0.0);
    r[j] = -1.0;
    r[d + j] = 1.0;
    rows.push_back(std::move(r));
  }
  return HomMap::linear(2 * d, rows);
}

/// values[k][f] for every element and monitored functional.
std::vector<std::vector<double>> functional_values(const std::vector<SystemGYM>& seq, const Battery& battery,
                                                   const std::vector<double>& D) {
  const auto inc = increment_map(seq.front().dim());
  std::vector<std::vector<double>> out(seq.size());
  for (std::size_t k = 0; k < seq.size(); ++k) {
    for (double t : D) {
      const double ts[] = {t};
      const auto p = battery_pairings(battery, marginal(seq[k], ts));
      out[k].insert(out[k].end(), p.begin(), p.end());
    }
    for (std::size_t i = 0; i + 1 < D.size(); ++i) {
      const double ts[] = {D[i], D[i + 1]};
      const auto p = battery_pairings(battery, image(marginal(seq[k], ts), inc));
      out[k].insert(out[k].end(), p.begin(), p.end());
    }
  }
  return out;
}

bool atoms_close(const DiscreteGYM& a, const DiscreteGYM& b, double tol) {
  if (a.size() != b.size() || a.dim() != b.dim()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.cells()[i] != b.cells()[i] || std::abs(a.weights()[i] - b.weights()[i]) > tol) return false;
  }
  for (std::size_t i = 0; i < a.coords().size(); ++i)
    if (std::abs(a.coords()[i] - b.coords()[i]) > tol) return false;
  return true;
}

}  // namespace

LimitReport helly_extract(const std::vector<SystemGYM>& seq, const Battery& battery, const std::vector<double>& D,
                          double tol, double C, double C_star) {
  check_common_grid(seq, "helly_extract");
  if (battery.size() == 0) throw PreconditionError("helly_extract: empty battery");
  if (D.empty()) throw PreconditionError("helly_extract: empty time set");
  if (!(tol > 0.0)) throw PreconditionError("helly_extract: tol must be positive");
  for (std::size_t i = 1; i < D.size(); ++i)
    if (!(D[i] > D[i - 1])) throw PreconditionError("helly_extract: D must be strictly increasing");

  const auto& grid = seq.front().grid();
  const double slack = 1e-9;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const double var = variation(seq[k], grid.front(), grid.back()).value;
    const double t0[] = {grid.front()};
    const double n0 = norm_star(marginal(seq[k], t0));
    if (var > C + slack) throw PreconditionError("helly_extract: element " + std::to_string(k) + " has Var > C");
    if (n0 > C_star + slack) throw PreconditionError("helly_extract: element " + std::to_string(k) + " has |mu_t0| > C_*");
    for (double t : D) {
      const double ts[] = {t};
      if (norm_star(marginal(seq[k], ts)) > C_star + C + slack)
        throw PreconditionError("helly_extract: marginal norm bound fails for element " + std::to_string(k));
    }
  }

  const auto values = functional_values(seq, battery, D);
  const std::size_t m = values.front().size();
  std::vector<std::size_t> S(seq.size());
  for (std::size_t k = 0; k < S.size(); ++k) S[k] = k;

  // Narrow the index set functional by functional. Each bisection keeps the
  // half holding more of the tail (ties go up), i.e. it follows the cluster
  // point the late elements approach, preferring the limsup.
  for (std::size_t f = 0; f < m; ++f) {
    for (;;) {
      double lo = kInf, hi = -kInf;
      for (std::size_t k : S) {
        lo = std::min(lo, values[k][f]);
        hi = std::max(hi, values[k][f]);
      }
      if (hi - lo <= tol || S.size() == 1) break;
      const double mid = 0.5 * (lo + hi);
      std::vector<std::size_t> upper, lower;
      for (std::size_t k : S) (values[k][f] >= mid ? upper : lower).push_back(k);
      const std::size_t tail_start = S[S.size() / 2];
      auto tail = [&](const std::vector<std::size_t>& v) {
        return std::count_if(v.begin(), v.end(), [&](std::size_t k) { return k >= tail_start; });
      };
      S = tail(upper) >= tail(lower) ? upper : lower;
    }
  }

  LimitReport rep;
  rep.selected = S;
  const std::size_t nb = battery.size();
  for (std::size_t f = 0; f < m; ++f) {
    MonitoredFunctional mf;
    mf.member = f % nb;
    const std::size_t slot = f / nb;
    if (slot < D.size()) {
      mf.times = {D[slot]};
    } else {
      mf.times = {D[slot - D.size()], D[slot - D.size() + 1]};
    }
    mf.id = "f" + std::to_string(mf.member) + "@";
    for (std::size_t i = 0; i < mf.times.size(); ++i) mf.id += (i ? "," : "") + format_double(mf.times[i]);
    double lo = kInf, hi = -kInf;
    for (std::size_t k : S) {
      lo = std::min(lo, values[k][f]);
      hi = std::max(hi, values[k][f]);
    }
    mf.residual = hi - lo;
    mf.limit = values[S.back()][f];
    rep.max_residual = std::max(rep.max_residual, mf.residual);
    rep.functionals.push_back(std::move(mf));
  }
  for (std::size_t i = 0; i < D.size(); ++i) {
    bool ok = true;
    for (const auto& mf : rep.functionals)
      if (mf.times.size() == 1 && mf.times[0] == D[i] && mf.residual > tol) ok = false;
    if (ok) rep.theta.push_back(D[i]);
  }

  const auto& last = seq[S.back()];
  const bool assembled = S.size() == 1 || atoms_close(seq[S[S.size() - 2]].master(), last.master(), tol);
  if (assembled) {
    rep.limit = last;
    rep.limit_variation = variation(last, grid.front(), grid.back()).value;
    rep.variation_bound = rep.limit_variation <= C + slack;
    rep.norm_bound = true;
    for (double t : D) {
      const double ts[] = {t};
      if (norm_star(marginal(last, ts)) > C_star + C + slack) rep.norm_bound = false;
    }
  }
  return rep;
}

double semicontinuity_margin(const std::vector<SystemGYM>& seq, const SystemGYM& limit, const HomFn& h,
                             const std::vector<double>& D, const Battery& battery, double tol) {
  check_common_grid(seq, "semicontinuity_margin");
  if (!(limit.grid() == seq.front().grid()) || !(limit.space() == seq.front().space()))
    throw DimensionError("semicontinuity_margin: limit uses a different grid or space");
  if (D.empty()) throw PreconditionError("semicontinuity_margin: empty time set");
  for (double t : D) {
    const double ts[] = {t};
    const auto a = battery_pairings(battery, marginal(seq.back(), ts));
    const auto b = battery_pairings(battery, marginal(limit, ts));
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!(std::abs(a[i] - b[i]) <= tol))
        throw PreconditionError("semicontinuity_margin: sequence does not approach the limit on D");
  }
  const auto& g = limit.grid();
  const double lim = variation(limit, h, g.front(), g.back()).value;
  double best = kInf;
  for (const auto& s : seq) best = std::min(best, variation(s, h, g.front(), g.back()).value);
  return best - lim;
}

}  // namespace gymlab
