#include "gymlab/gym.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gymlab/kernels.hpp"

namespace gymlab {

namespace {

void require_same_space(const SpaceModel& a, const SpaceModel& b, const char* what) {
  if (!(a == b)) throw DimensionError(std::string(what) + ": measures live on different spaces");
}

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw ValidationError(std::string(what) + ": non-finite entry");
}

}  // namespace

// ---------------------------------------------------------------- DiscreteGYM

DiscreteGYM::DiscreteGYM(SpacePtr space, std::size_t dim) : space_(std::move(space)), dim_(dim) {
  if (!space_) throw PreconditionError("DiscreteGYM: null space");
  if (dim_ == 0) throw DimensionError("DiscreteGYM: Xi dimension must be positive");
}

DiscreteGYM::DiscreteGYM(SpacePtr space, std::size_t dim, const std::vector<Atom>& atoms)
    : DiscreteGYM(std::move(space), dim) {
  std::vector<std::size_t> cells;
  std::vector<double> coords;
  std::vector<double> weights;
  cells.reserve(atoms.size());
  coords.reserve(atoms.size() * (dim + 1));
  weights.reserve(atoms.size());
  for (const auto& a : atoms) {
    if (a.cell >= space_->cells()) throw ValidationError("atom cell index out of range");
    if (a.xi.size() != dim) throw DimensionError("atom xi has the wrong dimension");
    check_finite(a.xi, "atom xi");
    if (!std::isfinite(a.eta)) throw ValidationError("atom eta is not finite");
    if (!(a.w > 0.0) || !std::isfinite(a.w)) throw ValidationError("atom weight must be positive and finite");
    if (joint_norm(a.xi, a.eta) == 0.0) throw ValidationError("atom with (xi, eta) = 0 carries no direction");
    cells.push_back(a.cell);
    coords.insert(coords.end(), a.xi.begin(), a.xi.end());
    coords.push_back(a.eta);
    weights.push_back(a.w);
  }
  canonicalize(std::move(cells), std::move(coords), std::move(weights));
}

DiscreteGYM DiscreteGYM::from_flat(SpacePtr space, std::size_t dim, std::vector<std::size_t> cells,
                                   std::vector<double> coords, std::vector<double> weights) {
  DiscreteGYM out(std::move(space), dim);
  if (coords.size() != cells.size() * (dim + 1) || weights.size() != cells.size())
    throw DimensionError("from_flat: inconsistent buffer sizes");
  for (std::size_t c : cells)
    if (c >= out.space_->cells()) throw ValidationError("atom cell index out of range");
  check_finite(coords, "atom coordinates");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("atom weight must be nonnegative and finite");
  out.canonicalize(std::move(cells), std::move(coords), std::move(weights));
  return out;
}

void DiscreteGYM::canonicalize(std::vector<std::size_t> cells, std::vector<double> coords,
                               std::vector<double> weights) {
  const std::size_t k = dim_ + 1;
  const std::size_t n = cells.size();
  std::vector<std::size_t> keep;
  keep.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<double> z(coords.data() + i * k, k);
    const double r = norm2(z);
    if (r == 0.0 || weights[i] == 0.0) continue;
    // already-unit input stays bit-identical, so canonicalization is idempotent
    if (std::abs(r - 1.0) > 1e-15) {
      for (double& x : z) x /= r;
      weights[i] *= r;
    }
    keep.push_back(i);
  }
  auto at = [&](std::size_t i) { return std::span<const double>(coords.data() + i * k, k); };
  std::sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
    if (cells[a] != cells[b]) return cells[a] < cells[b];
    const auto za = at(a), zb = at(b);
    return std::lexicographical_compare(za.begin(), za.end(), zb.begin(), zb.end());
  });

  cells_.clear();
  coords_.clear();
  weights_.clear();
  // Merge consecutive atoms of one cell whose directions agree within tolerance.
  // Sorting is lexicographic, so near-equal directions are adjacent unless a
  // third direction sits between them within 1e-10; scan back over the cell.
  std::size_t cell_start = 0;
  for (std::size_t i : keep) {
    const auto z = at(i);
    if (cells_.empty() || cells_.back() != cells[i]) cell_start = cells_.size();
    bool merged = false;
    for (std::size_t j = cells_.size(); j-- > cell_start;) {
      const double* y = coords_.data() + j * k;
      if (z[0] - y[0] > kMergeTolerance) break;
      double d2 = 0.0;
      for (std::size_t t = 0; t < k; ++t) d2 += (z[t] - y[t]) * (z[t] - y[t]);
      if (std::sqrt(d2) <= kMergeTolerance) {
        weights_[j] += weights[i];
        merged = true;
        break;
      }
    }
    if (merged) continue;
    cells_.push_back(cells[i]);
    coords_.insert(coords_.end(), z.begin(), z.end());
    weights_.push_back(weights[i]);
  }
}

std::vector<Atom> DiscreteGYM::atoms() const {
  std::vector<Atom> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto a = atom(i);
    out.push_back({a.cell, Vec(a.xi.begin(), a.xi.end()), a.eta, a.w});
  }
  return out;
}

std::vector<double> DiscreteGYM::eta_mass() const {
  std::vector<std::vector<double>> parts(space_->cells());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto a = atom(i);
    parts[a.cell].push_back(a.w * a.eta);
  }
  std::vector<double> out(parts.size());
  for (std::size_t c = 0; c < parts.size(); ++c) out[c] = pairwise_sum(parts[c]);
  return out;
}

bool DiscreteGYM::operator==(const DiscreteGYM& o) const {
  return *space_ == *o.space_ && dim_ == o.dim_ && cells_ == o.cells_ && coords_ == o.coords_ &&
         weights_ == o.weights_;
}

// ------------------------------------------------------------ DiscreteMeasure

DiscreteMeasure::DiscreteMeasure(SpacePtr space, std::size_t dim)
    : space_(std::move(space)), dim_(dim), ac_(space_->cells() * dim, 0.0), singular_(space_->cells() * dim, 0.0) {
  if (dim_ == 0) throw DimensionError("DiscreteMeasure: Xi dimension must be positive");
}

DiscreteMeasure::DiscreteMeasure(SpacePtr space, std::size_t dim, std::vector<double> ac,
                                 const std::vector<std::pair<std::size_t, Vec>>& singular)
    : DiscreteMeasure(std::move(space), dim) {
  if (ac.size() != ac_.size()) throw DimensionError("DiscreteMeasure: ac must have cells x dim entries");
  check_finite(ac, "ac density");
  ac_ = std::move(ac);
  for (const auto& [cell, m] : singular) {
    if (cell >= space_->cells()) throw ValidationError("singular mass cell out of range");
    if (m.size() != dim_) throw DimensionError("singular mass has the wrong dimension");
    check_finite(m, "singular mass");
    if (norm2(m) == 0.0) throw ValidationError("zero-mass singular entry");
    for (std::size_t j = 0; j < dim_; ++j) singular_[cell * dim_ + j] += m[j];
  }
}

double DiscreteMeasure::total_variation() const {
  std::vector<double> parts;
  for (std::size_t c = 0; c < space_->cells(); ++c) {
    parts.push_back(space_->measure(c) * norm2(ac(c)));
    parts.push_back(norm2(singular(c)));
  }
  return pairwise_sum(parts);
}

std::vector<double> DiscreteMeasure::cell_masses() const {
  std::vector<double> out(ac_.size());
  for (std::size_t c = 0; c < space_->cells(); ++c)
    for (std::size_t j = 0; j < dim_; ++j)
      out[c * dim_ + j] = space_->measure(c) * ac_[c * dim_ + j] + singular_[c * dim_ + j];
  return out;
}

double DiscreteMeasure::lifted_norm_closed_form() const {
  std::vector<double> parts;
  for (std::size_t c = 0; c < space_->cells(); ++c) {
    const double a = norm2(ac(c));
    parts.push_back(space_->measure(c) * std::sqrt(1.0 + a * a));
    parts.push_back(norm2(singular(c)));
  }
  return pairwise_sum(parts);
}

double CellMeasure::total_variation() const {
  std::vector<double> parts;
  for (std::size_t c = 0; dim > 0 && c < mass.size() / dim; ++c)
    parts.push_back(norm2(std::span<const double>(mass).subspan(c * dim, dim)));
  return pairwise_sum(parts);
}

// ---------------------------------------------------------- Young / varifold

YoungPart::YoungPart(SpacePtr space, std::size_t dim, std::vector<YoungAtom> atoms)
    : space_(std::move(space)), dim_(dim), atoms_(std::move(atoms)) {
  if (dim_ == 0) throw DimensionError("YoungPart: Xi dimension must be positive");
  std::vector<std::vector<double>> per_cell(space_->cells());
  for (const auto& a : atoms_) {
    if (a.cell >= space_->cells()) throw ValidationError("Young atom cell out of range");
    if (a.xi.size() != dim_) throw DimensionError("Young atom has the wrong dimension");
    check_finite(a.xi, "Young atom value");
    if (!(a.mass > 0.0) || !std::isfinite(a.mass)) throw ValidationError("Young atom mass must be positive");
    per_cell[a.cell].push_back(a.mass);
  }
  const double tol = kProjectionTolerance * space_->total_measure();
  for (std::size_t c = 0; c < per_cell.size(); ++c) {
    const double m = pairwise_sum(per_cell[c]);
    if (std::abs(m - space_->measure(c)) > tol)
      throw ValidationError("Young part: cell " + std::to_string(c) + " masses do not sum to lambda(cell)");
  }
}

double YoungPart::first_moment() const {
  std::vector<double> parts;
  for (const auto& a : atoms_) parts.push_back(a.mass * norm2(a.xi));
  return pairwise_sum(parts);
}

YoungPart YoungPart::uniform_mixture(SpacePtr space, const std::vector<Vec>& values, const Vec& probs) {
  if (values.empty() || values.size() != probs.size()) throw DimensionError("uniform_mixture: values/probs mismatch");
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("uniform_mixture: probabilities must sum to 1");
  std::vector<YoungAtom> atoms;
  for (std::size_t c = 0; c < space->cells(); ++c)
    for (std::size_t j = 0; j < values.size(); ++j)
      if (probs[j] > 0.0) atoms.push_back({c, values[j], probs[j] * space->measure(c)});
  const std::size_t dim = values.front().size();
  return YoungPart(std::move(space), dim, std::move(atoms));
}

VarifoldPart::VarifoldPart(SpacePtr space, std::size_t dim, std::vector<VarifoldAtom> atoms)
    : space_(std::move(space)), dim_(dim), atoms_(std::move(atoms)) {
  for (const auto& a : atoms_) {
    if (a.cell >= space_->cells()) throw ValidationError("varifold atom cell out of range");
    if (a.direction.size() != dim_) throw DimensionError("varifold atom has the wrong dimension");
    if (std::abs(norm2(a.direction) - 1.0) > 1e-12) throw ValidationError("varifold direction is not a unit vector");
    if (!(a.mass > 0.0) || !std::isfinite(a.mass)) throw ValidationError("varifold mass must be positive");
  }
}

double VarifoldPart::total_mass() const {
  std::vector<double> parts;
  for (const auto& a : atoms_) parts.push_back(a.mass);
  return pairwise_sum(parts);
}

// ------------------------------------------------------------------ lifts

DiscreteGYM lift_measure(const DiscreteMeasure& p) {
  const auto& X = p.space();
  const std::size_t d = p.dim();
  std::vector<std::size_t> cells;
  std::vector<double> coords;
  std::vector<double> weights;
  for (std::size_t c = 0; c < X.cells(); ++c) {
    cells.push_back(c);
    coords.insert(coords.end(), p.ac(c).begin(), p.ac(c).end());
    coords.push_back(1.0);
    weights.push_back(X.measure(c));
    if (p.has_singular(c)) {
      cells.push_back(c);
      coords.insert(coords.end(), p.singular(c).begin(), p.singular(c).end());
      coords.push_back(0.0);
      weights.push_back(1.0);
    }
  }
  return DiscreteGYM::from_flat(p.space_ptr(), d, std::move(cells), std::move(coords), std::move(weights));
}

DiscreteGYM lift_function(SpacePtr space, std::size_t dim, std::span<const double> u) {
  DiscreteMeasure p(space, dim, std::vector<double>(u.begin(), u.end()), {});
  return lift_measure(p);
}

DiscreteGYM lift_young(const YoungPart& nu) {
  const std::size_t d = nu.dim();
  std::vector<std::size_t> cells;
  std::vector<double> coords;
  std::vector<double> weights;
  for (const auto& a : nu.atoms()) {
    cells.push_back(a.cell);
    coords.insert(coords.end(), a.xi.begin(), a.xi.end());
    coords.push_back(1.0);
    weights.push_back(a.mass);
  }
  return DiscreteGYM::from_flat(nu.space_ptr(), d, std::move(cells), std::move(coords), std::move(weights));
}

// ---------------------------------------------------------------- pairing

double pair(const HomFn& f, const DiscreteGYM& mu) { return kernels::pair(f, mu); }

double pair_xi(const HomFn& h, const DiscreteGYM& mu) { return kernels::pair(h, mu, true); }

double norm_star(const DiscreteGYM& mu) { return pairwise_sum(mu.weights()); }

ValidationReport validate(const DiscreteGYM& mu) {
  ValidationReport rep;
  const auto& X = mu.space();
  const auto em = mu.eta_mass();
  rep.cell_defects.resize(X.cells());
  for (std::size_t c = 0; c < X.cells(); ++c) {
    rep.cell_defects[c] = em[c] - X.measure(c);
    rep.max_projection_defect = std::max(rep.max_projection_defect, std::abs(rep.cell_defects[c]));
  }
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto a = mu.atom(i);
    if (a.eta < 0.0) ++rep.negative_eta_atoms;
    if (std::abs(joint_norm(a.xi, a.eta) - 1.0) > 1e-12) ++rep.noncanonical_atoms;
  }
  rep.passed = rep.max_projection_defect <= kProjectionTolerance * X.total_measure() &&
               rep.negative_eta_atoms == 0 && rep.noncanonical_atoms == 0;
  return rep;
}

DiscreteGYM ensure_valid(const DiscreteGYM& mu) {
  const auto rep = validate(mu);
  if (rep.negative_eta_atoms > 0) throw ValidationError("measure has atoms with eta < 0");
  if (!rep.passed) {
    throw ValidationError("projection property fails: max cell defect " + format_double(rep.max_projection_defect));
  }
  const auto& X = mu.space();
  const auto em = mu.eta_mass();
  std::vector<std::size_t> cells(mu.cells().begin(), mu.cells().end());
  std::vector<double> coords(mu.coords().begin(), mu.coords().end());
  std::vector<double> weights(mu.weights().begin(), mu.weights().end());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto a = mu.atom(i);
    if (a.eta > 0.0 && em[a.cell] != X.measure(a.cell)) weights[i] *= X.measure(a.cell) / em[a.cell];
  }
  return DiscreteGYM::from_flat(mu.space_ptr(), mu.dim(), std::move(cells), std::move(coords), std::move(weights));
}

// ------------------------------------------------------- images and parts

DiscreteGYM image(const DiscreteGYM& mu, const HomMap& psi) {
  if (psi.in_dim() != mu.dim()) throw DimensionError("image: map input dimension differs from the measure");
  const std::size_t out = psi.out_dim();
  const std::size_t n = mu.size();
  std::vector<std::size_t> cells(mu.cells().begin(), mu.cells().end());
  std::vector<double> coords(n * (out + 1));
  std::vector<double> weights(mu.weights().begin(), mu.weights().end());
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = mu.atom(i);
    psi.apply(a.cell, a.xi, a.eta, std::span<double>(coords.data() + i * (out + 1), out));
    coords[i * (out + 1) + out] = a.eta;
  }
  return DiscreteGYM::from_flat(mu.space_ptr(), out, std::move(cells), std::move(coords), std::move(weights));
}

Decomposition decompose(const DiscreteGYM& mu) {
  const auto rep = validate(mu);
  if (!rep.passed) throw ValidationError("decompose: measure does not satisfy the projection property");
  std::vector<YoungAtom> young;
  std::vector<VarifoldAtom> varifold;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto a = mu.atom(i);
    if (a.eta > 0.0) {
      Vec v(a.xi.begin(), a.xi.end());
      for (double& x : v) x /= a.eta;
      young.push_back({a.cell, std::move(v), a.w * a.eta});
    } else {
      const double r = norm2(a.xi);
      Vec v(a.xi.begin(), a.xi.end());
      for (double& x : v) x /= r;
      varifold.push_back({a.cell, std::move(v), a.w * r});
    }
  }
  return {YoungPart(mu.space_ptr(), mu.dim(), std::move(young)),
          VarifoldPart(mu.space_ptr(), mu.dim(), std::move(varifold))};
}

DiscreteGYM recompose(const YoungPart& young, const VarifoldPart& varifold) {
  require_same_space(young.space(), varifold.space(), "recompose");
  if (young.dim() != varifold.dim()) throw DimensionError("recompose: parts have different Xi dimensions");
  std::vector<Atom> atoms;
  for (const auto& a : young.atoms()) atoms.push_back({a.cell, a.xi, 1.0, a.mass});
  for (const auto& a : varifold.atoms()) atoms.push_back({a.cell, a.direction, 0.0, a.mass});
  return DiscreteGYM(young.space_ptr(), young.dim(), atoms);
}

DiscreteMeasure barycentre(const DiscreteGYM& mu) {
  const auto& X = mu.space();
  const std::size_t d = mu.dim();
  std::vector<std::vector<double>> ac_parts(X.cells() * d), sing_parts(X.cells() * d);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto a = mu.atom(i);
    auto& dst = a.eta > 0.0 ? ac_parts : sing_parts;
    for (std::size_t j = 0; j < d; ++j) dst[a.cell * d + j].push_back(a.w * a.xi[j]);
  }
  std::vector<double> ac(X.cells() * d);
  std::vector<std::pair<std::size_t, Vec>> singular;
  for (std::size_t c = 0; c < X.cells(); ++c) {
    Vec s(d);
    for (std::size_t j = 0; j < d; ++j) {
      ac[c * d + j] = pairwise_sum(ac_parts[c * d + j]) / X.measure(c);
      s[j] = pairwise_sum(sing_parts[c * d + j]);
    }
    if (norm2(s) > 0.0) singular.emplace_back(c, std::move(s));
  }
  return DiscreteMeasure(mu.space_ptr(), d, std::move(ac), singular);
}

CellMeasure project_x(const HomMap& h, const DiscreteGYM& mu) {
  if (h.in_dim() != mu.dim()) throw DimensionError("project_x: map input dimension differs from the measure");
  const auto& X = mu.space();
  const std::size_t out = h.out_dim();
  std::vector<std::vector<double>> parts(X.cells() * out);
  Vec buf(out);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto a = mu.atom(i);
    h.apply(a.cell, a.xi, a.eta, buf);
    for (std::size_t j = 0; j < out; ++j) parts[a.cell * out + j].push_back(a.w * buf[j]);
  }
  CellMeasure cm{mu.space_ptr(), out, std::vector<double>(X.cells() * out)};
  for (std::size_t k = 0; k < parts.size(); ++k) cm.mass[k] = pairwise_sum(parts[k]);
  return cm;
}

// --------------------------------------------------------------- Jensen

double jensen_gap(const HomFn& f, const DiscreteGYM& mu) {
  const auto rep = classify(f, 2000, 0x5eedULL, mu.space().cells());
  if (!(rep.homogeneity_defect <= 1e-10) || !(rep.triangle_defect <= 1e-10))
    throw PreconditionError("jensen_gap: f fails convexity sampling");
  const double lhs = pair(f, mu);
  const double rhs = pair(f, lift_measure(barycentre(mu)));
  if (lhs == kInf) return kInf;
  return lhs - rhs;
}

bool contact_support_check(const HomFn& f, const HomFn& cof, const DiscreteGYM& mu, double tol) {
  if (f.dim() != mu.dim() || cof.dim() != mu.dim()) throw DimensionError("contact_support_check: dimension mismatch");
  if (!(tol >= 0.0)) throw PreconditionError("contact_support_check: tol must be nonnegative");
  // cof <= f on random samples of the half-space eta >= 0 and at every atom
  std::mt19937_64 rng(0xc0f);
  std::uniform_real_distribution<double> box(-2.0, 2.0), half(0.0, 2.0);
  std::uniform_int_distribution<std::size_t> pick(0, mu.space().cells() - 1);
  Vec xi(mu.dim());
  for (int s = 0; s < 1000; ++s) {
    for (double& x : xi) x = box(rng);
    const std::size_t c = pick(rng);
    const double e = half(rng);
    if (cof(c, xi, e) > f(c, xi, e) + tol) throw PreconditionError("contact_support_check: cof exceeds f");
  }
  bool on_contact = true;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto a = mu.atom(i);
    const double fv = f(a.cell, a.xi, a.eta);
    const double cv = cof(a.cell, a.xi, a.eta);
    if (cv > fv + tol) throw PreconditionError("contact_support_check: cof exceeds f at an atom");
    if (a.w * (fv - cv) > tol) on_contact = false;
  }
  return on_contact;
}

// ------------------------------------------------------------- batteries

std::vector<double> battery_pairings(const Battery& battery, const DiscreteGYM& mu) {
  return kernels::pair_many(battery.members(), mu);
}

double wstar_gap(const DiscreteGYM& a, const DiscreteGYM& b, const Battery& battery) {
  if (battery.size() == 0) throw PreconditionError("wstar_gap: empty battery");
  require_same_space(a.space(), b.space(), "wstar_gap");
  const auto pa = battery_pairings(battery, a);
  const auto pb = battery_pairings(battery, b);
  std::vector<double> terms(pa.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (pa[i] == kInf || pb[i] == kInf) {
      terms[i] = pa[i] == pb[i] ? 0.0 : kInf;
    } else {
      terms[i] = battery.weight(i) * std::abs(pa[i] - pb[i]);
    }
  }
  return extended_sum(terms);
}

std::vector<CellDistribution> disintegrate(const YoungPart& young) {
  const auto& X = young.space();
  std::vector<CellDistribution> out(X.cells());
  for (const auto& a : young.atoms()) {
    out[a.cell].values.push_back(a.xi);
    out[a.cell].probabilities.push_back(a.mass / X.measure(a.cell));
  }
  for (std::size_t c = 0; c < out.size(); ++c)
    if (out[c].values.empty()) throw ValidationError("disintegrate: cell without Young mass");
  return out;
}

DiscreteGYM superpose(const DiscreteGYM& a, const DiscreteGYM& b) {
  require_same_space(a.space(), b.space(), "superpose");
  if (a.dim() != b.dim()) throw DimensionError("superpose: different Xi dimensions");
  std::vector<std::size_t> cells(a.cells().begin(), a.cells().end());
  cells.insert(cells.end(), b.cells().begin(), b.cells().end());
  std::vector<double> coords(a.coords().begin(), a.coords().end());
  coords.insert(coords.end(), b.coords().begin(), b.coords().end());
  std::vector<double> weights(a.weights().begin(), a.weights().end());
  weights.insert(weights.end(), b.weights().begin(), b.weights().end());
  return DiscreteGYM::from_flat(a.space_ptr(), a.dim(), std::move(cells), std::move(coords), std::move(weights));
}

double flat_norm(const DiscreteMeasure& p) {
  const auto& X = p.space();
  if (!X.is_interval()) throw PreconditionError("flat_norm: requires an interval space");
  const std::size_t d = p.dim();
  const auto m = p.cell_masses();
  Vec run(d, 0.0);
  std::vector<double> parts;
  for (std::size_t c = 0; c < X.cells(); ++c) {
    for (std::size_t j = 0; j < d; ++j) run[j] += m[c * d + j];
    parts.push_back((c + 1 < X.cells() ? X.cell_width() : 1.0) * norm2(run));
  }
  return pairwise_sum(parts);
}

}  // namespace gymlab
