#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "gymlab/core.hpp"
#include "gymlab/homfn.hpp"
#include "gymlab/space.hpp"

namespace gymlab {

/// Input form of an atom; (xi, eta) need not be normalized.
struct Atom {
  std::size_t cell = 0;
  Vec xi;
  double eta = 0.0;
  double w = 0.0;
};

/// Read-only view of a stored (canonical) atom.
struct AtomRef {
  std::size_t cell;
  std::span<const double> xi;
  double eta;
  double w;
};

inline constexpr double kMergeTolerance = 1e-10;
inline constexpr double kProjectionTolerance = 1e-12;

/// Atomic generalized Young measure: finitely many weighted points of
/// X x Xi x [0, inf) stored on the unit sphere of Xi x R (all mass in w),
/// sorted and merged so that equal measures have equal storage.
///
/// Construction canonicalizes but does not enforce the projection property;
/// `validate` reports it and `ensure_valid` repairs or rejects.
class DiscreteGYM {
 public:
  /// Rejects atoms with w <= 0, non-finite entries, or (xi, eta) = 0.
  DiscreteGYM(SpacePtr space, std::size_t dim, const std::vector<Atom>& atoms);

  /// Bulk constructor from un-normalized flat storage ((dim+1) coords per
  /// atom). Zero vectors are dropped: they pair to zero with every f.
  static DiscreteGYM from_flat(SpacePtr space, std::size_t dim, std::vector<std::size_t> cells,
                               std::vector<double> coords, std::vector<double> weights);

  const SpaceModel& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }

  AtomRef atom(std::size_t i) const {
    return {cells_[i], std::span<const double>(coords_).subspan(i * (dim_ + 1), dim_),
            coords_[i * (dim_ + 1) + dim_], weights_[i]};
  }
  std::span<const double> coords() const { return coords_; }
  std::span<const std::size_t> cells() const { return cells_; }
  std::span<const double> weights() const { return weights_; }
  std::vector<Atom> atoms() const;

  /// Per-cell sum of w * eta.
  std::vector<double> eta_mass() const;

  /// Storage-level equality (exact).
  bool operator==(const DiscreteGYM& o) const;

 private:
  DiscreteGYM(SpacePtr space, std::size_t dim);
  void canonicalize(std::vector<std::size_t> cells, std::vector<double> coords, std::vector<double> weights);
  SpacePtr space_;
  std::size_t dim_;
  std::vector<std::size_t> cells_;
  std::vector<double> coords_;
  std::vector<double> weights_;
};

/// Xi-valued measure on X: density per cell plus a singular vector mass per
/// cell. Singular masses entered for the same cell sit at one point and add.
class DiscreteMeasure {
 public:
  DiscreteMeasure(SpacePtr space, std::size_t dim);
  /// `ac` is row-major cells x dim; singular entries are (cell, vector mass).
  DiscreteMeasure(SpacePtr space, std::size_t dim, std::vector<double> ac,
                  const std::vector<std::pair<std::size_t, Vec>>& singular);

  const SpaceModel& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> ac(std::size_t cell) const {
    return std::span<const double>(ac_).subspan(cell * dim_, dim_);
  }
  std::span<const double> singular(std::size_t cell) const {
    return std::span<const double>(singular_).subspan(cell * dim_, dim_);
  }
  bool has_singular(std::size_t cell) const { return norm2(singular(cell)) > 0.0; }
  std::span<const double> ac_flat() const { return ac_; }
  std::span<const double> singular_flat() const { return singular_; }

  /// |p|(X) = sum lambda(c)|ac(c)| + sum |singular(c)|.
  double total_variation() const;
  /// Per-cell vector mass lambda(c) ac(c) + singular(c), row-major.
  std::vector<double> cell_masses() const;
  /// Closed form sum lambda(c) sqrt(1+|ac(c)|^2) + |p^s|(X).
  double lifted_norm_closed_form() const;

 private:
  SpacePtr space_;
  std::size_t dim_;
  std::vector<double> ac_;
  std::vector<double> singular_;
};

/// Per-cell vector masses of a measure on X (result of projecting h mu onto X).
struct CellMeasure {
  SpacePtr space;
  std::size_t dim = 0;
  std::vector<double> mass;  // row-major cells x dim
  double total_variation() const;
};

struct YoungAtom {
  std::size_t cell = 0;
  Vec xi;
  double mass = 0.0;
};

/// Oscillation part: per cell a finite measure on Xi with total mass lambda(cell).
class YoungPart {
 public:
  YoungPart(SpacePtr space, std::size_t dim, std::vector<YoungAtom> atoms);
  const SpaceModel& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::size_t dim() const { return dim_; }
  const std::vector<YoungAtom>& atoms() const { return atoms_; }
  double first_moment() const;

  /// ν = per-cell mixture sum_j probs[j] * delta_{values[j]} scaled by lambda(cell).
  static YoungPart uniform_mixture(SpacePtr space, const std::vector<Vec>& values, const Vec& probs);

 private:
  SpacePtr space_;
  std::size_t dim_;
  std::vector<YoungAtom> atoms_;
};

struct VarifoldAtom {
  std::size_t cell = 0;
  Vec direction;
  double mass = 0.0;
};

/// Concentration part: a finite measure on X x (unit sphere of Xi).
class VarifoldPart {
 public:
  VarifoldPart(SpacePtr space, std::size_t dim, std::vector<VarifoldAtom> atoms);
  const SpaceModel& space() const { return *space_; }
  std::size_t dim() const { return dim_; }
  const std::vector<VarifoldAtom>& atoms() const { return atoms_; }
  double total_mass() const;

 private:
  SpacePtr space_;
  std::size_t dim_;
  std::vector<VarifoldAtom> atoms_;
};

struct Decomposition {
  YoungPart young;
  VarifoldPart varifold;
};

/// Ordered finite family of normalized test functions with weights 2^-i.
class Battery {
 public:
  /// Checks homogeneity (classify defect <= 1e-10) and hom_norm <= 1 on a sphere grid.
  Battery(std::vector<HomFn> members, std::size_t cells = 0);
  const std::vector<HomFn>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  double weight(std::size_t i) const;
  std::size_t dim() const { return members_.empty() ? 0 : members_.front().dim(); }

 private:
  std::vector<HomFn> members_;
};

/// Deterministic 20-member family with smooth cell dependence, built for `space`.
Battery standard_battery(const SpaceModel& space, std::size_t dim, std::size_t count = 20);

struct ValidationReport {
  double max_projection_defect = 0.0;
  std::vector<double> cell_defects;  // signed sum w eta - lambda(c)
  std::size_t negative_eta_atoms = 0;
  std::size_t noncanonical_atoms = 0;
  bool passed = false;
};

// ---- operations ----

DiscreteGYM lift_measure(const DiscreteMeasure& p);
/// delta_u for u constant on each cell (u row-major cells x dim).
DiscreteGYM lift_function(SpacePtr space, std::size_t dim, std::span<const double> u);
DiscreteGYM lift_young(const YoungPart& nu);

double pair(const HomFn& f, const DiscreteGYM& mu);
/// Pairing of a function of xi alone: sum w h(cell, xi, 0).
double pair_xi(const HomFn& h, const DiscreteGYM& mu);
double norm_star(const DiscreteGYM& mu);

ValidationReport validate(const DiscreteGYM& mu);
/// Repairs per-cell projection drift up to 1e-12 lambda(X) by rescaling the
/// eta > 0 atoms of the cell; throws ValidationError beyond that.
DiscreteGYM ensure_valid(const DiscreteGYM& mu);

DiscreteGYM image(const DiscreteGYM& mu, const HomMap& psi);
Decomposition decompose(const DiscreteGYM& mu);
DiscreteGYM recompose(const YoungPart& young, const VarifoldPart& varifold);

DiscreteMeasure barycentre(const DiscreteGYM& mu);
CellMeasure project_x(const HomMap& h, const DiscreteGYM& mu);

/// pair(f, mu) - pair(f, lift_measure(barycentre(mu))). Rejects f that fails
/// convexity sampling.
double jensen_gap(const HomFn& f, const DiscreteGYM& mu);

/// True iff every atom lies on the contact set {f = cof} up to slack tol / w.
/// Throws PreconditionError when cof > f somewhere on the sampled points.
bool contact_support_check(const HomFn& f, const HomFn& cof, const DiscreteGYM& mu, double tol);

double wstar_gap(const DiscreteGYM& a, const DiscreteGYM& b, const Battery& battery);
std::vector<double> battery_pairings(const Battery& battery, const DiscreteGYM& mu);

struct CellDistribution {
  std::vector<Vec> values;
  std::vector<double> probabilities;
};
std::vector<CellDistribution> disintegrate(const YoungPart& young);

/// Atomwise union of two measures on the same space (masses add).
DiscreteGYM superpose(const DiscreteGYM& a, const DiscreteGYM& b);

/// Bounded-Lipschitz (flat) norm surrogate of a measure on an interval space:
/// |p(X)| + sum over cells of width * |p([lo, edge))|. Dominates
/// sup{ <phi, p> : |phi| <= 1, Lip(phi) <= 1 } for cell-centred masses.
double flat_norm(const DiscreteMeasure& p);

}  // namespace gymlab
