#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gymlab/core.hpp"

namespace gymlab {

/// Finite set of unit vectors discretizing a unit sphere, with the declared
/// covering radius (largest chord distance from a sphere point to the set).
class DirectionGrid {
 public:
  DirectionGrid(std::size_t dim, std::vector<double> flat, double covering_radius);

  /// n equally spaced directions on the unit circle, starting at angle `phase`.
  static DirectionGrid circle(std::size_t n, double phase = 0.0);
  /// Sphere of R^dim. dim 1 gives {-1, +1}, dim 2 a circle with 4*resolution
  /// points, higher dimensions the radial projection of a cube-surface lattice.
  static DirectionGrid sphere(std::size_t dim, std::size_t resolution);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : flat_.size() / dim_; }
  std::span<const double> operator[](std::size_t i) const {
    return std::span<const double>(flat_).subspan(i * dim_, dim_);
  }
  double covering_radius() const { return covering_radius_; }

 private:
  std::size_t dim_;
  std::vector<double> flat_;
  double covering_radius_;
};

class HomMap;
struct HomFnNode;

/// A positively one-homogeneous test function f(x, xi, eta) on X x Xi x R,
/// built from a closed set of combinators. Every combinator except `raw`
/// preserves homogeneity by construction.
///
/// Cell fields (the x-dependence of `linear`) are either uniform or carry one
/// entry per cell; `cells()` reports the cell count a tree requires (0 when
/// the tree is x-independent).
class HomFn {
 public:
  enum class Kind {
    kLinear,
    kEuclidNorm,
    kXiNorm,
    kEtaPart,
    kPositivePart,
    kMin,
    kMax,
    kCombination,
    kCompose,
    kPrMoment,
    kRaw,
    kMoreauYosida,
  };

  using Callback = std::function<double(std::size_t cell, std::span<const double> xi, double eta)>;

  /// a(x).xi + b(x) eta. `a` is row-major cells x dim (or a single row), `b`
  /// has one entry per cell (or a single entry).
  static HomFn linear(std::size_t dim, std::vector<double> a, std::vector<double> b);
  static HomFn linear(Vec a, double b);
  static HomFn zero(std::size_t dim);
  static HomFn euclid_norm(std::size_t dim);
  static HomFn xi_norm(std::size_t dim);
  static HomFn eta_part(std::size_t dim);
  static HomFn positive_part(HomFn f);
  static HomFn min(HomFn f, HomFn g);
  static HomFn max(HomFn f, HomFn g);
  /// sum_i coeffs[i] * terms[i]; 0 * (+inf) is taken as 0.
  static HomFn combination(std::vector<double> coeffs, std::vector<HomFn> terms);
  /// f(x, phi(x, xi, eta), eta).
  static HomFn compose(HomFn f, HomMap map);
  /// |xi|^r / eta^(r-1) for eta > 0, +inf for eta <= 0 and xi != 0, 0 at xi = 0.
  static HomFn pr_moment(std::size_t dim, double r);
  /// Unverified escape hatch. The declared bound |f| <= a|xi| + b(x)|eta| is
  /// recorded but not enforced.
  static HomFn raw(std::size_t dim, Callback eval, double bound_a, std::vector<double> bound_b,
                   std::string label = "raw");

  double operator()(std::size_t cell, std::span<const double> xi, double eta) const;
  double eval(std::size_t cell, std::span<const double> xi, double eta) const {
    return (*this)(cell, xi, eta);
  }

  std::size_t dim() const;
  std::size_t cells() const;
  Kind kind() const;
  /// False when the tree contains a raw callback.
  bool verified() const;
  std::string describe() const;
  const HomFnNode& node() const { return *node_; }

 private:
  friend HomFn make_homfn(HomFnNode n);
  explicit HomFn(std::shared_ptr<const HomFnNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const HomFnNode> node_;
};

/// Wraps a fully populated node; used by operations that add node kinds.
HomFn make_homfn(HomFnNode n);

HomFn operator*(double c, const HomFn& f);
HomFn operator+(const HomFn& f, const HomFn& g);
HomFn operator-(const HomFn& f, const HomFn& g);

/// psi(x, xi, eta) = (x, phi(x, xi, eta), eta) with phi a tuple of HomFn.
class HomMap {
 public:
  HomMap(std::size_t in_dim, std::vector<HomFn> components);

  static HomMap identity(std::size_t dim);
  /// phi_j = rows[j].xi + eta_coeffs[j] eta (eta_coeffs may be empty).
  static HomMap linear(std::size_t in_dim, const std::vector<Vec>& rows, const Vec& eta_coeffs = {});
  /// The Borel map sending points with eta <= 0 to xi = 0 (identity elsewhere).
  static HomMap young_projection(std::size_t dim);

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return components_.size(); }
  const std::vector<HomFn>& components() const { return components_; }
  void apply(std::size_t cell, std::span<const double> xi, double eta, std::span<double> out) const;

 private:
  std::size_t in_dim_;
  std::vector<HomFn> components_;
};

struct HomFnNode {
  HomFn::Kind kind = HomFn::Kind::kLinear;
  std::size_t dim = 0;
  std::size_t cells = 0;
  std::vector<double> a;
  std::vector<double> b;
  double r = 0.0;
  std::vector<double> coeffs;
  std::vector<HomFn> children;
  std::shared_ptr<const HomMap> map;
  HomFn::Callback callback;
  double bound_a = 0.0;
  std::vector<double> bound_b;
  std::string label;
  std::shared_ptr<const DirectionGrid> grid;
  bool verified = true;
};

// ---- operations on test functions ----

/// max over cells x grid directions of |f|; a lower bound of the supremum over
/// the unit sphere of (xi, eta), off by at most covering radius x Lipschitz.
double hom_norm(const HomFn& f, const DirectionGrid& grid, std::size_t cells = 0);

/// f_k(x, z) = min_{z'} f(x, z') + k|z' - z| over z = (xi, eta). The search
/// runs over the rays of `search` plus the ray through the query; along each
/// ray the objective is convex in the radius and minimized in closed form.
HomFn moreau_yosida(const HomFn& f, double k, const DirectionGrid& search, std::size_t cells = 0);

struct ConvexSplit {
  double c = 0.0;
  HomFn f1;
  HomFn f2;
};

/// Writes f = f1 - f2 with f2 convex in xi (f evaluated at eta = 0).
ConvexSplit convex_split(const HomFn& f, const DirectionGrid& sphere, std::size_t cells = 0);

/// Largest eigenvalue of the tangential second-difference Hessian of f(x, ., 0)
/// over the sphere grid; also the smallest. Exposed for diagnostics.
struct TangentialCurvature {
  double max_eigenvalue = 0.0;
  double min_eigenvalue = 0.0;
};
TangentialCurvature tangential_curvature(const HomFn& f, const DirectionGrid& sphere,
                                         std::size_t cells = 0, double step = 1e-4);

struct ClassReport {
  double homogeneity_defect = 0.0;
  double lipschitz = 0.0;
  double triangle_defect = 0.0;
  std::size_t samples = 0;
};

/// Sampled diagnostics over eta >= 0 (the support half-space of every
/// generalized Young measure).
ClassReport classify(const HomFn& f, std::size_t samples, std::uint64_t seed, std::size_t cells = 0);

}  // namespace gymlab
