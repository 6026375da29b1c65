#include "gymlab/homfn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gymlab {

// ---------------------------------------------------------------------------
// DirectionGrid

DirectionGrid::DirectionGrid(std::size_t dim, std::vector<double> flat, double covering_radius)
    : dim_(dim), flat_(std::move(flat)), covering_radius_(covering_radius) {
  if (dim_ == 0) throw ValidationError("direction grid needs dim >= 1");
  if (flat_.empty() || flat_.size() % dim_ != 0)
    throw ValidationError("direction grid: flat storage must be a nonempty multiple of dim");
  for (std::size_t i = 0; i < size(); ++i) {
    const double n = norm2((*this)[i]);
    if (std::abs(n - 1.0) > 1e-12) throw ValidationError("direction grid: vectors must be unit");
  }
}

DirectionGrid DirectionGrid::circle(std::size_t n, double phase) {
  if (n < 2) throw ValidationError("circle grid needs at least two directions");
  std::vector<double> flat(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = phase + 2.0 * std::numbers::pi * double(i) / double(n);
    flat[2 * i] = std::cos(th);
    flat[2 * i + 1] = std::sin(th);
    // exact values at the quarter turns keep axis directions bit-exact
    if (phase == 0.0 && (4 * i) % n == 0) {
      const std::size_t q = (4 * i) / n;
      constexpr std::array<double, 8> axes{1, 0, 0, 1, -1, 0, 0, -1};
      flat[2 * i] = axes[2 * q];
      flat[2 * i + 1] = axes[2 * q + 1];
    }
  }
  return DirectionGrid(2, std::move(flat), 2.0 * std::sin(std::numbers::pi / (2.0 * double(n))));
}

DirectionGrid DirectionGrid::sphere(std::size_t dim, std::size_t resolution) {
  if (dim == 0) throw ValidationError("sphere grid needs dim >= 1");
  if (resolution == 0) throw ValidationError("sphere grid needs resolution >= 1");
  if (dim == 1) return DirectionGrid(1, {1.0, -1.0}, 0.0);
  if (dim == 2) return circle(4 * resolution);
  // lattice with `resolution` intervals per cube edge on every face of [-1,1]^dim
  const std::size_t m = resolution;
  const double h = 2.0 / double(m);
  std::vector<double> flat;
  std::vector<std::size_t> idx(dim, 0);
  const std::size_t per_axis = m + 1;
  std::size_t total = 1;
  for (std::size_t k = 0; k < dim; ++k) total *= per_axis;
  std::vector<double> p(dim);
  for (std::size_t lin = 0; lin < total; ++lin) {
    std::size_t rest = lin;
    bool on_face = false;
    for (std::size_t k = 0; k < dim; ++k) {
      idx[k] = rest % per_axis;
      rest /= per_axis;
      p[k] = -1.0 + h * double(idx[k]);
      if (idx[k] == 0 || idx[k] == m) on_face = true;
    }
    if (!on_face) continue;
    const double n = norm2(p);
    for (double v : p) flat.push_back(v / n);
  }
  return DirectionGrid(dim, std::move(flat), h * std::sqrt(double(dim - 1)) / 2.0);
}

// ---------------------------------------------------------------------------
// HomFn construction

HomFn make_homfn(HomFnNode n) { return HomFn(std::make_shared<const HomFnNode>(std::move(n))); }

namespace {

std::size_t merge_cells(std::size_t a, std::size_t b) {
  if (a == 0) return b;
  if (b == 0 || a == b) return a;
  throw DimensionError("test functions built over different cell counts");
}

void require_same_dim(const HomFn& f, const HomFn& g) {
  if (f.dim() != g.dim()) throw DimensionError("combinator children have different Xi dimensions");
}

}  // namespace

HomFn HomFn::linear(std::size_t dim, std::vector<double> a, std::vector<double> b) {
  if (dim == 0) throw DimensionError("Xi dimension must be positive");
  if (a.empty() || a.size() % dim != 0) throw DimensionError("linear: a must hold rows of length dim");
  if (b.empty()) throw DimensionError("linear: b must be nonempty");
  const std::size_t ca = a.size() / dim;
  const std::size_t cb = b.size();
  for (double v : a)
    if (!std::isfinite(v)) throw ValidationError("linear: non-finite coefficient");
  for (double v : b)
    if (!std::isfinite(v)) throw ValidationError("linear: non-finite coefficient");
  HomFnNode n;
  n.kind = Kind::kLinear;
  n.dim = dim;
  n.cells = merge_cells(ca == 1 ? 0 : ca, cb == 1 ? 0 : cb);
  n.a = std::move(a);
  n.b = std::move(b);
  return make_homfn(std::move(n));
}

HomFn HomFn::linear(Vec a, double b) {
  const std::size_t d = a.size();
  return linear(d, std::move(a), {b});
}

HomFn HomFn::zero(std::size_t dim) { return linear(dim, std::vector<double>(dim, 0.0), {0.0}); }

namespace {
HomFn leaf(HomFn::Kind k, std::size_t dim) {
  if (dim == 0) throw DimensionError("Xi dimension must be positive");
  HomFnNode n;
  n.kind = k;
  n.dim = dim;
  return make_homfn(std::move(n));
}
}  // namespace

HomFn HomFn::euclid_norm(std::size_t dim) { return leaf(Kind::kEuclidNorm, dim); }
HomFn HomFn::xi_norm(std::size_t dim) { return leaf(Kind::kXiNorm, dim); }
HomFn HomFn::eta_part(std::size_t dim) { return leaf(Kind::kEtaPart, dim); }

HomFn HomFn::positive_part(HomFn f) {
  HomFnNode n;
  n.kind = Kind::kPositivePart;
  n.dim = f.dim();
  n.cells = f.cells();
  n.verified = f.verified();
  n.children = {std::move(f)};
  return make_homfn(std::move(n));
}

namespace {
HomFn binary(HomFn::Kind k, HomFn f, HomFn g) {
  require_same_dim(f, g);
  HomFnNode n;
  n.kind = k;
  n.dim = f.dim();
  n.cells = merge_cells(f.cells(), g.cells());
  n.verified = f.verified() && g.verified();
  n.children = {std::move(f), std::move(g)};
  return make_homfn(std::move(n));
}
}  // namespace

HomFn HomFn::min(HomFn f, HomFn g) { return binary(Kind::kMin, std::move(f), std::move(g)); }
HomFn HomFn::max(HomFn f, HomFn g) { return binary(Kind::kMax, std::move(f), std::move(g)); }

HomFn HomFn::combination(std::vector<double> coeffs, std::vector<HomFn> terms) {
  if (terms.empty() || coeffs.size() != terms.size())
    throw DimensionError("combination: one coefficient per term, at least one term");
  HomFnNode n;
  n.kind = Kind::kCombination;
  n.dim = terms.front().dim();
  for (const auto& t : terms) {
    require_same_dim(terms.front(), t);
    n.cells = merge_cells(n.cells, t.cells());
    n.verified = n.verified && t.verified();
  }
  for (double c : coeffs)
    if (!std::isfinite(c)) throw ValidationError("combination: non-finite coefficient");
  n.coeffs = std::move(coeffs);
  n.children = std::move(terms);
  return make_homfn(std::move(n));
}

HomFn HomFn::compose(HomFn f, HomMap map) {
  if (f.dim() != map.out_dim()) throw DimensionError("compose: map output dimension differs from f");
  HomFnNode n;
  n.kind = Kind::kCompose;
  n.dim = map.in_dim();
  n.cells = f.cells();
  n.verified = f.verified();
  for (const auto& c : map.components()) {
    n.cells = merge_cells(n.cells, c.cells());
    n.verified = n.verified && c.verified();
  }
  n.children = {std::move(f)};
  n.map = std::make_shared<const HomMap>(std::move(map));
  return make_homfn(std::move(n));
}

HomFn HomFn::pr_moment(std::size_t dim, double r) {
  if (!(r > 1.0) || !std::isfinite(r)) throw ValidationError("pr_moment: r must be a finite real > 1");
  HomFnNode n;
  n.kind = Kind::kPrMoment;
  n.dim = dim;
  n.r = r;
  if (dim == 0) throw DimensionError("Xi dimension must be positive");
  return make_homfn(std::move(n));
}

HomFn HomFn::raw(std::size_t dim, Callback eval, double bound_a, std::vector<double> bound_b,
                 std::string label) {
  if (dim == 0) throw DimensionError("Xi dimension must be positive");
  if (!eval) throw ValidationError("raw: empty callback");
  HomFnNode n;
  n.kind = Kind::kRaw;
  n.dim = dim;
  n.callback = std::move(eval);
  n.bound_a = bound_a;
  n.cells = bound_b.size() > 1 ? bound_b.size() : 0;
  n.bound_b = std::move(bound_b);
  n.label = std::move(label);
  n.verified = false;
  return make_homfn(std::move(n));
}

std::size_t HomFn::dim() const { return node_->dim; }
std::size_t HomFn::cells() const { return node_->cells; }
HomFn::Kind HomFn::kind() const { return node_->kind; }
bool HomFn::verified() const { return node_->verified; }

HomFn operator*(double c, const HomFn& f) { return HomFn::combination({c}, {f}); }
HomFn operator+(const HomFn& f, const HomFn& g) { return HomFn::combination({1.0, 1.0}, {f, g}); }
HomFn operator-(const HomFn& f, const HomFn& g) { return HomFn::combination({1.0, -1.0}, {f, g}); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double moreau_yosida_eval(const HomFnNode& n, std::size_t cell, std::span<const double> xi, double eta);

double eval_node(const HomFnNode& n, std::size_t cell, std::span<const double> xi, double eta) {
  using K = HomFn::Kind;
  switch (n.kind) {
    case K::kLinear: {
      const std::size_t rows = n.a.size() / n.dim;
      const std::size_t ra = rows == 1 ? 0 : cell;
      const std::size_t rb = n.b.size() == 1 ? 0 : cell;
      if (ra >= rows || rb >= n.b.size()) throw DimensionError("linear: cell index outside the field");
      double s = n.b[rb] * eta;
      const double* a = n.a.data() + ra * n.dim;
      for (std::size_t i = 0; i < n.dim; ++i) s += a[i] * xi[i];
      return s;
    }
    case K::kEuclidNorm:
      return joint_norm(xi, eta);
    case K::kXiNorm:
      return norm2(xi);
    case K::kEtaPart:
      return eta;
    case K::kPositivePart:
      return std::max(eval_node(n.children[0].node(), cell, xi, eta), 0.0);
    case K::kMin:
      return std::min(eval_node(n.children[0].node(), cell, xi, eta),
                      eval_node(n.children[1].node(), cell, xi, eta));
    case K::kMax:
      return std::max(eval_node(n.children[0].node(), cell, xi, eta),
                      eval_node(n.children[1].node(), cell, xi, eta));
    case K::kCombination: {
      double s = 0.0;
      bool inf = false;
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        const double c = n.coeffs[i];
        if (c == 0.0) continue;
        const double v = eval_node(n.children[i].node(), cell, xi, eta);
        if (v == kInf) {
          if (c < 0.0) throw Error("combination: negative multiple of +inf");
          inf = true;
          continue;
        }
        s += c * v;
      }
      return inf ? kInf : s;
    }
    case K::kCompose: {
      const std::size_t m = n.map->out_dim();
      std::array<double, 16> small{};
      std::vector<double> big;
      std::span<double> out;
      if (m <= small.size()) {
        out = std::span<double>(small.data(), m);
      } else {
        big.resize(m);
        out = big;
      }
      n.map->apply(cell, xi, eta, out);
      return eval_node(n.children[0].node(), cell, out, eta);
    }
    case K::kPrMoment: {
      const double nx = norm2(xi);
      if (nx == 0.0) return 0.0;
      if (!(eta > 0.0)) return kInf;
      return std::pow(nx, n.r) / std::pow(eta, n.r - 1.0);
    }
    case K::kRaw: {
      const double v = n.callback(cell, xi, eta);
      if (!std::isfinite(v)) throw Error("raw test function '" + n.label + "' returned a non-finite value");
      return v;
    }
    case K::kMoreauYosida:
      return moreau_yosida_eval(n, cell, xi, eta);
  }
  throw Error("unknown test-function node");
}

double moreau_yosida_eval(const HomFnNode& n, std::size_t cell, std::span<const double> xi, double eta) {
  const std::size_t d = n.dim;
  const double k = n.r;
  const double rad = joint_norm(xi, eta);
  if (rad == 0.0) return 0.0;
  std::array<double, 17> zbuf{};
  std::vector<double> zbig;
  std::span<double> e;
  if (d + 1 <= zbuf.size()) {
    e = std::span<double>(zbuf.data(), d + 1);
  } else {
    zbig.resize(d + 1);
    e = zbig;
  }
  for (std::size_t i = 0; i < d; ++i) e[i] = xi[i] / rad;
  e[d] = eta / rad;
  const HomFnNode& f = n.children[0].node();
  // candidate z' = 0
  double best = k;
  auto ray = [&](std::span<const double> dir) {
    const double a = eval_node(f, cell, dir.first(d), dir[d]);
    if (!(a > -k)) throw Error("moreau_yosida: f <= -k on a search ray, the envelope is -inf");
    if (a >= k) return;  // objective nondecreasing in the radius: r = 0 wins
    const double c = std::clamp(dot(dir, e), -1.0, 1.0);
    // |e - c dir| directly; sqrt(1 - c^2) loses half the digits near c = 1
    double s2 = 0.0;
    for (std::size_t i = 0; i <= d; ++i) s2 += (e[i] - c * dir[i]) * (e[i] - c * dir[i]);
    const double s = std::min(1.0, std::sqrt(s2));
    const double q = a / k;
    const double rstar = c - q * s / std::sqrt(1.0 - q * q);
    const double v = rstar > 0.0 ? a * c + s * std::sqrt(k * k - a * a) : k;
    best = std::min(best, v);
  };
  ray(e);
  const DirectionGrid& g = *n.grid;
  for (std::size_t i = 0; i < g.size(); ++i) ray(g[i]);
  return rad * best;
}

}  // namespace

double HomFn::operator()(std::size_t cell, std::span<const double> xi, double eta) const {
  if (xi.size() != node_->dim) throw DimensionError("evaluation: xi has the wrong dimension");
  const double v = eval_node(*node_, cell, xi, eta);
  if (std::isnan(v) || v == -kInf) throw Error("test function evaluated to a non-finite value");
  return v;
}

std::string HomFn::describe() const {
  using K = Kind;
  const HomFnNode& n = *node_;
  std::ostringstream os;
  switch (n.kind) {
    case K::kLinear: os << "linear"; break;
    case K::kEuclidNorm: os << "euclid_norm"; break;
    case K::kXiNorm: os << "xi_norm"; break;
    case K::kEtaPart: os << "eta"; break;
    case K::kPositivePart: os << "pos(" << n.children[0].describe() << ")"; break;
    case K::kMin: os << "min(" << n.children[0].describe() << "," << n.children[1].describe() << ")"; break;
    case K::kMax: os << "max(" << n.children[0].describe() << "," << n.children[1].describe() << ")"; break;
    case K::kCombination:
      os << "comb(";
      for (std::size_t i = 0; i < n.children.size(); ++i)
        os << (i ? "," : "") << n.coeffs[i] << "*" << n.children[i].describe();
      os << ")";
      break;
    case K::kCompose: os << "compose(" << n.children[0].describe() << ")"; break;
    case K::kPrMoment: os << "P" << n.r; break;
    case K::kRaw: os << "raw:" << n.label; break;
    case K::kMoreauYosida: os << "my" << n.r << "(" << n.children[0].describe() << ")"; break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// HomMap

HomMap::HomMap(std::size_t in_dim, std::vector<HomFn> components)
    : in_dim_(in_dim), components_(std::move(components)) {
  if (in_dim_ == 0 || components_.empty()) throw DimensionError("hom map needs nonzero dimensions");
  for (const auto& c : components_)
    if (c.dim() != in_dim_) throw DimensionError("hom map component has the wrong input dimension");
}

HomMap HomMap::identity(std::size_t dim) {
  std::vector<Vec> rows(dim, Vec(dim, 0.0));
  for (std::size_t i = 0; i < dim; ++i) rows[i][i] = 1.0;
  return linear(dim, rows);
}

HomMap HomMap::linear(std::size_t in_dim, const std::vector<Vec>& rows, const Vec& eta_coeffs) {
  if (!eta_coeffs.empty() && eta_coeffs.size() != rows.size())
    throw DimensionError("hom map: one eta coefficient per row");
  std::vector<HomFn> comps;
  comps.reserve(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != in_dim) throw DimensionError("hom map: row length differs from input dimension");
    comps.push_back(HomFn::linear(rows[j], eta_coeffs.empty() ? 0.0 : eta_coeffs[j]));
  }
  return HomMap(in_dim, std::move(comps));
}

HomMap HomMap::young_projection(std::size_t dim) {
  std::vector<HomFn> comps;
  for (std::size_t j = 0; j < dim; ++j) {
    comps.push_back(HomFn::raw(
        dim, [j](std::size_t, std::span<const double> xi, double eta) { return eta > 0.0 ? xi[j] : 0.0; },
        1.0, {0.0}, "psi0_" + std::to_string(j)));
  }
  return HomMap(dim, std::move(comps));
}

void HomMap::apply(std::size_t cell, std::span<const double> xi, double eta, std::span<double> out) const {
  if (xi.size() != in_dim_ || out.size() != components_.size())
    throw DimensionError("hom map applied with wrong dimensions");
  for (std::size_t j = 0; j < components_.size(); ++j) {
    const double v = eval_node(components_[j].node(), cell, xi, eta);
    if (!std::isfinite(v)) throw Error("hom map component evaluated to a non-finite value");
    out[j] = v;
  }
}

}  // namespace gymlab
