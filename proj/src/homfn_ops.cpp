#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "gymlab/homfn.hpp"
#include "gymlab/kernels.hpp"

namespace gymlab {

namespace {

std::size_t cell_count(const HomFn& f, std::size_t cells) {
  if (cells != 0 && f.cells() != 0 && cells != f.cells())
    throw DimensionError("requested cell count differs from the test function's fields");
  return std::max<std::size_t>({cells, f.cells(), 1});
}

/// Orthonormal basis of the tangent space of the unit sphere at e.
std::vector<Vec> tangent_basis(std::span<const double> e) {
  const std::size_t d = e.size();
  std::vector<Vec> basis;
  for (std::size_t k = 0; k < d && basis.size() + 1 < d; ++k) {
    Vec v(d, 0.0);
    v[k] = 1.0;
    const double pe = dot(v, e);
    for (std::size_t i = 0; i < d; ++i) v[i] -= pe * e[i];
    for (const auto& b : basis) {
      const double pb = dot(v, b);
      for (std::size_t i = 0; i < d; ++i) v[i] -= pb * b[i];
    }
    const double n = norm2(v);
    if (n < 1e-8) continue;
    for (double& x : v) x /= n;
    basis.push_back(std::move(v));
  }
  return basis;
}

TangentialCurvature curvature_at_step(const HomFn& f, const DirectionGrid& sphere, std::size_t nc, double h) {
  const std::size_t d = f.dim();
  TangentialCurvature out{-kInf, kInf};
  Vec p(d);
  auto at = [&](std::size_t cell, std::span<const double> e, const Vec& t1, double s1, const Vec& t2, double s2) {
    for (std::size_t i = 0; i < d; ++i) p[i] = e[i] + s1 * t1[i] + s2 * t2[i];
    const double v = f(cell, p, 0.0);
    if (!std::isfinite(v)) throw Error("convex_split: f is not finite near the sphere");
    return v;
  };
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t g = 0; g < sphere.size(); ++g) {
      const auto e = sphere[g];
      const auto basis = tangent_basis(e);
      const std::size_t m = basis.size();
      Eigen::MatrixXd hess(m, m);
      const Vec zero(d, 0.0);
      const double f0 = at(c, e, zero, 0.0, zero, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        hess(i, i) = (at(c, e, basis[i], h, zero, 0.0) - 2.0 * f0 + at(c, e, basis[i], -h, zero, 0.0)) / (h * h);
        for (std::size_t j = i + 1; j < m; ++j) {
          const double v = (at(c, e, basis[i], h, basis[j], h) - at(c, e, basis[i], h, basis[j], -h) -
                            at(c, e, basis[i], -h, basis[j], h) + at(c, e, basis[i], -h, basis[j], -h)) /
                           (4.0 * h * h);
          hess(i, j) = v;
          hess(j, i) = v;
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess, Eigen::EigenvaluesOnly);
      out.max_eigenvalue = std::max(out.max_eigenvalue, es.eigenvalues().maxCoeff());
      out.min_eigenvalue = std::min(out.min_eigenvalue, es.eigenvalues().minCoeff());
    }
  }
  return out;
}

}  // namespace

double hom_norm(const HomFn& f, const DirectionGrid& grid, std::size_t cells) {
  return kernels::grid_abs_max(f, grid, cell_count(f, cells));
}

HomFn moreau_yosida(const HomFn& f, double k, const DirectionGrid& search, std::size_t cells) {
  if (search.size() == 0) throw PreconditionError("moreau_yosida: empty search grid");
  if (search.dim() != f.dim() + 1) throw DimensionError("moreau_yosida: search grid must live in Xi x R");
  const double norm = hom_norm(f, search, cells);
  if (!(k > norm)) throw PreconditionError("moreau_yosida: k must exceed hom_norm(f)");
  HomFnNode n;
  n.kind = HomFn::Kind::kMoreauYosida;
  n.dim = f.dim();
  n.cells = f.cells();
  n.verified = f.verified();
  n.r = k;
  n.children = {f};
  n.grid = std::make_shared<const DirectionGrid>(search);
  return make_homfn(std::move(n));
}

TangentialCurvature tangential_curvature(const HomFn& f, const DirectionGrid& sphere, std::size_t cells,
                                         double step) {
  if (sphere.dim() != f.dim()) throw DimensionError("convex_split: sphere grid must live in Xi");
  const std::size_t nc = cell_count(f, cells);
  if (f.dim() == 1) {
    // no tangent space; convexity is decided by f(1) + f(-1) at the origin
    TangentialCurvature out{-kInf, kInf};
    for (std::size_t c = 0; c < nc; ++c) {
      const double s = f(c, Vec{1.0}, 0.0) + f(c, Vec{-1.0}, 0.0);
      out.max_eigenvalue = std::max(out.max_eigenvalue, s / 2.0);
      out.min_eigenvalue = std::min(out.min_eigenvalue, s / 2.0);
    }
    return out;
  }
  return curvature_at_step(f, sphere, nc, step);
}

ConvexSplit convex_split(const HomFn& f, const DirectionGrid& sphere, std::size_t cells) {
  constexpr double kStep = 1e-4;
  const auto curv = tangential_curvature(f, sphere, cells, kStep);
  // second differences carry roundoff of order eps |f| / kStep^2 ~ 1e-8 |f|
  double fmax = 0.0;
  for (std::size_t c = 0; c < cell_count(f, cells); ++c)
    for (std::size_t g = 0; g < sphere.size(); ++g) fmax = std::max(fmax, std::abs(f(c, sphere[g], 0.0)));
  const double kTol = 1e-6 * (1.0 + fmax);
  if (f.dim() > 1) {
    const auto coarse = tangential_curvature(f, sphere, cells, 2.0 * kStep);
    const double scale = 1.0 + std::max(std::abs(curv.max_eigenvalue), std::abs(curv.min_eigenvalue));
    if (std::abs(coarse.max_eigenvalue - curv.max_eigenvalue) > 1e-3 * scale ||
        std::abs(coarse.min_eigenvalue - curv.min_eigenvalue) > 1e-3 * scale)
      throw Error("convex_split: second differences do not settle; f is not C2 on the sphere");
  }
  const std::size_t d = f.dim();
  if (curv.max_eigenvalue <= kTol) {
    // -f is already convex
    return {0.0, HomFn::zero(d), HomFn::combination({-1.0}, {f})};
  }
  if (curv.min_eigenvalue >= -kTol) {
    return {0.0, f, HomFn::zero(d)};
  }
  const double c = 1.05 * curv.max_eigenvalue;
  const HomFn f1 = c * HomFn::xi_norm(d);
  return {c, f1, f1 - f};
}

ClassReport classify(const HomFn& f, std::size_t samples, std::uint64_t seed, std::size_t cells) {
  if (samples == 0) throw PreconditionError("classify: samples must be positive");
  const std::size_t nc = cell_count(f, cells);
  const std::size_t d = f.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  std::uniform_real_distribution<double> half(0.0, 2.0);
  std::uniform_real_distribution<double> scale(0.0, 10.0);
  std::uniform_real_distribution<double> small(-1e-3, 1e-3);
  std::uniform_int_distribution<std::size_t> pick(0, nc - 1);

  ClassReport rep;
  rep.samples = samples;
  Vec x1(d), x2(d), xs(d);
  auto fill = [&](Vec& v) {
    for (double& x : v) x = box(rng);
  };
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t c = pick(rng);
    fill(x1);
    const double e1 = half(rng);
    const double t = (s % 8 == 0) ? 0.0 : scale(rng);

    // homogeneity
    for (std::size_t i = 0; i < d; ++i) xs[i] = t * x1[i];
    const double ft = f(c, xs, t * e1);
    const double f1 = f(c, x1, e1);
    double hd = 0.0;
    if (t == 0.0) {
      hd = std::abs(ft);
    } else if (f1 == kInf || ft == kInf) {
      hd = (f1 == ft) ? 0.0 : kInf;
    } else {
      hd = std::abs(ft - t * f1);
    }
    rep.homogeneity_defect = std::max(rep.homogeneity_defect, hd);

    // Lipschitz in xi at fixed eta; alternate far and near pairs
    if (s % 2 == 0) {
      fill(x2);
    } else {
      for (std::size_t i = 0; i < d; ++i) x2[i] = x1[i] + small(rng);
    }
    const double f2 = f(c, x2, e1);
    for (std::size_t i = 0; i < d; ++i) xs[i] = x1[i] - x2[i];
    const double dist = norm2(xs);
    if (dist > 0.0 && f1 != kInf && f2 != kInf)
      rep.lipschitz = std::max(rep.lipschitz, std::abs(f1 - f2) / dist);

    // triangle inequality on the half-space eta >= 0
    const double e2 = half(rng);
    for (std::size_t i = 0; i < d; ++i) xs[i] = x1[i] + x2[i];
    const double fsum = f(c, xs, e1 + e2);
    const double g2 = f(c, x2, e2);
    if (f1 != kInf && g2 != kInf) {
      const double td = fsum == kInf ? kInf : fsum - f1 - g2;
      rep.triangle_defect = std::max(rep.triangle_defect, td);
    }
  }
  return rep;
}

}  // namespace gymlab
