#include <cmath>
#include <numbers>

#include "gymlab/gym.hpp"

namespace gymlab {

Battery::Battery(std::vector<HomFn> members, std::size_t cells) : members_(std::move(members)) {
  if (members_.empty()) return;
  const std::size_t d = members_.front().dim();
  const auto grid = DirectionGrid::sphere(d + 1, d + 1 <= 2 ? 32 : 6);
  for (std::size_t i = 0; i < members_.size(); ++i) {
    const auto& f = members_[i];
    if (f.dim() != d) throw DimensionError("battery members have different Xi dimensions");
    const auto rep = classify(f, 256, 1000 + i, cells);
    if (!(rep.homogeneity_defect <= 1e-10))
      throw ValidationError("battery member " + std::to_string(i) + " is not one-homogeneous");
    if (hom_norm(f, grid, cells) > 1.0 + 1e-9)
      throw ValidationError("battery member " + std::to_string(i) + " has hom_norm above 1");
  }
}

double Battery::weight(std::size_t i) const { return std::ldexp(1.0, -static_cast<int>(i)); }

Battery standard_battery(const SpaceModel& space, std::size_t dim, std::size_t count) {
  using std::numbers::pi;
  const std::size_t nc = space.cells();
  // smooth low-frequency fields of the normalized cell coordinate
  auto field = [&](auto fn) {
    std::vector<double> v(nc);
    for (std::size_t c = 0; c < nc; ++c) v[c] = fn(space.coordinate(c));
    return v;
  };
  auto along = [&](std::size_t j, const std::vector<double>& s) {
    std::vector<double> a(nc * dim, 0.0);
    for (std::size_t c = 0; c < nc; ++c) a[c * dim + j % dim] = s[c];
    return a;
  };
  auto unit = [&](std::size_t j, double sign) {
    Vec a(dim, 0.0);
    a[j % dim] = sign;
    return a;
  };
  const auto cos1 = field([](double s) { return std::cos(pi * s); });
  const auto sin1 = field([](double s) { return std::sin(pi * s); });
  const auto cos2 = field([](double s) { return std::cos(2 * pi * s); });
  const auto sin2 = field([](double s) { return std::sin(2 * pi * s); });
  const std::vector<double> zeros(nc, 0.0);
  const HomFn xi = HomFn::xi_norm(dim);
  const HomFn eta = HomFn::eta_part(dim);
  auto shear = [&](std::size_t j, double s) {
    // |xi + s eta e_j| / sqrt(2)
    std::vector<HomFn> comps;
    for (std::size_t k = 0; k < dim; ++k) {
      Vec a(dim, 0.0);
      a[k] = 1.0;
      comps.push_back(HomFn::linear(a, k == j % dim ? s : 0.0));
    }
    return (1.0 / std::sqrt(2.0)) * HomFn::compose(xi, HomMap(dim, comps));
  };

  std::vector<HomFn> all = {
      xi,
      HomFn::euclid_norm(dim),
      HomFn::positive_part(HomFn::linear(unit(0, 1.0), 0.0)),
      HomFn::positive_part(HomFn::linear(unit(0, -1.0), 0.0)),
      HomFn::linear(dim, along(0, cos1), zeros),
      HomFn::linear(dim, along(0, sin1), zeros),
      shear(0, -1.0),
      shear(0, 1.0),
      HomFn::min(xi, eta),
      0.8 * HomFn::positive_part(HomFn::linear(dim, along(0, cos2), field([](double s) {
                                                 return 0.5 * std::sin(2 * pi * s);
                                               }))),
      HomFn::positive_part(HomFn::linear(unit(1, 1.0), 0.0)),
      HomFn::linear(dim, along(1, cos1), zeros),
      0.5 * (xi + HomFn::linear(dim, along(0, sin2), zeros)),
      HomFn::max(HomFn::linear(dim, along(0, cos1), zeros), HomFn::linear(dim, along(1, sin1), zeros)),
      HomFn::linear(dim, std::vector<double>(nc * dim, 0.0), field([](double s) { return s; })),
      HomFn::min(HomFn::positive_part(HomFn::linear(unit(0, 1.0), 0.0)),
                 HomFn::positive_part(HomFn::linear(unit(0, -1.0), 1.0))),
      0.5 * (HomFn::euclid_norm(dim) - HomFn::linear(dim, along(0, sin1), zeros)),
      0.8 * HomFn::positive_part(HomFn::linear(dim, along(0, cos1), field([](double s) { return -0.5 * s; }))),
      shear(1, 1.0),
      HomFn::positive_part(HomFn::linear(dim, along(0, sin2), zeros)),
  };
  if (count > all.size()) throw PreconditionError("standard_battery: at most 20 members");
  all.erase(all.begin() + static_cast<std::ptrdiff_t>(count), all.end());
  return Battery(std::move(all), nc);
}

}  // namespace gymlab
