#include "gymlab/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <iostream>

#include "gymlab/acceptance.hpp"

namespace gymlab::cli {

namespace fs = std::filesystem;
using io::Json;

const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::no_limit: return "no-limit";
    default: return "error";
  }
}

int exit_code(Status s) {
  switch (s) {
    case Status::pass: return 0;
    case Status::fail:
    case Status::no_limit: return 1;
    default: return 2;
  }
}

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"validate", "pair",    "norm",  "decompose", "bary",     "variation",
                                             "acmod",    "derivative", "density", "helly", "semicont", "suite"};
  return c;
}

namespace {

// ------------------------------------------------------------ field access
// Every accessor takes the dotted field path so parse errors can name it.

const Json* find(const Json& j, const std::string& key) {
  if (!j.is_object()) return nullptr;
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const Json& req(const Json& j, const std::string& path, const std::string& key) {
  const Json* v = find(j, key);
  if (!v) throw ParseError("missing field '" + join(path, key) + "'");
  return *v;
}

double number(const Json& j, const std::string& field) {
  try {
    return io::get_num(j, field);
  } catch (const Error&) {
    throw ParseError("field '" + field + "' must be a decimal number");
  }
}

double num_or(const Json& params, const std::string& key, double fallback) {
  const Json* v = find(params, key);
  return v ? number(*v, "params." + key) : fallback;
}

double positive(const Json& params, const std::string& key, double fallback) {
  const double v = num_or(params, key, fallback);
  if (!(v > 0.0)) throw ParseError("field 'params." + key + "' must be positive");
  return v;
}

std::vector<double> numbers(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError("field '" + field + "' must be an array");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
  return v;
}

int integer(const Json& j, const std::string& field) {
  if (!j.is_number_integer()) throw ParseError("field '" + field + "' must be an integer");
  return j.get<int>();
}

std::string f2s(double v) { return format_double(v); }

// ------------------------------------------------------------ context

struct Context {
  const Scenario& sc;
  const Json& params;
  std::vector<std::string> schemas;
  Json resolutions = Json::object();

  explicit Context(const Scenario& s)
      : sc(s), params(find(s.body, "params") ? *find(s.body, "params") : empty()) {
    if (!params.is_object()) throw ParseError("field 'params' must be an object");
  }

  static const Json& empty() {
    static const Json e = Json::object();
    return e;
  }

  std::string path(const std::string& key) const {
    const Json& v = req(req(sc.body, "", "inputs"), "inputs", key);
    if (!v.is_string()) throw ParseError("field 'inputs." + key + "' must be a file path");
    return resolve(v.get<std::string>(), "inputs." + key);
  }

  std::string resolve(const std::string& p, const std::string& field) const {
    fs::path f(p);
    if (f.is_relative()) f = fs::path(sc.base_dir) / f;
    if (!fs::exists(f)) throw ParseError("field '" + field + "': file '" + p + "' does not exist");
    return f.string();
  }

  bool has_input(const std::string& key) const {
    const Json* in = find(sc.body, "inputs");
    return in && find(*in, key);
  }

  Json load(const std::string& file, const std::string& schema) {
    Json j = io::read_json(file);
    io::expect_schema(j, schema);
    if (std::find(schemas.begin(), schemas.end(), schema) == schemas.end()) schemas.push_back(schema);
    return j;
  }

  DiscreteGYM gym(const std::string& key) { return io::gym_from_json(load(path(key), "gym.v1")); }
  SystemGYM system(const std::string& key) { return io::system_from_json(load(path(key), "sgy.v1")); }

  std::vector<SystemGYM> sequence(const std::string& key) {
    const Json& list = req(req(sc.body, "", "inputs"), "inputs", key);
    if (!list.is_array() || list.empty()) throw ParseError("field 'inputs." + key + "' must be a nonempty list of files");
    std::vector<SystemGYM> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string field = "inputs." + key + "[" + std::to_string(i) + "]";
      if (!list[i].is_string()) throw ParseError("field '" + field + "' must be a file path");
      out.push_back(io::system_from_json(load(resolve(list[i].get<std::string>(), field), "sgy.v1")));
    }
    return out;
  }

  /// "standard" | {"name": "standard", "count": n} | {"members": [homfn.v1, ...]}
  Battery battery(const SpaceModel& X, std::size_t dim) {
    const Json* b = find(sc.body, "battery");
    if (!b || (b->is_string() && *b == "standard")) {
      resolutions["battery"] = "standard:20";
      return standard_battery(X, dim);
    }
    if (b->is_string()) throw ParseError("field 'battery': unknown built-in battery '" + b->get<std::string>() + "'");
    if (const Json* members = find(*b, "members")) {
      if (!members->is_array() || members->empty()) throw ParseError("field 'battery.members' must be a nonempty list");
      std::vector<HomFn> fs;
      for (const auto& m : *members) fs.push_back(io::homfn_from_json(m, X.cells()));
      if (std::find(schemas.begin(), schemas.end(), "homfn.v1") == schemas.end()) schemas.push_back("homfn.v1");
      for (std::size_t i = 0; i < fs.size(); ++i)
        if (fs[i].dim() != dim)
          throw DimensionError("battery member " + std::to_string(i) + " has Xi dimension " +
                               std::to_string(fs[i].dim()) + ", the measure has " + std::to_string(dim));
      resolutions["battery"] = "explicit:" + std::to_string(fs.size());
      return Battery(std::move(fs), X.cells());
    }
    const Json& name = req(*b, "battery", "name");
    if (name != "standard") throw ParseError("field 'battery.name': unknown built-in battery");
    const int count = find(*b, "count") ? integer(*find(*b, "count"), "battery.count") : 20;
    if (count < 1 || count > 20) throw ParseError("field 'battery.count' must lie in 1..20");
    resolutions["battery"] = "standard:" + std::to_string(count);
    return standard_battery(X, dim, std::size_t(count));
  }

  /// params.h as homfn.v1, defaulting to |xi|.
  HomFn h(std::size_t dim, std::size_t cells) {
    const Json* v = find(params, "h");
    if (!v) return HomFn::xi_norm(dim);
    auto f = io::homfn_from_json(*v, cells);
    if (f.dim() != dim) throw DimensionError("params.h has the wrong Xi dimension");
    return f;
  }

  std::vector<double> times(const std::string& key) { return numbers(req(params, "params", key), "params." + key); }
};

Verdict verdict(Status s, Json payload = Json::object()) {
  Verdict v;
  v.status = s;
  v.payload = std::move(payload);
  return v;
}

/// Optional comparison against params.expected (scalar) within params.tol.
Status check_expected(const Context& ctx, double value, Json& payload) {
  const Json* e = find(ctx.params, "expected");
  if (!e) return Status::pass;
  const double expected = number(*e, "params.expected");
  const double tol = positive(ctx.params, "tol", 1e-12);
  const double r = std::abs(value - expected);
  payload["expected"] = io::num(expected);
  payload["residual"] = io::num(r);
  payload["tol"] = io::num(tol);
  return r <= tol ? Status::pass : Status::fail;
}

// ------------------------------------------------------------ commands

RunOutput cmd_validate(Context& ctx) {
  const DiscreteGYM mu = ctx.has_input("system") ? ctx.system("system").master() : ctx.gym("measure");
  const auto rep = validate(mu);
  io::CsvWriter csv({"cell", "lambda", "defect"});
  for (std::size_t c = 0; c < mu.space().cells(); ++c)
    csv.row({std::to_string(c), f2s(mu.space().measure(c)), f2s(rep.cell_defects[c])});
  Json p = {{"max_projection_defect", io::num(rep.max_projection_defect)},
            {"negative_eta_atoms", rep.negative_eta_atoms},
            {"noncanonical_atoms", rep.noncanonical_atoms}};
  return {verdict(rep.passed ? Status::pass : Status::fail, p), csv.str(), "validate.csv", {}};
}

RunOutput cmd_pair(Context& ctx) {
  const auto mu = ctx.gym("measure");
  const auto battery = ctx.battery(mu.space(), mu.dim());
  const auto values = battery_pairings(battery, mu);
  io::CsvWriter csv({"member", "weight", "value"});
  Json vals = Json::array();
  for (std::size_t i = 0; i < values.size(); ++i) {
    csv.row({std::to_string(i), f2s(battery.weight(i)), f2s(values[i])});
    vals.push_back(io::num(values[i]));
  }
  Json p = {{"values", vals}};
  Status s = Status::pass;
  if (ctx.has_input("reference")) {
    const auto ref = ctx.gym("reference");
    const double gap = wstar_gap(mu, ref, battery);
    const double tol = positive(ctx.params, "tol", 1e-12);
    p["wstar_gap"] = io::num(gap);
    p["tol"] = io::num(tol);
    s = gap <= tol ? Status::pass : Status::fail;
  }
  return {verdict(s, p), csv.str(), "pair.csv", {}};
}

RunOutput cmd_norm(Context& ctx) {
  const DiscreteGYM mu =
      ctx.has_input("density") ? lift_measure(io::measure_from_json(ctx.load(ctx.path("density"), "measure.v1")))
                               : ctx.gym("measure");
  const double n = norm_star(mu);
  io::CsvWriter csv({"quantity", "value"});
  csv.row({"norm_star", f2s(n)});
  csv.row({"eta_mass", f2s(pair(HomFn::eta_part(mu.dim()), mu))});
  csv.row({"lambda_total", f2s(mu.space().total_measure())});
  Json p = {{"norm_star", io::num(n)}};
  const Status s = check_expected(ctx, n, p);
  return {verdict(s, p), csv.str(), "norm.csv", {}};
}

RunOutput cmd_decompose(Context& ctx) {
  const auto mu = ctx.gym("measure");
  const auto parts = decompose(mu);
  const std::size_t d = mu.dim();
  std::vector<std::string> header = {"part", "cell", "mass"};
  for (std::size_t j = 0; j < d; ++j) header.push_back("coord_" + std::to_string(j));
  io::CsvWriter csv(header);
  for (const auto& a : parts.young.atoms()) {
    std::vector<std::string> r = {"young", std::to_string(a.cell), f2s(a.mass)};
    for (double x : a.xi) r.push_back(f2s(x));
    csv.row(r);
  }
  for (const auto& a : parts.varifold.atoms()) {
    std::vector<std::string> r = {"varifold", std::to_string(a.cell), f2s(a.mass)};
    for (double x : a.direction) r.push_back(f2s(x));
    csv.row(r);
  }
  const auto battery = ctx.battery(mu.space(), d);
  const double residual = wstar_gap(mu, recompose(parts.young, parts.varifold), battery);
  const double tol = positive(ctx.params, "tol", 1e-12);
  Json p = {{"young_atoms", parts.young.atoms().size()},
            {"varifold_atoms", parts.varifold.atoms().size()},
            {"reconstruction_residual", io::num(residual)},
            {"tol", io::num(tol)}};
  return {verdict(residual <= tol ? Status::pass : Status::fail, p), csv.str(), "decompose.csv", {}};
}

RunOutput cmd_bary(Context& ctx) {
  const auto mu = ctx.gym("measure");
  const auto b = barycentre(mu);
  const std::size_t d = mu.dim();
  std::vector<std::string> header = {"cell"};
  for (std::size_t j = 0; j < d; ++j) header.push_back("ac_" + std::to_string(j));
  for (std::size_t j = 0; j < d; ++j) header.push_back("singular_" + std::to_string(j));
  io::CsvWriter csv(header);
  for (std::size_t c = 0; c < mu.space().cells(); ++c) {
    std::vector<std::string> r = {std::to_string(c)};
    for (std::size_t j = 0; j < d; ++j) r.push_back(f2s(b.ac(c)[j]));
    for (std::size_t j = 0; j < d; ++j) r.push_back(f2s(b.singular(c)[j]));
    csv.row(r);
  }
  Json p = {{"flat_norm", io::num(flat_norm(b))}};
  return {verdict(Status::pass, p), csv.str(), "bary.csv", {{"barycentre.json", io::to_json(b)}}};
}

RunOutput cmd_variation(Context& ctx) {
  const auto sys = ctx.system("system");
  const auto h = ctx.h(sys.dim(), sys.space().cells());
  const double a = num_or(ctx.params, "a", sys.grid().front());
  const double b = num_or(ctx.params, "b", sys.grid().back());
  if (!(a <= b)) throw ParseError("fields 'params.a' and 'params.b' must satisfy a <= b");
  const auto rep = variation(sys, h, a, b);
  io::CsvWriter csv({"step", "t_start", "t_end", "contribution"});
  for (std::size_t i = 0; i < rep.contributions.size(); ++i)
    csv.row({std::to_string(i), f2s(rep.partition[i]), f2s(rep.partition[i + 1]), f2s(rep.contributions[i])});
  Json p = {{"variation", io::num(rep.value)}, {"a", io::num(a)}, {"b", io::num(b)}};
  const Status s = check_expected(ctx, rep.value, p);
  return {verdict(s, p), csv.str(), "variation.csv", {}};
}

RunOutput cmd_acmod(Context& ctx) {
  const auto sys = ctx.system("system");
  const auto deltas = ctx.times("deltas");
  io::CsvWriter csv({"delta", "modulus"});
  Json vals = Json::array();
  double prev = -kInf, prev_delta = -kInf;
  bool monotone = true;
  for (double d : deltas) {
    if (!(d >= 0.0)) throw ParseError("field 'params.deltas' must hold nonnegative values");
    const double m = ac_modulus(sys, d);
    if (d >= prev_delta && m < prev) monotone = false;
    prev = m;
    prev_delta = d;
    csv.row({f2s(d), f2s(m)});
    vals.push_back(io::num(m));
  }
  Json p = {{"moduli", vals}, {"monotone", monotone}};
  return {verdict(monotone ? Status::pass : Status::fail, p), csv.str(), "acmod.csv", {}};
}

std::unique_ptr<SystemOracle> make_oracle(Context& ctx) {
  if (ctx.has_input("system")) return std::make_unique<GridOracle>(ctx.system("system"));
  const Json& o = req(ctx.params, "params", "oracle");
  const std::string kind = req(o, "params.oracle", "kind").get<std::string>();
  SpacePtr X;
  try {
    X = io::space_from_json(req(o, "params.oracle", "space"));
  } catch (const ValidationError& e) {
    throw ParseError(std::string("field 'params.oracle.space': ") + e.what());
  }
  const double lo = number(req(o, "params.oracle", "lo"), "params.oracle.lo");
  const double hi = number(req(o, "params.oracle", "hi"), "params.oracle.hi");
  ctx.resolutions["cells"] = X->cells();
  if (kind == "oscillation") {
    PeriodicProfile w = PeriodicProfile::square_wave();
    if (const Json* pr = find(o, "profile")) {
      w.breaks = numbers(req(*pr, "params.oracle.profile", "breaks"), "params.oracle.profile.breaks");
      w.values = numbers(req(*pr, "params.oracle.profile", "values"), "params.oracle.profile.values");
    }
    const int cap = find(o, "max_pieces") ? integer(*find(o, "max_pieces"), "params.oracle.max_pieces") : 64;
    return std::make_unique<PathOracle>(oscillation_path(w, nullptr, X, lo, hi, std::size_t(std::max(cap, 1))));
  }
  if (kind == "linear") {
    const int dim = integer(req(o, "params.oracle", "dim"), "params.oracle.dim");
    std::vector<double> p0;
    if (const Json* v = find(o, "p0")) p0 = numbers(*v, "params.oracle.p0");
    return std::make_unique<PathOracle>(
        linear_path(X, std::size_t(dim), p0, numbers(req(o, "params.oracle", "v"), "params.oracle.v"), lo, hi));
  }
  if (kind == "jump") {
    const int cell = integer(req(o, "params.oracle", "cell"), "params.oracle.cell");
    return std::make_unique<PathOracle>(jump_path(X, numbers(req(o, "params.oracle", "mass"), "params.oracle.mass"),
                                                  std::size_t(cell),
                                                  number(req(o, "params.oracle", "t_jump"), "params.oracle.t_jump"),
                                                  lo, hi));
  }
  throw ParseError("field 'params.oracle.kind': unknown oracle '" + kind + "'");
}

std::vector<double> eps_schedule(const Context& ctx) {
  const Json& e = req(ctx.params, "params", "eps");
  if (e.is_array()) return numbers(e, "params.eps");
  const int first = integer(req(e, "params.eps", "first"), "params.eps.first");
  const int last = integer(req(e, "params.eps", "last"), "params.eps.last");
  if (first > last) throw ParseError("field 'params.eps': first must not exceed last");
  std::vector<double> out;
  for (int j = first; j <= last; ++j) out.push_back(std::ldexp(1.0, -j));
  return out;
}

RunOutput cmd_derivative(Context& ctx) {
  const auto oracle = make_oracle(ctx);
  const double t0 = number(req(ctx.params, "params", "t0"), "params.t0");
  const auto eps = eps_schedule(ctx);
  const double tol = positive(ctx.params, "tol", 1e-2);
  ctx.resolutions["eps_count"] = eps.size();
  const auto battery = ctx.battery(*oracle->space(), oracle->dim());
  const auto rep = derivative_estimate(*oracle, t0, eps, battery, tol);

  io::CsvWriter csv({"eps", "side", "member", "value"});
  for (std::size_t i = 0; i < rep.eps.size(); ++i)
    for (std::size_t m = 0; m < battery.size(); ++m) {
      csv.row({f2s(rep.eps[i]), "left", std::to_string(m), f2s(rep.left[i][m])});
      csv.row({f2s(rep.eps[i]), "right", std::to_string(m), f2s(rep.right[i][m])});
    }
  Json res = Json::array();
  for (double r : rep.residuals) res.push_back(io::num(r));
  Json p = {{"converged", rep.converged}, {"residuals", res}, {"tol", io::num(tol)}};
  if (!rep.converged) {
    p["witness"] = rep.witness;
    return {verdict(Status::no_limit, p), csv.str(), "derivative.csv", {}};
  }
  Json est = Json::array();
  for (double v : battery_pairings(battery, *rep.estimate)) est.push_back(io::num(v));
  p["estimate_pairings"] = est;

  std::optional<DiscreteGYM> target;
  if (ctx.has_input("target")) {
    target = ctx.gym("target");
  } else if (const Json* ty = find(ctx.params, "target_young")) {
    std::vector<Vec> values;
    const Json& vs = req(*ty, "params.target_young", "values");
    if (!vs.is_array()) throw ParseError("field 'params.target_young.values' must be a list");
    for (std::size_t i = 0; i < vs.size(); ++i)
      values.push_back(numbers(vs[i], "params.target_young.values[" + std::to_string(i) + "]"));
    const auto probs = numbers(req(*ty, "params.target_young", "probs"), "params.target_young.probs");
    target = lift_young(YoungPart::uniform_mixture(oracle->space(), values, probs));
  }
  Status s = Status::pass;
  if (target) {
    const double gap = wstar_gap(*rep.estimate, *target, battery);
    const double ttol = positive(ctx.params, "target_tol", tol);
    p["target_gap"] = io::num(gap);
    p["target_tol"] = io::num(ttol);
    if (!(gap <= ttol)) s = Status::fail;
  }
  return {verdict(s, p), csv.str(), "derivative.csv", {{"estimate.json", io::to_json(*rep.estimate)}}};
}

DensitySchedule schedule_of(const Context& ctx) {
  const Json& e = req(ctx.params, "params", "schedule");
  if (e.is_array()) return DensitySchedule(numbers(e, "params.schedule"));
  const int first = integer(req(e, "params.schedule", "first"), "params.schedule.first");
  const int last = integer(req(e, "params.schedule", "last"), "params.schedule.last");
  if (first > last) throw ParseError("field 'params.schedule': first must not exceed last");
  return DensitySchedule::dyadic(first, last);
}

RunOutput cmd_density(Context& ctx) {
  const auto mu = ctx.gym("measure");
  const auto schedule = schedule_of(ctx);
  const double rf = positive(ctx.params, "residual_factor", 8.0);
  const double nf = positive(ctx.params, "norm_factor", 5.0);
  const auto battery = ctx.battery(mu.space(), mu.dim());
  const auto target = battery_pairings(battery, mu);
  const double ns = norm_star(mu);
  ctx.resolutions["levels"] = schedule.size();

  io::CsvWriter csv({"level", "sigma", "battery_residual", "norm_gap", "min_concentration"});
  bool ok = true;
  std::optional<StepFunction> last;
  for (std::size_t n = 0; n < schedule.size(); ++n) {
    const double sigma = schedule[n];
    auto res = density_approximate(mu, n, schedule);
    const auto got = battery_pairings(battery, res.u.lift());
    double r = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) r = std::max(r, std::abs(got[i] - target[i]));
    const double ng = std::abs(res.u.lifted_norm() - ns);
    ok = ok && r <= rf * sigma && ng <= nf * sigma && res.min_concentration_value >= 1.0 / sigma;
    csv.row({std::to_string(n), f2s(sigma), f2s(r), f2s(ng), f2s(res.min_concentration_value)});
    last = std::move(res.u);
  }
  Json p = {{"levels", schedule.size()}, {"residual_factor", io::num(rf)}, {"norm_factor", io::num(nf)}};
  return {verdict(ok ? Status::pass : Status::fail, p), csv.str(), "density.csv",
          {{"approximant.json", io::to_json(*last)}}};
}

struct Bounds {
  double C = 0.0, C_star = 0.0;
};

Bounds sequence_bounds(const std::vector<SystemGYM>& seq) {
  Bounds b;
  for (const auto& s : seq) {
    b.C = std::max(b.C, variation(s, s.grid().front(), s.grid().back()).value);
    const double t0[] = {s.grid().front()};
    b.C_star = std::max(b.C_star, norm_star(marginal(s, t0)));
  }
  return b;
}

RunOutput cmd_helly(Context& ctx) {
  const auto seq = ctx.sequence("sequence");
  const auto D = ctx.times("D");
  const double tol = positive(ctx.params, "tol", 1e-6);
  const Bounds auto_b = sequence_bounds(seq);
  const double C = num_or(ctx.params, "C", auto_b.C);
  const double C_star = num_or(ctx.params, "C_star", auto_b.C_star);
  const auto battery = ctx.battery(seq.front().space(), seq.front().dim());
  const auto rep = helly_extract(seq, battery, D, tol, C, C_star);

  io::CsvWriter csv({"functional", "member", "times", "residual", "limit"});
  for (const auto& f : rep.functionals) {
    std::string ts;
    for (std::size_t i = 0; i < f.times.size(); ++i) ts += (i ? " " : "") + f2s(f.times[i]);
    csv.row({f.id, std::to_string(f.member), ts, f2s(f.residual), f2s(f.limit)});
  }
  Json sel = Json::array();
  for (auto k : rep.selected) sel.push_back(k);
  Json p = {{"selected", sel},
            {"max_residual", io::num(rep.max_residual)},
            {"tol", io::num(tol)},
            {"C", io::num(C)},
            {"C_star", io::num(C_star)},
            {"limit_assembled", rep.limit.has_value()}};
  if (!rep.limit) return {verdict(Status::no_limit, p), csv.str(), "helly.csv", {}};
  p["limit_variation"] = io::num(rep.limit_variation);
  p["variation_bound"] = rep.variation_bound;
  p["norm_bound"] = rep.norm_bound;
  const bool ok = rep.max_residual <= tol && rep.variation_bound && rep.norm_bound;
  return {verdict(ok ? Status::pass : Status::fail, p), csv.str(), "helly.csv", {{"limit.json", io::to_json(*rep.limit)}}};
}

RunOutput cmd_semicont(Context& ctx) {
  const auto seq = ctx.sequence("sequence");
  const auto limit = ctx.system("limit");
  const auto D = ctx.times("D");
  const double tol = positive(ctx.params, "tol", 1e-9);
  const auto h = ctx.h(limit.dim(), limit.space().cells());
  const auto battery = ctx.battery(limit.space(), limit.dim());
  const double margin = semicontinuity_margin(seq, limit, h, D, battery, tol);
  io::CsvWriter csv({"element", "variation"});
  const auto& g = limit.grid();
  for (std::size_t k = 0; k < seq.size(); ++k)
    csv.row({std::to_string(k), f2s(variation(seq[k], h, g.front(), g.back()).value)});
  csv.row({"limit", f2s(variation(limit, h, g.front(), g.back()).value)});
  Json p = {{"margin", io::num(margin)}, {"tol", io::num(tol)}};
  return {verdict(margin >= -tol ? Status::pass : Status::fail, p), csv.str(), "semicont.csv", {}};
}

RunOutput cmd_suite(Context& ctx) {
  acceptance::Options opt;
  opt.seed = ctx.sc.seed;
  opt.tolerance_scale = num_or(ctx.params, "tolerance_scale", 1.0);
  if (!(opt.tolerance_scale >= 0.0)) throw ParseError("field 'params.tolerance_scale' must be nonnegative");
  std::vector<std::string> ids = acceptance::ids();
  if (const Json* c = find(ctx.params, "criteria")) {
    if (!c->is_array()) throw ParseError("field 'params.criteria' must be a list");
    ids = c->get<std::vector<std::string>>();
  }
  // Timing goes to stderr only so the report stays byte-identical across runs.
  io::CsvWriter csv({"id", "title", "status", "value", "tolerance", "detail"});
  Status overall = Status::pass;
  Json failed = Json::array();
  for (const auto& id : ids) {
    acceptance::Result r;
    try {
      r = acceptance::run(id, opt);
    } catch (const std::exception& e) {
      csv.row({id, "", "error", "", "", e.what()});
      overall = Status::error;
      failed.push_back(id);
      continue;
    }
    std::cerr << r.id << " " << (r.passed ? "pass" : "fail") << " " << f2s(r.seconds) << " s\n";
    csv.row({r.id, r.title, r.passed ? "pass" : "fail", f2s(r.value), f2s(r.tolerance), r.detail});
    if (!r.passed) {
      failed.push_back(id);
      if (overall == Status::pass) overall = Status::fail;
    }
  }
  Json p = {{"criteria", ids.size()}, {"failed", failed}, {"tolerance_scale", io::num(opt.tolerance_scale)}};
  return {verdict(overall, p), csv.str(), "suite.csv", {}};
}

}  // namespace

// ------------------------------------------------------------------ entry

Scenario parse_scenario(const Json& j, const std::string& base_dir, const std::string& command) {
  if (!j.is_object()) throw ParseError("scenario must be a JSON object");
  const Json* schema = find(j, "schema");
  if (!schema) throw ParseError("missing field 'schema'");
  if (*schema != "scenario.v1") throw ParseError("field 'schema' must be 'scenario.v1'");
  Scenario sc;
  sc.body = j;
  sc.base_dir = base_dir;
  if (const Json* c = find(j, "command")) {
    if (!c->is_string()) throw ParseError("field 'command' must be a string");
    sc.command = c->get<std::string>();
    if (!command.empty() && sc.command != command)
      throw ParseError("field 'command' is '" + sc.command + "' but '" + command + "' was requested");
  } else {
    sc.command = command;
  }
  if (std::find(commands().begin(), commands().end(), sc.command) == commands().end())
    throw ParseError("field 'command': unknown command '" + sc.command + "'");
  if (const Json* s = find(j, "seed")) {
    const double v = number(*s, "seed");
    if (!(v >= 0.0) || v != std::floor(v)) throw ParseError("field 'seed' must be a nonnegative integer");
    sc.seed = static_cast<std::uint64_t>(v);
  }
  if (const char* env = std::getenv("SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (!*env || *end) throw ParseError("environment variable SEED must be a nonnegative integer");
    sc.seed = v;
  }
  return sc;
}

Scenario load_scenario(const std::string& path, const std::string& command) {
  if (!fs::exists(path)) throw ParseError("scenario file '" + path + "' does not exist");
  Json j;
  try {
    j = io::read_json(path);
  } catch (const std::exception& e) {
    throw ParseError("scenario file is not valid JSON: " + std::string(e.what()));
  }
  return parse_scenario(j, fs::path(path).parent_path().string(), command);
}

RunOutput run(const Scenario& sc) {
  Context ctx(sc);
  RunOutput out;
  const std::string& c = sc.command;
  if (c == "validate") out = cmd_validate(ctx);
  else if (c == "pair") out = cmd_pair(ctx);
  else if (c == "norm") out = cmd_norm(ctx);
  else if (c == "decompose") out = cmd_decompose(ctx);
  else if (c == "bary") out = cmd_bary(ctx);
  else if (c == "variation") out = cmd_variation(ctx);
  else if (c == "acmod") out = cmd_acmod(ctx);
  else if (c == "derivative") out = cmd_derivative(ctx);
  else if (c == "density") out = cmd_density(ctx);
  else if (c == "helly") out = cmd_helly(ctx);
  else if (c == "semicont") out = cmd_semicont(ctx);
  else out = cmd_suite(ctx);
  Json schemas = Json::array();
  for (const auto& s : ctx.schemas) schemas.push_back(s);
  out.verdict.provenance = {{"scenario_schema", "scenario.v1"},
                            {"command", c},
                            {"seed", std::to_string(sc.seed)},
                            {"input_schemas", schemas},
                            {"resolutions", ctx.resolutions}};
  return out;
}

namespace {

Json verdict_json(const Verdict& v) {
  Json j = {{"schema", "verdict.v1"}, {"status", to_string(v.status)}, {"payload", v.payload},
            {"provenance", v.provenance}};
  if (!v.message.empty()) j["message"] = v.message;
  return j;
}

}  // namespace

int main_entry(const std::string& command, const std::optional<std::string>& scenario_path,
               const std::optional<std::string>& out_dir) {
  RunOutput out;
  std::string dir = out_dir.value_or(".");
  try {
    Scenario sc;
    if (scenario_path) {
      sc = load_scenario(*scenario_path, command);
      if (!out_dir)
        if (const Json* o = find(sc.body, "out")) {
          if (!o->is_string()) throw ParseError("field 'out' must be a directory path");
          dir = (fs::path(sc.base_dir) / o->get<std::string>()).string();
        }
    } else if (command == "suite") {
      sc = parse_scenario(Json{{"schema", "scenario.v1"}, {"command", "suite"}}, ".", command);
    } else {
      throw ParseError("--scenario is required for '" + command + "'");
    }
    out = run(sc);
  } catch (const std::exception& e) {
    out = {};
    out.verdict.status = Status::error;
    out.verdict.message = e.what();
    out.verdict.provenance = {{"scenario_schema", "scenario.v1"}, {"command", command}};
    std::cerr << "gymlab: " << e.what() << "\n";
  }
  try {
    fs::create_directories(dir);
    if (!out.csv_name.empty()) {
      std::ofstream f(fs::path(dir) / out.csv_name, std::ios::binary);
      f << out.csv;
    }
    for (const auto& [name, j] : out.artifacts) io::write_json((fs::path(dir) / name).string(), j);
    io::write_json((fs::path(dir) / "verdict.json").string(), verdict_json(out.verdict));
  } catch (const std::exception& e) {
    std::cerr << "gymlab: cannot write outputs: " << e.what() << "\n";
    return 2;
  }
  std::cout << command << ": " << to_string(out.verdict.status);
  if (!out.verdict.message.empty()) std::cout << " (" << out.verdict.message << ")";
  std::cout << "\n";
  return exit_code(out.verdict.status);
}

}  // namespace gymlab::cli
