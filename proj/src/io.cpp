#include "gymlab/io.hpp"

#include <fstream>
#include <sstream>

namespace gymlab::io {

Json num(double v) { return format_double(v); }

double get_num(const Json& j, const std::string& field) {
  if (j.is_string()) return parse_double(j.get<std::string>());
  if (j.is_number()) return j.get<double>();
  throw ValidationError("field '" + field + "' must be a decimal string");
}

Vec get_vec(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ValidationError("field '" + field + "' must be an array");
  Vec v;
  for (const auto& x : j) v.push_back(get_num(x, field));
  return v;
}

namespace {

const Json& at(const Json& j, const std::string& key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(ctx + ": missing field '" + key + "'");
  return j.at(key);
}

std::size_t get_count(const Json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw ValidationError("field '" + field + "' must be a nonnegative integer");
  return j.get<std::size_t>();
}

Json vec_json(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

const char* kind_name(HomFn::Kind k) {
  switch (k) {
    case HomFn::Kind::kLinear: return "linear";
    case HomFn::Kind::kEuclidNorm: return "euclid_norm";
    case HomFn::Kind::kXiNorm: return "xi_norm";
    case HomFn::Kind::kEtaPart: return "eta_part";
    case HomFn::Kind::kPositivePart: return "positive_part";
    case HomFn::Kind::kMin: return "min";
    case HomFn::Kind::kMax: return "max";
    case HomFn::Kind::kCombination: return "combination";
    case HomFn::Kind::kCompose: return "compose";
    case HomFn::Kind::kPrMoment: return "pr_moment";
    case HomFn::Kind::kRaw: return "raw";
    case HomFn::Kind::kMoreauYosida: return "moreau_yosida";
  }
  return "?";
}

Json node_json(const HomFn& f) {
  const auto& n = f.node();
  Json j;
  j["kind"] = kind_name(n.kind);
  j["dim"] = n.dim;
  switch (n.kind) {
    case HomFn::Kind::kLinear:
      j["a"] = vec_json(n.a);
      j["b"] = vec_json(n.b);
      break;
    case HomFn::Kind::kPrMoment:
      j["r"] = num(n.r);
      break;
    case HomFn::Kind::kCombination:
      j["coeffs"] = vec_json(n.coeffs);
      [[fallthrough]];
    case HomFn::Kind::kPositivePart:
    case HomFn::Kind::kMin:
    case HomFn::Kind::kMax: {
      Json kids = Json::array();
      for (const auto& c : n.children) kids.push_back(node_json(c));
      j["children"] = kids;
      break;
    }
    case HomFn::Kind::kCompose:
      j["children"] = Json::array({node_json(n.children.front())});
      j["map"] = to_json(*n.map);
      break;
    case HomFn::Kind::kMoreauYosida: {
      j["k"] = num(n.r);
      j["children"] = Json::array({node_json(n.children.front())});
      Json dirs = Json::array();
      for (std::size_t i = 0; i < n.grid->size(); ++i) dirs.push_back(vec_json((*n.grid)[i]));
      j["grid"] = {{"dim", n.grid->dim()}, {"covering_radius", num(n.grid->covering_radius())}, {"directions", dirs}};
      break;
    }
    case HomFn::Kind::kRaw:
      throw ValidationError("raw callbacks cannot be serialized (" + n.label + ")");
    default:
      break;
  }
  return j;
}

HomFn node_from_json(const Json& j, std::size_t cells_hint) {
  const std::string kind = at(j, "kind", "homfn").get<std::string>();
  const std::size_t dim = get_count(at(j, "dim", "homfn"), "dim");
  auto kids = [&] {
    std::vector<HomFn> out;
    for (const auto& c : at(j, "children", kind)) out.push_back(node_from_json(c, cells_hint));
    return out;
  };
  HomFn f = [&]() -> HomFn {
    if (kind == "linear") return HomFn::linear(dim, get_vec(at(j, "a", kind), "a"), get_vec(at(j, "b", kind), "b"));
    if (kind == "euclid_norm") return HomFn::euclid_norm(dim);
    if (kind == "xi_norm") return HomFn::xi_norm(dim);
    if (kind == "eta_part") return HomFn::eta_part(dim);
    if (kind == "pr_moment") return HomFn::pr_moment(dim, get_num(at(j, "r", kind), "r"));
    if (kind == "positive_part") return HomFn::positive_part(kids().at(0));
    if (kind == "min" || kind == "max") {
      auto k = kids();
      if (k.size() != 2) throw ValidationError(kind + ": needs two children");
      return kind == "min" ? HomFn::min(k[0], k[1]) : HomFn::max(k[0], k[1]);
    }
    if (kind == "combination") return HomFn::combination(get_vec(at(j, "coeffs", kind), "coeffs"), kids());
    if (kind == "compose") return HomFn::compose(kids().at(0), hommap_from_json(at(j, "map", kind)));
    if (kind == "moreau_yosida") {
      const auto& g = at(j, "grid", kind);
      std::vector<double> flat;
      for (const auto& d : at(g, "directions", "grid")) {
        const auto v = get_vec(d, "directions");
        flat.insert(flat.end(), v.begin(), v.end());
      }
      DirectionGrid grid(get_count(at(g, "dim", "grid"), "dim"), std::move(flat),
                         get_num(at(g, "covering_radius", "grid"), "covering_radius"));
      return moreau_yosida(kids().at(0), get_num(at(j, "k", kind), "k"), grid, cells_hint);
    }
    throw ValidationError("homfn: unknown node kind '" + kind + "'");
  }();
  if (f.dim() != dim) throw DimensionError("homfn: node '" + kind + "' declares the wrong dimension");
  return f;
}

}  // namespace

void expect_schema(const Json& j, const std::string& schema) {
  if (!j.is_object() || !j.contains("schema") || j.at("schema") != schema)
    throw ValidationError("expected schema '" + schema + "'");
}

// ------------------------------------------------------------------ spaces

Json to_json(const SpaceModel& X) {
  if (X.is_interval()) {
    const auto& I = X.as_interval();
    return {{"kind", "interval"}, {"lo", num(I.lo)}, {"hi", num(I.hi)}, {"cells", I.cells}};
  }
  const auto& P = X.as_point_cloud();
  const std::size_t n = P.labels.size();
  Json rows = Json::array();
  for (std::size_t i = 0; i < n; ++i) rows.push_back(vec_json(std::span<const double>(P.distances).subspan(i * n, n)));
  return {{"kind", "point_cloud"}, {"labels", P.labels}, {"weights", vec_json(P.weights)}, {"distances", rows}};
}

SpacePtr space_from_json(const Json& j) {
  const std::string kind = at(j, "kind", "space").get<std::string>();
  if (kind == "interval")
    return make_space(SpaceModel::interval(get_num(at(j, "lo", "space"), "lo"), get_num(at(j, "hi", "space"), "hi"),
                                           get_count(at(j, "cells", "space"), "cells")));
  if (kind == "point_cloud") {
    std::vector<std::string> labels = at(j, "labels", "space").get<std::vector<std::string>>();
    std::vector<double> dist;
    for (const auto& row : at(j, "distances", "space")) {
      const auto v = get_vec(row, "distances");
      dist.insert(dist.end(), v.begin(), v.end());
    }
    return make_space(SpaceModel::point_cloud(std::move(labels), get_vec(at(j, "weights", "space"), "weights"),
                                              std::move(dist)));
  }
  throw ValidationError("space: unknown kind '" + kind + "'");
}

// ----------------------------------------------------------- test functions

Json to_json(const HomFn& f) { return {{"schema", "homfn.v1"}, {"node", node_json(f)}}; }

HomFn homfn_from_json(const Json& j, std::size_t cells_hint) {
  expect_schema(j, "homfn.v1");
  return node_from_json(at(j, "node", "homfn.v1"), cells_hint);
}

Json to_json(const HomMap& m) {
  Json comps = Json::array();
  for (const auto& c : m.components()) comps.push_back(node_json(c));
  return {{"in_dim", m.in_dim()}, {"components", comps}};
}

HomMap hommap_from_json(const Json& j) {
  std::vector<HomFn> comps;
  for (const auto& c : at(j, "components", "map")) comps.push_back(node_from_json(c, 0));
  return HomMap(get_count(at(j, "in_dim", "map"), "in_dim"), std::move(comps));
}

// ---------------------------------------------------------------- measures

Json to_json(const DiscreteGYM& mu) {
  Json atoms = Json::array();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto a = mu.atom(i);
    atoms.push_back({{"cell", a.cell}, {"xi", vec_json(a.xi)}, {"eta", num(a.eta)}, {"w", num(a.w)}});
  }
  return {{"schema", "gym.v1"}, {"space", to_json(mu.space())}, {"dim", mu.dim()}, {"atoms", atoms}};
}

DiscreteGYM gym_from_json(const Json& j) {
  expect_schema(j, "gym.v1");
  auto space = space_from_json(at(j, "space", "gym.v1"));
  const std::size_t dim = get_count(at(j, "dim", "gym.v1"), "dim");
  std::vector<Atom> atoms;
  for (const auto& a : at(j, "atoms", "gym.v1"))
    atoms.push_back({get_count(at(a, "cell", "atom"), "cell"), get_vec(at(a, "xi", "atom"), "xi"),
                     get_num(at(a, "eta", "atom"), "eta"), get_num(at(a, "w", "atom"), "w")});
  return DiscreteGYM(std::move(space), dim, atoms);
}

Json to_json(const DiscreteMeasure& p) {
  Json ac = Json::array();
  Json sing = Json::array();
  for (std::size_t c = 0; c < p.space().cells(); ++c) {
    ac.push_back(vec_json(p.ac(c)));
    if (p.has_singular(c)) sing.push_back({{"cell", c}, {"mass", vec_json(p.singular(c))}});
  }
  return {{"schema", "measure.v1"}, {"space", to_json(p.space())}, {"dim", p.dim()}, {"ac", ac}, {"singular", sing}};
}

DiscreteMeasure measure_from_json(const Json& j) {
  expect_schema(j, "measure.v1");
  auto space = space_from_json(at(j, "space", "measure.v1"));
  const std::size_t dim = get_count(at(j, "dim", "measure.v1"), "dim");
  std::vector<double> ac;
  for (const auto& row : at(j, "ac", "measure.v1")) {
    const auto v = get_vec(row, "ac");
    if (v.size() != dim) throw DimensionError("measure.v1: ac row has the wrong dimension");
    ac.insert(ac.end(), v.begin(), v.end());
  }
  std::vector<std::pair<std::size_t, Vec>> sing;
  if (j.contains("singular"))
    for (const auto& s : j.at("singular"))
      sing.emplace_back(get_count(at(s, "cell", "singular"), "cell"), get_vec(at(s, "mass", "singular"), "mass"));
  return DiscreteMeasure(std::move(space), dim, std::move(ac), sing);
}

Json to_json(const SystemGYM& s) {
  return {{"schema", "sgy.v1"},
          {"times", vec_json(s.grid().times())},
          {"T", num(s.grid().horizon())},
          {"dim", s.dim()},
          {"master", to_json(s.master())}};
}

SystemGYM system_from_json(const Json& j) {
  expect_schema(j, "sgy.v1");
  const double T = j.contains("T") ? get_num(j.at("T"), "T") : -1.0;
  TimeGrid grid(get_vec(at(j, "times", "sgy.v1"), "times"), T);
  return SystemGYM(std::move(grid), gym_from_json(at(j, "master", "sgy.v1")),
                   get_count(at(j, "dim", "sgy.v1"), "dim"));
}

Json to_json(const StepFunction& u) {
  Json vals = Json::array();
  for (std::size_t i = 0; i < u.pieces(); ++i) vals.push_back(vec_json(u.value(i)));
  return {{"schema", "step.v1"}, {"space", to_json(*u.parent())}, {"dim", u.dim()}, {"edges", vec_json(u.edges())},
          {"values", vals}};
}

StepFunction step_from_json(const Json& j) {
  expect_schema(j, "step.v1");
  const std::size_t dim = get_count(at(j, "dim", "step.v1"), "dim");
  std::vector<double> values;
  for (const auto& row : at(j, "values", "step.v1")) {
    const auto v = get_vec(row, "values");
    values.insert(values.end(), v.begin(), v.end());
  }
  return StepFunction(space_from_json(at(j, "space", "step.v1")), dim, get_vec(at(j, "edges", "step.v1"), "edges"),
                      std::move(values));
}

// ------------------------------------------------------------------- files

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) { row(header); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw DimensionError("csv row has the wrong number of columns");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
    if (!quote) {
      text_ += cells[i];
      continue;
    }
    text_ += '"';
    for (char ch : cells[i]) {
      if (ch == '"') text_ += '"';
      text_ += ch;
    }
    text_ += '"';
  }
  text_ += '\n';
}

std::string CsvWriter::str() const { return text_; }

void CsvWriter::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text_;
}

}  // namespace gymlab::io
