#pragma once

// JSON file formats (numerics as decimal strings) and CSV report writing.

#include <json.hpp>
#include <string>
#include <vector>

#include "gymlab/approx.hpp"
#include "gymlab/gym.hpp"
#include "gymlab/systems.hpp"

namespace gymlab::io {

using Json = nlohmann::json;

Json num(double v);
/// Accepts a decimal string or a JSON number; `field` names the value in errors.
double get_num(const Json& j, const std::string& field);
Vec get_vec(const Json& j, const std::string& field);

Json to_json(const SpaceModel& X);
SpacePtr space_from_json(const Json& j);

Json to_json(const HomFn& f);  // homfn.v1
HomFn homfn_from_json(const Json& j, std::size_t cells_hint = 0);
Json to_json(const HomMap& m);
HomMap hommap_from_json(const Json& j);

Json to_json(const DiscreteGYM& mu);  // gym.v1
DiscreteGYM gym_from_json(const Json& j);
Json to_json(const DiscreteMeasure& p);  // measure.v1
DiscreteMeasure measure_from_json(const Json& j);
Json to_json(const SystemGYM& s);  // sgy.v1
SystemGYM system_from_json(const Json& j);
Json to_json(const StepFunction& u);  // step.v1
StepFunction step_from_json(const Json& j);

Json read_json(const std::string& path);
void write_json(const std::string& path, const Json& j);

/// Checks the "schema" field.
void expect_schema(const Json& j, const std::string& schema);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  std::string str() const;
  void save(const std::string& path) const;

 private:
  std::size_t width_;
  std::string text_;
};

}  // namespace gymlab::io
