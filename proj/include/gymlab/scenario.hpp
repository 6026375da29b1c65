#pragma once

// Scenario files (scenario.v1) and the command runner behind the CLI.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gymlab/io.hpp"

namespace gymlab::cli {

enum class Status { pass, fail, no_limit, error };

const char* to_string(Status s);
int exit_code(Status s);

const std::vector<std::string>& commands();

struct Scenario {
  std::string command;
  std::string base_dir;  // relative input paths resolve against this
  io::Json body;         // the parsed document
  std::uint64_t seed = 0;
};

/// Parses and checks the envelope; a missing "command" is taken from `command`.
/// Throws ParseError naming the offending field.
Scenario load_scenario(const std::string& path, const std::string& command);
Scenario parse_scenario(const io::Json& j, const std::string& base_dir, const std::string& command);

class ParseError : public Error {
 public:
  using Error::Error;
};

struct Verdict {
  Status status = Status::error;
  io::Json payload = io::Json::object();
  io::Json provenance = io::Json::object();
  std::string message;
};

struct RunOutput {
  Verdict verdict;
  std::string csv;           // report contents
  std::string csv_name;      // file name inside the output directory
  std::vector<std::pair<std::string, io::Json>> artifacts;  // extra JSON files
};

/// Runs the command without touching the disk beyond reading inputs.
RunOutput run(const Scenario& sc);

/// Full CLI behaviour: load, run, write `<out>/<csv_name>` and `<out>/verdict.json`,
/// print a one-line summary, return the exit code. Errors never escape.
int main_entry(const std::string& command, const std::optional<std::string>& scenario_path,
               const std::optional<std::string>& out_dir);

}  // namespace gymlab::cli
