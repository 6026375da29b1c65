#include <CLI11.hpp>

#include <optional>
#include <string>

#include "gymlab/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gymlab: discrete generalized Young measures"};
  app.require_subcommand(1);
  std::string scenario;
  std::string out;
  for (const auto& name : gymlab::cli::commands()) {
    auto* sub = app.add_subcommand(name);
    auto* opt = sub->add_option("--scenario", scenario, "scenario.v1 file");
    if (name != "suite") opt->required();
    sub->add_option("--out", out, "output directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  return gymlab::cli::main_entry(command, scenario.empty() ? std::nullopt : std::optional<std::string>(scenario),
                                 out.empty() ? std::nullopt : std::optional<std::string>(out));
}
