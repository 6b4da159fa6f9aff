#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cclab/commands.hpp"

namespace {

int emit(const cclab::CommandResult& r) {
  std::cout << r.out;
  std::cerr << r.err;
  return r.code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature operators of collapsing metric families"};
  app.require_subcommand(1);

  std::string path;
  double eps = 1.0;
  bool spectrum = false;
  std::string grid, out, name, dir = ".";

  auto* validate = app.add_subcommand("validate", "check every invariant of a fixture file");
  validate->add_option("path", path, "fixture file")->required();

  auto* curvature = app.add_subcommand("curvature", "curvature operator spectrum and sectional range");
  curvature->add_option("path", path, "fixture file")->required();
  curvature->add_option("--eps", eps, "collapse parameter")->capture_default_str();
  curvature->add_flag("--spectrum", spectrum, "print every eigenvalue");

  auto* sweep = app.add_subcommand("sweep", "spectra of a family over an eps grid, as CSV");
  sweep->add_option("path", path, "family_spec fixture file")->required();
  sweep->add_option("--grid", grid, "a:b:log:n (default 1:1e-4:log:25)");
  sweep->add_option("--out", out, "CSV output file (default: stdout)");

  auto* examples = app.add_subcommand("examples", "bundled fixtures");
  examples->require_subcommand(1);
  auto* list = examples->add_subcommand("list", "names of the bundled fixtures");
  auto* emit_cmd = examples->add_subcommand("emit", "write a bundled fixture as <dir>/<name>.json");
  emit_cmd->add_option("name", name, "fixture name")->required();
  emit_cmd->add_option("dir", dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cclab::kExitParse;
  }

  double tol = cclab::kDefaultTol;
  try {
    tol = cclab::tolerance_from_env();
  } catch (const cclab::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cclab::kExitParse;
  }

  if (validate->parsed()) return emit(cclab::cmd_validate(path, tol));
  if (curvature->parsed()) return emit(cclab::cmd_curvature(path, eps, spectrum, tol));
  if (sweep->parsed())
    return emit(cclab::cmd_sweep(path, grid.empty() ? std::nullopt : std::optional(grid),
                                 out.empty() ? std::nullopt : std::optional(out), tol));
  if (list->parsed()) return emit(cclab::cmd_examples_list());
  if (emit_cmd->parsed()) return emit(cclab::cmd_examples_emit(name, dir));
  return cclab::kExitParse;
}
