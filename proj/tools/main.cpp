#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "dk/config.hpp"
#include "dk/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"softened kinetic solver hierarchy (Coulomb / Darwin / Maxwell)"};
  app.require_subcommand(1);

  const std::map<std::string, std::function<int(const dk::RunConfig&)>> commands = {
      {"run-vp", dk::cmd_run_vp},
      {"run-darwin", dk::cmd_run_darwin},
      {"run-dvm", dk::cmd_run_dvm},
      {"run-rvm", dk::cmd_run_rvm},
      {"converge", dk::cmd_converge},
      {"rescale-check", dk::cmd_rescale_check},
      {"integrals-selftest", dk::cmd_integrals_selftest},
  };

  std::string config_path;
  std::string picked;
  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "configuration file (key = value sections)")
        ->required();
    sub->callback([&picked, name = name] { picked = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const dk::RunConfig cfg = dk::load_config(config_path);
    const int rc = commands.at(picked)(cfg);
    std::printf("%s: %s (run dir %s)\n", picked.c_str(),
                rc == 0 ? "all checks passed" : "tolerance failure",
                cfg.run_dir().c_str());
    return rc;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: solver error: %s\n", picked.c_str(), e.what());
    return 2;
  }
}
