// pairwave_cli.cpp — scenario runner: `pairwave run`, `pairwave list`.
#include <CLI11.hpp>

#include <cstdio>
#include <exception>

#include "pairwave/scenario.hpp"

namespace {

// exit codes: 0 ok, 2 validation, 3 physics precondition, 4 numerical failure
int dispatch(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const pairwave::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  } catch (const pairwave::PhysicsError& e) {
    std::fprintf(stderr, "physics precondition failed: %s\n", e.what());
    return 3;
  } catch (const pairwave::NumericsError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pairwave: collective two-photon emission simulation engine"};
  app.require_subcommand(1);

  std::string config, builtin, out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;

  auto* run = app.add_subcommand("run", "execute a scenario and write its artifacts");
  run->add_option("config", config, "JSON scenario config");
  run->add_option("--builtin", builtin, "builtin scenario name (see `list`)");
  run->add_option("--out", out_dir, "output directory (default out/<name>)");
  run->add_option("--seed", seed, "override the scenario seed")->each([&](const std::string&) {
    seed_set = true;
  });
  run->add_option("--workers", workers, "OpenMP worker count");

  auto* list = app.add_subcommand("list", "print the builtin scenarios");

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) {
    return dispatch([] {
      for (const auto& info : pairwave::scenario::builtins())
        std::printf("%-16s %-10s %s\n", info.name.c_str(), info.runtime.c_str(),
                    info.description.c_str());
    });
  }

  return dispatch([&] {
    if (config.empty() == builtin.empty())
      throw pairwave::ValidationError("run needs exactly one of <config> or --builtin");
    auto sc = builtin.empty() ? pairwave::scenario::from_config(config)
                              : pairwave::scenario::from_builtin(builtin);
    if (seed_set) sc.seed = seed;
    if (workers > 0) sc.workers = workers;
    std::string dir = out_dir.empty() ? "out/" + sc.name : out_dir;
    auto manifest = pairwave::scenario::run_scenario(sc, dir);
    std::printf("wrote %zu artifacts to %s (scenario %s, hash %s, %.1f s)\n",
                manifest.outputs.size(), dir.c_str(), manifest.scenario.c_str(),
                manifest.scenario_hash.c_str(), manifest.wall_time_s);
  });
}
