// branchlab: desk-scale experiments comparing complexity-based wavefunction
// branch definitions on small qubit chains.
//
// Subcommands: complexity | tm | weingarten | evolve | sample | compare | validate
// Exit codes: 0 success, 1 validation failure, 2 runtime failure.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "branchlab/cache.hpp"
#include "branchlab/json_io.hpp"
#include "branchlab/parallel.hpp"
#include "branchlab/scenario.hpp"

namespace {

struct Args {
  std::string scenario_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<int> budget;
  int workers = 0;
  bool no_cache = false;
};

int run(const std::string& subcommand, const Args& args) {
  using namespace branchlab;
  set_worker_cap(args.workers);

  ojson raw;
  try {
    raw = ojson::parse(read_text_file(args.scenario_path));
  } catch (const std::exception& e) {
    std::cerr << "error: cannot read scenario: " << e.what() << "\n";
    return 1;
  }

  std::vector<std::string> diags = validate_scenario(raw);
  for (const std::string& d : diags) std::cerr << d << "\n";
  if (subcommand == "validate") {
    if (diagnostics_fatal(diags)) return 1;
    std::cout << (diags.empty() ? "scenario valid\n" : "scenario valid (warnings above)\n");
    return 0;
  }
  if (diagnostics_fatal(diags)) return 1;

  Scenario sc = scenario_from_json(raw);
  if (args.seed) {
    sc.seed = *args.seed;
    sc.raw["seed"] = *args.seed;
  }

  RunOverrides ov;
  ov.seed = args.seed;
  if (args.mode) {
    ov.mode = *args.mode == "heuristic" ? SearchMode::heuristic_layers : SearchMode::exact_bfs;
  }
  ov.budget = args.budget;

  std::string cache_dir;
  if (!args.no_cache) {
    if (const char* env = std::getenv("BRANCHLAB_CACHE_DIR")) {
      cache_dir = env;
    } else {
      cache_dir = (std::filesystem::path(args.out_dir) / "complexity_cache").string();
    }
  }
  CacheStore cache(cache_dir);
  ov.cache = &cache;

  GateSet gs = GateSet::standard();

  auto t0 = std::chrono::steady_clock::now();
  RunOutput out;
  try {
    out = run_subcommand(subcommand, sc, ov, gs);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 2;
  }
  auto t1 = std::chrono::steady_clock::now();

  try {
    std::filesystem::path dir(args.out_dir);
    std::filesystem::create_directories(dir);
    std::string report_name = subcommand + "_" + sc.name + ".json";
    write_text_file((dir / report_name).string(), out.report.dump(2) + "\n");
    for (const auto& [name, contents] : out.files) {
      write_text_file((dir / (sc.name + "_" + name)).string(), contents);
    }
    // Wall-clock metadata stays out of the deterministic report.
    ojson meta;
    meta["report"] = report_name;
    meta["elapsed_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    meta["workers"] = args.workers;
    meta["cache_dir"] = cache_dir;
    write_text_file((dir / (subcommand + "_" + sc.name + ".meta.json")).string(), meta.dump(2) + "\n");
    std::cout << (dir / report_name).string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "runtime failure writing outputs: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"branch decomposition laboratory for small qubit chains"};
  app.require_subcommand(1);

  Args args;
  const std::vector<std::string> names = {"complexity", "tm", "weingarten", "evolve",
                                          "sample", "compare", "validate"};
  for (const std::string& name : names) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--scenario", args.scenario_path, "scenario JSON file")->required();
    sub->add_option("--seed", args.seed, "override the scenario seed");
    sub->add_option("--mode", args.mode, "override search mode (exact|heuristic)")
        ->check(CLI::IsMember({"exact", "heuristic"}));
    sub->add_option("--budget", args.budget, "override search budget");
    sub->add_option("--workers", args.workers, "cap worker threads (0 = hardware)");
    sub->add_option("--out", args.out_dir, "output directory (default: out)");
    sub->add_flag("--no-cache", args.no_cache, "disable the complexity cache");
  }

  CLI11_PARSE(app, argc, argv);
  for (const std::string& name : names) {
    if (app.got_subcommand(name)) return run(name, args);
  }
  return 1;
}
