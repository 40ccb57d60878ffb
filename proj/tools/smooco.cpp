// Command-line front end: config resolution, subcommand dispatch, file
// emission. All computation lives in the library; this file only wires
// flags to module entry points and maps exceptions to exit codes.

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smooco/bench.hpp"
#include "smooco/bounds.hpp"
#include "smooco/config.hpp"
#include "smooco/csv.hpp"
#include "smooco/errors.hpp"
#include "smooco/plot.hpp"
#include "smooco/traffic.hpp"
#include "smooco/version.hpp"

namespace {

using namespace smooco;

constexpr int kExitOk = 0;
constexpr int kExitViolations = 1;  // verify found bound violations
constexpr int kExitUsage = 2;
constexpr int kExitPartial = 3;
constexpr int kExitNumerical = 4;

std::string iso_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string join_args(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += " ";
    out += argv[i];
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<int> trials;
  std::optional<int> steps;
  std::string algorithms;  // comma separated; empty = config value
};

void add_common(CLI::App* cmd, CommonFlags* flags, bool with_harness_flags) {
  cmd->add_option("--config", flags->config_path, "Config file (TOML-style)");
  cmd->add_option("--out", flags->out_dir, "Output directory");
  cmd->add_option("--seed", flags->seed, "Override the master seed");
  if (with_harness_flags) {
    cmd->add_option("--workers", flags->workers, "Worker threads for trials");
    cmd->add_option("--trials", flags->trials, "Override trial count");
    cmd->add_option("--steps", flags->steps, "Override online step count");
    cmd->add_option("--algorithms", flags->algorithms,
                    "Comma-separated algorithm subset");
  }
}

ExperimentConfig resolve_config(const CommonFlags& flags,
                                const std::string& manifest_config_text) {
  ExperimentConfig config;
  if (!manifest_config_text.empty()) {
    config = parse_config_text(manifest_config_text, /*require_shape=*/true);
  } else if (!flags.config_path.empty()) {
    config = load_config_file(flags.config_path);
  } else {
    config = default_experiment_config();
  }
  if (flags.seed) config.master_seed = *flags.seed;
  if (flags.trials) config.trials = *flags.trials;
  if (flags.steps) config.online_steps = *flags.steps;
  if (!flags.algorithms.empty()) config.algorithms = split_list(flags.algorithms);
  // Workers: flag > SMOOCO_WORKERS > config. Never affects outputs.
  if (flags.workers) {
    config.workers = *flags.workers;
  } else if (const char* env = std::getenv("SMOOCO_WORKERS")) {
    config.workers = static_cast<int>(parse_int(env));
  }
  config.validate();
  return config;
}

std::filesystem::path prepare_out_dir(const std::string& dir) {
  std::filesystem::path path(dir);
  std::filesystem::create_directories(path);
  return path;
}

void emit_manifest(const std::filesystem::path& out_dir,
                   const ExperimentConfig& config, const std::string& command,
                   const std::vector<std::string>& outputs) {
  RunManifest manifest;
  manifest.tool = kToolName;
  manifest.version = kToolVersion;
  manifest.command = command;
  manifest.master_seed = config.master_seed;
  manifest.timestamp = iso_timestamp();
  manifest.config_text = render_config(config);
  manifest.outputs = outputs;
  const auto path = out_dir / "manifest.json";
  write_manifest(path.string(), manifest);
  std::cout << "wrote " << path.string() << "\n";
}

int cmd_generate(const CommonFlags& flags, const std::string& command) {
  const ExperimentConfig config = resolve_config(flags, "");
  const auto out_dir = prepare_out_dir(flags.out_dir);

  TrafficGenConfig traffic = config.traffic;
  traffic.k = config.k;
  traffic.horizon = config.warmup + config.online_steps;
  traffic.seed = config.master_seed;
  const TrafficSeries series = generate_traffic(traffic);

  const auto path = out_dir / "traffic.csv";
  write_traffic_csv(path.string(), series);
  std::cout << "wrote " << path.string() << "\n";
  emit_manifest(out_dir, config, command, {"traffic.csv"});
  return kExitOk;
}

int cmd_run(const CommonFlags& flags, const std::string& manifest_path,
            bool plots, const std::string& command) {
  std::string manifest_config;
  if (!manifest_path.empty()) {
    manifest_config = read_manifest(manifest_path).config_text;
  }
  const ExperimentConfig config = resolve_config(flags, manifest_config);
  const auto out_dir = prepare_out_dir(flags.out_dir);

  const ExperimentResult result = run_experiment(config);

  std::vector<std::string> outputs = {"steps.csv", "summary.csv"};
  const auto steps_path = out_dir / "steps.csv";
  write_lines(steps_path.string(), steps_csv_lines(result));
  std::cout << "wrote " << steps_path.string() << "\n";
  const auto summary_path = out_dir / "summary.csv";
  write_lines(summary_path.string(), summary_csv_lines(result));
  std::cout << "wrote " << summary_path.string() << "\n";

  if (plots) {
    for (const NamedPlot& plot : regret_plots(read_csv(steps_path.string()))) {
      const auto path = out_dir / (plot.name + ".svg");
      write_svg(path.string(), plot.spec);
      outputs.push_back(plot.name + ".svg");
      std::cout << "wrote " << path.string() << "\n";
    }
  }
  emit_manifest(out_dir, config, command, outputs);

  if (result.failures > 0) {
    std::cerr << "warning: " << result.failures
              << " (trial, algorithm) runs failed; partial results written\n";
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_sweep(const CommonFlags& flags, const std::string& sizes_text,
              const std::string& strategies_text, bool plots,
              const std::string& command) {
  const ExperimentConfig config = resolve_config(flags, "");
  const auto out_dir = prepare_out_dir(flags.out_dir);

  std::vector<int> sizes;
  for (const std::string& token : split_list(sizes_text)) {
    sizes.push_back(static_cast<int>(parse_int(token)));
  }
  const std::vector<std::string> strategies = split_list(strategies_text);

  const std::vector<SweepRow> rows = sweep_windows(config, sizes, strategies);

  std::vector<std::string> outputs = {"sweep.csv"};
  const auto sweep_path = out_dir / "sweep.csv";
  write_lines(sweep_path.string(), sweep_csv_lines(rows));
  std::cout << "wrote " << sweep_path.string() << "\n";

  if (plots) {
    for (const NamedPlot& plot : sweep_plots(read_csv(sweep_path.string()))) {
      const auto path = out_dir / (plot.name + ".svg");
      write_svg(path.string(), plot.spec);
      outputs.push_back(plot.name + ".svg");
      std::cout << "wrote " << path.string() << "\n";
    }
  }
  emit_manifest(out_dir, config, command, outputs);

  int failures = 0;
  for (const SweepRow& row : rows) failures += row.failures;
  if (failures > 0) {
    std::cerr << "warning: " << failures
              << " sweep cells failed; partial results written\n";
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_verify(const std::string& suite, std::uint64_t seed,
               std::optional<int> instances, std::optional<double> a,
               std::optional<double> b, const std::string& out_dir) {
  const std::vector<std::string> known = {"thm1", "thm2", "fixed-point",
                                          "rates", "lower-bound", "all"};
  if (std::find(known.begin(), known.end(), suite) == known.end()) {
    std::string names;
    for (const std::string& name : known) {
      if (!names.empty()) names += ", ";
      names += name;
    }
    std::cerr << "unknown verify suite '" << suite << "'; valid suites: "
              << names << "\n";
    return kExitUsage;
  }
  if ((a.has_value() || b.has_value()) && suite != "rates" && suite != "all") {
    std::cerr << "--a/--b only apply to the rates suite\n";
    return kExitUsage;
  }
  if (a.has_value() != b.has_value()) {
    std::cerr << "--a and --b must be given together\n";
    return kExitUsage;
  }

  std::vector<CheckRow> rows;
  const auto run_rates = [&]() {
    if (a.has_value()) {
      rows.push_back(verify_rates(*a, *b));
    } else {
      rows.push_back(verify_rates(0.0, 0.5));
      rows.push_back(verify_rates(0.0, 1.0));
    }
  };
  if (suite == "thm1" || suite == "all") {
    rows.push_back(verify_window_bound(instances.value_or(50), seed));
  }
  if (suite == "thm2" || suite == "all") {
    rows.push_back(verify_restart_bound(instances.value_or(20), seed));
  }
  if (suite == "fixed-point" || suite == "all") {
    rows.push_back(verify_fixed_point(instances.value_or(30), seed));
  }
  if (suite == "rates" || suite == "all") run_rates();
  if (suite == "lower-bound" || suite == "all") {
    const std::vector<CheckRow> lb = verify_lower_bound(instances.value_or(50), seed);
    rows.insert(rows.end(), lb.begin(), lb.end());
  }

  const auto out = prepare_out_dir(out_dir) /
                   ("verify_" + suite + ".csv");
  write_lines(out.string(), check_csv_lines(rows));
  std::cout << "wrote " << out.string() << "\n";

  std::int64_t violations = 0;
  for (const CheckRow& row : rows) {
    violations += row.violations;
    std::cout << row.check << ": " << row.instances << " instances, "
              << row.violations << " violations, max slack "
              << format_double(row.max_slack);
    if (row.slope) {
      std::cout << ", slope " << format_double(*row.slope) << " (target "
                << format_double(row.slope_target.value_or(0.0)) << ")";
    }
    std::cout << "\n";
  }
  return violations == 0 ? kExitOk : kExitViolations;
}

int cmd_plot(const std::string& steps_path, const std::string& sweep_path,
             const std::string& out_dir) {
  if (steps_path.empty() && sweep_path.empty()) {
    std::cerr << "plot: provide --steps and/or --sweep CSV paths\n";
    return kExitUsage;
  }
  const auto out = prepare_out_dir(out_dir);
  std::vector<NamedPlot> plots;
  if (!steps_path.empty()) {
    const std::vector<NamedPlot> p = regret_plots(read_csv(steps_path));
    plots.insert(plots.end(), p.begin(), p.end());
  }
  if (!sweep_path.empty()) {
    const std::vector<NamedPlot> p = sweep_plots(read_csv(sweep_path));
    plots.insert(plots.end(), p.begin(), p.end());
  }
  for (const NamedPlot& plot : plots) {
    const auto path = out / (plot.name + ".svg");
    write_svg(path.string(), plot.spec);
    std::cout << "wrote " << path.string() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smoothed online planning harness: synthetic traffic, "
               "window-planning algorithms, regret benchmarks"};
  app.set_version_flag("--version",
                       std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  CommonFlags gen_flags;
  CLI::App* gen = app.add_subcommand("generate", "Generate a traffic CSV");
  add_common(gen, &gen_flags, /*with_harness_flags=*/false);

  CommonFlags run_flags;
  std::string run_manifest;
  bool run_plots = false;
  CLI::App* run = app.add_subcommand("run", "Run the full experiment");
  add_common(run, &run_flags, /*with_harness_flags=*/true);
  run->add_option("--from-manifest", run_manifest,
                  "Re-run from a manifest's embedded config");
  run->add_flag("--plots", run_plots, "Also render SVG plots");

  CommonFlags sweep_flags;
  std::string sweep_sizes = "1,2,3,4,5,6";
  std::string sweep_strategies = "iterative";
  bool sweep_plots_flag = false;
  CLI::App* sweep = app.add_subcommand("sweep", "Fixed-window-size sweep");
  add_common(sweep, &sweep_flags, /*with_harness_flags=*/true);
  sweep->add_option("--sizes", sweep_sizes, "Comma-separated window sizes");
  sweep->add_option("--strategies", sweep_strategies,
                    "Comma-separated solver strategies (iterative, dp)");
  sweep->add_flag("--plots", sweep_plots_flag, "Also render SVG plots");

  std::string verify_suite;
  std::string verify_out = ".";
  std::uint64_t verify_seed = 1;
  std::optional<int> verify_instances;
  std::optional<double> verify_a, verify_b;
  CLI::App* verify = app.add_subcommand("verify", "Run a bound-check suite");
  verify->add_option("suite", verify_suite,
                     "thm1 | thm2 | fixed-point | rates | lower-bound | all")
      ->required();
  verify->add_option("--out", verify_out, "Output directory");
  verify->add_option("--seed", verify_seed, "Suite seed");
  verify->add_option("--instances", verify_instances,
                     "Override instance/run/seed count");
  verify->add_option("--a", verify_a, "Uncertainty growth exponent (rates)");
  verify->add_option("--b", verify_b, "Uncertainty decay exponent (rates)");

  std::string plot_steps, plot_sweep;
  std::string plot_out = ".";
  CLI::App* plot = app.add_subcommand("plot", "Re-render plots from CSVs");
  plot->add_option("--steps", plot_steps, "Per-step CSV path");
  plot->add_option("--sweep", plot_sweep, "Sweep CSV path");
  plot->add_option("--out", plot_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::string command = join_args(argc, argv);
  try {
    if (gen->parsed()) return cmd_generate(gen_flags, command);
    if (run->parsed()) return cmd_run(run_flags, run_manifest, run_plots, command);
    if (sweep->parsed()) {
      return cmd_sweep(sweep_flags, sweep_sizes, sweep_strategies,
                       sweep_plots_flag, command);
    }
    if (verify->parsed()) {
      return cmd_verify(verify_suite, verify_seed, verify_instances, verify_a,
                        verify_b, verify_out);
    }
    if (plot->parsed()) return cmd_plot(plot_steps, plot_sweep, plot_out);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
