// Drives the installed binary end to end through a shell: flag parsing,
// config resolution, file emission, exit codes. Everything numeric is covered
// by the library tests; here we only pin the process-level contract.
#define DOCTEST_CONFIG_IMPLEMENT
#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "smooco/config.hpp"
#include "smooco/csv.hpp"
#include "support.hpp"

// Path of the real CLI binary (argv[1]) and of the shipped config directory
// (argv[2]), passed by ctest.
std::string g_cli_path;
std::string g_configs_dir;

int main(int argc, char** argv) {
  if (argc > 1) g_cli_path = argv[1];
  if (argc > 2) g_configs_dir = argv[2];
  doctest::Context context;
  return context.run();
}

namespace {

using smooco::testing::CommandResult;
using smooco::testing::make_temp_dir;
using smooco::testing::read_file;
using smooco::testing::run_command;
using smooco::testing::shell_quote;

CommandResult cli(const std::string& args) {
  return run_command(shell_quote(g_cli_path) + " " + args);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text) n += (c == '\n');
  return n;
}

bool exists(const std::string& path) {
  return std::filesystem::exists(path);
}

// Small but complete experiment: 2 trials x 3 algorithms x 8 steps.
const char* kSmallConfig = R"(
[experiment]
seed = 11
trials = 2
warmup = 6
online_steps = 8
benchmark_chunk = 4
algorithms = ["dynamic", "static", "ftp"]

[shape]
k = 4
m = 2
)";

std::string small_config_path() {
  static const std::string path = [] {
    const std::string p = make_temp_dir("cli_cfg") + "/small.toml";
    write_text(p, kSmallConfig);
    return p;
  }();
  return path;
}

}  // namespace

TEST_CASE("cli binary path provided") { CHECK(!g_cli_path.empty()); }

TEST_CASE("--version prints the tool name and version") {
  const CommandResult r = cli("--version");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("smooco 1.0.0") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(cli("").exit_code == 2);               // a subcommand is required
  CHECK(cli("frobnicate").exit_code == 2);     // unknown subcommand
  CHECK(cli("generate --seed abc").exit_code == 2);
  CHECK(cli("run --config /does/not/exist.toml").exit_code == 2);
  const CommandResult help = cli("--help");
  CHECK(help.exit_code == 0);
  for (const char* sub : {"generate", "run", "sweep", "verify", "plot"}) {
    CHECK(help.output.find(sub) != std::string::npos);
  }
}

TEST_CASE("generate writes traffic and a manifest deterministically") {
  const std::string dir1 = make_temp_dir("cli_gen1");
  const std::string dir2 = make_temp_dir("cli_gen2");
  const CommandResult r1 = cli("generate --out " + shell_quote(dir1));
  REQUIRE(r1.exit_code == 0);
  CHECK(r1.output.find("wrote " + dir1 + "/traffic.csv") != std::string::npos);
  CHECK(r1.output.find("wrote " + dir1 + "/manifest.json") != std::string::npos);

  // Default shape is 10 topics over 50 warmup + 100 online steps.
  const smooco::CsvTable traffic = smooco::read_csv(dir1 + "/traffic.csv");
  REQUIRE(traffic.header.size() == 11);
  CHECK(traffic.header[0] == "t");
  CHECK(traffic.header[1] == "topic_0");
  CHECK(traffic.header[10] == "topic_9");
  CHECK(traffic.rows.size() == 150);
  CHECK(traffic.rows[0][0] == "1");
  CHECK(traffic.rows[149][0] == "150");

  const smooco::RunManifest manifest =
      smooco::read_manifest(dir1 + "/manifest.json");
  CHECK(manifest.tool == "smooco");
  CHECK(manifest.version == "1.0.0");
  CHECK(manifest.master_seed == 1);
  CHECK(manifest.command.find("generate") != std::string::npos);
  CHECK(manifest.outputs == std::vector<std::string>{"traffic.csv"});
  CHECK(manifest.config_text.find("k = 10") != std::string::npos);

  REQUIRE(cli("generate --out " + shell_quote(dir2)).exit_code == 0);
  CHECK(read_file(dir1 + "/traffic.csv") == read_file(dir2 + "/traffic.csv"));

  const std::string dir3 = make_temp_dir("cli_gen3");
  REQUIRE(cli("generate --seed 5 --out " + shell_quote(dir3)).exit_code == 0);
  CHECK(read_file(dir1 + "/traffic.csv") != read_file(dir3 + "/traffic.csv"));
}

TEST_CASE("run writes per-step and summary tables honoring overrides") {
  const std::string cfg = shell_quote(small_config_path());
  const std::string dir = make_temp_dir("cli_run");
  const CommandResult r =
      cli("run --config " + cfg + " --out " + shell_quote(dir));
  REQUIRE(r.exit_code == 0);
  for (const char* name : {"steps.csv", "summary.csv", "manifest.json"}) {
    CHECK(r.output.find("wrote " + dir + "/" + name) != std::string::npos);
    CHECK(exists(dir + "/" + name));
  }

  const std::string steps = read_file(dir + "/steps.csv");
  CHECK(steps.rfind("trial,algorithm,t,imbalance,switching,bench_imbalance,"
                    "bench_switching,cum_regret,cum_imb_regret,cum_sw_regret,"
                    "window_id,window_size",
                    0) == 0);
  CHECK(count_lines(steps) == 1 + 2 * 3 * 8);  // trials x algorithms x steps

  const std::string summary = read_file(dir + "/summary.csv");
  CHECK(summary.rfind("algorithm,metric,mean,std,trials", 0) == 0);
  CHECK(count_lines(summary) == 1 + 9 * 3);  // nine metric rows per algorithm

  // No plots unless requested.
  CHECK(!exists(dir + "/regret_total.svg"));
  const smooco::RunManifest manifest =
      smooco::read_manifest(dir + "/manifest.json");
  CHECK(manifest.outputs == std::vector<std::string>{"steps.csv", "summary.csv"});

  // Flag overrides shrink the run and are recorded in the manifest.
  const std::string dir2 = make_temp_dir("cli_run_ovr");
  const CommandResult r2 =
      cli("run --config " + cfg + " --out " + shell_quote(dir2) +
          " --trials 1 --steps 5 --algorithms static --seed 99");
  REQUIRE(r2.exit_code == 0);
  CHECK(count_lines(read_file(dir2 + "/steps.csv")) == 1 + 5);
  // Exactly one algorithm's summary rows.
  const std::string summary2 = read_file(dir2 + "/summary.csv");
  CHECK(count_lines(summary2) == 1 + 9);
  CHECK(summary2.find("dynamic") == std::string::npos);
  const smooco::RunManifest m2 = smooco::read_manifest(dir2 + "/manifest.json");
  CHECK(m2.master_seed == 99);
  CHECK(m2.config_text.find("trials = 1") != std::string::npos);
  CHECK(m2.config_text.find("online_steps = 5") != std::string::npos);
  CHECK(m2.config_text.find("algorithms = [\"static\"]") != std::string::npos);
}

TEST_CASE("run --plots renders the three regret SVGs") {
  const std::string cfg = shell_quote(small_config_path());
  const std::string dir = make_temp_dir("cli_run_plots");
  const CommandResult r = cli("run --config " + cfg + " --out " +
                              shell_quote(dir) + " --trials 1 --plots");
  REQUIRE(r.exit_code == 0);
  for (const char* name :
       {"regret_total.svg", "regret_imbalance.svg", "regret_switching.svg"}) {
    REQUIRE(exists(dir + "/" + name));
    CHECK(read_file(dir + "/" + name).rfind("<svg", 0) == 0);
  }
  const smooco::RunManifest manifest =
      smooco::read_manifest(dir + "/manifest.json");
  CHECK(manifest.outputs ==
        std::vector<std::string>{"steps.csv", "summary.csv", "regret_total.svg",
                                 "regret_imbalance.svg",
                                 "regret_switching.svg"});
}

TEST_CASE("run --from-manifest reproduces identical tables") {
  const std::string cfg = shell_quote(small_config_path());
  const std::string dir1 = make_temp_dir("cli_m1");
  REQUIRE(cli("run --config " + cfg + " --out " + shell_quote(dir1) +
              " --seed 123")
              .exit_code == 0);
  const std::string dir2 = make_temp_dir("cli_m2");
  REQUIRE(cli("run --from-manifest " + shell_quote(dir1 + "/manifest.json") +
              " --out " + shell_quote(dir2) + " --workers 4")
              .exit_code == 0);
  CHECK(read_file(dir1 + "/steps.csv") == read_file(dir2 + "/steps.csv"));
  CHECK(read_file(dir1 + "/summary.csv") == read_file(dir2 + "/summary.csv"));
}

TEST_CASE("worker count never changes output bytes") {
  const std::string cfg = shell_quote(small_config_path());
  const std::string dir1 = make_temp_dir("cli_w1");
  const std::string dir2 = make_temp_dir("cli_w2");
  const std::string dir3 = make_temp_dir("cli_w3");
  REQUIRE(cli("run --config " + cfg + " --out " + shell_quote(dir1) +
              " --workers 1")
              .exit_code == 0);
  REQUIRE(cli("run --config " + cfg + " --out " + shell_quote(dir2) +
              " --workers 4")
              .exit_code == 0);
  REQUIRE(run_command("SMOOCO_WORKERS=3 " + shell_quote(g_cli_path) +
                      " run --config " + cfg + " --out " + shell_quote(dir3))
              .exit_code == 0);
  const std::string steps = read_file(dir1 + "/steps.csv");
  CHECK(steps == read_file(dir2 + "/steps.csv"));
  CHECK(steps == read_file(dir3 + "/steps.csv"));
}

TEST_CASE("config errors exit with the usage code and name the field") {
  const std::string dir = make_temp_dir("cli_badcfg");
  const std::string no_shape = dir + "/no_shape.toml";
  write_text(no_shape, "[experiment]\ntrials = 2\n");
  const CommandResult r1 = cli("run --config " + shell_quote(no_shape));
  CHECK(r1.exit_code == 2);
  CHECK(r1.output.find("shape.k") != std::string::npos);

  const std::string bad_key = dir + "/bad_key.toml";
  write_text(bad_key, "[shape]\nk = 3\nm = 2\nsides = 4\n");
  const CommandResult r2 = cli("run --config " + shell_quote(bad_key));
  CHECK(r2.exit_code == 2);
  CHECK(r2.output.find("shape.sides") != std::string::npos);

  // Override values are validated the same way as file values.
  const CommandResult r3 =
      cli("run --config " + shell_quote(small_config_path()) + " --trials 0");
  CHECK(r3.exit_code == 2);
  CHECK(r3.output.find("trials") != std::string::npos);
}

TEST_CASE("failed algorithm runs produce partial tables and exit code 3") {
  // Forcing the exhaustive window solver onto 2^11 states trips its state
  // limit for every dynamic run while static still completes.
  const std::string dir = make_temp_dir("cli_partial");
  const std::string cfg = dir + "/partial.toml";
  write_text(cfg, R"(
[experiment]
seed = 3
trials = 1
warmup = 4
online_steps = 4
benchmark_chunk = 2
algorithms = ["dynamic", "static"]

[shape]
k = 11
m = 2

[solver]
window_solver = "dp"
)");
  const CommandResult r =
      cli("run --config " + shell_quote(cfg) + " --out " + shell_quote(dir));
  CHECK(r.exit_code == 3);
  CHECK(r.output.find("1 (trial, algorithm) runs failed") != std::string::npos);

  const std::string steps = read_file(dir + "/steps.csv");
  CHECK(steps.find("static") != std::string::npos);
  CHECK(steps.find("dynamic") == std::string::npos);
  CHECK(count_lines(steps) == 1 + 4);  // only the static rows survive

  const std::string summary = read_file(dir + "/summary.csv");
  CHECK(summary.find("dynamic,failures,1,0,1") != std::string::npos);
  CHECK(summary.find("static,failures,0,0,1") != std::string::npos);
}

TEST_CASE("sweep writes one row per cell and optional plots") {
  const std::string cfg = shell_quote(small_config_path());
  const std::string dir = make_temp_dir("cli_sweep");
  const CommandResult r =
      cli("sweep --config " + cfg + " --out " + shell_quote(dir) +
          " --trials 1 --steps 6 --sizes 1,2 --strategies iterative,dp "
          "--plots");
  REQUIRE(r.exit_code == 0);

  const smooco::CsvTable sweep = smooco::read_csv(dir + "/sweep.csv");
  CHECK(sweep.header ==
        std::vector<std::string>{"strategy", "size", "mean_regret",
                                 "std_regret", "mean_solve_time", "trials",
                                 "failures"});
  REQUIRE(sweep.rows.size() == 4);  // 2 strategies x 2 sizes
  CHECK(sweep.rows[0][0] == "iterative");
  CHECK(sweep.rows[2][0] == "dp");

  for (const char* name : {"sweep_regret.svg", "sweep_time.svg"}) {
    REQUIRE(exists(dir + "/" + name));
    CHECK(read_file(dir + "/" + name).rfind("<svg", 0) == 0);
  }
  const smooco::RunManifest manifest =
      smooco::read_manifest(dir + "/manifest.json");
  CHECK(manifest.outputs ==
        std::vector<std::string>{"sweep.csv", "sweep_regret.svg",
                                 "sweep_time.svg"});
}

TEST_CASE("sweep rejects malformed grids") {
  const std::string cfg = shell_quote(small_config_path());
  CHECK(cli("sweep --config " + cfg + " --sizes 2,2").exit_code == 2);
  CHECK(cli("sweep --config " + cfg + " --sizes 0").exit_code == 2);
  const CommandResult r =
      cli("sweep --config " + cfg + " --strategies bogus");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("bogus") != std::string::npos);
}

TEST_CASE("verify runs suites, writes check tables, validates arguments") {
  const std::string dir = make_temp_dir("cli_verify");
  const CommandResult r1 =
      cli("verify thm1 --instances 2 --seed 3 --out " + shell_quote(dir));
  REQUIRE(r1.exit_code == 0);
  CHECK(r1.output.find("window-bound: 2 instances, 0 violations") !=
        std::string::npos);
  const smooco::CsvTable table = smooco::read_csv(dir + "/verify_thm1.csv");
  CHECK(table.header ==
        std::vector<std::string>{"check", "instances", "violations",
                                 "max_slack", "slope", "slope_target"});
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0][0] == "window-bound");
  CHECK(table.rows[0][1] == "2");
  CHECK(table.rows[0][2] == "0");

  const CommandResult r2 =
      cli("verify rates --a 0 --b 1 --out " + shell_quote(dir));
  REQUIRE(r2.exit_code == 0);
  CHECK(r2.output.find("rates-log") != std::string::npos);
  CHECK(exists(dir + "/verify_rates.csv"));

  const CommandResult bad = cli("verify nonsense");
  CHECK(bad.exit_code == 2);
  CHECK(bad.output.find("thm1, thm2, fixed-point, rates, lower-bound, all") !=
        std::string::npos);
  const CommandResult half = cli("verify rates --a 0.5");
  CHECK(half.exit_code == 2);
  CHECK(half.output.find("--a and --b must be given together") !=
        std::string::npos);
  const CommandResult misapplied = cli("verify thm1 --a 0 --b 1");
  CHECK(misapplied.exit_code == 2);
  CHECK(misapplied.output.find("only apply to the rates suite") !=
        std::string::npos);
}

TEST_CASE("plot re-renders identical SVGs from saved tables") {
  const std::string cfg = shell_quote(small_config_path());
  const std::string run_dir = make_temp_dir("cli_plot_src");
  REQUIRE(cli("run --config " + cfg + " --out " + shell_quote(run_dir) +
              " --trials 1 --plots")
              .exit_code == 0);

  const std::string plot_dir = make_temp_dir("cli_plot_dst");
  const CommandResult r =
      cli("plot --steps " + shell_quote(run_dir + "/steps.csv") + " --out " +
          shell_quote(plot_dir));
  REQUIRE(r.exit_code == 0);
  for (const char* name :
       {"regret_total.svg", "regret_imbalance.svg", "regret_switching.svg"}) {
    CHECK(read_file(plot_dir + "/" + name) == read_file(run_dir + "/" + name));
  }

  const CommandResult none = cli("plot");
  CHECK(none.exit_code == 2);
  CHECK(none.output.find("provide --steps and/or --sweep") !=
        std::string::npos);
  CHECK(cli("plot --steps /does/not/exist.csv").exit_code == 2);

  const std::string bad_csv = plot_dir + "/bad.csv";
  write_text(bad_csv, "a,b\n1,2\n");
  const CommandResult bad = cli("plot --steps " + shell_quote(bad_csv));
  CHECK(bad.exit_code == 2);
  CHECK(bad.output.find("needs columns") != std::string::npos);
}

TEST_CASE("shipped full-scale config matches the built-in defaults") {
  REQUIRE(!g_configs_dir.empty());
  const smooco::ExperimentConfig from_file =
      smooco::load_config_file(g_configs_dir + "/paper.toml");
  const smooco::ExperimentConfig defaults =
      smooco::default_experiment_config();
  CHECK(smooco::render_config(from_file) == smooco::render_config(defaults));
}

TEST_CASE("full-scale config with smoke overrides finishes under 30 s") {
  REQUIRE(!g_configs_dir.empty());
  const std::string dir = make_temp_dir("cli_smoke");
  const auto t0 = std::chrono::steady_clock::now();
  const CommandResult r =
      cli("run --config " + shell_quote(g_configs_dir + "/paper.toml") +
          " --out " + shell_quote(dir) + " --trials 2 --steps 20");
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  CHECK(r.exit_code == 0);
  CHECK(elapsed < 30.0);
  CHECK(count_lines(read_file(dir + "/steps.csv")) == 1 + 2 * 7 * 20);
}

TEST_CASE("shipped smoke config runs clean") {
  REQUIRE(!g_configs_dir.empty());
  const std::string dir = make_temp_dir("cli_smoke_cfg");
  const CommandResult r =
      cli("run --config " + shell_quote(g_configs_dir + "/smoke.toml") +
          " --out " + shell_quote(dir));
  CHECK(r.exit_code == 0);
  CHECK(count_lines(read_file(dir + "/steps.csv")) == 1 + 2 * 7 * 20);
}
