#include "smooco/config.hpp"

#include <cstdint>
#include <fstream>
#include <string>

#include "doctest.h"
#include "smooco/errors.hpp"
#include "support.hpp"

using namespace smooco;

namespace {

bool same_config(const ExperimentConfig& a, const ExperimentConfig& b) {
  const bool sines_equal = [&] {
    if (a.traffic.sine_specs.size() != b.traffic.sine_specs.size()) return false;
    for (size_t i = 0; i < a.traffic.sine_specs.size(); ++i) {
      const SineSpec& x = a.traffic.sine_specs[i];
      const SineSpec& y = b.traffic.sine_specs[i];
      if (x.period != y.period || x.amplitude_low != y.amplitude_low ||
          x.amplitude_high != y.amplitude_high) {
        return false;
      }
    }
    return true;
  }();
  return a.k == b.k && a.m == b.m && a.unit_cost_low == b.unit_cost_low &&
         a.unit_cost_high == b.unit_cost_high && a.warmup == b.warmup &&
         a.online_steps == b.online_steps && a.trials == b.trials &&
         a.benchmark_chunk == b.benchmark_chunk && a.algorithms == b.algorithms &&
         a.traffic.base_offset == b.traffic.base_offset &&
         a.traffic.clamp_floor == b.traffic.clamp_floor &&
         a.traffic.ar_coeff == b.traffic.ar_coeff &&
         a.traffic.ar_noise_std == b.traffic.ar_noise_std &&
         a.traffic.weight_sine == b.traffic.weight_sine &&
         a.traffic.weight_ar == b.traffic.weight_ar &&
         a.traffic.weight_gp == b.traffic.weight_gp &&
         a.traffic.gp_kernel.variance == b.traffic.gp_kernel.variance &&
         a.traffic.gp_kernel.length_scale == b.traffic.gp_kernel.length_scale &&
         a.traffic.gp_kernel.alpha == b.traffic.gp_kernel.alpha && sines_equal &&
         a.predictor_kernel.variance == b.predictor_kernel.variance &&
         a.predictor_kernel.length_scale == b.predictor_kernel.length_scale &&
         a.predictor_kernel.alpha == b.predictor_kernel.alpha &&
         a.predictor_kernel.noise_variance == b.predictor_kernel.noise_variance &&
         a.predictor_z == b.predictor_z &&
         a.solver.window_solver == b.solver.window_solver &&
         a.solver.subproblem == b.solver.subproblem && a.solver.passes == b.solver.passes &&
         a.solver.relax_c == b.solver.relax_c &&
         a.solver.enumeration_limit == b.solver.enumeration_limit &&
         a.solver.dp_state_limit == b.solver.dp_state_limit &&
         a.solver.local_restarts == b.solver.local_restarts &&
         a.solver.ftl_strategy == b.solver.ftl_strategy && a.s_max == b.s_max &&
         a.short_window == b.short_window && a.long_window == b.long_window &&
         a.ogd_eta0 == b.ogd_eta0 && a.master_seed == b.master_seed &&
         a.workers == b.workers;
}

ExperimentConfig exotic_config() {
  ExperimentConfig c;
  c.k = 7;
  c.m = 4;
  c.unit_cost_low = 0.25;
  c.unit_cost_high = 1.75;
  c.warmup = 9;
  c.online_steps = 17;
  c.trials = 3;
  c.benchmark_chunk = 2;
  c.algorithms = {"static", "ftp"};
  c.traffic.base_offset = 4.5;
  c.traffic.clamp_floor = 0.125;
  c.traffic.ar_coeff = 0.85;
  c.traffic.ar_noise_std = 0.4;
  c.traffic.weight_sine = 0.9;
  c.traffic.weight_ar = 1.1;
  c.traffic.weight_gp = 0.7;
  c.traffic.gp_kernel = {2.0, 6.5, 1.25, 0.0};
  c.traffic.sine_specs = {{12.0, 0.5, 1.5}, {6.0, 0.1, 0.2}, {48.0, 2.0, 3.0}};
  c.predictor_kernel = {1.5, 4.0, 0.75, 0.05};
  c.predictor_z = 2.0;
  c.solver.window_solver = "iterative";
  c.solver.subproblem = SubproblemStrategy::kLocal;
  c.solver.passes = 4;
  c.solver.relax_c = 0.75;
  c.solver.enumeration_limit = 5000;
  c.solver.dp_state_limit = 256;
  c.solver.local_restarts = 2;
  c.solver.ftl_strategy = "local";
  c.s_max = 9;
  c.short_window = 2;
  c.long_window = 6;
  c.ogd_eta0 = 0.125;
  c.master_seed = 18446744073709551615ull;
  c.workers = 5;
  return c;
}

}  // namespace

TEST_CASE("defaults describe the standard ten-topic experiment") {
  const ExperimentConfig c = default_experiment_config();
  CHECK(c.k == 10);
  CHECK(c.m == 3);
  CHECK(c.warmup == 50);
  CHECK(c.online_steps == 100);
  CHECK(c.trials == 10);
  CHECK(c.benchmark_chunk == 5);
  CHECK(c.algorithms.size() == 7);
  CHECK(c.master_seed == 1);
  CHECK(c.s_max == 20);
  CHECK(c.short_window == 1);
  CHECK(c.long_window == 10);
  CHECK(!c.ogd_eta0.has_value());
  CHECK(c.workers == 1);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("render and parse are exact inverses") {
  for (const ExperimentConfig& c : {default_experiment_config(), exotic_config()}) {
    const std::string text = render_config(c);
    const ExperimentConfig back = parse_config_text(text, /*require_shape=*/true);
    CHECK(same_config(c, back));
    CHECK(render_config(back) == text);  // stable after one round-trip
  }
}

TEST_CASE("seeds cover the full unsigned 64-bit range") {
  const std::string text =
      "[shape]\nk = 2\nm = 2\n[experiment]\nseed = 18446744073709551615\n";
  const ExperimentConfig c = parse_config_text(text, true);
  CHECK(c.master_seed == 18446744073709551615ull);
  CHECK(render_config(c).find("seed = 18446744073709551615\n") != std::string::npos);

  CHECK_THROWS_WITH_AS(
      parse_config_text("[shape]\nk = 2\nm = 2\n[experiment]\nseed = -4\n", true),
      doctest::Contains("experiment.seed"), ParameterError);
  CHECK_THROWS_WITH_AS(
      parse_config_text("[shape]\nk = 2\nm = 2\n[experiment]\nseed = 99999999999999999999\n",
                        true),
      doctest::Contains("out of range"), ParameterError);
}

TEST_CASE("unknown sections and keys are rejected by name") {
  CHECK_THROWS_WITH_AS(parse_config_text("[tuning]\nrate = 1\n", false),
                       doctest::Contains("[tuning]"), ParameterError);
  CHECK_THROWS_WITH_AS(parse_config_text("[shape]\nk = 2\nm = 2\nsides = 3\n", true),
                       doctest::Contains("shape.sides"), ParameterError);
  CHECK_THROWS_WITH_AS(parse_config_text("[window]\nsmax = 5\n", false),
                       doctest::Contains("window.smax"), ParameterError);
}

TEST_CASE("type mismatches name the field and the expected type") {
  CHECK_THROWS_WITH_AS(parse_config_text("[shape]\nk = \"ten\"\nm = 2\n", true),
                       doctest::Contains("shape.k"), ParameterError);
  CHECK_THROWS_WITH_AS(
      parse_config_text("[shape]\nk = 2\nm = 2\n[experiment]\ntrials = 2.5\n", true),
      doctest::Contains("experiment.trials"), ParameterError);
  CHECK_THROWS_WITH_AS(
      parse_config_text("[shape]\nk = 2\nm = 2\n[experiment]\nalgorithms = \"ftl\"\n", true),
      doctest::Contains("an array"), ParameterError);
  CHECK_THROWS_WITH_AS(
      parse_config_text("[shape]\nk = 2\nm = 2\n[solver]\nsubproblem = \"brute\"\n", true),
      doctest::Contains("enumerate"), ParameterError);
  CHECK_THROWS_WITH_AS(
      parse_config_text("[shape]\nk = 2\nm = 2\n[traffic]\nsine_specs = [[24, 1]]\n", true),
      doctest::Contains("period"), ParameterError);
}

TEST_CASE("parse errors carry line numbers") {
  const std::string text = "[shape]\nk = 2\nm = 2\n\nbad line here\n";
  CHECK_THROWS_WITH_AS(parse_config_text(text, true), doctest::Contains("line 5"),
                       ParameterError);
  CHECK_THROWS_WITH_AS(parse_config_text("[shape\nk = 2\n", true), doctest::Contains("line 1"),
                       ParameterError);
  CHECK_THROWS_WITH_AS(parse_config_text("k = 2\n", false), doctest::Contains("outside"),
                       ParameterError);
  CHECK_THROWS_WITH_AS(parse_config_text("[shape]\nk = 2 2\nm = 2\n", true),
                       doctest::Contains("trailing"), ParameterError);
  CHECK_THROWS_WITH_AS(parse_config_text("[experiment]\nalgorithms = [\"ftl\"\n", false),
                       doctest::Contains("array"), ParameterError);
}

TEST_CASE("explicit shape is required exactly when asked for") {
  CHECK_THROWS_WITH_AS(parse_config_text("[experiment]\ntrials = 2\n", true),
                       doctest::Contains("shape.k"), ParameterError);
  CHECK_THROWS_WITH_AS(parse_config_text("[shape]\nk = 3\n", true),
                       doctest::Contains("shape.m"), ParameterError);
  CHECK_THROWS_WITH_AS(parse_config_text("[shape]\nm = 3\n", true),
                       doctest::Contains("shape.k"), ParameterError);
  CHECK_NOTHROW(parse_config_text("[experiment]\ntrials = 2\n", false));
  const ExperimentConfig c = parse_config_text("[shape]\nk = 4\nm = 2\n", true);
  CHECK(c.k == 4);
  CHECK(c.m == 2);
  CHECK(c.trials == 10);  // untouched fields keep their defaults
}

TEST_CASE("comments, blank lines and multi-line arrays parse cleanly") {
  const std::string text =
      "# experiment sizing\n"
      "[shape]\n"
      "k = 3   # topics\n"
      "m = 2\n"
      "\n"
      "[experiment]\n"
      "algorithms = [\n"
      "  \"dynamic\",\n"
      "  \"static\",\n"
      "]  # trailing comma is fine\n"
      "[traffic]\n"
      "sine_specs = [[24, 1, 2],\n"
      "              [2, 0.5, 1]]\n";
  const ExperimentConfig c = parse_config_text(text, true);
  CHECK(c.k == 3);
  CHECK(c.algorithms == std::vector<std::string>{"dynamic", "static"});
  REQUIRE(c.traffic.sine_specs.size() == 2);
  CHECK(c.traffic.sine_specs[1].period == 2.0);

  // '#' inside a quoted string is content, not a comment.
  CHECK_THROWS_WITH_AS(
      parse_config_text("[shape]\nk = 2\nm = 2\n[experiment]\nalgorithms = [\"ft#l\"]\n", true),
      doctest::Contains("ft#l"), ParameterError);
}

TEST_CASE("semantic validation still applies after parsing") {
  CHECK_THROWS_AS(parse_config_text("[shape]\nk = 0\nm = 2\n", true), ParameterError);
  CHECK_THROWS_WITH_AS(
      parse_config_text("[shape]\nk = 2\nm = 2\n[experiment]\nalgorithms = [\"sgd\"]\n", true),
      doctest::Contains("sgd"), ParameterError);
}

TEST_CASE("config files load from disk with shape required") {
  const std::string dir = testing::make_temp_dir("config");
  const std::string path = dir + "/exp.toml";
  {
    std::ofstream out(path);
    out << render_config(exotic_config());
  }
  const ExperimentConfig c = load_config_file(path);
  CHECK(same_config(c, exotic_config()));
  CHECK_THROWS_WITH_AS(load_config_file(dir + "/nope.toml"), doctest::Contains("cannot open"),
                       ParameterError);
}

TEST_CASE("manifest round-trips every field") {
  const std::string dir = testing::make_temp_dir("manifest");
  const std::string path = dir + "/manifest.json";

  RunManifest m;
  m.tool = "smooco";
  m.version = "1.2.3";
  m.command = "smooco run --trials 3";
  m.master_seed = 18446744073709551615ull;
  m.timestamp = "2026-01-01T00:00:00Z";
  m.config_text = render_config(default_experiment_config());
  m.outputs = {"steps.csv", "summary.csv"};
  write_manifest(path, m);

  const RunManifest back = read_manifest(path);
  CHECK(back.tool == m.tool);
  CHECK(back.version == m.version);
  CHECK(back.command == m.command);
  CHECK(back.master_seed == m.master_seed);
  CHECK(back.timestamp == m.timestamp);
  CHECK(back.config_text == m.config_text);
  CHECK(back.outputs == m.outputs);

  // The embedded config text parses back to the original semantics.
  const ExperimentConfig c = parse_config_text(back.config_text, true);
  CHECK(same_config(c, default_experiment_config()));
}

TEST_CASE("manifest reader rejects missing or malformed files") {
  const std::string dir = testing::make_temp_dir("badmanifest");
  CHECK_THROWS_WITH_AS(read_manifest(dir + "/absent.json"), doctest::Contains("cannot open"),
                       ParameterError);

  const std::string garbled = dir + "/garbled.json";
  {
    std::ofstream out(garbled);
    out << "{not json";
  }
  CHECK_THROWS_WITH_AS(read_manifest(garbled), doctest::Contains("malformed"), ParameterError);

  const std::string partial = dir + "/partial.json";
  {
    std::ofstream out(partial);
    out << "{\"tool\": \"smooco\"}";
  }
  CHECK_THROWS_WITH_AS(read_manifest(partial), doctest::Contains("missing"), ParameterError);
}
