#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smooco/bench.hpp"

namespace smooco {

// Experiment defaults used when no config file is given: the k=10 topics /
// m=3 servers setup with seasonal+AR+GP traffic, 50 warmup steps, 100 online
// steps, 10 trials and all seven algorithms.
ExperimentConfig default_experiment_config();

// Parses the TOML-style config text. Unknown sections or keys are errors
// (they are almost always typos), as are type mismatches; messages name the
// offending field. When require_shape is set, shape.k and shape.m must be
// present explicitly — every other field falls back to its default.
ExperimentConfig parse_config_text(const std::string& text, bool require_shape);

ExperimentConfig load_config_file(const std::string& path);

// Renders every field explicitly; parsing the result reproduces the config
// exactly (numbers are written with round-trip precision).
std::string render_config(const ExperimentConfig& config);

// Provenance sidecar written next to every output set. Re-running from the
// embedded resolved config reproduces the outputs byte for byte; the
// timestamp is documentation, not an input.
struct RunManifest {
  std::string tool;
  std::string version;
  std::string command;
  std::uint64_t master_seed = 0;
  std::string timestamp;
  std::string config_text;
  std::vector<std::string> outputs;
};

void write_manifest(const std::string& path, const RunManifest& manifest);
RunManifest read_manifest(const std::string& path);

}  // namespace smooco
