#include "smooco/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "smooco/csv.hpp"
#include "smooco/errors.hpp"
#include "smooco/version.hpp"

namespace smooco {
namespace {

struct TomlValue {
  enum class Kind { kInteger, kFloat, kString, kArray };
  Kind kind = Kind::kInteger;
  std::string text;               // raw token (scalars) or decoded content (strings)
  std::vector<TomlValue> items;   // arrays
};

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Removes a trailing comment, respecting quoted strings.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"') in_string = !in_string;
    if (c == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

bool is_integer_token(const std::string& t) {
  if (t.empty()) return false;
  std::size_t i = (t[0] == '+' || t[0] == '-') ? 1 : 0;
  if (i == t.size()) return false;
  for (; i < t.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
  }
  return true;
}

class ValueParser {
 public:
  explicit ValueParser(const std::string& text) : text_(text) {}

  TomlValue parse() {
    skip_space();
    TomlValue v = parse_value();
    skip_space();
    if (pos_ != text_.size()) {
      throw ParameterError("config: trailing characters after value: '" +
                           text_.substr(pos_) + "'");
    }
    return v;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  TomlValue parse_value() {
    if (pos_ >= text_.size()) throw ParameterError("config: missing value");
    const char c = text_[pos_];
    if (c == '[') return parse_array();
    if (c == '"') return parse_string();
    return parse_scalar();
  }

  TomlValue parse_array() {
    ++pos_;  // consume '['
    TomlValue v;
    v.kind = TomlValue::Kind::kArray;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return v;
    }
    while (true) {
      v.items.push_back(parse_value());
      skip_space();
      if (pos_ >= text_.size()) {
        throw ParameterError("config: unterminated array");
      }
      if (text_[pos_] == ',') {
        ++pos_;
        skip_space();
        // Trailing comma before the closing bracket is allowed.
        if (pos_ < text_.size() && text_[pos_] == ']') {
          ++pos_;
          return v;
        }
        continue;
      }
      if (text_[pos_] == ']') {
        ++pos_;
        return v;
      }
      throw ParameterError("config: expected ',' or ']' in array");
    }
  }

  TomlValue parse_string() {
    ++pos_;  // consume '"'
    TomlValue v;
    v.kind = TomlValue::Kind::kString;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      v.text.push_back(text_[pos_]);
      ++pos_;
    }
    if (pos_ >= text_.size()) {
      throw ParameterError("config: unterminated string");
    }
    ++pos_;  // consume closing '"'
    return v;
  }

  TomlValue parse_scalar() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    TomlValue v;
    v.text = text_.substr(start, pos_ - start);
    if (v.text.empty()) throw ParameterError("config: missing value");
    v.kind = is_integer_token(v.text) ? TomlValue::Kind::kInteger
                                      : TomlValue::Kind::kFloat;
    return v;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

std::string kind_name(TomlValue::Kind kind) {
  switch (kind) {
    case TomlValue::Kind::kInteger: return "integer";
    case TomlValue::Kind::kFloat: return "float";
    case TomlValue::Kind::kString: return "string";
    case TomlValue::Kind::kArray: return "array";
  }
  return "?";
}

[[noreturn]] void type_error(const std::string& field, const char* want,
                             const TomlValue& got) {
  throw ParameterError("config: '" + field + "' expects " + want + ", got " +
                       kind_name(got.kind));
}

std::int64_t as_int(const std::string& field, const TomlValue& v) {
  if (v.kind != TomlValue::Kind::kInteger) type_error(field, "an integer", v);
  return parse_int(v.text);
}

// Seeds occupy the full 64-bit range, so they bypass the signed path.
std::uint64_t as_uint64(const std::string& field, const TomlValue& v) {
  if (v.kind != TomlValue::Kind::kInteger || v.text.empty() || v.text[0] == '-') {
    type_error(field, "a non-negative integer", v);
  }
  const char* b = v.text.c_str();
  if (*b == '+') ++b;
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(b, v.text.c_str() + v.text.size(), out);
  if (ec != std::errc() || ptr != v.text.c_str() + v.text.size()) {
    throw ParameterError("config: '" + field + "' is out of range: " + v.text);
  }
  return out;
}

double as_double(const std::string& field, const TomlValue& v) {
  if (v.kind != TomlValue::Kind::kInteger && v.kind != TomlValue::Kind::kFloat) {
    type_error(field, "a number", v);
  }
  return parse_double(v.text);
}

std::string as_string(const std::string& field, const TomlValue& v) {
  if (v.kind != TomlValue::Kind::kString) type_error(field, "a string", v);
  return v.text;
}

std::vector<std::string> as_string_array(const std::string& field,
                                         const TomlValue& v) {
  if (v.kind != TomlValue::Kind::kArray) type_error(field, "an array", v);
  std::vector<std::string> out;
  out.reserve(v.items.size());
  for (const TomlValue& item : v.items) out.push_back(as_string(field, item));
  return out;
}

std::vector<SineSpec> as_sine_specs(const std::string& field,
                                    const TomlValue& v) {
  if (v.kind != TomlValue::Kind::kArray) type_error(field, "an array", v);
  std::vector<SineSpec> out;
  out.reserve(v.items.size());
  for (const TomlValue& item : v.items) {
    if (item.kind != TomlValue::Kind::kArray || item.items.size() != 3) {
      throw ParameterError("config: '" + field +
                           "' entries must be [period, amp_low, amp_high]");
    }
    SineSpec spec;
    spec.period = as_double(field, item.items[0]);
    spec.amplitude_low = as_double(field, item.items[1]);
    spec.amplitude_high = as_double(field, item.items[2]);
    out.push_back(spec);
  }
  return out;
}

int as_bounded_int(const std::string& field, const TomlValue& v) {
  const std::int64_t raw = as_int(field, v);
  if (raw < std::numeric_limits<int>::min() ||
      raw > std::numeric_limits<int>::max()) {
    throw ParameterError("config: '" + field + "' is out of range: " + v.text);
  }
  return static_cast<int>(raw);
}

struct Applier {
  ExperimentConfig& config;
  bool saw_k = false;
  bool saw_m = false;

  void apply(const std::string& section, const std::string& key,
             const TomlValue& v) {
    const std::string field = section + "." + key;
    if (section == "experiment") {
      if (key == "seed") config.master_seed = as_uint64(field, v);
      else if (key == "trials") config.trials = as_bounded_int(field, v);
      else if (key == "warmup") config.warmup = as_bounded_int(field, v);
      else if (key == "online_steps") config.online_steps = as_bounded_int(field, v);
      else if (key == "benchmark_chunk") config.benchmark_chunk = as_bounded_int(field, v);
      else if (key == "workers") config.workers = as_bounded_int(field, v);
      else if (key == "algorithms") config.algorithms = as_string_array(field, v);
      else unknown_key(field);
    } else if (section == "shape") {
      if (key == "k") { config.k = as_bounded_int(field, v); saw_k = true; }
      else if (key == "m") { config.m = as_bounded_int(field, v); saw_m = true; }
      else if (key == "unit_cost_low") config.unit_cost_low = as_double(field, v);
      else if (key == "unit_cost_high") config.unit_cost_high = as_double(field, v);
      else unknown_key(field);
    } else if (section == "traffic") {
      if (key == "base_offset") config.traffic.base_offset = as_double(field, v);
      else if (key == "clamp_floor") config.traffic.clamp_floor = as_double(field, v);
      else if (key == "ar_coeff") config.traffic.ar_coeff = as_double(field, v);
      else if (key == "ar_noise_std") config.traffic.ar_noise_std = as_double(field, v);
      else if (key == "weight_sine") config.traffic.weight_sine = as_double(field, v);
      else if (key == "weight_ar") config.traffic.weight_ar = as_double(field, v);
      else if (key == "weight_gp") config.traffic.weight_gp = as_double(field, v);
      else if (key == "gp_variance") config.traffic.gp_kernel.variance = as_double(field, v);
      else if (key == "gp_length_scale") config.traffic.gp_kernel.length_scale = as_double(field, v);
      else if (key == "gp_alpha") config.traffic.gp_kernel.alpha = as_double(field, v);
      else if (key == "sine_specs") config.traffic.sine_specs = as_sine_specs(field, v);
      else unknown_key(field);
    } else if (section == "predictor") {
      if (key == "variance") config.predictor_kernel.variance = as_double(field, v);
      else if (key == "length_scale") config.predictor_kernel.length_scale = as_double(field, v);
      else if (key == "alpha") config.predictor_kernel.alpha = as_double(field, v);
      else if (key == "noise_variance") config.predictor_kernel.noise_variance = as_double(field, v);
      else if (key == "z") config.predictor_z = as_double(field, v);
      else unknown_key(field);
    } else if (section == "solver") {
      if (key == "window_solver") config.solver.window_solver = as_string(field, v);
      else if (key == "subproblem") config.solver.subproblem = parse_subproblem(field, as_string(field, v));
      else if (key == "passes") config.solver.passes = as_bounded_int(field, v);
      else if (key == "relax_c") config.solver.relax_c = as_double(field, v);
      else if (key == "enumeration_limit") config.solver.enumeration_limit = as_int(field, v);
      else if (key == "dp_state_limit") config.solver.dp_state_limit = as_int(field, v);
      else if (key == "local_restarts") config.solver.local_restarts = as_bounded_int(field, v);
      else if (key == "ftl_strategy") config.solver.ftl_strategy = as_string(field, v);
      else unknown_key(field);
    } else if (section == "window") {
      if (key == "s_max") config.s_max = as_bounded_int(field, v);
      else if (key == "short") config.short_window = as_bounded_int(field, v);
      else if (key == "long") config.long_window = as_bounded_int(field, v);
      else unknown_key(field);
    } else if (section == "ogd") {
      if (key == "eta0") config.ogd_eta0 = as_double(field, v);
      else unknown_key(field);
    } else {
      throw ParameterError("config: unknown section [" + section + "]");
    }
  }

  static SubproblemStrategy parse_subproblem(const std::string& field,
                                             const std::string& name) {
    if (name == "enumerate") return SubproblemStrategy::kEnumerate;
    if (name == "local") return SubproblemStrategy::kLocal;
    throw ParameterError("config: '" + field +
                         "' must be \"enumerate\" or \"local\", got \"" + name +
                         "\"");
  }

  [[noreturn]] static void unknown_key(const std::string& field) {
    throw ParameterError("config: unknown key '" + field + "'");
  }
};

const char* subproblem_name(SubproblemStrategy s) {
  return s == SubproblemStrategy::kEnumerate ? "enumerate" : "local";
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

ExperimentConfig default_experiment_config() { return ExperimentConfig{}; }

ExperimentConfig parse_config_text(const std::string& text, bool require_shape) {
  ExperimentConfig config;
  Applier applier{config};

  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ParameterError("config line " + std::to_string(lineno) +
                             ": malformed section header: " + line);
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParameterError("config line " + std::to_string(lineno) +
                           ": expected 'key = value': " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value_text = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ParameterError("config line " + std::to_string(lineno) +
                           ": missing key");
    }
    if (section.empty()) {
      throw ParameterError("config line " + std::to_string(lineno) + ": key '" +
                           key + "' outside any [section]");
    }
    // Arrays may wrap across lines; keep consuming until brackets balance.
    auto bracket_depth = [](const std::string& s) {
      int depth = 0;
      bool in_string = false;
      for (char c : s) {
        if (c == '"') in_string = !in_string;
        if (in_string) continue;
        if (c == '[') ++depth;
        if (c == ']') --depth;
      }
      return depth;
    };
    while (bracket_depth(value_text) > 0 && std::getline(in, line)) {
      ++lineno;
      value_text += " " + trim(strip_comment(line));
    }
    TomlValue value;
    try {
      value = ValueParser(value_text).parse();
      applier.apply(section, key, value);
    } catch (const ParameterError& e) {
      throw ParameterError(std::string(e.what()) + " (line " +
                           std::to_string(lineno) + ")");
    }
  }

  if (require_shape) {
    if (!applier.saw_k && !applier.saw_m) {
      throw ParameterError("config: missing required fields 'shape.k' and 'shape.m'");
    }
    if (!applier.saw_k) throw ParameterError("config: missing required field 'shape.k'");
    if (!applier.saw_m) throw ParameterError("config: missing required field 'shape.m'");
  }
  config.validate();
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), /*require_shape=*/true);
}

std::string render_config(const ExperimentConfig& config) {
  std::ostringstream out;
  const auto d = [](double v) { return format_double(v); };

  out << "[experiment]\n";
  out << "seed = " << config.master_seed << "\n";
  out << "trials = " << config.trials << "\n";
  out << "warmup = " << config.warmup << "\n";
  out << "online_steps = " << config.online_steps << "\n";
  out << "benchmark_chunk = " << config.benchmark_chunk << "\n";
  out << "workers = " << config.workers << "\n";
  out << "algorithms = [";
  for (std::size_t i = 0; i < config.algorithms.size(); ++i) {
    if (i) out << ", ";
    out << quote(config.algorithms[i]);
  }
  out << "]\n\n";

  out << "[shape]\n";
  out << "k = " << config.k << "\n";
  out << "m = " << config.m << "\n";
  out << "unit_cost_low = " << d(config.unit_cost_low) << "\n";
  out << "unit_cost_high = " << d(config.unit_cost_high) << "\n\n";

  out << "[traffic]\n";
  out << "base_offset = " << d(config.traffic.base_offset) << "\n";
  out << "clamp_floor = " << d(config.traffic.clamp_floor) << "\n";
  out << "weight_sine = " << d(config.traffic.weight_sine) << "\n";
  out << "weight_ar = " << d(config.traffic.weight_ar) << "\n";
  out << "weight_gp = " << d(config.traffic.weight_gp) << "\n";
  out << "ar_coeff = " << d(config.traffic.ar_coeff) << "\n";
  out << "ar_noise_std = " << d(config.traffic.ar_noise_std) << "\n";
  out << "gp_variance = " << d(config.traffic.gp_kernel.variance) << "\n";
  out << "gp_length_scale = " << d(config.traffic.gp_kernel.length_scale) << "\n";
  out << "gp_alpha = " << d(config.traffic.gp_kernel.alpha) << "\n";
  out << "sine_specs = [";
  for (std::size_t i = 0; i < config.traffic.sine_specs.size(); ++i) {
    const SineSpec& s = config.traffic.sine_specs[i];
    if (i) out << ", ";
    out << "[" << d(s.period) << ", " << d(s.amplitude_low) << ", "
        << d(s.amplitude_high) << "]";
  }
  out << "]\n\n";

  out << "[predictor]\n";
  out << "variance = " << d(config.predictor_kernel.variance) << "\n";
  out << "length_scale = " << d(config.predictor_kernel.length_scale) << "\n";
  out << "alpha = " << d(config.predictor_kernel.alpha) << "\n";
  out << "noise_variance = " << d(config.predictor_kernel.noise_variance) << "\n";
  out << "z = " << d(config.predictor_z) << "\n\n";

  out << "[solver]\n";
  out << "window_solver = " << quote(config.solver.window_solver) << "\n";
  out << "subproblem = " << quote(subproblem_name(config.solver.subproblem)) << "\n";
  out << "passes = " << config.solver.passes << "\n";
  out << "relax_c = " << d(config.solver.relax_c) << "\n";
  out << "enumeration_limit = " << config.solver.enumeration_limit << "\n";
  out << "dp_state_limit = " << config.solver.dp_state_limit << "\n";
  out << "local_restarts = " << config.solver.local_restarts << "\n";
  out << "ftl_strategy = " << quote(config.solver.ftl_strategy) << "\n\n";

  out << "[window]\n";
  out << "s_max = " << config.s_max << "\n";
  out << "short = " << config.short_window << "\n";
  out << "long = " << config.long_window << "\n";

  if (config.ogd_eta0.has_value()) {
    out << "\n[ogd]\n";
    out << "eta0 = " << d(*config.ogd_eta0) << "\n";
  }
  return out.str();
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  nlohmann::ordered_json j;
  j["tool"] = manifest.tool;
  j["version"] = manifest.version;
  j["command"] = manifest.command;
  j["master_seed"] = manifest.master_seed;
  j["timestamp"] = manifest.timestamp;
  j["config"] = manifest.config_text;
  j["outputs"] = manifest.outputs;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write manifest: " + path);
  out << j.dump(2) << "\n";
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open manifest: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("malformed manifest " + path + ": " + e.what());
  }
  RunManifest m;
  try {
    m.tool = j.at("tool").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.timestamp = j.at("timestamp").get<std::string>();
    m.config_text = j.at("config").get<std::string>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("manifest " + path + " missing fields: " + e.what());
  }
  return m;
}

}  // namespace smooco
