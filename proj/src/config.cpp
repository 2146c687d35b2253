#include "extrout/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace extrout {

ConfigError::ConfigError(const std::string& what, int line)
    : std::runtime_error(line > 0 ? fmt::format("config line {}: {}", line, what) : what),
      line_(line) {}

namespace {

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw std::invalid_argument(fmt::format("{}: '{}' is not a valid number", key, text));
  return value;
}

double parse_real(std::string_view key, std::string_view text) {
  std::string s(text);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size())
    throw std::invalid_argument(fmt::format("{}: '{}' is not a valid number", key, text));
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw std::invalid_argument(fmt::format("{}: '{}' is not a boolean", key, text));
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find(',', start);
    auto item = text.substr(start, end == std::string_view::npos ? text.npos : end - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.push_back(item);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

std::vector<int> parse_int_list(std::string_view key, std::string_view text) {
  std::vector<int> out;
  for (auto item : split_list(text)) out.push_back(parse_number<int>(key, item));
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

// -1 (or "random") leaves the extension to be drawn from [k_min, k_max].
std::optional<int> parse_k(std::string_view key, std::string_view text) {
  if (text == "random") return std::nullopt;
  const int v = parse_number<int>(key, text);
  if (v < 0) return std::nullopt;
  return v;
}

std::string format_k(const std::optional<int>& k) { return k ? std::to_string(*k) : "random"; }

std::optional<std::uint32_t> parse_node(std::string_view key, std::string_view text) {
  const auto v = parse_number<std::uint32_t>(key, text);
  if (v == 0) return std::nullopt;
  return v;
}

std::string format_node(const std::optional<std::uint32_t>& v) {
  return v ? std::to_string(*v) : "0";
}

struct KeySpec {
  std::string name;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define EXTROUT_KEY(NAME, SETTER, GETTER) \
  KeySpec{NAME, [](ExperimentConfig& c, std::string_view v) { SETTER; }, \
          [](const ExperimentConfig& c) -> std::string { return GETTER; }}

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      EXTROUT_KEY("topology.rows", c.topology.grid_rows = parse_number<int>("rows", v),
                  std::to_string(c.topology.grid_rows)),
      EXTROUT_KEY("topology.cols", c.topology.grid_cols = parse_number<int>("cols", v),
                  std::to_string(c.topology.grid_cols)),
      EXTROUT_KEY("topology.spacing", c.topology.spacing = parse_real("spacing", v),
                  fmt::format("{}", c.topology.spacing)),
      EXTROUT_KEY("topology.perturbation", c.topology.perturbation = parse_real("perturbation", v),
                  fmt::format("{}", c.topology.perturbation)),
      EXTROUT_KEY("topology.range", c.topology.range = parse_real("range", v),
                  fmt::format("{}", c.topology.range)),
      EXTROUT_KEY("topology.qudg_factor", c.topology.qudg_factor = parse_real("qudg_factor", v),
                  fmt::format("{}", c.topology.qudg_factor)),

      EXTROUT_KEY("scenario.variant", c.variant.kind = parse_variant_kind(v),
                  variant_key(c.variant.kind)),
      EXTROUT_KEY("scenario.count", c.variant.count = parse_number<int>("count", v),
                  std::to_string(c.variant.count)),
      EXTROUT_KEY("scenario.residual_rate",
                  c.variant.residual_cover_rate = parse_real("residual_rate", v),
                  fmt::format("{}", c.variant.residual_cover_rate)),
      EXTROUT_KEY("scenario.source", c.source = parse_node("source", v), format_node(c.source)),
      EXTROUT_KEY("scenario.dest", c.dest = parse_node("dest", v), format_node(c.dest)),
      EXTROUT_KEY("scenario.target_l", c.target_l = parse_number<int>("target_l", v),
                  std::to_string(c.target_l)),
      EXTROUT_KEY("scenario.ks", c.scenario.ks = parse_k("ks", v), format_k(c.scenario.ks)),
      EXTROUT_KEY("scenario.kd", c.scenario.kd = parse_k("kd", v), format_k(c.scenario.kd)),
      EXTROUT_KEY("scenario.k_min", c.scenario.k_min = parse_number<int>("k_min", v),
                  std::to_string(c.scenario.k_min)),
      EXTROUT_KEY("scenario.k_max", c.scenario.k_max = parse_number<int>("k_max", v),
                  std::to_string(c.scenario.k_max)),
      EXTROUT_KEY("scenario.strict", c.scenario.strict = parse_bool("strict", v),
                  c.scenario.strict ? "true" : "false"),
      EXTROUT_KEY("scenario.source_rate",
                  c.scenario.source_rate = parse_number<int>("source_rate", v),
                  std::to_string(c.scenario.source_rate)),
      EXTROUT_KEY("scenario.full_extension", c.full_extension = parse_bool("full_extension", v),
                  c.full_extension ? "true" : "false"),
      EXTROUT_KEY("scenario.link_padding",
                  c.scenario.link_padding = parse_bool("link_padding", v),
                  c.scenario.link_padding ? "true" : "false"),

      EXTROUT_KEY("run.budget", c.scenario.packet_budget = parse_number<int>("budget", v),
                  std::to_string(c.scenario.packet_budget)),
      EXTROUT_KEY("run.reps", c.reps = parse_number<int>("reps", v), std::to_string(c.reps)),
      EXTROUT_KEY("run.seed", c.seed = parse_number<std::uint64_t>("seed", v),
                  std::to_string(c.seed)),
      EXTROUT_KEY("run.out", c.out = std::string(v), c.out),
      EXTROUT_KEY("run.reseed_limit", c.reseed_limit = parse_number<int>("reseed_limit", v),
                  std::to_string(c.reseed_limit)),
      EXTROUT_KEY("run.pairs_per_topology",
                  c.pairs_per_topology = parse_number<int>("pairs_per_topology", v),
                  std::to_string(c.pairs_per_topology)),
      EXTROUT_KEY("run.attack_draws", c.attack_draws = parse_number<int>("attack_draws", v),
                  std::to_string(c.attack_draws)),

      EXTROUT_KEY("attack.trials", c.trials = parse_number<int>("trials", v),
                  std::to_string(c.trials)),
      EXTROUT_KEY("attack.budget", c.trial_budget = parse_number<int>("attack.budget", v),
                  std::to_string(c.trial_budget)),

      EXTROUT_KEY("sweep.l_targets", c.sweep.l_targets = parse_int_list("l_targets", v),
                  join_ints(c.sweep.l_targets)),
      EXTROUT_KEY(
          "sweep.k_settings",
          {
            c.sweep.k_settings.clear();
            for (auto item : split_list(v)) {
              const auto colon = item.find(':');
              if (colon == std::string_view::npos)
                throw std::invalid_argument(
                    fmt::format("k_settings: '{}' is not of the form ks:kd", item));
              c.sweep.k_settings.push_back(
                  {parse_number<int>("k_settings", item.substr(0, colon)),
                   parse_number<int>("k_settings", item.substr(colon + 1))});
            }
          },
          [&c] {
            std::string out;
            for (std::size_t i = 0; i < c.sweep.k_settings.size(); ++i)
              out += fmt::format("{}{}:{}", i ? "," : "", c.sweep.k_settings[i].ks,
                                 c.sweep.k_settings[i].kd);
            return out;
          }()),
      EXTROUT_KEY("sweep.duplicates", c.sweep.duplicates = parse_int_list("duplicates", v),
                  join_ints(c.sweep.duplicates)),
      EXTROUT_KEY("sweep.fakes", c.sweep.fakes = parse_int_list("fakes", v),
                  join_ints(c.sweep.fakes)),
      EXTROUT_KEY("sweep.nfakes", c.sweep.nfakes = parse_int_list("nfakes", v),
                  join_ints(c.sweep.nfakes)),
      EXTROUT_KEY("sweep.pairs_per_length",
                  c.sweep.pairs_per_length = parse_number<int>("pairs_per_length", v),
                  std::to_string(c.sweep.pairs_per_length)),
      EXTROUT_KEY("sweep.fixed_l", c.sweep.fixed_l = parse_number<int>("fixed_l", v),
                  std::to_string(c.sweep.fixed_l)),
  };
  return specs;
}

#undef EXTROUT_KEY

const KeySpec* find_key(std::string_view name) {
  for (const auto& k : key_specs())
    if (k.name == name) return &k;
  return nullptr;
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    topology.validate();
    variant.validate();
    scenario.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (reps < 1) throw ConfigError("run.reps must be >= 1");
  if (target_l < 1) throw ConfigError("scenario.target_l must be >= 1");
  if (reseed_limit < 1) throw ConfigError("run.reseed_limit must be >= 1");
  if (pairs_per_topology < 1) throw ConfigError("run.pairs_per_topology must be >= 1");
  if (attack_draws < 0) throw ConfigError("run.attack_draws must be >= 0");
  if (trial_budget < 1) throw ConfigError("attack.budget must be >= 1");
  if (source.has_value() != dest.has_value())
    throw ConfigError("scenario.source and scenario.dest must be given together");
  if (source && *source == *dest) throw ConfigError("scenario.source and scenario.dest must differ");
  const auto n = static_cast<std::uint32_t>(topology.node_count());
  if ((source && *source > n) || (dest && *dest > n))
    throw ConfigError("scenario.source/dest outside the topology");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& k : key_specs()) out.push_back(k.name);
    return out;
  }();
  return names;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value,
                   int line) {
  const KeySpec* spec = find_key(key);
  if (!spec) throw ConfigError(fmt::format("unknown key '{}'", key), line);
  try {
    spec->set(cfg, value);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what(), line);
  }
}

ExperimentConfig parse_config(const std::string& yaml_text) {
  ExperimentConfig cfg;
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(e.msg, e.mark.line + 1);
  }
  if (!root || root.IsNull()) return cfg;
  if (!root.IsMap()) throw ConfigError("top level must be a mapping of sections", root.Mark().line + 1);
  for (const auto& section : root) {
    const auto name = section.first.as<std::string>();
    const int sline = section.first.Mark().line + 1;
    if (!section.second.IsMap())
      throw ConfigError(fmt::format("section '{}' must be a mapping", name), sline);
    for (const auto& entry : section.second) {
      const auto key = name + "." + entry.first.as<std::string>();
      const int line = entry.first.Mark().line + 1;
      std::string value;
      if (entry.second.IsSequence()) {
        for (std::size_t i = 0; i < entry.second.size(); ++i)
          value += (i ? "," : "") + entry.second[i].as<std::string>();
      } else if (entry.second.IsScalar()) {
        value = entry.second.as<std::string>();
      } else {
        throw ConfigError(fmt::format("'{}' must be a scalar or a list", key), line);
      }
      apply_setting(cfg, key, value, line);
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::pair<std::string, std::string>> resolved_settings(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : key_specs()) out.emplace_back(k.name, k.get(cfg));
  return out;
}

std::vector<std::string> provenance(const ExperimentConfig& cfg, std::string_view command) {
  std::vector<std::string> out{fmt::format("extrout {}", command),
                               fmt::format("root_seed={}", cfg.seed)};
  for (const auto& [k, v] : resolved_settings(cfg)) out.push_back(fmt::format("{}={}", k, v));
  return out;
}

}  // namespace extrout
