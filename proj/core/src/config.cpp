#include "crowdctl/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crowdctl/errors.hpp"

namespace crowdctl {

using nlohmann::json;

std::string_view to_string(FrameMode m) noexcept {
  return m == FrameMode::static_frames ? "static" : "dynamic";
}

std::string_view to_string(AggregatorKind a) noexcept {
  return a == AggregatorKind::majority ? "mv" : "reliability";
}

FrameMode frame_mode_from_string(std::string_view s) {
  if (s == "static") return FrameMode::static_frames;
  if (s == "dynamic") return FrameMode::dynamic_frames;
  throw ConfigError("unknown frame_mode '" + std::string(s) + "' (expected static|dynamic)");
}

AggregatorKind aggregator_from_string(std::string_view s) {
  if (s == "mv") return AggregatorKind::majority;
  if (s == "reliability") return AggregatorKind::reliability;
  throw ConfigError("unknown aggregator '" + std::string(s) + "' (expected mv|reliability)");
}

std::vector<std::string> validate(const ControllerConfig& cfg) {
  std::vector<std::string> errors;
  if (cfg.n_players < 1) errors.emplace_back("n_players must be >= 1");
  if (!(cfg.ttl_ms > 0.0)) errors.emplace_back("ttl_ms must be > 0");
  if (!(cfg.threshold_t > 0.0 && cfg.threshold_t <= 1.0)) {
    errors.emplace_back("threshold_t out of range (0,1]");
  }
  if (!(cfg.static_len_ms > 0.0)) errors.emplace_back("static_len_ms must be > 0");
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) errors.emplace_back("gamma out of range [0,1]");
  if (!(cfg.delta >= 0.0)) errors.emplace_back("delta must be >= 0");
  if (!(cfg.omega >= 0.0)) errors.emplace_back("omega must be >= 0");

  std::array<bool, kAlphabetSize> seen{};
  bool permutation = true;
  for (Command c : cfg.tie_order) {
    if (!in_alphabet(c) || seen[index_of(c)]) {
      permutation = false;
      break;
    }
    seen[index_of(c)] = true;
  }
  if (!permutation) errors.emplace_back("tie_order is not a permutation of the command alphabet");
  return errors;
}

void require_valid(const ControllerConfig& cfg) {
  auto errors = validate(cfg);
  if (errors.empty()) return;
  std::string msg = "invalid controller config:";
  for (const auto& e : errors) msg += " " + e + ";";
  throw ConfigError(msg);
}

std::string to_json_string(const ControllerConfig& cfg) {
  json tie = json::array();
  for (Command c : cfg.tie_order) tie.push_back(static_cast<int>(c));
  json j = {
      {"n_players", cfg.n_players},
      {"ttl_ms", cfg.ttl_ms},
      {"threshold_t", cfg.threshold_t},
      {"static_len_ms", cfg.static_len_ms},
      {"gamma", cfg.gamma},
      {"delta", cfg.delta},
      {"omega", cfg.omega},
      {"tie_order", tie},
      {"frame_mode", to_string(cfg.frame_mode)},
      {"aggregator", to_string(cfg.aggregator)},
  };
  return j.dump();
}

namespace {

double number_field(const json& v, const char* key) {
  if (!v.is_number()) throw ConfigError(std::string(key) + " must be a number");
  return v.get<double>();
}

}  // namespace

ControllerConfig config_from_json_string(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  ControllerConfig cfg;
  for (const auto& [key, v] : j.items()) {
    if (key == "n_players") {
      if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError("n_players must be a non-negative integer");
      }
      cfg.n_players = v.get<std::size_t>();
    } else if (key == "ttl_ms") {
      cfg.ttl_ms = number_field(v, "ttl_ms");
    } else if (key == "threshold_t") {
      cfg.threshold_t = number_field(v, "threshold_t");
    } else if (key == "static_len_ms") {
      cfg.static_len_ms = number_field(v, "static_len_ms");
    } else if (key == "gamma") {
      cfg.gamma = number_field(v, "gamma");
    } else if (key == "delta") {
      cfg.delta = number_field(v, "delta");
    } else if (key == "omega") {
      cfg.omega = number_field(v, "omega");
    } else if (key == "tie_order") {
      if (!v.is_array() || v.size() != kAlphabetSize) {
        throw ConfigError("tie_order must be an array of " + std::to_string(kAlphabetSize) +
                          " command ids");
      }
      for (std::size_t i = 0; i < kAlphabetSize; ++i) {
        if (!v[i].is_number_integer() || v[i].get<int>() < 0 || v[i].get<int>() > 255) {
          throw ConfigError("tie_order entries must be command ids");
        }
        cfg.tie_order[i] = static_cast<Command>(v[i].get<int>());
      }
    } else if (key == "frame_mode") {
      if (!v.is_string()) throw ConfigError("frame_mode must be a string");
      cfg.frame_mode = frame_mode_from_string(v.get<std::string>());
    } else if (key == "aggregator") {
      if (!v.is_string()) throw ConfigError("aggregator must be a string");
      cfg.aggregator = aggregator_from_string(v.get<std::string>());
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

ControllerConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json_string(ss.str());
}

std::string config_label(const ControllerConfig& cfg) {
  return std::string(to_string(cfg.frame_mode)) + "+" + std::string(to_string(cfg.aggregator));
}

}  // namespace crowdctl
