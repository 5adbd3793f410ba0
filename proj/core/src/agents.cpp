#include "crowdctl/agents.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crowdctl/errors.hpp"

namespace crowdctl {

using nlohmann::json;

namespace {

struct RosterEntry {
  const char* name;
  double noise;
  double shift;
  double error;
  bool random;
  int copies;
};

// Calibrated constants; see the table in agents.hpp.
constexpr RosterEntry kRoster[] = {
    {"perfect", 0.0, 0.0, 0.0, false, 1},
    {"good", 40.0, 0.0, 0.02, false, 3},
    {"bad", 140.0, 60.0, 0.30, false, 4},
    {"shifted_minus", 40.0, -125.0, 0.02, false, 1},
    {"shifted_plus", 40.0, 160.0, 0.02, false, 2},
    {"majorly_shifted_minus", 40.0, -145.0, 0.02, false, 1},
    {"confused", 40.0, 0.0, 0.60, false, 1},
    {"random", 0.0, 0.0, 0.0, true, 1},
};

Millis tick_time(double tick) {
  return Millis(tick * 1000.0 / EngineConstants::kTickRate);
}

}  // namespace

std::vector<AiProfile> default_roster() {
  std::vector<AiProfile> roster;
  for (const auto& e : kRoster) {
    for (int i = 0; i < e.copies; ++i) {
      std::string name = e.name;
      if (e.copies > 1) name += "_" + std::to_string(i + 1);
      roster.push_back(AiProfile{name, e.noise, e.shift, e.error, e.random});
    }
  }
  return roster;
}

void require_valid(const AiProfile& p) {
  if (!(p.error_chance >= 0.0 && p.error_chance <= 1.0)) {
    throw ConfigError("profile '" + p.name + "': error_chance out of range [0,1]");
  }
  if (!(p.timing_noise_ms >= 0.0)) {
    throw ConfigError("profile '" + p.name + "': timing_noise_ms must be >= 0");
  }
}

std::vector<AiProfile> roster_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("roster is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw ConfigError("roster must be a JSON array");
  std::vector<AiProfile> roster;
  for (const auto& item : j) {
    if (!item.is_object()) throw ConfigError("roster entries must be objects");
    AiProfile p;
    for (const auto& [key, v] : item.items()) {
      try {
        if (key == "name") {
          p.name = v.get<std::string>();
        } else if (key == "timing_noise_ms") {
          p.timing_noise_ms = v.get<double>();
        } else if (key == "shift_ms") {
          p.shift_ms = v.get<double>();
        } else if (key == "error_chance") {
          p.error_chance = v.get<double>();
        } else if (key == "random_play") {
          p.random_play = v.get<bool>();
        } else {
          throw ConfigError("unknown roster key '" + key + "'");
        }
      } catch (const json::type_error&) {
        throw ConfigError("roster field '" + key + "' has the wrong type");
      }
    }
    require_valid(p);
    roster.push_back(std::move(p));
  }
  return roster;
}

std::vector<AiProfile> load_roster_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open roster file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return roster_from_json_string(ss.str());
}

std::string to_json_string(const std::vector<AiProfile>& roster) {
  json j = json::array();
  for (const auto& p : roster) {
    j.push_back({{"name", p.name},
                 {"timing_noise_ms", p.timing_noise_ms},
                 {"shift_ms", p.shift_ms},
                 {"error_chance", p.error_chance},
                 {"random_play", p.random_play}});
  }
  return j.dump(2);
}

SyntheticPlayer::SyntheticPlayer(PlayerId id, AiProfile profile, double lead_ms)
    : id_(id), profile_(std::move(profile)), lead_ms_(lead_ms) {
  require_valid(profile_);
}

void SyntheticPlayer::reset() {
  plans_.clear();
  last_planned_.reset();
  next_random_.reset();
}

void SyntheticPlayer::plan_new_obstacles(const GameState& game, std::mt19937_64& rng) {
  for (const auto& o : game.obstacles) {
    if (last_planned_ && o.id <= *last_planned_) continue;
    last_planned_ = o.id;
    const auto window = try_required_window(game, o);
    if (!window) continue;

    double offset = profile_.shift_ms - lead_ms_;
    if (profile_.timing_noise_ms > 0.0) {
      offset += std::normal_distribution<double>(0.0, profile_.timing_noise_ms)(rng);
    }
    Command cmd = window->preferred;
    if (profile_.error_chance > 0.0 &&
        std::uniform_real_distribution<double>(0.0, 1.0)(rng) < profile_.error_chance) {
      // Uniform over the alphabet without the correct command; `none` means no reaction.
      auto pick = std::uniform_int_distribution<std::size_t>(0, kAlphabetSize - 2)(rng);
      if (pick >= index_of(cmd)) ++pick;
      cmd = command_from_index(pick);
    }
    Plan plan{o.id, tick_time(window->midpoint()) + Millis(offset), cmd};
    auto pos = std::upper_bound(plans_.begin(), plans_.end(), plan.fire_at,
                                [](Millis t, const Plan& p) { return t < p.fire_at; });
    plans_.insert(pos, plan);
  }
}

std::optional<InputEvent> SyntheticPlayer::decide(const GameState& game, Millis now,
                                                  std::mt19937_64& rng) {
  if (profile_.random_play) {
    std::exponential_distribution<double> gap(1.0 / AgentConstants::kRandomMeanIntervalMs);
    if (!next_random_) next_random_ = now + Millis(gap(rng));
    if (now < *next_random_) return std::nullopt;
    next_random_ = *next_random_ + Millis(gap(rng));
    if (*next_random_ < now) next_random_ = now;
    const auto cmd = command_from_index(std::uniform_int_distribution<std::size_t>(1, kAlphabetSize - 1)(rng));
    return InputEvent{id_, cmd, now};
  }

  plan_new_obstacles(game, rng);
  while (!plans_.empty() && plans_.front().fire_at <= now) {
    const Plan plan = plans_.front();
    plans_.pop_front();
    if (plan.cmd != Command::none) return InputEvent{id_, plan.cmd, now};
  }
  return std::nullopt;
}

std::vector<SyntheticPlayer> make_players(const std::vector<AiProfile>& roster) {
  std::vector<SyntheticPlayer> players;
  players.reserve(roster.size());
  for (std::size_t i = 0; i < roster.size(); ++i) {
    players.emplace_back(static_cast<PlayerId>(i), roster[i]);
  }
  return players;
}

}  // namespace crowdctl
