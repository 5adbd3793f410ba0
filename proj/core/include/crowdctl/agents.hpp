#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "crowdctl/command.hpp"
#include "crowdctl/game.hpp"

namespace crowdctl {

/// Skill model of a synthetic player, expressed as deviations from perfect play.
struct AiProfile {
  std::string name;
  double timing_noise_ms = 0.0;  // std-dev of Gaussian jitter
  double shift_ms = 0.0;         // mean offset, negative = early
  double error_chance = 0.0;     // probability of a wrong command
  bool random_play = false;      // ignore the game entirely

  bool is_perfect() const noexcept {
    return !random_play && timing_noise_ms == 0.0 && shift_ms == 0.0 && error_chance == 0.0;
  }

  friend bool operator==(const AiProfile&, const AiProfile&) = default;
};

/// Agent-side constants shared by every profile.
struct AgentConstants {
  /// Players anticipate the mediator: they aim this far ahead of the moment the crowd
  /// command has to land.
  static constexpr double kLeadMs = 135.0;
  /// Mean interval between inputs of a random player.
  static constexpr double kRandomMeanIntervalMs = 800.0;
};

/// The fourteen-agent roster: 1 Perfect, 3 Good, 4 Bad, 1 Shifted(-), 2 Shifted(+),
/// 1 Majorly Shifted(-), 1 Confused and 1 Random.
///
/// Parameter values are calibrated against this engine, not taken from any published run:
///
///   profile                 noise ms  shift ms  error
///   perfect                      0        0      0
///   good                        40        0      0.02
///   bad                        140      +60      0.30
///   shifted_minus               40     -125      0.02
///   shifted_plus                40     +160      0.02
///   majorly_shifted_minus       40     -145      0.02
///   confused                    40        0      0.60
///   random                  (uniform commands, exponential gaps)
std::vector<AiProfile> default_roster();

/// Validates bounds (error_chance in [0,1], noise >= 0). Throws ConfigError.
void require_valid(const AiProfile& profile);

/// JSON array of objects mirroring the AiProfile fields.
std::vector<AiProfile> roster_from_json_string(const std::string& text);
std::vector<AiProfile> load_roster_file(const std::string& path);
std::string to_json_string(const std::vector<AiProfile>& roster);

/// A profile bound to a player slot, with the per-obstacle plans it has committed to.
class SyntheticPlayer {
 public:
  SyntheticPlayer(PlayerId id, AiProfile profile, double lead_ms = AgentConstants::kLeadMs);

  /// Called once per tick with the crowd game as seen on screen. Plans each newly visible
  /// obstacle exactly once and fires planned commands when their time comes; at most one
  /// event per call. Deterministic for a given rng state.
  std::optional<InputEvent> decide(const GameState& game, Millis now, std::mt19937_64& rng);

  /// Drops all plans; call when a new game starts.
  void reset();

  PlayerId id() const noexcept { return id_; }
  const AiProfile& profile() const noexcept { return profile_; }

 private:
  struct Plan {
    std::uint64_t obstacle;
    Millis fire_at;
    Command cmd;
  };

  void plan_new_obstacles(const GameState& game, std::mt19937_64& rng);

  PlayerId id_;
  AiProfile profile_;
  double lead_ms_;
  std::deque<Plan> plans_;
  std::optional<std::uint64_t> last_planned_;
  std::optional<Millis> next_random_;
};

/// Convenience for callers that hold a whole roster.
std::vector<SyntheticPlayer> make_players(const std::vector<AiProfile>& roster);

}  // namespace crowdctl
