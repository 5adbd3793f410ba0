#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "crowdctl/command.hpp"

namespace crowdctl {

/// Engine constants. World coordinates are integers in sub-pixel units; poses cover a
/// fixed world distance, so their duration in ticks shrinks as the track speeds up.
struct EngineConstants {
  static constexpr int kTickRate = 60;
  static constexpr int kTicksPerScorePoint = 6;  // one point per 0.1 s survived
  static constexpr std::int64_t kSubpixel = 256;

  static constexpr std::int64_t kDinoX = 50 * kSubpixel;
  static constexpr std::int64_t kDinoWidth = 12 * kSubpixel;
  static constexpr std::int64_t kSpawnX = 640 * kSubpixel;

  static constexpr std::int64_t kBaseSpeed = 6 * kSubpixel;
  static constexpr int kRampEveryTicks = 300;
  static constexpr int kRampPercent = 2;

  // Pose lengths: 24 / 36 / 18 ticks at the base speed.
  static constexpr std::int64_t kShortJumpLength = 24 * kBaseSpeed;
  static constexpr std::int64_t kLongJumpLength = 36 * kBaseSpeed;
  static constexpr std::int64_t kCrouchLength = 18 * kBaseSpeed;

  static constexpr std::int64_t kSmallCactusWidth = 8 * kSubpixel;
  static constexpr std::int64_t kLargeCactusWidth = 84 * kSubpixel;
  static constexpr std::int64_t kBirdWidth = 6 * kSubpixel;

  // Leading-edge distance between consecutive spawns.
  static constexpr std::int64_t kMinGap = 360 * kSubpixel;
  static constexpr std::int64_t kMaxGap = 720 * kSubpixel;

  // Render-only jump apex heights in pixels.
  static constexpr int kShortJumpApex = 60;
  static constexpr int kLongJumpApex = 90;
};

enum class Pose : std::uint8_t { running, jumping_short, jumping_long, crouching };

std::string_view pose_name(Pose p) noexcept;

struct DinoState {
  Pose pose = Pose::running;
  int pose_ticks_left = 0;
  int pose_duration = 0;

  /// Height above ground for rendering; 0 unless jumping.
  int render_y() const noexcept;

  friend bool operator==(const DinoState&, const DinoState&) = default;
};

enum class ObstacleKind : std::uint8_t { small_cactus, large_cactus, bird };

std::string_view obstacle_kind_name(ObstacleKind k) noexcept;

/// Commands that clear an obstacle of the given kind, preferred command first.
std::span<const Command> beaten_by(ObstacleKind kind) noexcept;

bool beats(ObstacleKind kind, Command cmd) noexcept;

struct Obstacle {
  std::uint64_t id = 0;
  ObstacleKind kind = ObstacleKind::small_cactus;
  std::int64_t x = 0;
  std::int64_t width = 0;

  friend bool operator==(const Obstacle&, const Obstacle&) = default;
};

struct GameState {
  std::int64_t tick = 0;
  std::int64_t speed = EngineConstants::kBaseSpeed;
  DinoState crowd;
  std::vector<DinoState> ghosts;
  std::vector<Obstacle> obstacles;  // sorted by x
  std::int64_t score = 0;
  std::mt19937_64 rng;
  bool over = false;

  std::int64_t distance_since_spawn = 0;
  std::int64_t next_gap = 0;
  std::uint64_t next_obstacle_id = 0;

  friend bool operator==(const GameState&, const GameState&) = default;
};

GameState new_game(std::size_t n_players, std::uint64_t seed);

/// Advances one tick in place. Throws GameOverError on a finished game and InvalidInput if
/// `ghost_cmds` is neither empty nor one entry per ghost.
void advance(GameState& state, Command crowd_cmd, std::span<const Command> ghost_cmds = {});

/// Value-returning form of `advance`.
GameState step(GameState state, Command crowd_cmd, std::span<const Command> ghost_cmds = {});

/// Ticks a pose started at `speed` stays active.
int pose_duration_ticks(Command cmd, std::int64_t speed) noexcept;

/// Speed after one ramp step.
std::int64_t ramp_speed(std::int64_t speed) noexcept;

/// Range of issue ticks (values of `GameState::tick` at the step that receives the command)
/// during which every command in `commands` clears the obstacle, assuming the dino is
/// running when the command arrives.
struct IssueWindow {
  std::uint64_t obstacle_id = 0;
  std::vector<Command> commands;
  Command preferred = Command::none;
  std::int64_t earliest = 0;
  std::int64_t latest = 0;

  std::int64_t length() const noexcept { return latest - earliest + 1; }
  double midpoint() const noexcept { return 0.5 * static_cast<double>(earliest + latest); }
};

/// Empty when the obstacle is already overlapping or behind the dino, or no issue tick from
/// now on can clear it.
std::optional<IssueWindow> try_required_window(const GameState& state, const Obstacle& obstacle);

/// Throwing form; WindowError when no window exists.
IssueWindow required_window(const GameState& state, const Obstacle& obstacle);

}  // namespace crowdctl
