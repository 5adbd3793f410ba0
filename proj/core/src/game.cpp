#include "crowdctl/game.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "crowdctl/errors.hpp"

namespace crowdctl {

using K = EngineConstants;

namespace {

constexpr std::array<Command, 2> kSmallBeaten{Command::short_jump, Command::long_jump};
constexpr std::array<Command, 1> kLargeBeaten{Command::long_jump};
constexpr std::array<Command, 1> kBirdBeaten{Command::crouch};

Command command_of(Pose p) noexcept {
  switch (p) {
    case Pose::jumping_short: return Command::short_jump;
    case Pose::jumping_long: return Command::long_jump;
    case Pose::crouching: return Command::crouch;
    case Pose::running: break;
  }
  return Command::none;
}

Pose pose_of(Command c) noexcept {
  switch (c) {
    case Command::short_jump: return Pose::jumping_short;
    case Command::long_jump: return Pose::jumping_long;
    case Command::crouch: return Pose::crouching;
    case Command::none: break;
  }
  return Pose::running;
}

std::int64_t width_of(ObstacleKind k) noexcept {
  switch (k) {
    case ObstacleKind::small_cactus: return K::kSmallCactusWidth;
    case ObstacleKind::large_cactus: return K::kLargeCactusWidth;
    case ObstacleKind::bird: return K::kBirdWidth;
  }
  return 0;
}

// Swept test: the obstacle moved from `x_before` to `x_after` during the tick.
bool sweeps_dino(std::int64_t x_before, std::int64_t x_after, std::int64_t width) noexcept {
  return x_after < K::kDinoX + K::kDinoWidth && x_before + width > K::kDinoX;
}

std::uint64_t draw(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  return lo + rng() % (hi - lo + 1);
}

void draw_next_gap(GameState& s) {
  s.next_gap = static_cast<std::int64_t>(draw(s.rng, K::kMinGap, K::kMaxGap));
}

void apply_command(DinoState& dino, Command cmd, std::int64_t speed) {
  if (cmd == Command::none || dino.pose != Pose::running || !in_alphabet(cmd)) return;
  dino.pose = pose_of(cmd);
  dino.pose_duration = pose_duration_ticks(cmd, speed);
  dino.pose_ticks_left = dino.pose_duration;
}

void age_pose(DinoState& dino) {
  if (dino.pose == Pose::running) return;
  if (--dino.pose_ticks_left <= 0) {
    dino.pose = Pose::running;
    dino.pose_ticks_left = 0;
    dino.pose_duration = 0;
  }
}

}  // namespace

std::string_view pose_name(Pose p) noexcept {
  switch (p) {
    case Pose::running: return "running";
    case Pose::jumping_short: return "jumping_short";
    case Pose::jumping_long: return "jumping_long";
    case Pose::crouching: return "crouching";
  }
  return "running";
}

std::string_view obstacle_kind_name(ObstacleKind k) noexcept {
  switch (k) {
    case ObstacleKind::small_cactus: return "small_cactus";
    case ObstacleKind::large_cactus: return "large_cactus";
    case ObstacleKind::bird: return "bird";
  }
  return "small_cactus";
}

std::span<const Command> beaten_by(ObstacleKind kind) noexcept {
  switch (kind) {
    case ObstacleKind::small_cactus: return kSmallBeaten;
    case ObstacleKind::large_cactus: return kLargeBeaten;
    case ObstacleKind::bird: return kBirdBeaten;
  }
  return {};
}

bool beats(ObstacleKind kind, Command cmd) noexcept {
  const auto cmds = beaten_by(kind);
  return std::find(cmds.begin(), cmds.end(), cmd) != cmds.end();
}

int DinoState::render_y() const noexcept {
  if (pose != Pose::jumping_short && pose != Pose::jumping_long) return 0;
  if (pose_duration <= 0) return 0;
  const int apex = pose == Pose::jumping_short ? K::kShortJumpApex : K::kLongJumpApex;
  const std::int64_t elapsed = pose_duration - pose_ticks_left;
  // Parabolic arc: 4 * apex * p * (1 - p) with p = elapsed / duration, in integers.
  const std::int64_t d = pose_duration;
  return static_cast<int>(4 * apex * elapsed * (d - elapsed) / (d * d));
}

int pose_duration_ticks(Command cmd, std::int64_t speed) noexcept {
  std::int64_t length = 0;
  switch (cmd) {
    case Command::short_jump: length = K::kShortJumpLength; break;
    case Command::long_jump: length = K::kLongJumpLength; break;
    case Command::crouch: length = K::kCrouchLength; break;
    case Command::none: return 0;
  }
  return static_cast<int>(std::max<std::int64_t>(1, length / std::max<std::int64_t>(1, speed)));
}

std::int64_t ramp_speed(std::int64_t speed) noexcept {
  return speed * (100 + K::kRampPercent) / 100;
}

GameState new_game(std::size_t n_players, std::uint64_t seed) {
  GameState s;
  s.ghosts.assign(n_players, DinoState{});
  s.rng.seed(seed);
  draw_next_gap(s);
  return s;
}

void advance(GameState& s, Command crowd_cmd, std::span<const Command> ghost_cmds) {
  if (s.over) throw GameOverError("cannot step a finished game");
  if (!ghost_cmds.empty() && ghost_cmds.size() != s.ghosts.size()) {
    throw InvalidInput("expected " + std::to_string(s.ghosts.size()) + " ghost commands, got " +
                       std::to_string(ghost_cmds.size()));
  }

  apply_command(s.crowd, crowd_cmd, s.speed);
  for (std::size_t i = 0; i < ghost_cmds.size(); ++i) apply_command(s.ghosts[i], ghost_cmds[i], s.speed);

  const Command crowd_pose = command_of(s.crowd.pose);
  for (auto& o : s.obstacles) {
    const std::int64_t before = o.x;
    o.x -= s.speed;
    if (sweeps_dino(before, o.x, o.width) && !beats(o.kind, crowd_pose)) s.over = true;
  }

  age_pose(s.crowd);
  for (auto& g : s.ghosts) age_pose(g);

  s.distance_since_spawn += s.speed;
  if (s.distance_since_spawn >= s.next_gap) {
    const auto kind = static_cast<ObstacleKind>(s.rng() % 3);
    s.obstacles.push_back(Obstacle{s.next_obstacle_id++, kind, K::kSpawnX, width_of(kind)});
    s.distance_since_spawn = 0;
    draw_next_gap(s);
  }
  std::erase_if(s.obstacles, [](const Obstacle& o) { return o.x + o.width <= 0; });

  ++s.tick;
  s.score = s.tick / K::kTicksPerScorePoint;
  if (s.tick % K::kRampEveryTicks == 0) s.speed = ramp_speed(s.speed);
}

GameState step(GameState state, Command crowd_cmd, std::span<const Command> ghost_cmds) {
  advance(state, crowd_cmd, ghost_cmds);
  return state;
}

std::optional<IssueWindow> try_required_window(const GameState& state, const Obstacle& obstacle) {
  if (obstacle.x < K::kDinoX + K::kDinoWidth) return std::nullopt;

  // Replay the obstacle's motion under the deterministic speed ramp to find the steps
  // [first, last] during which it sweeps the dino.
  std::vector<std::int64_t> speed_at;  // speed used by step now + i
  std::int64_t first = -1;
  std::int64_t last = -1;
  std::int64_t x = obstacle.x;
  std::int64_t speed = state.speed;
  for (std::int64_t u = state.tick;; ++u) {
    speed_at.push_back(speed);
    const std::int64_t before = x;
    x -= speed;
    if (sweeps_dino(before, x, obstacle.width)) {
      if (first < 0) first = u;
      last = u;
    } else if (first >= 0) {
      break;
    }
    if ((u + 1) % K::kRampEveryTicks == 0) speed = ramp_speed(speed);
  }

  const auto cmds = beaten_by(obstacle.kind);
  auto clears = [&](std::int64_t s) {
    const std::int64_t speed_s = speed_at[static_cast<std::size_t>(s - state.tick)];
    return std::all_of(cmds.begin(), cmds.end(), [&](Command c) {
      return s + pose_duration_ticks(c, speed_s) - 1 >= last;
    });
  };

  std::int64_t latest = first;
  while (latest >= state.tick && !clears(latest)) --latest;
  if (latest < state.tick) return std::nullopt;
  std::int64_t earliest = latest;
  while (earliest - 1 >= state.tick && clears(earliest - 1)) --earliest;

  IssueWindow w;
  w.obstacle_id = obstacle.id;
  w.commands.assign(cmds.begin(), cmds.end());
  w.preferred = cmds.front();
  w.earliest = earliest;
  w.latest = latest;
  return w;
}

IssueWindow required_window(const GameState& state, const Obstacle& obstacle) {
  auto w = try_required_window(state, obstacle);
  if (!w) {
    throw WindowError("obstacle " + std::to_string(obstacle.id) +
                      " is already passed or can no longer be cleared");
  }
  return *w;
}

}  // namespace crowdctl
