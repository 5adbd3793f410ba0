#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crowdctl/command.hpp"
#include "crowdctl/config.hpp"
#include "crowdctl/controller.hpp"
#include "crowdctl/game.hpp"
#include "crowdctl/run_log.hpp"

namespace crowdctl {

enum class Phase : std::uint8_t { lobby, countdown, playing, game_over };

std::string_view phase_name(Phase p) noexcept;

struct SessionOptions {
  /// `n_players` is the number of slots; the game starts once `min_players` are connected.
  ControllerConfig controller;
  std::size_t min_players = 1;
  Millis countdown{3000};
  Millis restart_delay{3000};
  int snapshot_rate = 20;
  std::uint64_t seed = 1;  // game g uses seed + g
};

/// Throws ConfigError.
void require_valid(const SessionOptions& options);

/// Live game session, independent of the transport. The owner feeds it connection events
/// and a 60 Hz tick, and delivers the returned messages. All state lives here and must be
/// touched by one thread only.
class Session {
 public:
  using ConnId = std::uint64_t;

  struct Outgoing {
    std::optional<ConnId> to;  // empty: every open connection
    std::string text;
  };

  explicit Session(SessionOptions options);

  void on_open(ConnId conn);
  std::vector<Outgoing> on_message(ConnId conn, std::string_view text, Millis now);
  std::vector<Outgoing> on_close(ConnId conn, Millis now);
  /// Advances phase timers and, while playing, the engine by exactly one step.
  std::vector<Outgoing> on_tick(Millis now);

  Phase phase() const noexcept { return phase_; }
  const GameState& game() const noexcept { return game_; }
  const ReliabilityVector& reliabilities() const noexcept { return controller_.reliabilities(); }
  std::size_t connected() const noexcept;
  std::size_t games_played() const noexcept { return games_; }

  /// Body of the admin endpoint: a JSON array of the current reliabilities.
  std::string admin_reliabilities_json() const;

  /// Everything the controller saw, in the harness log format (one trial per game).
  const RunLog& log() const noexcept { return log_; }

 private:
  struct Slot {
    std::string name;
    std::optional<ConnId> conn;
  };

  std::vector<Outgoing> handle_join(ConnId conn, const std::string& name);
  std::vector<Outgoing> handle_input(ConnId conn, int cmd, Millis now);
  std::optional<std::size_t> slot_of(ConnId conn) const;
  void start_game(Millis now);
  std::string lobby_message() const;
  std::string state_message() const;

  SessionOptions opt_;
  Controller controller_;
  Phase phase_ = Phase::lobby;
  std::vector<Slot> slots_;
  std::vector<ConnId> open_;
  GameState game_;
  Millis phase_until_{0};
  Millis game_origin_{0};
  std::vector<Command> ghost_cmds_;
  std::size_t games_ = 0;
  RunLog log_;
};

}  // namespace crowdctl
