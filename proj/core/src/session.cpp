#include "crowdctl/session.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "crowdctl/errors.hpp"

namespace crowdctl {

using nlohmann::json;

std::string_view phase_name(Phase p) noexcept {
  switch (p) {
    case Phase::lobby: return "lobby";
    case Phase::countdown: return "countdown";
    case Phase::playing: return "playing";
    case Phase::game_over: return "game_over";
  }
  return "?";
}

void require_valid(const SessionOptions& o) {
  require_valid(o.controller);
  if (o.min_players < 1 || o.min_players > o.controller.n_players) {
    throw ConfigError("min_players must be in [1, n_players]");
  }
  if (o.snapshot_rate < 1 || EngineConstants::kTickRate % o.snapshot_rate != 0) {
    throw ConfigError("snapshot_rate must divide the tick rate");
  }
  if (o.countdown.count() < 0 || o.restart_delay.count() < 0) {
    throw ConfigError("countdown and restart_delay must be >= 0");
  }
}

namespace {

std::string error_message(const std::string& reason) {
  return json{{"type", "error"}, {"reason", reason}}.dump();
}

Session::Outgoing reply(Session::ConnId conn, std::string text) { return {conn, std::move(text)}; }
Session::Outgoing broadcast(std::string text) { return {std::nullopt, std::move(text)}; }

Millis tick_time(std::int64_t tick) {
  return Millis(static_cast<double>(tick) * 1000.0 / EngineConstants::kTickRate);
}

json dino_json(const DinoState& d) { return {{"pose", pose_name(d.pose)}, {"y", d.render_y()}}; }

}  // namespace

Session::Session(SessionOptions options)
    : opt_((require_valid(options), std::move(options))),
      controller_(opt_.controller),
      slots_(opt_.controller.n_players),
      game_(new_game(opt_.controller.n_players, opt_.seed)),
      ghost_cmds_(opt_.controller.n_players, Command::none) {
  log_.config.controller = opt_.controller;
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    log_.config.roster.push_back(AiProfile{"slot_" + std::to_string(i)});
  }
  log_.config.trials = 0;
  log_.config.seeds = {opt_.seed};
  log_.config.carry_reliability = true;
}

std::size_t Session::connected() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(slots_.begin(), slots_.end(), [](const Slot& s) { return s.conn.has_value(); }));
}

std::optional<std::size_t> Session::slot_of(ConnId conn) const {
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i].conn == conn) return i;
  }
  return std::nullopt;
}

void Session::on_open(ConnId conn) {
  if (std::find(open_.begin(), open_.end(), conn) == open_.end()) open_.push_back(conn);
}

std::vector<Session::Outgoing> Session::on_message(ConnId conn, std::string_view text, Millis now) {
  on_open(conn);
  json msg;
  try {
    msg = json::parse(text);
  } catch (const json::parse_error&) {
    return {reply(conn, error_message("malformed JSON"))};
  }
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
    return {reply(conn, error_message("message needs a string \"type\""))};
  }
  const auto type = msg["type"].get<std::string>();
  if (type == "join") {
    if (!msg.contains("name") || !msg["name"].is_string()) {
      return {reply(conn, error_message("join needs a string \"name\""))};
    }
    return handle_join(conn, msg["name"].get<std::string>());
  }
  if (type == "input") {
    if (!msg.contains("cmd") || !msg["cmd"].is_number_integer()) {
      return {reply(conn, error_message("input needs an integer \"cmd\""))};
    }
    if (msg.contains("client_ts") && !msg["client_ts"].is_number()) {
      return {reply(conn, error_message("client_ts must be a number"))};
    }
    return handle_input(conn, msg["cmd"].get<int>(), now);
  }
  return {reply(conn, error_message("unknown message type '" + type + "'"))};
}

std::vector<Session::Outgoing> Session::handle_join(ConnId conn, const std::string& name) {
  if (slot_of(conn)) return {reply(conn, error_message("already joined"))};

  // A disconnected slot with the same name is handed back; then never-used slots, then any
  // disconnected one.
  std::optional<std::size_t> pick;
  for (std::size_t i = 0; i < slots_.size() && !pick; ++i) {
    if (!slots_[i].conn && !slots_[i].name.empty() && slots_[i].name == name) pick = i;
  }
  for (std::size_t i = 0; i < slots_.size() && !pick; ++i) {
    if (!slots_[i].conn && slots_[i].name.empty()) pick = i;
  }
  for (std::size_t i = 0; i < slots_.size() && !pick; ++i) {
    if (!slots_[i].conn) pick = i;
  }
  if (!pick) return {reply(conn, error_message("session full"))};

  slots_[*pick] = Slot{name, conn};
  log_.config.roster[*pick].name = name;
  json welcome = {{"type", "welcome"},
                  {"player_id", *pick},
                  {"k", kAlphabetSize},
                  {"tick_rate", EngineConstants::kTickRate},
                  {"snapshot_rate", opt_.snapshot_rate}};
  return {reply(conn, welcome.dump()), broadcast(lobby_message())};
}

std::vector<Session::Outgoing> Session::handle_input(ConnId conn, int cmd, Millis now) {
  const auto slot = slot_of(conn);
  if (!slot) return {reply(conn, error_message("join before sending input"))};
  if (cmd < 1 || cmd >= static_cast<int>(kAlphabetSize)) {
    return {reply(conn, error_message("invalid command " + std::to_string(cmd)))};
  }
  if (phase_ != Phase::playing) {
    return {reply(conn, error_message("input ignored: game is not running"))};
  }
  const auto c = command_from_index(static_cast<std::size_t>(cmd));
  const Millis t = now - game_origin_;
  controller_.push(InputEvent{static_cast<PlayerId>(*slot), c, t});
  ghost_cmds_[*slot] = c;
  log_.lines.emplace_back(InputRecord{0, static_cast<int>(games_), game_.tick, t.count(),
                                      static_cast<PlayerId>(*slot), c});
  return {};
}

std::vector<Session::Outgoing> Session::on_close(ConnId conn, Millis) {
  std::erase(open_, conn);
  if (const auto slot = slot_of(conn)) {
    slots_[*slot].conn.reset();
    ghost_cmds_[*slot] = Command::none;
    return {broadcast(lobby_message())};
  }
  return {};
}

void Session::start_game(Millis now) {
  const std::uint64_t seed = opt_.seed + games_;
  game_ = new_game(slots_.size(), seed);
  controller_.restart_frames(Millis{0});
  std::fill(ghost_cmds_.begin(), ghost_cmds_.end(), Command::none);
  game_origin_ = now;
  phase_ = Phase::playing;
  log_.lines.emplace_back(TrialStartRecord{0, static_cast<int>(games_), seed});
}

std::vector<Session::Outgoing> Session::on_tick(Millis now) {
  std::vector<Outgoing> out;
  const bool enough = connected() >= opt_.min_players;
  const auto start_message = [](Millis countdown) {
    return json{{"type", "start"}, {"countdown_ms", static_cast<std::int64_t>(countdown.count())}}.dump();
  };

  switch (phase_) {
    case Phase::lobby:
      if (enough) {
        phase_ = Phase::countdown;
        phase_until_ = now + opt_.countdown;
        out.push_back(broadcast(start_message(opt_.countdown)));
        if (now >= phase_until_) start_game(now);
      }
      return out;
    case Phase::countdown:
      if (!enough) {
        phase_ = Phase::lobby;
        out.push_back(broadcast(lobby_message()));
      } else if (now >= phase_until_) {
        start_game(now);
      }
      return out;
    case Phase::game_over:
      if (now >= phase_until_) {
        if (enough) {
          out.push_back(broadcast(start_message(Millis{0})));
          start_game(now);
        } else {
          phase_ = Phase::lobby;
          out.push_back(broadcast(lobby_message()));
        }
      }
      return out;
    case Phase::playing:
      break;
  }

  try {
    const Millis game_now = tick_time(game_.tick);
    Command crowd = Command::none;
    for (auto& d : controller_.tick(game_now)) {
      crowd = d.output;
      log_.lines.emplace_back(FrameRecord{0, static_cast<int>(games_), game_.tick, game_now.count(),
                                          std::move(d.frame.votes), d.output, d.reliabilities.r});
    }
    advance(game_, crowd, ghost_cmds_);
    std::fill(ghost_cmds_.begin(), ghost_cmds_.end(), Command::none);

    const int every = EngineConstants::kTickRate / opt_.snapshot_rate;
    if (game_.over || game_.tick % every == 0) out.push_back(broadcast(state_message()));
    if (game_.over) {
      out.push_back(broadcast(json{{"type", "game_over"}, {"score", game_.score}}.dump()));
      log_.lines.emplace_back(GameOverRecord{0, static_cast<int>(games_), game_.tick,
                                             tick_time(game_.tick).count(), game_.score, false});
      ++games_;
      log_.config.trials = static_cast<int>(games_);
      phase_ = Phase::game_over;
      phase_until_ = now + opt_.restart_delay;
    }
  } catch (const std::exception& e) {
    out.push_back(broadcast(error_message(std::string("session ended: ") + e.what())));
    phase_ = Phase::lobby;
  }
  return out;
}

std::string Session::lobby_message() const {
  json players = json::array();
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i].conn) players.push_back({{"id", i}, {"name", slots_[i].name}});
  }
  return json{{"type", "lobby"}, {"players", players}}.dump();
}

std::string Session::state_message() const {
  json ghosts = json::array();
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (!slots_[i].conn) continue;
    json g = dino_json(game_.ghosts[i]);
    g["id"] = i;
    ghosts.push_back(std::move(g));
  }
  json obstacles = json::array();
  for (const auto& o : game_.obstacles) {
    obstacles.push_back({{"kind", obstacle_kind_name(o.kind)},
                         {"x", o.x / EngineConstants::kSubpixel},
                         {"width", o.width / EngineConstants::kSubpixel}});
  }
  return json{{"type", "state"},
              {"tick", game_.tick},
              {"score", game_.score},
              {"speed", static_cast<double>(game_.speed) / EngineConstants::kSubpixel},
              {"crowd", dino_json(game_.crowd)},
              {"ghosts", ghosts},
              {"obstacles", obstacles}}
      .dump();
}

std::string Session::admin_reliabilities_json() const {
  return json(controller_.reliabilities().r).dump();
}

}  // namespace crowdctl
