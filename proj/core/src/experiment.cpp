#include "crowdctl/experiment.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <random>

#include "crowdctl/clock.hpp"
#include "crowdctl/controller.hpp"
#include "crowdctl/errors.hpp"
#include "crowdctl/game.hpp"

namespace crowdctl {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t agent_seed(std::uint64_t game_seed, std::size_t player) noexcept {
  return splitmix64(game_seed ^ splitmix64(0xA5A5A5A5ULL + player));
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t run_seed, int trial) noexcept {
  return splitmix64(splitmix64(run_seed) + static_cast<std::uint64_t>(trial));
}

ExperimentSpec make_spec(FrameMode mode, AggregatorKind aggregator, std::vector<AiProfile> roster) {
  ExperimentSpec spec;
  spec.roster = std::move(roster);
  spec.controller.n_players = spec.roster.size();
  spec.controller.frame_mode = mode;
  spec.controller.aggregator = aggregator;
  return spec;
}

void require_valid(const ExperimentSpec& spec) {
  if (spec.trials < 1) throw ConfigError("trials must be >= 1");
  if (spec.seeds.empty()) throw ConfigError("at least one seed is required");
  if (spec.max_ticks < 1) throw ConfigError("max_ticks must be >= 1");
  for (const auto& p : spec.roster) require_valid(p);
  if (spec.roster.empty()) return;  // no controller is built for an empty roster
  if (spec.controller.n_players != spec.roster.size()) {
    throw ConfigError("controller n_players (" + std::to_string(spec.controller.n_players) +
                      ") does not match roster size (" + std::to_string(spec.roster.size()) + ")");
  }
  require_valid(spec.controller);
}

double ScoreReport::mean() const {
  if (trials.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& t : trials) sum += static_cast<double>(t.score);
  return sum / static_cast<double>(trials.size());
}

std::int64_t ScoreReport::max() const {
  std::int64_t best = 0;
  for (const auto& t : trials) best = std::max(best, t.score);
  return best;
}

std::vector<double> ScoreReport::seed_means() const {
  std::vector<std::uint64_t> order;
  std::map<std::uint64_t, std::pair<double, int>> acc;
  for (const auto& t : trials) {
    auto [it, inserted] = acc.try_emplace(t.seed, 0.0, 0);
    if (inserted) order.push_back(t.seed);
    it->second.first += static_cast<double>(t.score);
    it->second.second += 1;
  }
  std::vector<double> means;
  for (auto s : order) means.push_back(acc[s].first / acc[s].second);
  return means;
}

RunResult run_offline(const ExperimentSpec& spec) {
  require_valid(spec);
  const std::size_t n = spec.roster.size();

  RunResult result;
  result.log.config = ConfigRecord{spec.controller, spec.roster, spec.trials,
                                   spec.seeds,      spec.carry_reliability, spec.max_ticks};
  result.report.label = n == 0 ? std::string("no-players") : config_label(spec.controller);
  auto& lines = result.log.lines;

  for (std::size_t run = 0; run < spec.seeds.size(); ++run) {
    std::optional<Controller> controller;
    if (n > 0) controller.emplace(spec.controller);
    auto players = make_players(spec.roster);
    std::size_t frames = 0;

    for (int trial = 0; trial < spec.trials; ++trial) {
      const std::uint64_t seed = trial_seed(spec.seeds[run], trial);
      lines.emplace_back(TrialStartRecord{run, trial, seed});

      GameState game = new_game(n, seed);
      VirtualClock clock(EngineConstants::kTickRate);
      std::vector<std::mt19937_64> rngs;
      for (std::size_t p = 0; p < n; ++p) rngs.emplace_back(agent_seed(seed, p));
      for (auto& pl : players) pl.reset();
      if (controller) {
        controller->restart_frames();
        if (!spec.carry_reliability) controller->set_reliabilities(ReliabilityVector::uniform(n));
      }

      std::vector<Command> ghost_cmds(n, Command::none);
      while (!game.over && game.tick < spec.max_ticks) {
        const Millis now = clock.time_of(game.tick);
        std::fill(ghost_cmds.begin(), ghost_cmds.end(), Command::none);
        for (std::size_t p = 0; p < n; ++p) {
          if (auto ev = players[p].decide(game, now, rngs[p])) {
            controller->push(*ev);
            ghost_cmds[p] = ev->cmd;
            lines.emplace_back(InputRecord{run, trial, game.tick, now.count(), ev->player, ev->cmd});
          }
        }
        Command crowd = Command::none;
        if (controller) {
          for (auto& d : controller->tick(now)) {
            crowd = d.output;
            ++frames;
            lines.emplace_back(FrameRecord{run, trial, game.tick, now.count(), std::move(d.frame.votes),
                                           d.output, d.reliabilities.r});
          }
        }
        advance(game, crowd, ghost_cmds);
      }

      const bool truncated = !game.over;
      lines.emplace_back(GameOverRecord{run, trial, game.tick, clock.time_of(game.tick).count(),
                                        game.score, truncated});
      result.report.trials.push_back(TrialScore{spec.seeds[run], trial, game.score, game.tick, truncated});
    }
    result.final_reliabilities.push_back(controller ? controller->reliabilities()
                                                    : ReliabilityVector{});
    result.frames_per_run.push_back(frames);
  }
  return result;
}

ScoreReport run_solo(const AiProfile& profile, const std::vector<std::uint64_t>& seeds,
                     FrameMode mode) {
  ExperimentSpec spec = make_spec(mode, AggregatorKind::majority, {profile});
  spec.trials = 1;
  spec.seeds = seeds;
  spec.carry_reliability = false;
  auto report = run_offline(spec).report;
  report.label = profile.name;
  return report;
}

ReplayResult replay(const RunLog& log) {
  ReplayResult result;
  const auto& cfg = log.config;
  const std::size_t n = cfg.roster.size();
  if (n == 0) return result;

  auto mismatch = [&](std::string what) {
    if (result.identical) {
      result.identical = false;
      result.first_mismatch = std::move(what);
    }
  };

  std::optional<Controller> controller;
  std::optional<std::size_t> current_run;
  VirtualClock clock(EngineConstants::kTickRate);

  // Lines of one trial, consumed when its game_over record arrives.
  std::multimap<std::int64_t, const InputRecord*> inputs;
  std::multimap<std::int64_t, const FrameRecord*> frames;

  for (const auto& line : log.lines) {
    if (const auto* ts = std::get_if<TrialStartRecord>(&line)) {
      if (!current_run || *current_run != ts->run) {
        controller.emplace(cfg.controller);
        current_run = ts->run;
      }
      controller->restart_frames();
      if (!cfg.carry_reliability) controller->set_reliabilities(ReliabilityVector::uniform(n));
      inputs.clear();
      frames.clear();
    } else if (const auto* in = std::get_if<InputRecord>(&line)) {
      inputs.emplace(in->tick, in);
    } else if (const auto* fr = std::get_if<FrameRecord>(&line)) {
      frames.emplace(fr->tick, fr);
    } else if (const auto* go = std::get_if<GameOverRecord>(&line)) {
      if (!controller) throw Error("run log has game_over before trial_start");
      auto next_frame = frames.begin();
      for (std::int64_t tick = 0; tick < go->tick; ++tick) {
        const Millis now = clock.time_of(tick);
        auto [lo, hi] = inputs.equal_range(tick);
        for (auto it = lo; it != hi; ++it) {
          controller->push(InputEvent{it->second->player, it->second->cmd, Millis(it->second->t)});
        }
        for (const auto& d : controller->tick(now)) {
          const std::string where = "run " + std::to_string(go->run) + " trial " +
                                    std::to_string(go->trial) + " tick " + std::to_string(tick);
          if (next_frame == frames.end() || next_frame->first != tick) {
            mismatch("unexpected frame at " + where);
            continue;
          }
          const FrameRecord& rec = *next_frame->second;
          ++next_frame;
          ++result.frames_checked;
          if (rec.votes != d.frame.votes) mismatch("votes differ at " + where);
          if (rec.output != d.output) mismatch("output differs at " + where);
          if (rec.reliabilities != d.reliabilities.r) mismatch("reliabilities differ at " + where);
        }
      }
      if (next_frame != frames.end()) mismatch("logged frames were not reproduced");
    }
  }
  return result;
}

}  // namespace crowdctl
