#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "crowdctl/agents.hpp"
#include "crowdctl/command.hpp"
#include "crowdctl/config.hpp"

namespace crowdctl {

// Every record carries `run` (index into the seed list) and `trial`.

struct ConfigRecord {
  ControllerConfig controller;
  std::vector<AiProfile> roster;
  int trials = 0;
  std::vector<std::uint64_t> seeds;
  bool carry_reliability = true;
  std::int64_t max_ticks = 0;
};

struct TrialStartRecord {
  std::size_t run = 0;
  int trial = 0;
  std::uint64_t seed = 0;  // game seed of this trial
};

struct InputRecord {
  std::size_t run = 0;
  int trial = 0;
  std::int64_t tick = 0;
  double t = 0.0;
  PlayerId player = 0;
  Command cmd = Command::none;
};

struct FrameRecord {
  std::size_t run = 0;
  int trial = 0;
  std::int64_t tick = 0;
  double t = 0.0;
  std::vector<Command> votes;
  Command output = Command::none;
  std::vector<double> reliabilities;
};

struct GameOverRecord {
  std::size_t run = 0;
  int trial = 0;
  std::int64_t tick = 0;
  double t = 0.0;
  std::int64_t score = 0;
  bool truncated = false;  // hit max_ticks instead of crashing
};

using LogLine = std::variant<TrialStartRecord, InputRecord, FrameRecord, GameOverRecord>;

/// JSONL experiment log: a `config` line followed by trial_start / input / frame /
/// game_over lines in chronological order.
struct RunLog {
  ConfigRecord config;
  std::vector<LogLine> lines;

  std::vector<const FrameRecord*> frames() const;
  std::vector<const GameOverRecord*> game_overs() const;
};

void write_jsonl(std::ostream& out, const RunLog& log);
RunLog read_jsonl(std::istream& in);

void save_run_log(const std::string& path, const RunLog& log);
RunLog load_run_log(const std::string& path);

}  // namespace crowdctl
