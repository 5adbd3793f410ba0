#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crowdctl/agents.hpp"
#include "crowdctl/config.hpp"
#include "crowdctl/reliability.hpp"
#include "crowdctl/run_log.hpp"

namespace crowdctl {

/// One offline experiment: a controller configuration, a roster, and the trial/seed grid.
/// Each seed is an independent run; reliabilities carry across the trials of a run when
/// `carry_reliability` is set and always start uniform at the beginning of a run.
struct ExperimentSpec {
  ControllerConfig controller;
  std::vector<AiProfile> roster = default_roster();
  int trials = 6;
  std::vector<std::uint64_t> seeds{1};
  bool carry_reliability = true;
  std::int64_t max_ticks = 200'000;  // per trial; guards against unbounded perfect play
};

/// Sets `controller.n_players` from the roster and applies frame mode and aggregator.
ExperimentSpec make_spec(FrameMode mode, AggregatorKind aggregator,
                         std::vector<AiProfile> roster = default_roster());

/// Throws ConfigError describing the first problem found.
void require_valid(const ExperimentSpec& spec);

struct TrialScore {
  std::uint64_t seed = 0;  // run seed
  int trial = 0;
  std::int64_t score = 0;
  std::int64_t ticks = 0;
  bool truncated = false;
};

struct ScoreReport {
  std::string label;
  std::vector<TrialScore> trials;

  double mean() const;
  std::int64_t max() const;
  /// Mean score of each run seed, in seed order.
  std::vector<double> seed_means() const;
};

struct RunResult {
  RunLog log;
  ScoreReport report;
  std::vector<ReliabilityVector> final_reliabilities;  // one per run seed
  std::vector<std::size_t> frames_per_run;
};

/// Runs every seed and trial under a 60 Hz virtual clock and records the JSONL log.
RunResult run_offline(const ExperimentSpec& spec);

/// Solo games for one profile (one trial per seed, no reliability carry).
ScoreReport run_solo(const AiProfile& profile, const std::vector<std::uint64_t>& seeds,
                     FrameMode mode = FrameMode::dynamic_frames);

/// Game seed of a trial within a run.
std::uint64_t trial_seed(std::uint64_t run_seed, int trial) noexcept;

struct ReplayResult {
  bool identical = true;
  std::size_t frames_checked = 0;
  std::string first_mismatch;
};

/// Pushes the logged inputs through a fresh controller on the logged tick schedule and
/// compares every emitted frame, output and reliability vector bit for bit.
ReplayResult replay(const RunLog& log);

}  // namespace crowdctl
