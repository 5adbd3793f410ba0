#include <benchmark/benchmark.h>

#include <random>

#include "crowdctl/em.hpp"
#include "crowdctl/frame_slicer.hpp"
#include "crowdctl/game.hpp"
#include "crowdctl/reliability.hpp"

using namespace crowdctl;

namespace {

InputFrame random_frame(std::size_t n, std::mt19937_64& rng) {
  std::vector<Command> votes(n);
  for (auto& v : votes) v = command_from_index(rng() % kAlphabetSize);
  return InputFrame(votes);
}

void BM_ReliabilityUpdate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ControllerConfig cfg;
  cfg.n_players = n;
  std::mt19937_64 rng(1);
  std::vector<InputFrame> frames;
  for (int i = 0; i < 256; ++i) frames.push_back(random_frame(n, rng));
  auto r = ReliabilityVector::uniform(n);
  std::size_t i = 0;
  for (auto _ : state) {
    r = apply_delta(r, reliability_update(frames[i++ % frames.size()], r, cfg), cfg.omega);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_ReliabilityUpdate)->Arg(4)->Arg(14)->Arg(64);

void BM_SlicerTick(benchmark::State& state) {
  ControllerConfig cfg;
  cfg.n_players = 14;
  cfg.frame_mode = state.range(0) ? FrameMode::dynamic_frames : FrameMode::static_frames;
  FrameSlicer slicer(cfg);
  const auto r = ReliabilityVector::uniform(14);
  std::mt19937_64 rng(2);
  std::int64_t tick = 0;
  for (auto _ : state) {
    const Millis now(static_cast<double>(tick++) * 1000.0 / 60.0);
    if (rng() % 4 == 0) slicer.push({static_cast<PlayerId>(rng() % 14), command_from_index(1 + rng() % 3), now});
    benchmark::DoNotOptimize(slicer.tick(now, r));
  }
}
BENCHMARK(BM_SlicerTick)->Arg(0)->Arg(1);

void BM_EngineAdvance(benchmark::State& state) {
  std::uint64_t seed = 1;
  auto g = new_game(14, seed);
  for (auto _ : state) {
    if (g.over) g = new_game(14, ++seed);
    advance(g, Command::none);
    benchmark::DoNotOptimize(g.tick);
  }
}
BENCHMARK(BM_EngineAdvance);

void BM_EmFit(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(state.range(0)), std::vector<int>(14));
  for (auto& row : rows) {
    const int truth = static_cast<int>(rng() % 4);
    for (auto& v : row) v = rng() % 10 < 8 ? truth : static_cast<int>(rng() % 4);
  }
  const auto votes = VoteMatrix::from_rows(rows);
  for (auto _ : state) benchmark::DoNotOptimize(em_fit(votes));
}
BENCHMARK(BM_EmFit)->Arg(500)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
