#pragma once

// Reference implementations used to check the library. They are written for clarity, not
// speed, and share no code with core/.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "crowdctl/command.hpp"
#include "crowdctl/config.hpp"
#include "crowdctl/game.hpp"

namespace oracle {

using crowdctl::Command;

/// Reliabilities that sum to n with every entry >= -omega, built by random transfers out of
/// the uniform start.
inline std::vector<double> random_reliabilities(std::size_t n, double omega, std::mt19937_64& rng) {
  std::vector<double> r(n, 1.0);
  if (n < 2) return r;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (std::size_t k = 0; k < 3 * n; ++k) {
    const auto from = pick(rng);
    const auto to = pick(rng);
    if (from == to) continue;
    const double amount = frac(rng) * (r[from] + omega);
    r[from] -= amount;
    r[to] += amount;
  }
  return r;
}

/// Reliability delta computed command by command in long double.
inline std::vector<double> reliability_update(const crowdctl::InputFrame& f, const std::vector<double>& r,
                                              const crowdctl::ControllerConfig& cfg) {
  const std::size_t n = f.votes.size();
  std::array<long, 4> cnt{};
  for (auto v : f.votes) ++cnt[static_cast<std::size_t>(v)];
  const long vmax = *std::max_element(cnt.begin(), cnt.end());
  std::array<bool, 4> ok{};
  bool any_bad = false;
  for (std::size_t c = 0; c < 4; ++c) {
    ok[c] = cnt[c] >= 1 && static_cast<long double>(cnt[c]) >= cfg.gamma * static_cast<long double>(vmax);
    if (cnt[c] >= 1 && !ok[c]) any_bad = true;
  }
  std::vector<double> out(n, 0.0);
  if (!any_bad) return out;

  long double pool = 0;
  long double weight = 0;
  for (std::size_t c = 0; c < 4; ++c) {
    if (ok[c]) weight += static_cast<long double>(cnt[c]) * cnt[c];
  }
  std::vector<long double> d(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto c = static_cast<std::size_t>(f.votes[j]);
    if (ok[c]) continue;
    const long double want = static_cast<long double>(vmax) / cnt[c] * cfg.delta;
    const long double room = static_cast<long double>(r[j]) + cfg.omega;
    const long double loss = std::min(want, room);
    d[j] = -loss;
    pool += loss;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const auto c = static_cast<std::size_t>(f.votes[j]);
    if (ok[c]) d[j] = pool * cnt[c] / weight;
    out[j] = static_cast<double>(d[j]);
  }
  return out;
}

inline Command weighted_argmax(const crowdctl::InputFrame& f, const std::vector<double>& r,
                               const crowdctl::TieOrder& order) {
  std::array<double, 4> score{};
  for (std::size_t j = 0; j < f.votes.size(); ++j) score[static_cast<std::size_t>(f.votes[j])] += r[j];
  Command best = order[0];
  for (auto c : order) {
    if (score[static_cast<std::size_t>(c)] > score[static_cast<std::size_t>(best)]) best = c;
  }
  return best;
}

/// Does issuing `cmd` at tick `issue` clear obstacle `obstacle_id`? Simulates a clone holding
/// only that obstacle until it has fully passed the dino.
inline bool clears(const crowdctl::GameState& start, std::uint64_t obstacle_id, std::int64_t issue, Command cmd) {
  using namespace crowdctl;
  GameState g = start;
  g.ghosts.clear();
  std::erase_if(g.obstacles, [&](const Obstacle& o) { return o.id != obstacle_id; });
  if (g.obstacles.empty()) return true;
  while (!g.over) {
    const auto& o = g.obstacles.front();
    if (o.id != obstacle_id || o.x + o.width <= EngineConstants::kDinoX) return true;
    advance(g, g.tick == issue ? cmd : Command::none);
  }
  return false;
}

}  // namespace oracle
