#include "crowdctl/frame_slicer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crowdctl/errors.hpp"

namespace crowdctl {

namespace {
// Tick times are computed as k * 1000 / rate; comparisons against derived deadlines must
// not flip on the last ulp.
constexpr Millis kSlack{1e-6};
}  // namespace

FrameSlicer::FrameSlicer(const ControllerConfig& cfg, Millis origin) : cfg_(cfg), origin_(origin) {
  require_valid(cfg_);
}

std::int64_t FrameSlicer::window_of(Millis t) const {
  const auto w = static_cast<std::int64_t>(std::floor((t - origin_ + kSlack) / Millis(cfg_.static_len_ms)));
  return std::max(w, current_window_);
}

Millis FrameSlicer::window_end(std::int64_t window) const {
  return origin_ + Millis(static_cast<double>(window + 1) * cfg_.static_len_ms);
}

void FrameSlicer::push(const InputEvent& ev) {
  if (ev.player >= cfg_.n_players) {
    throw UnknownPlayer("player " + std::to_string(ev.player) + " outside roster of " +
                        std::to_string(cfg_.n_players));
  }
  if (ev.cmd == Command::none || !in_alphabet(ev.cmd)) {
    throw InvalidInput("input events must carry an active command");
  }

  Queued q{ev, arrivals_++, 0};
  if (cfg_.frame_mode == FrameMode::static_frames) q.window = window_of(ev.t);

  // The most recent input of a player replaces the older one (same window in static mode).
  auto same = std::find_if(queue_.begin(), queue_.end(), [&](const Queued& e) {
    return e.ev.player == ev.player && e.window == q.window;
  });
  if (same != queue_.end()) {
    *same = q;
  } else {
    queue_.push_back(q);
  }
}

InputFrame FrameSlicer::collect(std::int64_t window) {
  InputFrame frame(cfg_.n_players);
  std::vector<std::uint64_t> latest(cfg_.n_players, 0);
  std::vector<bool> seen(cfg_.n_players, false);
  for (const auto& q : queue_) {
    if (q.window != window) continue;
    const auto p = q.ev.player;
    if (!seen[p] || q.arrival > latest[p]) {
      seen[p] = true;
      latest[p] = q.arrival;
      frame.votes[p] = q.ev.cmd;
    }
  }
  std::erase_if(queue_, [&](const Queued& q) { return q.window == window; });
  ++emitted_;
  return frame;
}

double FrameSlicer::queued_mass(const ReliabilityVector& r) const {
  if (cfg_.aggregator == AggregatorKind::majority) return static_cast<double>(queue_.size());
  double mass = 0.0;
  for (const auto& q : queue_) mass += r.r[q.ev.player];
  return mass;
}

std::vector<InputFrame> FrameSlicer::tick(Millis now, const ReliabilityVector& r) {
  if (last_now_ && now < *last_now_) {
    throw ClockRegression("slicer clock moved backwards");
  }
  last_now_ = now;

  std::vector<InputFrame> frames;
  if (cfg_.frame_mode == FrameMode::static_frames) {
    while (now + kSlack >= window_end(current_window_)) {
      frames.push_back(collect(current_window_));
      ++current_window_;
    }
    return frames;
  }

  if (cfg_.aggregator == AggregatorKind::reliability && r.size() != cfg_.n_players) {
    throw InvalidInput("reliability vector length does not match n_players");
  }

  const Millis ttl(cfg_.ttl_ms);
  std::erase_if(queue_, [&](const Queued& q) { return now - q.ev.t > ttl + kSlack; });

  if (!deadline_ && queued_mass(r) >= cfg_.threshold_t * static_cast<double>(cfg_.n_players)) {
    deadline_ = now + ttl / 2.0;
  }
  if (deadline_ && now + kSlack >= *deadline_) {
    frames.push_back(collect(0));
    queue_.clear();
    deadline_.reset();
  }
  return frames;
}

}  // namespace crowdctl
