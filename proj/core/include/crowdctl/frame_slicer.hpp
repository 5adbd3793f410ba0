#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crowdctl/command.hpp"
#include "crowdctl/config.hpp"
#include "crowdctl/reliability.hpp"

namespace crowdctl {

/// Groups the continuous input stream into frames.
///
/// Static mode cuts fixed windows of `static_len_ms` starting at the origin and emits one
/// frame per elapsed window, silent windows included. Dynamic mode keeps a TTL-bounded
/// queue holding the latest input of each player. Once the queued mass reaches
/// `threshold_t * n_players` the slicer arms, and the first tick at or after
/// `arm time + ttl_ms / 2` emits the queue as one frame. Mass counts queued players under
/// majority voting and sums their reliabilities under reliability aggregation.
///
/// Single-owner state machine: push/tick must be serialized by the caller.
class FrameSlicer {
 public:
  explicit FrameSlicer(const ControllerConfig& cfg, Millis origin = Millis{0});

  /// Throws UnknownPlayer for an out-of-range player and InvalidInput for a `none` command.
  void push(const InputEvent& ev);

  /// Advances to `now`. Throws ClockRegression if `now` precedes the previous tick.
  /// Static mode can emit several frames when a tick skips over multiple windows.
  std::vector<InputFrame> tick(Millis now, const ReliabilityVector& r);

  std::size_t queued() const noexcept { return queue_.size(); }
  bool armed() const noexcept { return deadline_.has_value(); }
  std::optional<Millis> deadline() const noexcept { return deadline_; }
  FrameMode mode() const noexcept { return cfg_.frame_mode; }
  std::uint64_t frames_emitted() const noexcept { return emitted_; }

 private:
  struct Queued {
    InputEvent ev;
    std::uint64_t arrival;
    std::int64_t window;  // static mode only
  };

  std::int64_t window_of(Millis t) const;
  Millis window_end(std::int64_t window) const;
  InputFrame collect(std::int64_t window);
  double queued_mass(const ReliabilityVector& r) const;

  ControllerConfig cfg_;
  Millis origin_;
  std::vector<Queued> queue_;
  std::optional<Millis> deadline_;
  std::optional<Millis> last_now_;
  std::int64_t current_window_ = 0;
  std::uint64_t arrivals_ = 0;
  std::uint64_t emitted_ = 0;
};

}  // namespace crowdctl
