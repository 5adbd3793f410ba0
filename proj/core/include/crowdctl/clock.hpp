#pragma once

#include <chrono>
#include <cstdint>

#include "crowdctl/command.hpp"

namespace crowdctl {

/// Monotonic millisecond time source consumed by the controller.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Millis now() const = 0;
};

/// Wall-clock time since construction.
class SteadyClock final : public Clock {
 public:
  SteadyClock() : origin_(std::chrono::steady_clock::now()) {}
  Millis now() const override {
    return std::chrono::duration_cast<Millis>(std::chrono::steady_clock::now() - origin_);
  }

 private:
  std::chrono::steady_clock::time_point origin_;
};

/// Clock that advances in whole ticks of a fixed rate. Tick k maps to k * 1000 / rate ms,
/// computed fresh each time so no rounding accumulates.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(double ticks_per_second = 60.0) : rate_(ticks_per_second) {}

  Millis now() const override { return time_of(tick_); }
  Millis time_of(std::int64_t tick) const { return Millis(static_cast<double>(tick) * 1000.0 / rate_); }

  std::int64_t tick() const noexcept { return tick_; }
  void advance(std::int64_t ticks = 1) noexcept { tick_ += ticks; }
  void reset() noexcept { tick_ = 0; }

 private:
  double rate_;
  std::int64_t tick_ = 0;
};

}  // namespace crowdctl
