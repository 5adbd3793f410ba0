#pragma once

#include <vector>

#include "crowdctl/command.hpp"
#include "crowdctl/config.hpp"
#include "crowdctl/frame_slicer.hpp"
#include "crowdctl/reliability.hpp"

namespace crowdctl {

/// Outcome of one emitted frame.
struct Decision {
  Millis t{0};
  InputFrame frame;
  Command output = Command::none;
  ReliabilityVector reliabilities;  // after this frame's update
};

/// Slicer, aggregator and reliability state behind one interface. The offline harness and
/// the live server both drive this class, so a recorded session replays identically.
class Controller {
 public:
  explicit Controller(const ControllerConfig& cfg);

  void push(const InputEvent& ev) { slicer_.push(ev); }

  /// Ticks the slicer; every emitted frame is aggregated with the current reliabilities and
  /// then, in reliability mode, used to update them.
  std::vector<Decision> tick(Millis now);

  /// Starts a new round of framing at `origin` while keeping the learned reliabilities.
  void restart_frames(Millis origin = Millis{0});

  const ReliabilityVector& reliabilities() const noexcept { return r_; }
  void set_reliabilities(ReliabilityVector r);

  const ControllerConfig& config() const noexcept { return cfg_; }
  const FrameSlicer& slicer() const noexcept { return slicer_; }

 private:
  ControllerConfig cfg_;
  FrameSlicer slicer_;
  ReliabilityVector r_;
};

}  // namespace crowdctl
