#include "crowdctl/controller.hpp"

#include "crowdctl/errors.hpp"

namespace crowdctl {

Controller::Controller(const ControllerConfig& cfg)
    : cfg_(cfg), slicer_(cfg), r_(ReliabilityVector::uniform(cfg.n_players)) {}

std::vector<Decision> Controller::tick(Millis now) {
  std::vector<Decision> out;
  for (auto& frame : slicer_.tick(now, r_)) {
    Decision d;
    d.t = now;
    if (cfg_.aggregator == AggregatorKind::reliability) {
      d.output = aggregate_weighted(frame, r_, cfg_.tie_order);
      r_ = apply_delta(r_, reliability_update(frame, r_, cfg_), cfg_.omega);
    } else {
      d.output = aggregate_mv(frame, cfg_.tie_order);
    }
    d.frame = std::move(frame);
    d.reliabilities = r_;
    out.push_back(std::move(d));
  }
  return out;
}

void Controller::restart_frames(Millis origin) { slicer_ = FrameSlicer(cfg_, origin); }

void Controller::set_reliabilities(ReliabilityVector r) {
  if (r.size() != cfg_.n_players) throw InvalidInput("reliability vector length does not match n_players");
  r_ = std::move(r);
}

}  // namespace crowdctl
