#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "crowdctl/command.hpp"

namespace crowdctl {

enum class FrameMode { static_frames, dynamic_frames };
enum class AggregatorKind { majority, reliability };

std::string_view to_string(FrameMode m) noexcept;
std::string_view to_string(AggregatorKind a) noexcept;
FrameMode frame_mode_from_string(std::string_view s);
AggregatorKind aggregator_from_string(std::string_view s);

using TieOrder = std::array<Command, kAlphabetSize>;

inline constexpr TieOrder kAscendingTieOrder{Command::none, Command::short_jump, Command::long_jump,
                                             Command::crouch};

/// Controller parameters. Defaults are the offline-experiment values.
struct ControllerConfig {
  std::size_t n_players = 1;
  double ttl_ms = 300.0;
  double threshold_t = 0.5;
  double static_len_ms = 300.0;
  double gamma = 0.8;
  double delta = 0.05;
  double omega = 0.5;
  TieOrder tie_order = kAscendingTieOrder;
  FrameMode frame_mode = FrameMode::dynamic_frames;
  AggregatorKind aggregator = AggregatorKind::reliability;

  friend bool operator==(const ControllerConfig&, const ControllerConfig&) = default;
};

/// Returns one message per violated invariant; empty means valid.
std::vector<std::string> validate(const ControllerConfig& cfg);

/// Throws ConfigError listing every violation.
void require_valid(const ControllerConfig& cfg);

/// Flat JSON object, snake_case keys. Unknown keys are rejected; absent keys keep defaults.
std::string to_json_string(const ControllerConfig& cfg);
ControllerConfig config_from_json_string(std::string_view text);
ControllerConfig load_config_file(const std::string& path);

/// Short label such as "dynamic+reliability".
std::string config_label(const ControllerConfig& cfg);

}  // namespace crowdctl
