#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace crowdctl {

/// Controller time in (fractional) milliseconds.
using Millis = std::chrono::duration<double, std::milli>;

using PlayerId = std::uint32_t;

/// Discrete game action. `none` doubles as the "missing input" vote.
enum class Command : std::uint8_t {
  none = 0,
  short_jump = 1,
  long_jump = 2,
  crouch = 3,
};

inline constexpr std::size_t kAlphabetSize = 4;

constexpr std::size_t index_of(Command c) noexcept { return static_cast<std::size_t>(c); }

constexpr Command command_from_index(std::size_t i) noexcept { return static_cast<Command>(i); }

constexpr bool in_alphabet(Command c, std::size_t k = kAlphabetSize) noexcept {
  return index_of(c) < k;
}

std::string_view command_name(Command c) noexcept;
std::optional<Command> command_from_name(std::string_view name) noexcept;

/// One raw input as received from the network or a synthetic agent.
struct InputEvent {
  PlayerId player = 0;
  Command cmd = Command::short_jump;
  Millis t{0};

  friend bool operator==(const InputEvent&, const InputEvent&) = default;
};

/// Per-player command vector for one decision moment; silent players hold `none`.
struct InputFrame {
  std::vector<Command> votes;

  InputFrame() = default;
  explicit InputFrame(std::size_t n_players) : votes(n_players, Command::none) {}
  explicit InputFrame(std::vector<Command> v) : votes(std::move(v)) {}

  std::size_t size() const noexcept { return votes.size(); }

  friend bool operator==(const InputFrame&, const InputFrame&) = default;
};

/// Builds a frame from small integer ids; convenient in tests and tooling.
InputFrame make_frame(std::initializer_list<int> ids);

}  // namespace crowdctl
