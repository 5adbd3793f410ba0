#include "crowdctl/command.hpp"

#include <array>

namespace crowdctl {

namespace {
constexpr std::array<std::string_view, kAlphabetSize> kNames{"none", "short_jump", "long_jump",
                                                            "crouch"};
}

std::string_view command_name(Command c) noexcept {
  return in_alphabet(c) ? kNames[index_of(c)] : std::string_view{"invalid"};
}

std::optional<Command> command_from_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return command_from_index(i);
  }
  return std::nullopt;
}

InputFrame make_frame(std::initializer_list<int> ids) {
  InputFrame f;
  f.votes.reserve(ids.size());
  for (int id : ids) f.votes.push_back(static_cast<Command>(id));
  return f;
}

}  // namespace crowdctl
