#pragma once

#include <stdexcept>
#include <string>

namespace crowdctl {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed frame or mismatched vector lengths.
struct InvalidInput : Error {
  using Error::Error;
};

// A postcondition failed; indicates a bug upstream of the check.
struct ConsistencyError : Error {
  using Error::Error;
};

struct ClockRegression : Error {
  using Error::Error;
};

struct UnknownPlayer : Error {
  using Error::Error;
};

struct GameOverError : Error {
  using Error::Error;
};

struct WindowError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace crowdctl
