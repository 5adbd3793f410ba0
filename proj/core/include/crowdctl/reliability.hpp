#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "crowdctl/command.hpp"
#include "crowdctl/config.hpp"

namespace crowdctl {

/// Per-command vote tally for one frame.
struct VoteCounts {
  std::array<int, kAlphabetSize> counts{};
  int v_max = 0;

  int operator[](Command c) const { return counts[index_of(c)]; }
};

/// Per-player reliability scores. Sum is conserved at the player count.
struct ReliabilityVector {
  std::vector<double> r;

  ReliabilityVector() = default;
  explicit ReliabilityVector(std::vector<double> values) : r(std::move(values)) {}

  /// Every player starts with reliability 1.
  static ReliabilityVector uniform(std::size_t n_players) {
    return ReliabilityVector(std::vector<double>(n_players, 1.0));
  }

  std::size_t size() const noexcept { return r.size(); }
  double sum() const noexcept;
  double min() const noexcept;

  friend bool operator==(const ReliabilityVector&, const ReliabilityVector&) = default;
};

struct ReliabilityDelta {
  std::vector<double> dr;

  bool is_zero() const noexcept;
  double sum() const noexcept;
};

/// Throws InvalidInput when a vote lies outside the alphabet of size `k`.
VoteCounts vote_counts(const InputFrame& frame, std::size_t k = kAlphabetSize);

/// A command is viable when it has at least one vote and at least gamma * v_max of them.
bool viable(const VoteCounts& counts, Command cmd, double gamma) noexcept;

/// One step of the continuous reliability update.
///
/// Voters of non-viable commands lose (v_max / v_cmd) * delta, clamped so no score drops
/// below -omega. The total removed is handed back to voters of viable commands in
/// proportion to the popularity of their command, so the delta sums to zero. A frame in
/// which every cast command is viable yields the zero delta.
ReliabilityDelta reliability_update(const InputFrame& frame, const ReliabilityVector& r,
                                    const ControllerConfig& cfg);

/// Element-wise sum. Checks that the total is preserved (1e-9) and that no entry is below
/// -omega; entries within rounding distance of the bound are snapped onto it.
ReliabilityVector apply_delta(const ReliabilityVector& r, const ReliabilityDelta& dr,
                              double omega);

/// Plain majority vote; ties go to the command listed first in `tie_order`.
Command aggregate_mv(const InputFrame& frame, const TieOrder& tie_order);

/// Reliability-weighted majority vote. Negative reliabilities subtract from a command.
Command aggregate_weighted(const InputFrame& frame, const ReliabilityVector& r,
                           const TieOrder& tie_order);

}  // namespace crowdctl
