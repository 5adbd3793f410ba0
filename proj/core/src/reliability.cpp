#include "crowdctl/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "crowdctl/errors.hpp"

namespace crowdctl {

double ReliabilityVector::sum() const noexcept { return std::accumulate(r.begin(), r.end(), 0.0); }

double ReliabilityVector::min() const noexcept {
  return r.empty() ? 0.0 : *std::min_element(r.begin(), r.end());
}

bool ReliabilityDelta::is_zero() const noexcept {
  return std::all_of(dr.begin(), dr.end(), [](double d) { return d == 0.0; });
}

double ReliabilityDelta::sum() const noexcept { return std::accumulate(dr.begin(), dr.end(), 0.0); }

VoteCounts vote_counts(const InputFrame& frame, std::size_t k) {
  if (k > kAlphabetSize) throw InvalidInput("alphabet size exceeds " + std::to_string(kAlphabetSize));
  VoteCounts vc;
  for (Command c : frame.votes) {
    if (!in_alphabet(c, k)) {
      throw InvalidInput("frame vote " + std::to_string(index_of(c)) + " outside alphabet of size " +
                         std::to_string(k));
    }
    ++vc.counts[index_of(c)];
  }
  vc.v_max = *std::max_element(vc.counts.begin(), vc.counts.end());
  return vc;
}

bool viable(const VoteCounts& counts, Command cmd, double gamma) noexcept {
  if (!in_alphabet(cmd)) return false;
  const int v = counts[cmd];
  return v >= 1 && static_cast<double>(v) >= gamma * static_cast<double>(counts.v_max);
}

ReliabilityDelta reliability_update(const InputFrame& frame, const ReliabilityVector& r,
                                    const ControllerConfig& cfg) {
  const std::size_t n = frame.size();
  if (r.size() != n) {
    throw InvalidInput("frame has " + std::to_string(n) + " votes but reliability vector has " +
                       std::to_string(r.size()) + " entries");
  }
  const double omega = cfg.omega;
  for (double rj : r.r) {
    if (rj < -omega) throw InvalidInput("reliability below the lower bound -omega");
  }

  ReliabilityDelta delta{std::vector<double>(n, 0.0)};
  if (n == 0) return delta;

  const VoteCounts counts = vote_counts(frame);
  std::vector<bool> is_viable(n);
  bool all_viable = true;
  for (std::size_t j = 0; j < n; ++j) {
    is_viable[j] = viable(counts, frame.votes[j], cfg.gamma);
    all_viable = all_viable && is_viable[j];
  }
  if (all_viable) return delta;

  // Non-viable voters lose in inverse proportion to their command's popularity.
  double removed = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (is_viable[j]) continue;
    const double v_cast = counts[frame.votes[j]];
    double d = -(static_cast<double>(counts.v_max) / v_cast) * cfg.delta;
    if (r.r[j] + d < -omega) d = -omega - r.r[j];
    delta.dr[j] = d;
    removed += d;
  }

  // Viable voters share what was removed, weighted by their command's vote count.
  double viable_weight = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (is_viable[j]) viable_weight += counts[frame.votes[j]];
  }
  if (viable_weight <= 0.0) {
    throw ConsistencyError("frame has no viable voter although gamma <= 1");
  }
  const double norm = -removed / viable_weight;
  for (std::size_t j = 0; j < n; ++j) {
    if (is_viable[j]) delta.dr[j] = counts[frame.votes[j]] * norm;
  }
  return delta;
}

ReliabilityVector apply_delta(const ReliabilityVector& r, const ReliabilityDelta& dr,
                              double omega) {
  if (r.size() != dr.dr.size()) {
    throw InvalidInput("reliability vector and delta differ in length");
  }
  const double before = r.sum();
  // Clamped entries land on -omega up to one rounding of (-omega - r) + r.
  const double snap = 1e-12 * std::max(1.0, omega);

  ReliabilityVector out = r;
  for (std::size_t j = 0; j < out.r.size(); ++j) {
    double v = r.r[j] + dr.dr[j];
    if (v < -omega) {
      if (v < -omega - snap) {
        throw ConsistencyError("reliability of player " + std::to_string(j) +
                               " fell below -omega");
      }
      v = -omega;
    }
    out.r[j] = v;
  }
  if (std::abs(out.sum() - before) > 1e-9) {
    throw ConsistencyError("reliability update did not conserve the total");
  }
  return out;
}

namespace {

template <typename Score>
Command argmax_with_ties(const std::array<Score, kAlphabetSize>& score, const TieOrder& tie_order) {
  Command best = tie_order[0];
  for (Command c : tie_order) {
    if (score[index_of(c)] > score[index_of(best)]) best = c;
  }
  return best;
}

}  // namespace

Command aggregate_mv(const InputFrame& frame, const TieOrder& tie_order) {
  if (frame.size() == 0) throw InvalidInput("cannot aggregate an empty frame");
  return argmax_with_ties(vote_counts(frame).counts, tie_order);
}

Command aggregate_weighted(const InputFrame& frame, const ReliabilityVector& r,
                           const TieOrder& tie_order) {
  if (frame.size() == 0) throw InvalidInput("cannot aggregate an empty frame");
  if (r.size() != frame.size()) throw InvalidInput("frame and reliability vector differ in length");
  std::array<double, kAlphabetSize> weight{};
  for (std::size_t j = 0; j < frame.size(); ++j) {
    const Command c = frame.votes[j];
    if (!in_alphabet(c)) throw InvalidInput("frame vote outside alphabet");
    weight[index_of(c)] += r.r[j];
  }
  return argmax_with_ties(weight, tie_order);
}

}  // namespace crowdctl
