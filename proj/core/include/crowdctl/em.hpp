#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "crowdctl/command.hpp"
#include "crowdctl/config.hpp"
#include "crowdctl/run_log.hpp"

namespace crowdctl {

/// Frames x players matrix of recorded commands, stored row-major.
class VoteMatrix {
 public:
  VoteMatrix() = default;
  VoteMatrix(std::size_t frames, std::size_t players, std::size_t k = kAlphabetSize);

  /// Throws InvalidInput on ragged rows or entries outside [0, k-1].
  static VoteMatrix from_rows(const std::vector<std::vector<int>>& rows, std::size_t k = kAlphabetSize);
  /// Every frame line of the log, in log order.
  static VoteMatrix from_log(const RunLog& log);

  std::size_t frames() const noexcept { return frames_; }
  std::size_t players() const noexcept { return players_; }
  std::size_t k() const noexcept { return k_; }
  bool empty() const noexcept { return frames_ == 0 || players_ == 0; }

  int operator()(std::size_t f, std::size_t j) const { return data_[f * players_ + j]; }
  void set(std::size_t f, std::size_t j, int v);

 private:
  std::size_t frames_ = 0;
  std::size_t players_ = 0;
  std::size_t k_ = kAlphabetSize;
  std::vector<int> data_;
};

struct EmOptions {
  std::size_t max_iters = 100;
  double tol = 1e-6;
  TieOrder tie_order = kAscendingTieOrder;  // breaks majority ties at initialization
};

struct EmResult {
  std::size_t k = 0;
  std::vector<int> labels;                                // argmax of each posterior row
  std::vector<std::vector<double>> posteriors;            // frames x k
  std::vector<std::vector<std::vector<double>>> confusion;  // players x k x k, rows = true class
  std::vector<double> class_priors;
  std::size_t iterations = 0;
  bool converged = false;
  /// Marginal log-likelihood of the votes under the parameters of each iteration.
  std::vector<double> log_likelihood;
  /// log-likelihood plus the log Dirichlet(2) density of the confusion rows and the class
  /// priors; EM with add-one smoothing ascends this quantity.
  std::vector<double> objective;

  /// Confusion-matrix trace / k for each player.
  std::vector<double> worker_reliability() const;
};

/// Dawid-Skene EM with full per-player confusion matrices. Posteriors start from the
/// per-frame majority vote; confusion counts and class priors get add-one smoothing. Stops
/// when the largest posterior change drops below `tol` or after `max_iters` iterations.
/// Throws InvalidInput on an empty matrix and ConsistencyError if the objective decreases.
EmResult em_fit(const VoteMatrix& votes, const EmOptions& options = {});

/// Fraction of positions where the two sequences match; 1.0 for two empty sequences.
/// Throws InvalidInput on a length mismatch.
double agreement(const std::vector<int>& live_outputs, const std::vector<int>& em_labels);

void write_json(std::ostream& out, const EmResult& result);
EmResult read_em_json(std::istream& in);
void save_em_result(const std::string& path, const EmResult& result);
EmResult load_em_result(const std::string& path);

}  // namespace crowdctl
