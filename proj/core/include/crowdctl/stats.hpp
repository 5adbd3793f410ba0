#pragma once

#include <vector>

namespace crowdctl {

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

/// Linear interpolation between order statistics (position p * (n - 1)).
/// Throws InvalidInput on an empty sample.
double quantile(std::vector<double> sample, double p);
Quartiles quartiles(const std::vector<double>& sample);

/// True when every value of the IQR of `a` lies strictly above the IQR of `b`.
bool iqr_above(const std::vector<double>& a, const std::vector<double>& b);

/// Exact one-sided Mann-Whitney test of "a tends to be larger than b". Ties use midranks
/// and the p-value is taken over all C(n_a + n_b, n_a) rank assignments.
double mann_whitney_greater(const std::vector<double>& a, const std::vector<double>& b);

double mean(const std::vector<double>& sample);

}  // namespace crowdctl
