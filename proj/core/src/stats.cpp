#include "crowdctl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crowdctl/errors.hpp"

namespace crowdctl {

double quantile(std::vector<double> sample, double p) {
  if (sample.empty()) throw InvalidInput("quantile of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sample.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sample.size() - 1);
  return sample[lo] + (pos - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
}

Quartiles quartiles(const std::vector<double>& sample) {
  return {quantile(sample, 0.25), quantile(sample, 0.5), quantile(sample, 0.75)};
}

bool iqr_above(const std::vector<double>& a, const std::vector<double>& b) {
  return quartiles(a).q1 > quartiles(b).q3;
}

double mean(const std::vector<double>& sample) {
  if (sample.empty()) throw InvalidInput("mean of an empty sample");
  return std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(sample.size());
}

double mann_whitney_greater(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw InvalidInput("mann_whitney_greater needs two non-empty samples");
  struct Item {
    double v;
    bool from_a;
  };
  std::vector<Item> all;
  for (double x : a) all.push_back({x, true});
  for (double x : b) all.push_back({x, false});
  std::sort(all.begin(), all.end(), [](const Item& x, const Item& y) { return x.v < y.v; });

  // Doubled midranks are integers.
  const std::size_t n = all.size();
  std::vector<int> rank2(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && all[j].v == all[i].v) ++j;
    const int r2 = static_cast<int>(i + 1 + j);  // (i+1) + j = 2 * midrank of ranks i+1..j
    for (std::size_t t = i; t < j; ++t) rank2[t] = r2;
    i = j;
  }
  int observed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (all[i].from_a) observed += rank2[i];
  }

  // ways[m][s]: number of m-element subsets of the ranks seen so far with doubled sum s.
  const std::size_t na = a.size();
  const int max_sum = std::accumulate(rank2.begin(), rank2.end(), 0);
  std::vector<std::vector<double>> ways(na + 1, std::vector<double>(max_sum + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = std::min(na, i + 1); m >= 1; --m) {
      for (int s = max_sum; s >= rank2[i]; --s) ways[m][s] += ways[m - 1][s - rank2[i]];
    }
  }
  double total = 0.0;
  double tail = 0.0;
  for (int s = 0; s <= max_sum; ++s) {
    total += ways[na][s];
    if (s >= observed) tail += ways[na][s];
  }
  return tail / total;
}

}  // namespace crowdctl
