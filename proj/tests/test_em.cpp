#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "crowdctl/em.hpp"
#include "crowdctl/errors.hpp"

using namespace crowdctl;

namespace {

using Rows = std::vector<std::vector<int>>;

// Dawid-Skene in plain probabilities, run for a fixed number of iterations.
std::vector<std::vector<double>> reference_em(const Rows& rows, std::size_t k, std::size_t iters) {
  const std::size_t F = rows.size();
  const std::size_t N = rows[0].size();
  std::vector<std::vector<double>> T(F, std::vector<double>(k, 0.0));
  for (std::size_t f = 0; f < F; ++f) {
    std::vector<int> cnt(k, 0);
    for (int v : rows[f]) ++cnt[v];
    T[f][std::max_element(cnt.begin(), cnt.end()) - cnt.begin()] = 1.0;  // first max = lowest id
  }
  for (std::size_t it = 0; it < iters; ++it) {
    std::vector<double> prior(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t f = 0; f < F; ++f) prior[c] += T[f][c];
      prior[c] = (prior[c] + 1.0) / static_cast<double>(F + k);
    }
    std::vector<std::vector<std::vector<double>>> pi(N, std::vector<std::vector<double>>(k, std::vector<double>(k, 1.0)));
    for (std::size_t j = 0; j < N; ++j) {
      for (std::size_t f = 0; f < F; ++f) {
        for (std::size_t c = 0; c < k; ++c) pi[j][c][rows[f][j]] += T[f][c];
      }
      for (auto& row : pi[j]) {
        const double s = std::accumulate(row.begin(), row.end(), 0.0);
        for (auto& x : row) x /= s;
      }
    }
    for (std::size_t f = 0; f < F; ++f) {
      std::vector<double> p(k);
      for (std::size_t c = 0; c < k; ++c) {
        p[c] = prior[c];
        for (std::size_t j = 0; j < N; ++j) p[c] *= pi[j][c][rows[f][j]];
      }
      const double z = std::accumulate(p.begin(), p.end(), 0.0);
      for (std::size_t c = 0; c < k; ++c) T[f][c] = p[c] / z;
    }
  }
  return T;
}

Rows planted(std::size_t frames, const std::vector<double>& accuracy, std::mt19937_64& rng, std::vector<int>& truth) {
  Rows rows(frames, std::vector<int>(accuracy.size()));
  truth.assign(frames, 0);
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t f = 0; f < frames; ++f) {
    truth[f] = static_cast<int>(rng() % 4);
    for (std::size_t j = 0; j < accuracy.size(); ++j) {
      if (u(rng) < accuracy[j]) {
        rows[f][j] = truth[f];
      } else {
        rows[f][j] = (truth[f] + 1 + static_cast<int>(rng() % 3)) % 4;
      }
    }
  }
  return rows;
}

}  // namespace

TEST(VoteMatrix, Construction) {
  const auto m = VoteMatrix::from_rows({{0, 1}, {3, 2}});
  EXPECT_EQ(m.frames(), 2u);
  EXPECT_EQ(m.players(), 2u);
  EXPECT_EQ(m(1, 0), 3);
  EXPECT_THROW(VoteMatrix::from_rows({{0, 1}, {3}}), InvalidInput);
  EXPECT_THROW(VoteMatrix::from_rows({{0, 4}}), InvalidInput);
  EXPECT_THROW(VoteMatrix::from_rows({{-1}}), InvalidInput);
  EXPECT_TRUE(VoteMatrix::from_rows({}).empty());
}

TEST(EmFit, EmptyMatrixIsAnError) {
  EXPECT_THROW(em_fit(VoteMatrix{}), InvalidInput);
  EXPECT_THROW(em_fit(VoteMatrix(3, 0)), InvalidInput);
}

TEST(EmFit, ConsensusConvergesImmediately) {
  Rows rows;
  for (int f = 0; f < 2000; ++f) rows.push_back(std::vector<int>(6, f % 4));
  const auto res = em_fit(VoteMatrix::from_rows(rows));
  EXPECT_TRUE(res.converged);
  EXPECT_LE(res.iterations, 2u);
  for (int f = 0; f < 2000; ++f) EXPECT_EQ(res.labels[f], f % 4);
  for (const auto& m : res.confusion) {
    for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(m[c][c], 1.0, 0.01);
  }
}

TEST(EmFit, PlantedModelRecoversTruth) {
  std::mt19937_64 rng(1234);
  std::vector<double> acc(9, 0.9);
  acc.insert(acc.end(), 3, 0.25);
  std::vector<int> truth;
  const auto rows = planted(500, acc, rng, truth);
  const auto res = em_fit(VoteMatrix::from_rows(rows));
  EXPECT_GE(agreement(truth, res.labels), 0.95);
  const auto rel = res.worker_reliability();
  for (std::size_t j = 0; j < 9; ++j) {
    for (std::size_t b = 9; b < 12; ++b) EXPECT_GT(rel[j], rel[b]);
  }
}

TEST(EmFit, PairOutvotesDissenter) {
  // The dissenter always answers one class above the pair.
  const Rows rows{{0, 0, 1}, {1, 1, 2}, {2, 2, 3}, {3, 3, 0}, {0, 0, 1}};
  const auto res = em_fit(VoteMatrix::from_rows(rows));
  for (std::size_t f = 0; f < rows.size(); ++f) EXPECT_EQ(res.labels[f], rows[f][0]);

  // The posteriors equal Bayes' rule under the fitted parameters, enumerated class by class.
  for (std::size_t f = 0; f < rows.size(); ++f) {
    std::vector<double> p(4);
    for (std::size_t c = 0; c < 4; ++c) {
      p[c] = res.class_priors[c];
      for (std::size_t j = 0; j < 3; ++j) p[c] *= res.confusion[j][c][rows[f][j]];
    }
    const double z = std::accumulate(p.begin(), p.end(), 0.0);
    for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(res.posteriors[f][c], p[c] / z, 1e-12);
  }
}

TEST(EmFit, MatchesReferenceImplementation) {
  std::mt19937_64 rng(99);
  for (int iter = 0; iter < 40; ++iter) {
    const std::size_t F = 5 + rng() % 60;
    const std::size_t N = 1 + rng() % 7;
    Rows rows(F, std::vector<int>(N));
    for (auto& r : rows) {
      for (auto& v : r) v = static_cast<int>(rng() % 4);
    }
    EmOptions opt;
    opt.max_iters = 1 + rng() % 15;
    opt.tol = 0.0;  // run exactly max_iters iterations
    const auto res = em_fit(VoteMatrix::from_rows(rows), opt);
    ASSERT_EQ(res.iterations, opt.max_iters);
    const auto ref = reference_em(rows, 4, opt.max_iters);
    for (std::size_t f = 0; f < F; ++f) {
      for (std::size_t c = 0; c < 4; ++c) ASSERT_NEAR(res.posteriors[f][c], ref[f][c], 1e-9);
    }
  }
}

TEST(EmFit, NormalizationAndMonotoneObjective) {
  std::mt19937_64 rng(7);
  std::vector<int> truth;
  const auto rows = planted(300, {0.8, 0.7, 0.6, 0.3, 0.9}, rng, truth);
  const auto res = em_fit(VoteMatrix::from_rows(rows));
  for (const auto& p : res.posteriors) EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
  for (const auto& m : res.confusion) {
    for (const auto& row : m) EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-9);
  }
  EXPECT_NEAR(std::accumulate(res.class_priors.begin(), res.class_priors.end(), 0.0), 1.0, 1e-9);
  ASSERT_EQ(res.objective.size(), res.iterations);
  for (std::size_t i = 1; i < res.objective.size(); ++i) EXPECT_GE(res.objective[i], res.objective[i - 1] - 1e-9);
}

TEST(EmFit, FrameOrderDoesNotMatter) {
  std::mt19937_64 rng(3);
  std::vector<int> truth;
  auto rows = planted(200, {0.9, 0.8, 0.4, 0.7}, rng, truth);
  const auto a = em_fit(VoteMatrix::from_rows(rows));
  std::shuffle(rows.begin(), rows.end(), rng);
  const auto b = em_fit(VoteMatrix::from_rows(rows));
  for (std::size_t j = 0; j < a.confusion.size(); ++j) {
    for (std::size_t c = 0; c < 4; ++c) {
      for (std::size_t v = 0; v < 4; ++v) EXPECT_NEAR(a.confusion[j][c][v], b.confusion[j][c][v], 1e-6);
    }
  }
}

TEST(Agreement, Examples) {
  EXPECT_DOUBLE_EQ(agreement({1, 2, 3}, {1, 2, 3}), 1.0);
  EXPECT_DOUBLE_EQ(agreement({1, 2, 1}, {1, 2, 2}), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(agreement({}, {}), 1.0);
  EXPECT_THROW(agreement({1}, {}), InvalidInput);
}

TEST(EmResultJson, RoundTrip) {
  std::mt19937_64 rng(5);
  std::vector<int> truth;
  const auto res = em_fit(VoteMatrix::from_rows(planted(50, {0.9, 0.5, 0.7}, rng, truth)));
  std::stringstream ss;
  write_json(ss, res);
  const auto back = read_em_json(ss);
  EXPECT_EQ(back.k, res.k);
  EXPECT_EQ(back.labels, res.labels);
  EXPECT_EQ(back.posteriors, res.posteriors);
  EXPECT_EQ(back.confusion, res.confusion);
  EXPECT_EQ(back.class_priors, res.class_priors);
  EXPECT_EQ(back.iterations, res.iterations);
  EXPECT_EQ(back.converged, res.converged);
  EXPECT_EQ(back.objective, res.objective);

  std::stringstream bad("{\"k\": 4}");
  EXPECT_THROW(read_em_json(bad), Error);
  EXPECT_THROW(load_em_result("/nonexistent/em.json"), Error);
}
