#include "crowdctl/em.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "crowdctl/errors.hpp"

namespace crowdctl {

using nlohmann::json;

VoteMatrix::VoteMatrix(std::size_t frames, std::size_t players, std::size_t k)
    : frames_(frames), players_(players), k_(k), data_(frames * players, 0) {
  if (k == 0) throw InvalidInput("vote matrix needs k >= 1");
}

void VoteMatrix::set(std::size_t f, std::size_t j, int v) {
  if (v < 0 || static_cast<std::size_t>(v) >= k_) {
    throw InvalidInput("vote " + std::to_string(v) + " outside [0, " + std::to_string(k_ - 1) + "]");
  }
  data_[f * players_ + j] = v;
}

VoteMatrix VoteMatrix::from_rows(const std::vector<std::vector<int>>& rows, std::size_t k) {
  const std::size_t players = rows.empty() ? 0 : rows.front().size();
  VoteMatrix m(rows.size(), players, k);
  for (std::size_t f = 0; f < rows.size(); ++f) {
    if (rows[f].size() != players) throw InvalidInput("vote matrix rows have different lengths");
    for (std::size_t j = 0; j < players; ++j) m.set(f, j, rows[f][j]);
  }
  return m;
}

VoteMatrix VoteMatrix::from_log(const RunLog& log) {
  std::vector<std::vector<int>> rows;
  for (const auto* f : log.frames()) {
    std::vector<int> row;
    row.reserve(f->votes.size());
    for (Command c : f->votes) row.push_back(static_cast<int>(index_of(c)));
    rows.push_back(std::move(row));
  }
  return from_rows(rows);
}

std::vector<double> EmResult::worker_reliability() const {
  std::vector<double> out;
  out.reserve(confusion.size());
  for (const auto& m : confusion) {
    double trace = 0.0;
    for (std::size_t c = 0; c < m.size(); ++c) trace += m[c][c];
    out.push_back(k == 0 ? 0.0 : trace / static_cast<double>(k));
  }
  return out;
}

namespace {

// Position of each class in the tie-break order; classes beyond the command alphabet
// follow in ascending order.
std::vector<std::size_t> tie_rank(std::size_t k, const TieOrder& order) {
  std::vector<std::size_t> rank(k);
  for (std::size_t c = 0; c < k; ++c) rank[c] = order.size() + c;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto c = index_of(order[i]);
    if (c < k) rank[c] = i;
  }
  return rank;
}

std::size_t argmax(const std::vector<double>& v, const std::vector<std::size_t>& rank) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < v.size(); ++c) {
    if (v[c] > v[best] || (v[c] == v[best] && rank[c] < rank[best])) best = c;
  }
  return best;
}

}  // namespace

EmResult em_fit(const VoteMatrix& votes, const EmOptions& options) {
  if (votes.empty()) throw InvalidInput("em_fit needs at least one frame and one player");
  const std::size_t F = votes.frames();
  const std::size_t N = votes.players();
  const std::size_t K = votes.k();
  const auto rank = tie_rank(K, options.tie_order);

  EmResult res;
  res.k = K;
  res.posteriors.assign(F, std::vector<double>(K, 0.0));
  res.confusion.assign(N, std::vector<std::vector<double>>(K, std::vector<double>(K, 0.0)));
  res.class_priors.assign(K, 0.0);

  // Majority-vote initialization as one-hot posteriors.
  for (std::size_t f = 0; f < F; ++f) {
    std::vector<double> counts(K, 0.0);
    for (std::size_t j = 0; j < N; ++j) counts[votes(f, j)] += 1.0;
    res.posteriors[f][argmax(counts, rank)] = 1.0;
  }

  std::vector<std::vector<std::vector<double>>> log_theta(
      N, std::vector<std::vector<double>>(K, std::vector<double>(K, 0.0)));
  std::vector<double> log_prior(K);
  std::vector<double> lp(K);

  for (std::size_t it = 1; it <= options.max_iters; ++it) {
    // M-step.
    for (std::size_t c = 0; c < K; ++c) {
      double mass = 0.0;
      for (std::size_t f = 0; f < F; ++f) mass += res.posteriors[f][c];
      res.class_priors[c] = (mass + 1.0) / static_cast<double>(F + K);
      log_prior[c] = std::log(res.class_priors[c]);
    }
    double log_density = 0.0;
    for (std::size_t c = 0; c < K; ++c) log_density += log_prior[c];
    for (std::size_t j = 0; j < N; ++j) {
      auto& m = res.confusion[j];
      for (auto& row : m) std::fill(row.begin(), row.end(), 1.0);
      for (std::size_t f = 0; f < F; ++f) {
        const int v = votes(f, j);
        for (std::size_t c = 0; c < K; ++c) m[c][v] += res.posteriors[f][c];
      }
      for (std::size_t c = 0; c < K; ++c) {
        double row = 0.0;
        for (double x : m[c]) row += x;
        for (std::size_t v = 0; v < K; ++v) {
          m[c][v] /= row;
          log_theta[j][c][v] = std::log(m[c][v]);
          log_density += log_theta[j][c][v];
        }
      }
    }

    // E-step.
    double ll = 0.0;
    double max_change = 0.0;
    for (std::size_t f = 0; f < F; ++f) {
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < K; ++c) {
        lp[c] = log_prior[c];
        for (std::size_t j = 0; j < N; ++j) lp[c] += log_theta[j][c][votes(f, j)];
        top = std::max(top, lp[c]);
      }
      double z = 0.0;
      for (std::size_t c = 0; c < K; ++c) z += std::exp(lp[c] - top);
      ll += top + std::log(z);
      for (std::size_t c = 0; c < K; ++c) {
        const double p = std::exp(lp[c] - top) / z;
        max_change = std::max(max_change, std::abs(p - res.posteriors[f][c]));
        res.posteriors[f][c] = p;
      }
    }

    const double obj = ll + log_density;
    if (!res.objective.empty()) {
      const double prev = res.objective.back();
      if (obj < prev - 1e-9 * std::max(1.0, std::abs(prev))) {
        throw ConsistencyError("EM objective decreased at iteration " + std::to_string(it));
      }
    }
    res.log_likelihood.push_back(ll);
    res.objective.push_back(obj);
    res.iterations = it;
    if (max_change < options.tol) {
      res.converged = true;
      break;
    }
  }

  res.labels.resize(F);
  for (std::size_t f = 0; f < F; ++f) res.labels[f] = static_cast<int>(argmax(res.posteriors[f], rank));
  return res;
}

double agreement(const std::vector<int>& live_outputs, const std::vector<int>& em_labels) {
  if (live_outputs.size() != em_labels.size()) {
    throw InvalidInput("agreement: sequences have lengths " + std::to_string(live_outputs.size()) +
                       " and " + std::to_string(em_labels.size()));
  }
  if (live_outputs.empty()) return 1.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < live_outputs.size(); ++i) same += live_outputs[i] == em_labels[i];
  return static_cast<double>(same) / static_cast<double>(live_outputs.size());
}

void write_json(std::ostream& out, const EmResult& r) {
  json j = {{"k", r.k},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"class_priors", r.class_priors},
            {"labels", r.labels},
            {"posteriors", r.posteriors},
            {"confusion", r.confusion},
            {"worker_reliability", r.worker_reliability()},
            {"log_likelihood", r.log_likelihood},
            {"objective", r.objective}};
  out << j.dump() << '\n';
}

EmResult read_em_json(std::istream& in) {
  EmResult r;
  try {
    const json j = json::parse(in);
    r.k = j.at("k").get<std::size_t>();
    r.iterations = j.at("iterations").get<std::size_t>();
    r.converged = j.at("converged").get<bool>();
    r.class_priors = j.at("class_priors").get<std::vector<double>>();
    r.labels = j.at("labels").get<std::vector<int>>();
    r.posteriors = j.at("posteriors").get<std::vector<std::vector<double>>>();
    r.confusion = j.at("confusion").get<std::vector<std::vector<std::vector<double>>>>();
    r.log_likelihood = j.at("log_likelihood").get<std::vector<double>>();
    r.objective = j.at("objective").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(std::string("EM result: ") + e.what());
  }
  if (r.posteriors.size() != r.labels.size()) throw Error("EM result: posteriors and labels differ in length");
  return r;
}

void save_em_result(const std::string& path, const EmResult& result) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write EM result " + path);
  write_json(out, result);
}

EmResult load_em_result(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open EM result " + path);
  return read_em_json(in);
}

}  // namespace crowdctl
