// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "crowdctl/em.hpp"
#include "crowdctl/experiment.hpp"
#include "crowdctl/frame_slicer.hpp"
#include "crowdctl/reliability.hpp"
#include "crowdctl/report.hpp"
#include "crowdctl/stats.hpp"
#include "oracles.hpp"

using namespace crowdctl;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void verdict(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<std::uint64_t> seeds_1_to(std::uint64_t n) {
  std::vector<std::uint64_t> s;
  for (std::uint64_t i = 1; i <= n; ++i) s.push_back(i);
  return s;
}

InputFrame random_frame(std::size_t n, std::mt19937_64& rng) {
  std::vector<Command> votes(n);
  for (auto& v : votes) v = command_from_index(rng() % kAlphabetSize);
  return InputFrame(votes);
}

void conservation_fuzz() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  ControllerConfig cfg;
  double worst = 0.0;
  bool ok = true;
  for (int i = 0; i < 10'000; ++i) {
    const std::size_t n = 2 + rng() % 15;
    cfg.n_players = n;
    const ReliabilityVector r(oracle::random_reliabilities(n, cfg.omega, rng));
    const auto next = apply_delta(r, reliability_update(random_frame(n, rng), r, cfg), cfg.omega);
    const double err = std::abs(next.sum() - static_cast<double>(n));
    worst = std::max(worst, err);
    ok = ok && err <= 1e-9;
  }
  const double secs = seconds_since(start);
  verdict("conservation fuzz", ok && secs < 5.0, fmt("10^4 updates, max |sum-N| %.3g, %.3f s", worst, secs));
}

void lower_bound() {
  ControllerConfig cfg;
  std::mt19937_64 rng(77);
  bool ok = true;
  double lowest = 1e9;
  // Fixed minority player, then a rotating minority, each for 10^4 frames.
  for (int variant = 0; variant < 2; ++variant) {
    const std::size_t n = 5;
    cfg.n_players = n;
    auto r = ReliabilityVector::uniform(n);
    for (int f = 0; f < 10'000; ++f) {
      const std::size_t minority = variant == 0 ? n - 1 : rng() % n;
      const auto majority_cmd = command_from_index(1 + rng() % 3);
      std::vector<Command> votes(n, majority_cmd);
      votes[minority] = command_from_index((index_of(majority_cmd) % 3) + 1);
      r = apply_delta(r, reliability_update(InputFrame(votes), r, cfg), cfg.omega);
      ok = ok && r.min() >= -cfg.omega;
      lowest = std::min(lowest, r.min());
    }
    if (variant == 0) ok = ok && r.r[n - 1] == -cfg.omega;
  }
  verdict("lower bound", ok, fmt("2 x 10^4 adversarial frames, min r %.17g (omega 0.5)", lowest));
}

void worked_examples() {
  ControllerConfig cfg;
  cfg.n_players = 4;
  auto close = [](const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (std::abs(a[i] - b[i]) > 1e-12) return false;
    }
    return a.size() == b.size();
  };
  const ReliabilityVector odd({0.3, 2.1, 1.4, 0.2});
  const bool unanimous = reliability_update(make_frame({1, 1, 1, 1}), odd, cfg).is_zero();
  const auto uniform = ReliabilityVector::uniform(4);
  const auto d1 = reliability_update(make_frame({1, 1, 1, 2}), uniform, cfg);
  const bool ex1 = close(d1.dr, {0.05, 0.05, 0.05, -0.15}) &&
                   close(apply_delta(uniform, d1, cfg.omega).r, {1.05, 1.05, 1.05, 0.85});
  const ReliabilityVector skewed({1.15, 1.15, 1.15, -0.45});
  const auto d2 = reliability_update(make_frame({1, 1, 1, 2}), skewed, cfg);
  const double third = 0.05 / 3.0;
  const bool ex2 = close(d2.dr, {third, third, third, -0.05}) && apply_delta(skewed, d2, cfg.omega).r[3] == -0.5;
  verdict("worked examples", unanimous && ex1 && ex2,
          fmt("unanimity %s, uniform %s, clamp %s", unanimous ? "ok" : "bad", ex1 ? "ok" : "bad", ex2 ? "ok" : "bad"));
}

void exhaustive_no_op() {
  ControllerConfig cfg;
  cfg.n_players = 4;
  cfg.gamma = 0.8;
  int zero = 0;
  int mismatches = 0;
  std::mt19937_64 rng(4);
  for (int code = 0; code < 256; ++code) {
    std::vector<Command> votes(4);
    for (int j = 0; j < 4; ++j) votes[j] = command_from_index((code >> (2 * j)) & 3);
    const InputFrame frame(votes);
    const auto counts = vote_counts(frame);
    bool all_viable = true;
    for (auto v : votes) {
      const int c = counts[v];
      all_viable = all_viable && c >= 1 && c >= cfg.gamma * counts.v_max;
    }
    for (int trial = 0; trial < 4; ++trial) {
      const ReliabilityVector r = trial == 0 ? ReliabilityVector::uniform(4)
                                             : ReliabilityVector(oracle::random_reliabilities(4, cfg.omega, rng));
      const auto d = reliability_update(frame, r, cfg);
      const bool is_zero = std::all_of(d.dr.begin(), d.dr.end(), [](double x) { return x == 0.0; });
      if (is_zero != all_viable) ++mismatches;
      if (trial == 0 && is_zero) ++zero;
    }
  }
  verdict("all-viable no-op", mismatches == 0, fmt("256 frames x 4 r, %d zero-delta frames, %d mismatches", zero, mismatches));
}

void mv_equivalence() {
  const TieOrder tie = kAscendingTieOrder;
  std::size_t checked = 0;
  std::size_t mismatches = 0;
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto r = ReliabilityVector::uniform(n);
    std::size_t total = 1;
    for (std::size_t j = 0; j < n; ++j) total *= kAlphabetSize;
    for (std::size_t code = 0; code < total; ++code) {
      std::vector<Command> votes(n);
      std::size_t c = code;
      for (auto& v : votes) {
        v = command_from_index(c % kAlphabetSize);
        c /= kAlphabetSize;
      }
      const InputFrame frame(votes);
      ++checked;
      if (aggregate_weighted(frame, r, tie) != aggregate_mv(frame, tie)) ++mismatches;
    }
  }
  verdict("MV equivalence", mismatches == 0, fmt("%zu frames (N 1..6), %zu mismatches", checked, mismatches));
}

void frame_timing() {
  ControllerConfig cfg;
  cfg.n_players = 4;
  cfg.aggregator = AggregatorKind::majority;
  FrameSlicer dyn(cfg);
  const auto r = ReliabilityVector::uniform(4);
  std::optional<double> emitted_at;
  std::vector<Command> votes;
  for (std::int64_t tick = 0; tick < 120 && !emitted_at; ++tick) {
    const double now = static_cast<double>(tick) * 1000.0 / 60.0;
    if (now >= 1000.0 && dyn.queued() == 0 && dyn.frames_emitted() == 0) dyn.push({0, Command::short_jump, Millis(1000)});
    if (now >= 1040.0 && dyn.queued() == 1) dyn.push({1, Command::long_jump, Millis(1040)});
    const auto frames = dyn.tick(Millis(now), r);
    if (!frames.empty()) {
      emitted_at = now;
      votes = frames.front().votes;
    }
  }
  // First 60 Hz tick at or after 1040 + 150.
  double first = 0.0;
  for (std::int64_t k = 0;; ++k) {
    first = static_cast<double>(k) * 1000.0 / 60.0;
    if (first >= 1190.0) break;
  }
  const bool dyn_ok = emitted_at && *emitted_at == first &&
                      votes == std::vector<Command>{Command::short_jump, Command::long_jump, Command::none, Command::none};

  cfg.frame_mode = FrameMode::static_frames;
  bool static_ok = true;
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200 && static_ok; ++trial) {
    FrameSlicer st(cfg);
    double now = 0.0;
    std::size_t frames = 0;
    while (now < 20'000.0) {
      now += static_cast<double>(1 + rng() % 700);
      frames += st.tick(Millis(now), r).size();
      static_ok = static_ok && frames == static_cast<std::size_t>(std::floor(now / 300.0));
    }
  }
  verdict("frame timing", dyn_ok && static_ok,
          fmt("dynamic emitted at %.3f ms (first tick >= 1190: %.3f), static floor count %s",
              emitted_at.value_or(-1.0), first, static_ok ? "ok" : "bad"));
}

struct ConfigRun {
  std::string label;
  RunResult result;
};

std::vector<ConfigRun> run_configurations(double& secs) {
  const auto start = Clock::now();
  std::vector<ConfigRun> runs;
  for (auto [mode, agg] : {std::pair{FrameMode::dynamic_frames, AggregatorKind::reliability},
                           std::pair{FrameMode::dynamic_frames, AggregatorKind::majority},
                           std::pair{FrameMode::static_frames, AggregatorKind::reliability},
                           std::pair{FrameMode::static_frames, AggregatorKind::majority}}) {
    auto spec = make_spec(mode, agg);
    spec.trials = 6;
    spec.seeds = seeds_1_to(10);
    auto res = run_offline(spec);
    runs.push_back({res.report.label, std::move(res)});
  }
  secs = seconds_since(start);
  return runs;
}

void config_ordering(const std::vector<ConfigRun>& runs, double secs) {
  bool ok = secs < 600.0;
  std::string detail;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    detail += fmt("%s%s %.1f", i ? " > " : "", runs[i].label.c_str(), runs[i].result.report.mean());
  }
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    const double p = mann_whitney_greater(runs[i].result.report.seed_means(), runs[i + 1].result.report.seed_means());
    ok = ok && p < 0.05;
    detail += fmt(" | p%zu %.4f", i + 1, p);
  }
  verdict("configuration ordering", ok, detail + fmt(" | %.1f s", secs));
}

void convergence(const RunResult& dyn_rel) {
  const auto& roster = dyn_rel.log.config.roster;
  std::size_t perfect = roster.size();
  std::vector<std::size_t> good;
  for (std::size_t j = 0; j < roster.size(); ++j) {
    if (roster[j].is_perfect()) perfect = j;
    if (roster[j].name.rfind("good", 0) == 0) good.push_back(j);
  }
  std::map<std::size_t, std::size_t> seen;
  std::map<std::size_t, bool> pass;
  int ties = 0;
  for (const auto* f : dyn_rel.log.frames()) {
    if (++seen[f->run] != 100) continue;
    // Perfect holds the maximum (a Good agent that never disagreed with it may tie), and
    // every Good agent ranks above every other agent.
    const auto& r = f->reliabilities;
    bool ok = perfect < r.size() && good.size() == 3;
    for (std::size_t j = 0; j < r.size() && ok; ++j) {
      const bool is_good = std::find(good.begin(), good.end(), j) != good.end();
      ok = r[perfect] >= r[j];
      if (j == perfect || is_good) continue;
      for (std::size_t g : good) ok = ok && r[g] > r[j];
    }
    for (std::size_t g : good) ties += ok && r[g] == r[perfect];
    pass[f->run] = ok;
  }
  const auto passed = std::count_if(pass.begin(), pass.end(), [](const auto& kv) { return kv.second; });
  verdict("reliability convergence", passed >= 8 && pass.size() == 10,
          fmt("%zu of %zu seeds (need 8 of 10) after 100 frames, %d Good agents tied with Perfect",
              static_cast<std::size_t>(passed), pass.size(), ties));
}

void solo_ordering() {
  const auto seeds = seeds_1_to(10);
  std::map<std::string, std::vector<double>> scores;
  for (const auto& p : default_roster()) {
    std::string base = p.name;
    if (const auto us = base.find_last_of('_'); us != std::string::npos && std::isdigit(static_cast<unsigned char>(base[us + 1]))) {
      base.erase(us);
    }
    if (scores.count(base)) continue;
    for (const auto& t : run_solo(p, seeds).trials) scores[base].push_back(static_cast<double>(t.score));
  }
  auto link = [&](const std::string& a, const std::string& b) {
    return mean(scores[a]) > mean(scores[b]) && iqr_above(scores[a], scores[b]);
  };
  const bool ok = link("perfect", "good") && link("good", "bad") && link("shifted_minus", "shifted_plus");
  std::string detail;
  for (const char* name : {"perfect", "good", "bad", "shifted_minus", "shifted_plus"}) {
    const auto q = quartiles(scores[name]);
    detail += fmt("%s %.0f [%.0f,%.0f] ", name, mean(scores[name]), q.q1, q.q3);
  }
  verdict("solo ordering", ok, detail);

  // Full chain, informational only.
  const std::vector<std::string> chain{"perfect", "good", "shifted_minus", "majorly_shifted_minus",
                                       "bad", "random", "shifted_plus", "confused"};
  std::printf("      solo chain:");
  for (std::size_t i = 0; i < chain.size(); ++i) {
    std::printf(" %s %.1f", chain[i].c_str(), mean(scores[chain[i]]));
    if (i + 1 < chain.size()) std::printf(" (p %.3f) >", mann_whitney_greater(scores[chain[i]], scores[chain[i + 1]]));
  }
  std::printf("\n");
}

void em_oracle(const std::vector<ConfigRun>& runs) {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> acc(9, 0.9);
  acc.insert(acc.end(), 3, 0.25);
  std::vector<std::vector<int>> rows(500, std::vector<int>(acc.size()));
  std::vector<int> truth(500);
  for (std::size_t f = 0; f < rows.size(); ++f) {
    truth[f] = static_cast<int>(rng() % 4);
    for (std::size_t j = 0; j < acc.size(); ++j) {
      rows[f][j] = u(rng) < acc[j] ? truth[f] : (truth[f] + 1 + static_cast<int>(rng() % 3)) % 4;
    }
  }
  const auto planted = em_fit(VoteMatrix::from_rows(rows));
  const double recovery = agreement(truth, planted.labels);

  bool monotone = true;
  bool ll_monotone = true;
  std::map<std::string, double> agree;
  auto check = [&](const EmResult& em) {
    for (std::size_t i = 1; i < em.objective.size(); ++i) {
      monotone = monotone && em.objective[i] >= em.objective[i - 1] - 1e-9;
      ll_monotone = ll_monotone && em.log_likelihood[i] >= em.log_likelihood[i - 1] - 1e-9;
    }
  };
  check(planted);
  for (const auto& run : runs) {
    if (run.result.log.config.controller.aggregator != AggregatorKind::reliability) continue;
    const auto em = em_fit(VoteMatrix::from_log(run.result.log));
    check(em);
    agree[run.label] = summarize(run.result.log, em).agreement;
  }
  const double dyn = agree["dynamic+reliability"];
  const double st = agree["static+reliability"];
  verdict("EM oracle", recovery >= 0.95 && monotone && dyn >= st,
          fmt("planted recovery %.3f, objective monotone %s, agreement dyn+rel %.4f >= static+rel %.4f",
              recovery, monotone ? "yes" : "no", dyn, st));
  std::printf("      plain log-likelihood monotone: %s\n", ll_monotone ? "yes" : "no");
}

void replay_determinism(const std::vector<ConfigRun>& runs) {
  bool ok = true;
  std::size_t frames = 0;
  std::string where;
  for (const auto& run : runs) {
    const auto rep = replay(run.result.log);
    frames += rep.frames_checked;
    if (!rep.identical || rep.frames_checked != run.result.log.frames().size()) {
      ok = false;
      where = run.label + ": " + rep.first_mismatch;
    }
  }
  verdict("replay determinism", ok, fmt("%zu frames over 4 configurations replayed bit for bit", frames) + where);
}

}  // namespace

int main() {
  conservation_fuzz();
  lower_bound();
  worked_examples();
  exhaustive_no_op();
  mv_equivalence();
  frame_timing();
  double secs = 0.0;
  const auto runs = run_configurations(secs);
  config_ordering(runs, secs);
  convergence(runs.front().result);
  solo_ordering();
  em_oracle(runs);
  replay_determinism(runs);
  std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
