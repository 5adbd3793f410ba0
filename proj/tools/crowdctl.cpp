// crowdctl: offline experiments, EM oracle, reports and the live server.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crowdctl/agents.hpp"
#include "crowdctl/config.hpp"
#include "crowdctl/em.hpp"
#include "crowdctl/errors.hpp"
#include "crowdctl/experiment.hpp"
#include "crowdctl/report.hpp"
#include "crowdctl/server.hpp"

using namespace crowdctl;

namespace {

// Accepts "7" and inclusive ranges such as "1..10".
std::vector<std::uint64_t> parse_seeds(const std::vector<std::string>& items) {
  std::vector<std::uint64_t> seeds;
  for (const auto& s : items) {
    const auto dots = s.find("..");
    try {
      if (dots == std::string::npos) {
        seeds.push_back(std::stoull(s));
      } else {
        const auto lo = std::stoull(s.substr(0, dots));
        const auto hi = std::stoull(s.substr(dots + 2));
        if (hi < lo) throw ConfigError("empty seed range " + s);
        for (auto x = lo; x <= hi; ++x) seeds.push_back(x);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("bad seed '" + s + "'");
    }
  }
  return seeds;
}

ControllerConfig controller_from(const std::string& config_path, const std::string& frame_mode,
                                 const std::string& aggregator) {
  ControllerConfig cfg = config_path.empty() ? ControllerConfig{} : load_config_file(config_path);
  if (!frame_mode.empty()) cfg.frame_mode = frame_mode_from_string(frame_mode);
  if (!aggregator.empty()) cfg.aggregator = aggregator_from_string(aggregator);
  return cfg;
}

void print_report(const ScoreReport& rep) {
  std::printf("%s: mean %.2f max %lld over %zu trial(s)\n", rep.label.c_str(), rep.mean(),
              static_cast<long long>(rep.max()), rep.trials.size());
  for (const auto& t : rep.trials) {
    std::printf("  seed %llu trial %d score %lld%s\n", static_cast<unsigned long long>(t.seed), t.trial,
                static_cast<long long>(t.score), t.truncated ? " (truncated)" : "");
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  return out;
}

Server* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crowd-control experiments and live server"};
  app.require_subcommand(1);

  // sim
  auto* sim = app.add_subcommand("sim", "run one controller configuration over trials and seeds");
  std::string sim_mode, sim_agg, sim_roster, sim_config, sim_out;
  int sim_trials = 6;
  std::vector<std::string> sim_seeds{"1"};
  bool sim_no_carry = false;
  sim->add_option("--frame-mode", sim_mode, "static or dynamic")->check(CLI::IsMember({"static", "dynamic"}));
  sim->add_option("--aggregator", sim_agg, "mv or reliability")->check(CLI::IsMember({"mv", "reliability"}));
  sim->add_option("--trials", sim_trials, "trials per seed")->capture_default_str();
  sim->add_option("--seeds", sim_seeds, "seeds, e.g. 1 2 3 or 1..10")->capture_default_str();
  sim->add_option("--roster", sim_roster, "roster JSON file (default roster if absent)");
  sim->add_option("--config", sim_config, "controller config JSON file");
  sim->add_option("--out", sim_out, "JSONL run log path");
  sim->add_flag("--no-carry", sim_no_carry, "reset reliabilities at every trial");

  // solo
  auto* solo = app.add_subcommand("solo", "play one profile alone");
  std::string solo_profile, solo_roster;
  std::vector<std::string> solo_seeds{"1..10"};
  solo->add_option("--profile", solo_profile, "profile name from the roster")->required();
  solo->add_option("--seeds", solo_seeds, "seeds, e.g. 1 2 3 or 1..10")->capture_default_str();
  solo->add_option("--roster", solo_roster, "roster JSON file (default roster if absent)");

  // em
  auto* em = app.add_subcommand("em", "fit Dawid-Skene EM to the frames of a run log");
  std::string em_log, em_out;
  EmOptions em_opt;
  em->add_option("--log", em_log, "JSONL run log")->required();
  em->add_option("--max-iters", em_opt.max_iters, "iteration cap")->capture_default_str();
  em->add_option("--tol", em_opt.tol, "posterior change tolerance")->capture_default_str();
  em->add_option("--out", em_out, "EM result JSON path")->required();

  // report
  auto* report = app.add_subcommand("report", "summary CSV (scores, EM agreement) and reliability trajectories");
  std::vector<std::string> rep_logs, rep_ems;
  std::string rep_out, rep_traj;
  report->add_option("--log", rep_logs, "run logs, one per configuration")->required();
  report->add_option("--em", rep_ems, "EM results, in the same order as --log")->required();
  report->add_option("--out", rep_out, "summary CSV path")->required();
  report->add_option("--trajectories", rep_traj, "trajectory CSV path (default: <out>.trajectories.csv)");

  // replay
  auto* rep = app.add_subcommand("replay", "re-run a log's inputs and compare every frame");
  std::string replay_log;
  rep->add_option("--log", replay_log, "JSONL run log")->required();

  // serve
  auto* serve = app.add_subcommand("serve", "live WebSocket game server");
  std::string srv_mode, srv_agg, srv_config, srv_address = "0.0.0.0";
  std::uint16_t srv_port = 8080;
  std::size_t srv_min = 1, srv_slots = 0;
  double srv_countdown = 3000;
  std::uint64_t srv_seed = 1;
  serve->add_option("--port", srv_port, "TCP port")->capture_default_str();
  serve->add_option("--address", srv_address, "bind address")->capture_default_str();
  serve->add_option("--min-players", srv_min, "players needed to start")->capture_default_str();
  serve->add_option("--slots", srv_slots, "player slots (default: max of min-players and config n_players)");
  serve->add_option("--frame-mode", srv_mode, "static or dynamic")->check(CLI::IsMember({"static", "dynamic"}));
  serve->add_option("--aggregator", srv_agg, "mv or reliability")->check(CLI::IsMember({"mv", "reliability"}));
  serve->add_option("--config", srv_config, "controller config JSON file");
  serve->add_option("--countdown-ms", srv_countdown, "lobby countdown")->capture_default_str();
  serve->add_option("--seed", srv_seed, "seed of the first game")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      ExperimentSpec spec;
      spec.roster = sim_roster.empty() ? default_roster() : load_roster_file(sim_roster);
      spec.controller = controller_from(sim_config, sim_mode, sim_agg);
      spec.controller.n_players = spec.roster.size();
      spec.trials = sim_trials;
      spec.seeds = parse_seeds(sim_seeds);
      spec.carry_reliability = !sim_no_carry;
      const auto result = run_offline(spec);
      print_report(result.report);
      if (!sim_out.empty()) save_run_log(sim_out, result.log);
    } else if (*solo) {
      const auto roster = solo_roster.empty() ? default_roster() : load_roster_file(solo_roster);
      const AiProfile* profile = nullptr;
      for (const auto& p : roster) {
        if (p.name == solo_profile) profile = &p;
      }
      if (!profile) {
        std::string names;
        for (const auto& p : roster) names += (names.empty() ? "" : ", ") + p.name;
        throw ConfigError("no profile named '" + solo_profile + "' in the roster (have: " + names + ")");
      }
      print_report(run_solo(*profile, parse_seeds(solo_seeds)));
    } else if (*em) {
      const auto log = load_run_log(em_log);
      const auto result = em_fit(VoteMatrix::from_log(log), em_opt);
      save_em_result(em_out, result);
      std::printf("%zu frames, %zu iterations, %s\n", result.labels.size(), result.iterations,
                  result.converged ? "converged" : "not converged");
    } else if (*report) {
      if (rep_logs.size() != rep_ems.size()) throw ConfigError("--log and --em must be given the same number of times");
      std::vector<SummaryRow> rows;
      std::vector<RunLog> logs;
      for (std::size_t i = 0; i < rep_logs.size(); ++i) {
        logs.push_back(load_run_log(rep_logs[i]));
        rows.push_back(summarize(logs.back(), load_em_result(rep_ems[i])));
      }
      auto out = open_out(rep_out);
      write_summary_csv(out, rows);
      if (rep_traj.empty()) rep_traj = rep_out + ".trajectories.csv";
      auto traj = open_out(rep_traj);
      for (std::size_t i = 0; i < logs.size(); ++i) {
        std::ostringstream part;
        write_trajectory_csv(part, logs[i]);
        std::string text = part.str();
        if (i > 0) text.erase(0, text.find("\r\n") + 2);  // one header for the whole file
        traj << text;
      }
      for (const auto& r : rows) {
        std::printf("%s: mean %.2f max %lld agreement %.4f\n", r.config.c_str(), r.mean_score,
                    static_cast<long long>(r.max_score), r.agreement);
      }
    } else if (*rep) {
      const auto result = replay(load_run_log(replay_log));
      std::printf("%zu frames checked: %s\n", result.frames_checked,
                  result.identical ? "identical" : result.first_mismatch.c_str());
      return result.identical ? 0 : 2;
    } else if (*serve) {
      ServerOptions opt;
      opt.address = srv_address;
      opt.port = srv_port;
      opt.session.controller = controller_from(srv_config, srv_mode, srv_agg);
      opt.session.min_players = srv_min;
      opt.session.controller.n_players =
          srv_slots > 0 ? srv_slots : std::max(srv_min, opt.session.controller.n_players);
      opt.session.countdown = Millis(srv_countdown);
      opt.session.seed = srv_seed;
      Server server(opt);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::printf("serving %s on %s:%u (%zu slots, start at %zu players)\n",
                  config_label(opt.session.controller).c_str(), srv_address.c_str(), server.port(),
                  opt.session.controller.n_players, srv_min);
      std::fflush(stdout);
      server.run();
      g_server = nullptr;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "crowdctl: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
