#include "crowdctl/run_log.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "crowdctl/errors.hpp"

namespace crowdctl {

using nlohmann::json;

namespace {

json votes_json(const std::vector<Command>& votes) {
  json a = json::array();
  for (Command c : votes) a.push_back(static_cast<int>(c));
  return a;
}

std::vector<Command> votes_from(const json& a) {
  std::vector<Command> v;
  v.reserve(a.size());
  for (const auto& x : a) v.push_back(static_cast<Command>(x.get<int>()));
  return v;
}

struct LineWriter {
  json operator()(const TrialStartRecord& r) const {
    return {{"kind", "trial_start"}, {"run", r.run}, {"trial", r.trial}, {"seed", r.seed}};
  }
  json operator()(const InputRecord& r) const {
    return {{"kind", "input"}, {"run", r.run},       {"trial", r.trial},
            {"tick", r.tick},  {"t", r.t},           {"player", r.player},
            {"cmd", static_cast<int>(r.cmd)}};
  }
  json operator()(const FrameRecord& r) const {
    return {{"kind", "frame"},
            {"run", r.run},
            {"trial", r.trial},
            {"tick", r.tick},
            {"t", r.t},
            {"votes", votes_json(r.votes)},
            {"output", static_cast<int>(r.output)},
            {"reliabilities", r.reliabilities}};
  }
  json operator()(const GameOverRecord& r) const {
    return {{"kind", "game_over"}, {"run", r.run},     {"trial", r.trial},
            {"tick", r.tick},      {"t", r.t},         {"score", r.score},
            {"truncated", r.truncated}};
  }
};

}  // namespace

std::vector<const FrameRecord*> RunLog::frames() const {
  std::vector<const FrameRecord*> out;
  for (const auto& l : lines) {
    if (const auto* f = std::get_if<FrameRecord>(&l)) out.push_back(f);
  }
  return out;
}

std::vector<const GameOverRecord*> RunLog::game_overs() const {
  std::vector<const GameOverRecord*> out;
  for (const auto& l : lines) {
    if (const auto* g = std::get_if<GameOverRecord>(&l)) out.push_back(g);
  }
  return out;
}

void write_jsonl(std::ostream& out, const RunLog& log) {
  json cfg = {{"kind", "config"},
              {"controller", json::parse(to_json_string(log.config.controller))},
              {"roster", json::parse(to_json_string(log.config.roster))},
              {"trials", log.config.trials},
              {"seeds", log.config.seeds},
              {"carry_reliability", log.config.carry_reliability},
              {"max_ticks", log.config.max_ticks}};
  out << cfg.dump() << '\n';
  for (const auto& l : log.lines) out << std::visit(LineWriter{}, l).dump() << '\n';
}

RunLog read_jsonl(std::istream& in) {
  RunLog log;
  std::string line;
  std::size_t line_no = 0;
  bool have_config = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const auto kind = j.at("kind").get<std::string>();
      if (kind == "config") {
        log.config.controller = config_from_json_string(j.at("controller").dump());
        log.config.roster = roster_from_json_string(j.at("roster").dump());
        log.config.trials = j.at("trials").get<int>();
        log.config.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        log.config.carry_reliability = j.at("carry_reliability").get<bool>();
        log.config.max_ticks = j.at("max_ticks").get<std::int64_t>();
        have_config = true;
      } else if (kind == "trial_start") {
        log.lines.emplace_back(TrialStartRecord{j.at("run").get<std::size_t>(), j.at("trial").get<int>(),
                                                j.at("seed").get<std::uint64_t>()});
      } else if (kind == "input") {
        log.lines.emplace_back(InputRecord{j.at("run").get<std::size_t>(), j.at("trial").get<int>(),
                                           j.at("tick").get<std::int64_t>(), j.at("t").get<double>(),
                                           j.at("player").get<PlayerId>(),
                                           static_cast<Command>(j.at("cmd").get<int>())});
      } else if (kind == "frame") {
        log.lines.emplace_back(FrameRecord{
            j.at("run").get<std::size_t>(), j.at("trial").get<int>(), j.at("tick").get<std::int64_t>(),
            j.at("t").get<double>(), votes_from(j.at("votes")),
            static_cast<Command>(j.at("output").get<int>()),
            j.at("reliabilities").get<std::vector<double>>()});
      } else if (kind == "game_over") {
        log.lines.emplace_back(GameOverRecord{
            j.at("run").get<std::size_t>(), j.at("trial").get<int>(), j.at("tick").get<std::int64_t>(),
            j.at("t").get<double>(), j.at("score").get<std::int64_t>(), j.at("truncated").get<bool>()});
      } else {
        throw Error("unknown line kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw Error("run log line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("run log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_config) throw Error("run log has no config line");
  return log;
}

void save_run_log(const std::string& path, const RunLog& log) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write run log " + path);
  write_jsonl(out, log);
}

RunLog load_run_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open run log " + path);
  return read_jsonl(in);
}

}  // namespace crowdctl
