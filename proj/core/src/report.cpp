#include "crowdctl/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "crowdctl/errors.hpp"

namespace crowdctl {

namespace {

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

SummaryRow summarize(const RunLog& log, const EmResult& em) {
  const auto frames = log.frames();
  if (frames.size() != em.labels.size()) {
    throw InvalidInput("log has " + std::to_string(frames.size()) + " frames but EM result has " +
                       std::to_string(em.labels.size()) + " labels");
  }
  SummaryRow row;
  row.config = config_label(log.config.controller);
  const auto overs = log.game_overs();
  if (!overs.empty()) {
    double sum = 0.0;
    for (const auto* g : overs) {
      sum += static_cast<double>(g->score);
      row.max_score = std::max(row.max_score, g->score);
    }
    row.mean_score = sum / static_cast<double>(overs.size());
  }
  std::vector<int> live;
  live.reserve(frames.size());
  for (const auto* f : frames) live.push_back(static_cast<int>(index_of(f->output)));
  row.agreement = agreement(live, em.labels);
  return row;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "config,mean_score,max_score,agreement\r\n";
  for (const auto& r : rows) {
    out << csv_field(r.config) << ',' << number(r.mean_score) << ',' << r.max_score << ','
        << number(r.agreement) << "\r\n";
  }
}

void write_trajectory_csv(std::ostream& out, const RunLog& log) {
  const std::string label = csv_field(config_label(log.config.controller));
  out << "config,run,trial,frame,tick";
  for (const auto& p : log.config.roster) out << ',' << csv_field(p.name);
  out << "\r\n";
  std::size_t run = 0;
  std::size_t index = 0;
  for (const auto* f : log.frames()) {
    if (f->run != run) {
      run = f->run;
      index = 0;
    }
    out << label << ',' << f->run << ',' << f->trial << ',' << index++ << ',' << f->tick;
    for (double r : f->reliabilities) out << ',' << number(r);
    out << "\r\n";
  }
}

}  // namespace crowdctl
