#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "crowdctl/em.hpp"
#include "crowdctl/run_log.hpp"

namespace crowdctl {

struct SummaryRow {
  std::string config;
  double mean_score = 0.0;
  std::int64_t max_score = 0;
  double agreement = 0.0;  // live outputs vs EM labels
};

/// Scores and EM agreement of one logged configuration. Throws InvalidInput when the EM
/// result does not cover exactly the frames of the log.
SummaryRow summarize(const RunLog& log, const EmResult& em);

/// Quotes a field when it contains a comma, quote, CR or LF; quotes are doubled.
std::string csv_field(const std::string& s);

/// RFC 4180: CRLF line endings, header row first.
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

/// One row per emitted frame: config, run, trial, frame index within the run, tick, then
/// one reliability column per roster entry.
void write_trajectory_csv(std::ostream& out, const RunLog& log);

}  // namespace crowdctl
