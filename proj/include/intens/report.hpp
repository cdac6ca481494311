#ifndef INTENS_REPORT_HPP
#define INTENS_REPORT_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include "intens/analysis.hpp"
#include "intens/fitting.hpp"

namespace intens {

/// Reproducibility header stamped into every artifact the tool writes. The
/// timestamp is the single non-deterministic field; everything else pins the
/// run: rerunning with the same inputs and seed reproduces the file byte for
/// byte apart from it.
struct RunStamp {
  std::string tool_version;
  std::string timestamp;    // ISO 8601 UTC
  std::string data_hash;    // canonical-CSV digest; empty for synthetic runs
  std::string config_hash;  // digest of the settings that shaped the run
  std::uint64_t seed = 0;
};

/// Current wall-clock time as "YYYY-MM-DDTHH:MM:SSZ".
std::string iso8601_utc_now();

/// Stamp with the current tool version and time filled in.
RunStamp make_stamp(std::string data_hash, std::string config_hash, std::uint64_t seed);

/// Digest of every setting that shapes a fit: the sharing scheme, the grid,
/// the smoothing constants, the optimizer budget, and the trial subset.
std::string fit_config_hash(const ModelSpec& spec, const FitConfig& config,
                            std::string_view experiment);

/// Fit artifact (read back for compare/predict/robustness). `experiment`
/// names the trial subset the fit scored: dialogue, narrator, or both.
std::string fit_result_to_json(const FitResult& fit, const RunStamp& stamp,
                               std::string_view experiment);

struct StampedFit {
  FitResult fit;
  RunStamp stamp;
  std::string experiment;
};

/// Parses a fit artifact. Throws DataError on malformed or incomplete files.
StampedFit fit_result_from_json(const std::string& text);

/// Human-readable fit summary with the decoded per-culture parameters.
std::string fit_result_text(const FitResult& fit, const RunStamp& stamp,
                            std::string_view experiment);

std::string comparison_to_json(const ComparisonReport& report, const RunStamp& stamp);

std::string robustness_to_json(const RobustnessReport& report, const RunStamp& stamp);
std::string robustness_text(const RobustnessReport& report);

std::string drop_outcome_to_json(const DropOutcome& outcome, const RunStamp& stamp,
                                 std::string_view experiment);
std::string drop_outcome_text(const DropOutcome& outcome);

std::string narrator_outcome_to_json(const NarratorOutcome& outcome, const RunStamp& stamp);
std::string narrator_outcome_text(const NarratorOutcome& outcome);

std::string recovery_to_json(const RecoveryReport& report, const RunStamp& stamp);
std::string recovery_text(const RecoveryReport& report);

}  // namespace intens

#endif
