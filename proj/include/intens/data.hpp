#ifndef INTENS_DATA_HPP
#define INTENS_DATA_HPP

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "intens/params.hpp"
#include "intens/types.hpp"

namespace intens {

/// One behavioral observation. `response` is the raw slider proportion in
/// [0,1]; `response_z` is filled by per-participant z-scoring (NaN before).
struct TrialRecord {
  std::string participant_id;
  Country country = Country::UK;
  Experiment experiment = Experiment::Dialogue;
  Predicate predicate = Predicate::Exhausted;
  Modifier modifier = Modifier::None;
  double response = std::numeric_limits<double>::quiet_NaN();
  double response_z = std::numeric_limits<double>::quiet_NaN();
};

inline constexpr const char* kCsvHeader =
    "participant_id,country,experiment,predicate,modifier,response";

/// Parses the canonical CSV schema. Collects every malformed row and throws a
/// DataError listing offending line numbers; duplicate
/// (participant, experiment, predicate, modifier) keys are errors too.
std::vector<TrialRecord> load_trials(const std::filesystem::path& path);

/// Same parser over in-memory text (line numbers count from 1 at the header).
std::vector<TrialRecord> parse_trials(const std::string& text);

struct ZScoreResult {
  std::vector<TrialRecord> trials;      // response_z filled; degenerate groups dropped
  std::vector<std::string> warnings;    // one line per excluded participant group
};

/// Fills response_z per (participant, experiment) group using the sample
/// (n-1) standard deviation. Groups with fewer than two distinct responses
/// are excluded with a warning.
ZScoreResult zscore_by_participant(std::vector<TrialRecord> trials);

/// Within-participant modifier effect: z(modified) - z(unmodified baseline).
struct EffectScore {
  std::string participant_id;
  Country country = Country::UK;
  Predicate predicate = Predicate::Exhausted;
  Modifier modifier = Modifier::Slightly;  // never None
  double effect = 0.0;
};

struct EffectScoreResult {
  std::vector<EffectScore> scores;
  std::vector<std::string> warnings;  // modified trials lacking a baseline
};

/// One score per (participant, experiment, predicate, modifier != none) where
/// both the modified and the bare version exist. Input must be z-scored.
EffectScoreResult effect_scores(std::span<const TrialRecord> trials);

/// Mean z-scored politeness rating per (country, predicate, modifier) from
/// politeness-experiment trials. Throws DataError naming any empty cell.
PolitenessTable build_politeness_table(std::span<const TrialRecord> trials);

/// Multiplies values of negative-valence predicates by -1 (involution).
PolitenessTable valence_flip(const PolitenessTable& table);
std::vector<EffectScore> valence_flip(std::vector<EffectScore> scores);

std::vector<TrialRecord> filter_experiment(std::span<const TrialRecord> trials, Experiment e);

/// Canonical serialization: header plus rows sorted by
/// (experiment, country, participant, predicate, modifier), shortest
/// round-trip float formatting. Input order never changes the output.
std::string canonical_csv(std::span<const TrialRecord> trials);

/// FNV-1a 64-bit digest, hex-encoded.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// Content digest of the canonicalized CSV; keys every output file so fits on
/// different data are never compared by accident.
std::string data_hash(std::span<const TrialRecord> trials);

}  // namespace intens

#endif
