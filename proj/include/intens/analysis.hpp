#ifndef INTENS_ANALYSIS_HPP
#define INTENS_ANALYSIS_HPP

#include <Eigen/Dense>
#include <array>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "intens/fitting.hpp"

namespace intens {

struct RobustnessReport {
  std::string scenario;
  double baseline_nll = 0.0;
  double variant_nll = 0.0;
  double delta = 0.0;  // variant - baseline
  std::array<double, kCountryCount> baseline_by_country{};
  std::array<double, kCountryCount> variant_by_country{};
};

/// Fits the social-weight-frozen variant of the spec to narrator trials
/// (phi_s removed from the vector, df reduced accordingly).
FitResult narrator_fit(std::span<const TrialRecord> narrator_trials, const ModelSpec& spec,
                       const PolitenessTable& pol, const FitConfig& config);

struct NarratorOutcome {
  RobustnessReport report;
  FitResult refit;
};

/// Transfer comparison on narrator trials: the dialogue-trained parameters
/// scored with social weight zeroed (baseline) against a social-frozen model
/// refit to the narrator data (variant). A negative delta means refitting
/// beats the transferred dialogue parameters.
NarratorOutcome narrator_transfer(std::span<const TrialRecord> narrator_trials,
                                  const FitResult& dialogue_fit, const PolitenessTable& pol,
                                  const FitConfig& config);

enum class ConstrainMode { Midpoint, Zero };

/// Forces one culture-varied parameter to a single shared value: the UK/US
/// midpoint, or zero, keeping every other parameter at its fitted value, and
/// re-scores the dataset. Zero mode applies to scalars only.
RobustnessReport constrain_and_score(const FitResult& fit, CultureParam param,
                                     ConstrainMode mode, std::span<const TrialRecord> trials,
                                     const PolitenessTable& pol);

/// Full refit with the parameter removed from the varied set, seeded by the
/// constrained solution. Midpoint semantics only.
FitResult constrain_and_refit(const FitResult& fit, CultureParam param,
                              std::span<const TrialRecord> trials, const PolitenessTable& pol,
                              FitConfig config);

/// A dropped stimulus item: either a predicate or a modifier.
using DropItem = std::variant<Predicate, Modifier>;

DropItem parse_drop_item(std::string_view name);
std::string drop_item_name(const DropItem& item);

struct DropOutcome {
  RobustnessReport report;          // scored on the FULL dataset
  double reduced_baseline_nll = 0;  // full-data fit scored on the reduced set
  double reduced_variant_nll = 0;   // reduced-data refit scored on the reduced set
  FitResult refit;
};

/// Drops every trial mentioning the item, refits on the remainder, then
/// scores the refit parameters on the full dataset against the baseline fit.
DropOutcome drop_item_refit(std::span<const TrialRecord> trials, const DropItem& item,
                            const FitResult& baseline, const PolitenessTable& pol,
                            const FitConfig& config);

/// Politeness values on a fixed synthetic pattern (modified forms politer for
/// positive predicates, less polite for negative ones), for simulations that
/// need a complete table without behavioral data.
PolitenessTable synthetic_politeness_table();

/// Draws interpretation trials from the model: for every (country, predicate,
/// modifier) cell, response bins sampled from the pragmatic listener's
/// posterior. Trials are spread over cells round-robin; responses carry the
/// sampled grid point in response_z.
std::vector<TrialRecord> sample_synthetic_trials(
    const std::array<CultureParams, kCountryCount>& cultures, const PolitenessTable& pol,
    const StateGrid& grid, long n_trials, std::uint64_t seed);

struct RecoveryReport {
  ModelSpec spec;
  Eigen::VectorXd true_vector;
  Eigen::VectorXd fitted_vector;
  double true_nll = 0.0;    // generating parameters scored on the synthetic data
  double fitted_nll = 0.0;
  long n_trials = 0;
  // |fitted - generating| threshold midpoints, per country and modifier slot
  std::array<std::array<double, kModifierCount>, kCountryCount> midpoint_error{};
  double max_midpoint_error = 0.0;
  // The bare form's lower bound and the strongest form's upper bound are
  // censored by the response scale: beyond the grid edge the likelihood is
  // flat in them, so their midpoints can drift freely at equal fit. The
  // identifiable summary splits into the four interior modifier midpoints and
  // the two boundary pairs' scale-inner bounds.
  double max_interior_midpoint_error = 0.0;  // slightly, kind_of, quite, very
  double max_scale_bound_error = 0.0;        // bare-form hi, strongest-form lo
  bool ordering_preserved = false;  // fitted modifier midpoints keep the strength order
};

/// Simulates n_trials from the generating vector, refits from scratch, and
/// reports threshold-midpoint errors plus whether the fitted modifier
/// midpoints preserve the generating strength ordering in both cultures.
RecoveryReport parameter_recovery(const Eigen::VectorXd& true_vector, const ModelSpec& spec,
                                  long n_trials, std::uint64_t seed, const PolitenessTable& pol,
                                  const FitConfig& config);

/// A generating vector for recovery studies: the default start with
/// well-separated thresholds, plus deterministic offsets on culture-varied
/// slots so the two cultures genuinely differ.
Eigen::VectorXd recovery_truth(const ModelSpec& spec);

}  // namespace intens

#endif
