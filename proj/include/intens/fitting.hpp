#ifndef INTENS_FITTING_HPP
#define INTENS_FITTING_HPP

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "intens/cma_es.hpp"
#include "intens/data.hpp"
#include "intens/grid.hpp"
#include "intens/model_spec.hpp"
#include "intens/params.hpp"
#include "intens/rsa.hpp"

namespace intens {

/// -ln(posterior[bin]); +inf when the bin mass underflows to zero.
double bin_nll(const Eigen::VectorXd& posterior, Eigen::Index bin);

/// Negative log-likelihood of one interpretation trial: the pragmatic
/// listener's probability mass on the grid bin nearest the z-scored response,
/// conditioned on the trial's utterance among the six forms of its predicate.
/// Narrator trials replace the speaker's social weight with zero. Politeness
/// trials are not interpretation data; passing one throws UsageError.
double trial_nll(const TrialRecord& trial,
                 const std::array<CultureParams, kCountryCount>& cultures,
                 const PolitenessTable& pol, const StateGrid& grid);

/// Interpretation trials collapsed to per-(country, narrator, predicate)
/// groups of (modifier, bin) counts, so one pragmatic-listener table serves
/// every trial in a group. Politeness trials are dropped. Trials with an
/// unscored (NaN) response_z throw UsageError.
struct BinnedCell {
  Modifier modifier = Modifier::None;
  Eigen::Index bin = 0;
  double count = 0.0;
};

struct BinnedGroup {
  Country country = Country::UK;
  bool narrator = false;
  Predicate predicate = Predicate::Exhausted;
  std::vector<BinnedCell> cells;
};

struct BinnedDataset {
  std::vector<BinnedGroup> groups;
  long n_trials = 0;

  static BinnedDataset from_trials(std::span<const TrialRecord> trials, const StateGrid& grid);
};

/// Sum of trial_nll over the binned data for fixed per-culture parameters.
double binned_nll(const BinnedDataset& data,
                  const std::array<CultureParams, kCountryCount>& cultures,
                  const PolitenessTable& pol, const StateGrid& grid);

/// Same, decoding the flat vector first; the CMA-ES objective.
double dataset_nll(const BinnedDataset& data, const Eigen::VectorXd& v, const ModelSpec& spec,
                   const PolitenessTable& pol, const StateGrid& grid, double tau = 0.2,
                   double epsilon = 1e-4);

/// Convenience overload over raw trials (bins them first).
double dataset_nll(std::span<const TrialRecord> trials, const Eigen::VectorXd& v,
                   const ModelSpec& spec, const PolitenessTable& pol, const StateGrid& grid,
                   double tau = 0.2, double epsilon = 1e-4);

struct FitConfig {
  CmaConfig cma;
  int starts = 5;              // independent CMA-ES runs from jittered start means
  double start_jitter = 0.3;   // sd of the start-mean perturbation (start 0 is unjittered)
  double tau = 0.2;
  double epsilon = 1e-4;
  Eigen::Index grid_points = 101;
  double grid_range = 4.0;
  std::vector<Eigen::VectorXd> extra_starts;  // run after the jittered ones
};

struct FitResult {
  ModelSpec spec;
  Eigen::VectorXd best_vector;
  double nll = 0.0;
  double aic = 0.0;  // 2*nll + 2*df
  double bic = 0.0;  // 2*nll + df*ln(n_trials)
  long n_trials = 0;
  std::vector<CmaTracePoint> trace;  // winning start only
  std::vector<double> start_values;  // best nll of every start, in run order
  int winning_start = 0;
  double final_sigma = 0.0;
  std::string stop_reason;
  std::uint64_t seed = 0;
  long evaluations = 0;

  /// Grid and smoothing settings the fit ran under (needed to score later).
  Eigen::Index grid_points = 101;
  double grid_range = 4.0;
  double tau = 0.2;
  double epsilon = 1e-4;
  std::string data_hash;
};

/// The canonical start point: thresholds spread along the modifier strength
/// hierarchy, informativity weight 1, social weight 0.1, cost 0.1, with
/// culture-varied slots initialized to the shared values.
Eigen::VectorXd default_start(const ModelSpec& spec);

/// Multi-start CMA-ES minimization of dataset_nll over the given
/// interpretation trials. Per-start seeds derive from config.cma.seed.
FitResult fit_model(std::span<const TrialRecord> trials, const ModelSpec& spec,
                    const PolitenessTable& pol, const FitConfig& config);

/// Same on pre-binned data (n_trials taken from the binning).
FitResult fit_binned(const BinnedDataset& data, const ModelSpec& spec,
                     const PolitenessTable& pol, const FitConfig& config);

struct ComparisonRow {
  std::string name;
  std::string varied;  // "+"-joined culture-varied parameter names, or "none"
  int df = 0;
  double nll = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  bool best_aic = false;
  bool best_bic = false;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;  // sorted by aic, ties by name
  long n_trials = 0;
};

/// Ranks two or more fits of the same dataset by AIC and flags the best AIC
/// and BIC rows. Throws UsageError when n_trials disagree (not comparable).
ComparisonReport compare_models(std::span<const FitResult> results);

/// Fixed-width text rendering of the comparison table.
std::string comparison_text(const ComparisonReport& report);

}  // namespace intens

#endif
