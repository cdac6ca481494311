#include "intens/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "intens/error.hpp"
#include "intens/rng.hpp"

namespace intens {

namespace {

// Total and per-country scores for fixed parameters.
struct SplitNll {
  double total = 0.0;
  std::array<double, kCountryCount> by_country{};
};

SplitNll score_split(std::span<const TrialRecord> trials,
                     const std::array<CultureParams, kCountryCount>& cultures,
                     const PolitenessTable& pol, const StateGrid& grid) {
  SplitNll out;
  for (Country c : all_countries()) {
    std::vector<TrialRecord> subset;
    for (const auto& t : trials)
      if (t.country == c && t.experiment != Experiment::Politeness) subset.push_back(t);
    const auto binned = BinnedDataset::from_trials(subset, grid);
    const double nll = binned_nll(binned, cultures, pol, grid);
    out.by_country[static_cast<std::size_t>(c)] = nll;
    out.total += nll;
  }
  return out;
}

FitConfig aligned_config(FitConfig config, const FitResult& reference) {
  config.grid_points = reference.grid_points;
  config.grid_range = reference.grid_range;
  config.tau = reference.tau;
  config.epsilon = reference.epsilon;
  return config;
}

}  // namespace

FitResult narrator_fit(std::span<const TrialRecord> narrator_trials, const ModelSpec& spec,
                       const PolitenessTable& pol, const FitConfig& config) {
  return fit_model(narrator_trials, freeze_social(spec), pol, config);
}

NarratorOutcome narrator_transfer(std::span<const TrialRecord> narrator_trials,
                                  const FitResult& dialogue_fit, const PolitenessTable& pol,
                                  const FitConfig& config) {
  const FitConfig cfg = aligned_config(config, dialogue_fit);
  const auto grid = StateGrid::gaussian(cfg.grid_points, cfg.grid_range);

  // Narrator trials already score with phi_s = 0, so the transferred dialogue
  // parameters need no further modification.
  const auto cultures =
      unpack(dialogue_fit.best_vector, dialogue_fit.spec, dialogue_fit.tau, dialogue_fit.epsilon);
  const SplitNll transfer = score_split(narrator_trials, cultures, pol, grid);

  NarratorOutcome outcome;
  outcome.refit = narrator_fit(narrator_trials, dialogue_fit.spec, pol, cfg);
  const auto refit_cultures =
      unpack(outcome.refit.best_vector, outcome.refit.spec, cfg.tau, cfg.epsilon);
  const SplitNll refit = score_split(narrator_trials, refit_cultures, pol, grid);

  outcome.report.scenario = "narrator_transfer";
  outcome.report.baseline_nll = transfer.total;
  outcome.report.variant_nll = refit.total;
  outcome.report.delta = refit.total - transfer.total;
  outcome.report.baseline_by_country = transfer.by_country;
  outcome.report.variant_by_country = refit.by_country;
  return outcome;
}

RobustnessReport constrain_and_score(const FitResult& fit, CultureParam param,
                                     ConstrainMode mode, std::span<const TrialRecord> trials,
                                     const PolitenessTable& pol) {
  const auto grid = StateGrid::gaussian(fit.grid_points, fit.grid_range);
  const auto cultures = unpack(fit.best_vector, fit.spec, fit.tau, fit.epsilon);

  auto constrained = cultures;
  CultureParams& uk = constrained[static_cast<std::size_t>(Country::UK)];
  CultureParams& us = constrained[static_cast<std::size_t>(Country::US)];
  const bool threshold = slot_width(param) == 2;

  auto scalar_of = [param](CultureParams& culture) -> double& {
    if (param == CultureParam::Cost) return culture.pragmatics.modifier_cost;
    if (param == CultureParam::Soc) return culture.pragmatics.social_weight;
    return culture.pragmatics.informativity_weight;
  };

  if (mode == ConstrainMode::Zero) {
    if (threshold)
      throw UsageError("cannot zero a threshold pair; zero mode applies to scalars");
    scalar_of(uk) = 0.0;
    scalar_of(us) = 0.0;
  } else if (threshold) {
    const Modifier slot = static_cast<Modifier>(static_cast<int>(param));
    const ThresholdPair a = uk.semantics.pair(slot);
    const ThresholdPair b = us.semantics.pair(slot);
    const ThresholdPair mid{0.5 * (a.lo + b.lo), 0.5 * (a.hi + b.hi)};
    uk.semantics.pair(slot) = mid;
    us.semantics.pair(slot) = mid;
  } else {
    const double mid = 0.5 * (scalar_of(uk) + scalar_of(us));
    scalar_of(uk) = mid;
    scalar_of(us) = mid;
  }

  const SplitNll baseline = score_split(trials, cultures, pol, grid);
  const SplitNll variant = score_split(trials, constrained, pol, grid);

  RobustnessReport report;
  report.scenario = std::string("constrain:") + std::string(to_string(param)) +
                    (mode == ConstrainMode::Zero ? ":zero" : ":midpoint");
  report.baseline_nll = baseline.total;
  report.variant_nll = variant.total;
  report.delta = variant.total - baseline.total;
  report.baseline_by_country = baseline.by_country;
  report.variant_by_country = variant.by_country;
  return report;
}

FitResult constrain_and_refit(const FitResult& fit, CultureParam param,
                              std::span<const TrialRecord> trials, const PolitenessTable& pol,
                              FitConfig config) {
  ModelSpec shared = fit.spec;
  shared.set_varied(param, false);
  shared.name = fit.spec.name + "-shared-" + std::string(to_string(param));

  auto cultures = unpack(fit.best_vector, fit.spec, fit.tau, fit.epsilon);
  CultureParams& uk = cultures[static_cast<std::size_t>(Country::UK)];
  const CultureParams& us = cultures[static_cast<std::size_t>(Country::US)];
  if (slot_width(param) == 2) {
    const Modifier slot = static_cast<Modifier>(static_cast<int>(param));
    const ThresholdPair a = uk.semantics.pair(slot);
    const ThresholdPair b = us.semantics.pair(slot);
    uk.semantics.pair(slot) = {0.5 * (a.lo + b.lo), 0.5 * (a.hi + b.hi)};
  } else if (param == CultureParam::Cost) {
    uk.pragmatics.modifier_cost =
        0.5 * (uk.pragmatics.modifier_cost + us.pragmatics.modifier_cost);
  } else if (param == CultureParam::Soc) {
    uk.pragmatics.social_weight =
        0.5 * (uk.pragmatics.social_weight + us.pragmatics.social_weight);
  } else {
    uk.pragmatics.informativity_weight =
        0.5 * (uk.pragmatics.informativity_weight + us.pragmatics.informativity_weight);
  }

  config = aligned_config(std::move(config), fit);
  config.extra_starts.push_back(pack(cultures, shared));
  return fit_model(trials, shared, pol, config);
}

DropItem parse_drop_item(std::string_view name) {
  if (const auto p = parse_predicate(name)) return *p;
  if (const auto m = parse_modifier(name)) {
    if (*m == Modifier::None)
      throw ConfigError("cannot drop the unmodified form; every predicate needs its baseline");
    return *m;
  }
  throw ConfigError("unknown item '" + std::string(name) + "': expected a predicate or modifier");
}

std::string drop_item_name(const DropItem& item) {
  if (std::holds_alternative<Predicate>(item))
    return std::string(to_string(std::get<Predicate>(item)));
  return std::string(to_string(std::get<Modifier>(item)));
}

DropOutcome drop_item_refit(std::span<const TrialRecord> trials, const DropItem& item,
                            const FitResult& baseline, const PolitenessTable& pol,
                            const FitConfig& config) {
  std::vector<TrialRecord> kept;
  long dropped = 0;
  for (const auto& t : trials) {
    const bool matches = std::holds_alternative<Predicate>(item)
                             ? t.predicate == std::get<Predicate>(item)
                             : t.modifier == std::get<Modifier>(item);
    if (matches && t.experiment != Experiment::Politeness) {
      ++dropped;
      continue;
    }
    kept.push_back(t);
  }
  if (dropped == 0)
    throw DataError("drop item '" + drop_item_name(item) + "' does not occur in the data");

  FitConfig cfg = aligned_config(config, baseline);
  cfg.extra_starts.push_back(baseline.best_vector);
  const auto grid = StateGrid::gaussian(cfg.grid_points, cfg.grid_range);

  DropOutcome outcome;
  outcome.refit = fit_model(kept, baseline.spec, pol, cfg);

  const auto base_cultures =
      unpack(baseline.best_vector, baseline.spec, baseline.tau, baseline.epsilon);
  const auto refit_cultures =
      unpack(outcome.refit.best_vector, outcome.refit.spec, cfg.tau, cfg.epsilon);

  const SplitNll full_base = score_split(trials, base_cultures, pol, grid);
  const SplitNll full_refit = score_split(trials, refit_cultures, pol, grid);

  outcome.report.scenario = "drop:" + drop_item_name(item);
  outcome.report.baseline_nll = full_base.total;
  outcome.report.variant_nll = full_refit.total;
  outcome.report.delta = full_refit.total - full_base.total;
  outcome.report.baseline_by_country = full_base.by_country;
  outcome.report.variant_by_country = full_refit.by_country;
  outcome.reduced_baseline_nll = dataset_nll(kept, baseline.best_vector, baseline.spec, pol,
                                             grid, baseline.tau, baseline.epsilon);
  outcome.reduced_variant_nll = outcome.refit.nll;
  return outcome;
}

PolitenessTable synthetic_politeness_table() {
  PolitenessTable table;
  for (Country c : all_countries())
    for (Predicate p : all_predicates())
      for (Modifier m : all_modifiers()) {
        const double sign = valence(p) == Valence::Positive ? 1.0 : -1.0;
        const double strength = 0.1 * static_cast<double>(m) - 0.2;
        const double country_bump =
            c == Country::US && m != Modifier::None ? 0.05 : 0.0;
        table.set(c, p, m, sign * strength + country_bump);
      }
  return table;
}

std::vector<TrialRecord> sample_synthetic_trials(
    const std::array<CultureParams, kCountryCount>& cultures, const PolitenessTable& pol,
    const StateGrid& grid, long n_trials, std::uint64_t seed) {
  if (n_trials < 1) throw UsageError("synthetic sampling needs at least one trial");

  // one cumulative posterior per (country, predicate, modifier)
  struct Cell {
    Country country;
    Predicate predicate;
    Modifier modifier;
    Eigen::VectorXd cdf;
  };
  std::vector<Cell> cells;
  for (Country c : all_countries()) {
    const CultureParams& culture = cultures[static_cast<std::size_t>(c)];
    for (Predicate p : all_predicates()) {
      const auto table =
          predicate_table(p, culture.semantics, culture.pragmatics, pol.slice(c), grid);
      for (Modifier m : all_modifiers()) {
        Eigen::VectorXd cdf(grid.size());
        double acc = 0.0;
        for (Eigen::Index i = 0; i < grid.size(); ++i) {
          acc += table.l1(i, static_cast<int>(m));
          cdf(i) = acc;
        }
        cdf(grid.size() - 1) = 1.0;
        cells.push_back({c, p, m, std::move(cdf)});
      }
    }
  }

  Rng rng(seed);
  std::vector<TrialRecord> trials;
  trials.reserve(static_cast<std::size_t>(n_trials));
  for (long i = 0; i < n_trials; ++i) {
    const Cell& cell = cells[static_cast<std::size_t>(i) % cells.size()];
    const double u = rng.uniform();
    Eigen::Index bin = 0;
    while (bin < grid.size() - 1 && cell.cdf(bin) < u) ++bin;

    TrialRecord t;
    t.participant_id = "sim" + std::to_string(i);
    t.country = cell.country;
    t.experiment = Experiment::Dialogue;
    t.predicate = cell.predicate;
    t.modifier = cell.modifier;
    const double z = grid.points()(bin);
    t.response = std::clamp((z - grid.lo()) / (grid.hi() - grid.lo()), 0.0, 1.0);
    t.response_z = z;
    trials.push_back(std::move(t));
  }
  return trials;
}

Eigen::VectorXd recovery_truth(const ModelSpec& spec) {
  CultureParams uk;
  uk.semantics.pair(Modifier::None) = {-2.0, 2.0};
  uk.semantics.pair(Modifier::Slightly) = {-1.25, 0.0};
  uk.semantics.pair(Modifier::KindOf) = {-0.75, 0.5};
  uk.semantics.pair(Modifier::Quite) = {-0.25, 1.0};
  uk.semantics.pair(Modifier::Very) = {0.25, 1.75};
  uk.semantics.pair(Modifier::Extremely) = {0.75, 2.75};
  uk.pragmatics.informativity_weight = 1.2;
  uk.pragmatics.social_weight = spec.social_frozen ? 0.0 : 0.2;
  uk.pragmatics.modifier_cost = 0.15;

  CultureParams us = uk;
  for (CultureParam p : all_culture_params()) {
    if (!spec.is_varied(p)) continue;
    if (slot_width(p) == 2) {
      const Modifier slot = static_cast<Modifier>(static_cast<int>(p));
      ThresholdPair& thr = us.semantics.pair(slot);
      thr.lo += 0.4;
      thr.hi += 0.4;
    } else if (p == CultureParam::Cost) {
      us.pragmatics.modifier_cost = 0.3;
    } else if (p == CultureParam::Soc) {
      us.pragmatics.social_weight = -0.1;
    } else {
      us.pragmatics.informativity_weight = 0.8;
    }
  }
  return pack({uk, us}, spec);
}

RecoveryReport parameter_recovery(const Eigen::VectorXd& true_vector, const ModelSpec& spec,
                                  long n_trials, std::uint64_t seed, const PolitenessTable& pol,
                                  const FitConfig& config) {
  const auto grid = StateGrid::gaussian(config.grid_points, config.grid_range);
  const auto truth = unpack(true_vector, spec, config.tau, config.epsilon);
  const auto trials = sample_synthetic_trials(truth, pol, grid, n_trials, seed);
  const auto binned = BinnedDataset::from_trials(trials, grid);

  RecoveryReport report;
  report.spec = spec;
  report.true_vector = true_vector;
  report.n_trials = n_trials;
  report.true_nll = binned_nll(binned, truth, pol, grid);

  const FitResult fit = fit_binned(binned, spec, pol, config);
  report.fitted_vector = fit.best_vector;
  report.fitted_nll = fit.nll;

  const auto fitted = unpack(fit.best_vector, spec, config.tau, config.epsilon);
  report.ordering_preserved = true;
  for (Country c : all_countries()) {
    const auto ci = static_cast<std::size_t>(c);
    for (Modifier m : all_modifiers()) {
      const double want = truth[ci].semantics.pair(m).midpoint();
      const double got = fitted[ci].semantics.pair(m).midpoint();
      const double err = std::abs(got - want);
      report.midpoint_error[ci][static_cast<std::size_t>(m)] = err;
      report.max_midpoint_error = std::max(report.max_midpoint_error, err);
      if (m != Modifier::None && m != Modifier::Extremely)
        report.max_interior_midpoint_error =
            std::max(report.max_interior_midpoint_error, err);
    }
    const double bare_hi_err = std::abs(fitted[ci].semantics.pair(Modifier::None).hi -
                                        truth[ci].semantics.pair(Modifier::None).hi);
    const double strong_lo_err =
        std::abs(fitted[ci].semantics.pair(Modifier::Extremely).lo -
                 truth[ci].semantics.pair(Modifier::Extremely).lo);
    report.max_scale_bound_error =
        std::max({report.max_scale_bound_error, bare_hi_err, strong_lo_err});
    // strength ordering over the five modifiers (baseline excluded)
    for (int m = static_cast<int>(Modifier::Slightly); m < static_cast<int>(Modifier::Extremely);
         ++m) {
      const double here = fitted[ci].semantics.pair(static_cast<Modifier>(m)).midpoint();
      const double next = fitted[ci].semantics.pair(static_cast<Modifier>(m + 1)).midpoint();
      if (!(here < next)) report.ordering_preserved = false;
    }
  }
  return report;
}

}  // namespace intens
