#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>
#include <vector>

#include "doctest.h"

#include "intens/analysis.hpp"
#include "intens/error.hpp"

using namespace intens;

namespace {

FitConfig quick_config(std::uint64_t seed, int max_generations) {
  FitConfig config;
  config.cma.seed = seed;
  config.cma.max_generations = max_generations;
  config.cma.tol_fun = 1e-8;
  config.cma.eval_threads = 4;
  config.starts = 1;
  config.grid_points = 41;
  config.grid_range = 4.0;
  return config;
}

// A hand-filled fit record around a known vector, for analyses that only
// re-score (no optimizer run behind it).
FitResult fixed_fit(const ModelSpec& spec, const Eigen::VectorXd& v) {
  FitResult fit;
  fit.spec = spec;
  fit.best_vector = v;
  fit.grid_points = 41;
  fit.grid_range = 4.0;
  fit.tau = 0.2;
  fit.epsilon = 1e-4;
  return fit;
}

CultureParams base_culture() {
  CultureParams c;
  c.semantics.pair(Modifier::None) = {-2.0, 2.0};
  c.semantics.pair(Modifier::Slightly) = {-1.25, 0.0};
  c.semantics.pair(Modifier::KindOf) = {-0.75, 0.5};
  c.semantics.pair(Modifier::Quite) = {-0.25, 1.0};
  c.semantics.pair(Modifier::Very) = {0.25, 1.75};
  c.semantics.pair(Modifier::Extremely) = {0.75, 2.75};
  c.pragmatics.informativity_weight = 1.2;
  c.pragmatics.social_weight = 0.2;
  c.pragmatics.modifier_cost = 0.15;
  return c;
}

std::vector<TrialRecord> trials_from(const Eigen::VectorXd& truth, const ModelSpec& spec,
                                     long n, std::uint64_t seed) {
  const auto grid = StateGrid::gaussian(41, 4.0);
  const auto cultures = unpack(truth, spec, 0.2, 1e-4);
  return sample_synthetic_trials(cultures, synthetic_politeness_table(), grid, n, seed);
}

}  // namespace

TEST_CASE("the synthetic politeness table is complete and valence-signed") {
  const PolitenessTable table = synthetic_politeness_table();
  CHECK_NOTHROW(table.validate_complete());

  // positive predicates politer when strengthened, negative ones less so
  CHECK(table.value(Country::UK, Predicate::Helpful, Modifier::Extremely) >
        table.value(Country::UK, Predicate::Helpful, Modifier::None));
  CHECK(table.value(Country::UK, Predicate::Boring, Modifier::Extremely) <
        table.value(Country::UK, Predicate::Boring, Modifier::None));

  // the cultures differ on modified forms only
  CHECK(table.value(Country::US, Predicate::Helpful, Modifier::None) ==
        table.value(Country::UK, Predicate::Helpful, Modifier::None));
  CHECK(table.value(Country::US, Predicate::Helpful, Modifier::Very) !=
        table.value(Country::UK, Predicate::Helpful, Modifier::Very));
}

TEST_CASE("synthetic trials cover every cell round-robin and sit on the grid") {
  const auto grid = StateGrid::gaussian(41, 4.0);
  const auto culture = base_culture();
  const std::array<CultureParams, kCountryCount> cultures{culture, culture};
  const auto pol = synthetic_politeness_table();

  const auto trials = sample_synthetic_trials(cultures, pol, grid, 84, 12);
  REQUIRE(trials.size() == 84);
  CHECK(trials[0].country == Country::UK);
  CHECK(trials[0].predicate == Predicate::Exhausted);
  CHECK(trials[0].modifier == Modifier::None);

  std::set<std::tuple<Country, Predicate, Modifier>> seen;
  for (const auto& t : trials) {
    CHECK(t.experiment == Experiment::Dialogue);
    CHECK(grid.points()(grid.nearest_index(t.response_z)) == t.response_z);
    seen.insert({t.country, t.predicate, t.modifier});
  }
  CHECK(seen.size() == 84);  // one visit per (country, predicate, modifier)

  const auto again = sample_synthetic_trials(cultures, pol, grid, 84, 12);
  for (std::size_t i = 0; i < trials.size(); ++i)
    CHECK(trials[i].response_z == again[i].response_z);
  const auto other = sample_synthetic_trials(cultures, pol, grid, 84, 13);
  bool any_differ = false;
  for (std::size_t i = 0; i < trials.size(); ++i)
    if (trials[i].response_z != other[i].response_z) any_differ = true;
  CHECK(any_differ);

  CHECK_THROWS_AS(sample_synthetic_trials(cultures, pol, grid, 0, 1), UsageError);
}

TEST_CASE("recovery truth offsets exactly the culture-varied parameters") {
  const auto m1 = unpack(recovery_truth(find_spec("M1")), find_spec("M1"));
  CHECK(m1[0].semantics.pair(Modifier::Quite) == m1[1].semantics.pair(Modifier::Quite));
  CHECK(m1[0].pragmatics.modifier_cost == m1[1].pragmatics.modifier_cost);

  const auto m9 = unpack(recovery_truth(find_spec("M9")), find_spec("M9"));
  CHECK(m9[1].semantics.pair(Modifier::Quite).lo ==
        doctest::Approx(m9[0].semantics.pair(Modifier::Quite).lo + 0.4));
  CHECK(m9[1].pragmatics.modifier_cost == doctest::Approx(0.3));
  CHECK(m9[1].pragmatics.social_weight == doctest::Approx(-0.1));
  CHECK(m9[1].pragmatics.informativity_weight == doctest::Approx(0.8));
  CHECK(m9[0].pragmatics.social_weight == doctest::Approx(0.2));

  const ModelSpec frozen = freeze_social(find_spec("M1"));
  const auto fr = unpack(recovery_truth(frozen), frozen);
  CHECK(fr[0].pragmatics.social_weight == 0.0);
}

TEST_CASE("constraining an already-shared parameter changes nothing") {
  const ModelSpec m1 = find_spec("M1");
  const auto truth = recovery_truth(m1);
  const auto trials = trials_from(truth, m1, 200, 5);
  const auto report =
      constrain_and_score(fixed_fit(m1, truth), CultureParam::Cost, ConstrainMode::Midpoint,
                          trials, synthetic_politeness_table());
  CHECK(report.scenario == "constrain:cost:midpoint");
  CHECK(report.delta == 0.0);
  CHECK(report.baseline_nll == report.variant_nll);
  CHECK(report.baseline_by_country[0] == report.variant_by_country[0]);
}

TEST_CASE("zero mode rejects threshold pairs and silences scalar weights") {
  const ModelSpec m1 = find_spec("M1");
  const auto truth = recovery_truth(m1);
  const auto trials = trials_from(truth, m1, 200, 6);
  const auto pol = synthetic_politeness_table();

  CHECK_THROWS_AS(constrain_and_score(fixed_fit(m1, truth), CultureParam::ThrQuite,
                                      ConstrainMode::Zero, trials, pol),
                  UsageError);

  const auto report = constrain_and_score(fixed_fit(m1, truth), CultureParam::Soc,
                                          ConstrainMode::Zero, trials, pol);
  CHECK(report.scenario == "constrain:soc:zero");
  CHECK(report.delta == report.variant_nll - report.baseline_nll);
  CHECK(report.baseline_nll ==
        doctest::Approx(report.baseline_by_country[0] + report.baseline_by_country[1])
            .epsilon(1e-12));
}

TEST_CASE("collapsing genuinely distinct costs to the midpoint degrades the fit") {
  // The cost reaches the listener only through the speaker's normalizer, so
  // the gap, the informativity weight, and the trial count are all set high
  // enough that the expected degradation dwarfs sampling noise (expected
  // delta about 34 against a standard deviation near 8 for this setup).
  ModelSpec m4 = find_spec("M4");
  auto uk = base_culture();
  auto us = base_culture();
  uk.pragmatics.modifier_cost = 0.05;
  us.pragmatics.modifier_cost = 2.0;
  uk.pragmatics.informativity_weight = 2.5;
  us.pragmatics.informativity_weight = 2.5;
  const Eigen::VectorXd truth = pack({uk, us}, m4);
  const auto trials = trials_from(truth, m4, 3000, 21);

  const auto report =
      constrain_and_score(fixed_fit(m4, truth), CultureParam::Cost, ConstrainMode::Midpoint,
                          trials, synthetic_politeness_table());
  CHECK(report.scenario == "constrain:cost:midpoint");
  CHECK(report.delta > 0.0);
  CHECK(report.variant_nll > report.baseline_nll);
}

TEST_CASE("constrain_and_refit removes the parameter and beats the raw constraint") {
  ModelSpec m4 = find_spec("M4");
  auto uk = base_culture();
  auto us = base_culture();
  uk.pragmatics.modifier_cost = 0.1;
  us.pragmatics.modifier_cost = 0.6;
  const Eigen::VectorXd truth = pack({uk, us}, m4);
  const auto trials = trials_from(truth, m4, 900, 22);
  const auto pol = synthetic_politeness_table();
  const auto fit = fixed_fit(m4, truth);

  const auto scored =
      constrain_and_score(fit, CultureParam::Cost, ConstrainMode::Midpoint, trials, pol);
  const FitResult refit =
      constrain_and_refit(fit, CultureParam::Cost, trials, pol, quick_config(30, 400));

  CHECK(refit.spec.name == "M4-shared-cost");
  CHECK_FALSE(refit.spec.is_varied(CultureParam::Cost));
  CHECK(refit.spec.df() == 15);
  // the constrained-but-unrefitted point is one of the starts
  CHECK(refit.nll <= scored.variant_nll + 1e-6);
}

TEST_CASE("drop items parse as predicates or modifiers but never the bare form") {
  CHECK(std::holds_alternative<Predicate>(parse_drop_item("difficult")));
  CHECK(std::get<Predicate>(parse_drop_item("difficult")) == Predicate::Difficult);
  CHECK(std::holds_alternative<Modifier>(parse_drop_item("extremely")));
  CHECK(drop_item_name(parse_drop_item("extremely")) == "extremely");
  CHECK(drop_item_name(parse_drop_item("boring")) == "boring");
  CHECK_THROWS_AS(parse_drop_item("none"), ConfigError);
  CHECK_THROWS_AS(parse_drop_item("banana"), ConfigError);
}

TEST_CASE("dropping an item refits on the rest and scores on everything") {
  const ModelSpec m1 = find_spec("M1");
  const auto truth = recovery_truth(m1);
  const auto trials = trials_from(truth, m1, 800, 40);
  const auto pol = synthetic_politeness_table();
  const auto baseline = fixed_fit(m1, truth);

  const DropOutcome outcome =
      drop_item_refit(trials, parse_drop_item("boring"), baseline, pol, quick_config(41, 500));

  CHECK(outcome.report.scenario == "drop:boring");
  CHECK(outcome.report.delta ==
        outcome.report.variant_nll - outcome.report.baseline_nll);

  long kept = 0;
  for (const auto& t : trials)
    if (t.predicate != Predicate::Boring) ++kept;
  CHECK(outcome.refit.n_trials == kept);

  // on the reduced set the refit dominates the transferred baseline
  CHECK(outcome.reduced_variant_nll <= outcome.reduced_baseline_nll + 1.0);

  // the full-data baseline column is the baseline fit re-scored on everything
  const auto grid = StateGrid::gaussian(41, 4.0);
  const double direct = dataset_nll(trials, truth, m1, pol, grid, 0.2, 1e-4);
  CHECK(outcome.report.baseline_nll == doctest::Approx(direct).epsilon(1e-12));

  // dropping something absent from the data is an error
  std::vector<TrialRecord> no_concerned;
  for (const auto& t : trials)
    if (t.predicate != Predicate::Concerned) no_concerned.push_back(t);
  CHECK_THROWS_AS(drop_item_refit(no_concerned, parse_drop_item("concerned"), baseline, pol,
                                  quick_config(42, 10)),
                  DataError);
}

TEST_CASE("narrator fits freeze the social weight and drop a degree of freedom") {
  const ModelSpec m1 = find_spec("M1");
  auto culture = base_culture();
  culture.pragmatics.social_weight = 0.0;
  const std::array<CultureParams, kCountryCount> cultures{culture, culture};
  const auto grid = StateGrid::gaussian(41, 4.0);
  const auto pol = synthetic_politeness_table();

  auto narrator_trials = sample_synthetic_trials(cultures, pol, grid, 900, 50);
  for (auto& t : narrator_trials) t.experiment = Experiment::Narrator;

  auto config = quick_config(51, 700);
  config.extra_starts.push_back(pack(cultures, freeze_social(m1)));
  const FitResult fit = narrator_fit(narrator_trials, m1, pol, config);
  CHECK(fit.spec.social_frozen);
  CHECK(fit.spec.df() == 14);
  CHECK(fit.best_vector.size() == 14);
  CHECK(std::isfinite(fit.nll));
  const auto decoded = unpack(fit.best_vector, fit.spec, fit.tau, fit.epsilon);
  CHECK(decoded[0].pragmatics.social_weight == 0.0);
}

TEST_CASE("narrator transfer pits dialogue parameters against a narrator refit") {
  const ModelSpec m1 = find_spec("M1");

  // narrator data generated with no social channel; dialogue parameters share
  // the same semantics but carry a nonzero social weight
  auto narrator_culture = base_culture();
  narrator_culture.pragmatics.social_weight = 0.0;
  const std::array<CultureParams, kCountryCount> truth{narrator_culture, narrator_culture};
  const auto grid = StateGrid::gaussian(41, 4.0);
  const auto pol = synthetic_politeness_table();
  auto narrator_trials = sample_synthetic_trials(truth, pol, grid, 900, 60);
  for (auto& t : narrator_trials) t.experiment = Experiment::Narrator;

  const auto dialogue_fit = fixed_fit(m1, recovery_truth(m1));

  auto config = quick_config(61, 700);
  config.extra_starts.push_back(pack(truth, freeze_social(m1)));
  const NarratorOutcome outcome =
      narrator_transfer(narrator_trials, dialogue_fit, pol, config);

  CHECK(outcome.report.scenario == "narrator_transfer");
  CHECK(outcome.report.delta ==
        outcome.report.variant_nll - outcome.report.baseline_nll);
  CHECK(outcome.refit.spec.social_frozen);

  // with the generating parameters among the starts, the refit cannot lose to
  // the transferred dialogue parameters by any real margin
  CHECK(outcome.report.variant_nll <= outcome.report.baseline_nll + 1.0);
  CHECK(outcome.report.baseline_nll ==
        doctest::Approx(outcome.report.baseline_by_country[0] +
                        outcome.report.baseline_by_country[1])
            .epsilon(1e-12));
}

TEST_CASE("parameters are recovered from data the model itself generated") {
  const ModelSpec m1 = find_spec("M1");
  const Eigen::VectorXd truth = recovery_truth(m1);
  auto config = quick_config(70, 900);
  config.extra_starts.push_back(truth);

  const RecoveryReport report =
      parameter_recovery(truth, m1, 1200, 71, synthetic_politeness_table(), config);

  CHECK(report.n_trials == 1200);
  CHECK(report.spec == m1);
  CHECK(report.fitted_nll <= report.true_nll + 1.0);
  CHECK(report.ordering_preserved);

  // identifiable structure: interior midpoints and the boundary pairs' inner
  // bounds come back; the scale-censored directions (bare lower bound,
  // strongest upper bound) are only reported, not gated
  CHECK(report.max_interior_midpoint_error < 0.3);
  CHECK(report.max_scale_bound_error < 0.3);
  double biggest = 0.0;
  for (const auto& per_country : report.midpoint_error)
    for (double e : per_country) biggest = std::max(biggest, e);
  CHECK(biggest == report.max_midpoint_error);
  CHECK(report.max_interior_midpoint_error <= report.max_midpoint_error);
}

TEST_CASE("identical generating cultures do not conjure a culture difference") {
  ModelSpec m4 = find_spec("M4");
  const auto culture = base_culture();
  const Eigen::VectorXd truth = pack({culture, culture}, m4);
  const auto trials = trials_from(truth, m4, 1200, 80);

  auto config = quick_config(81, 700);
  config.extra_starts.push_back(truth);
  const FitResult fit = fit_model(trials, m4, synthetic_politeness_table(), config);
  const auto decoded = unpack(fit.best_vector, m4, fit.tau, fit.epsilon);
  const double gap = std::abs(decoded[0].pragmatics.modifier_cost -
                              decoded[1].pragmatics.modifier_cost);
  CHECK(gap < 0.15);
}
