#include "doctest.h"

#include <cmath>

#include "intens/analysis.hpp"
#include "intens/error.hpp"
#include "intens/fitting.hpp"
#include "intens/model_spec.hpp"
#include "intens/report.hpp"
#include "intens/version.hpp"

using namespace intens;

namespace {

FitResult sample_fit(const std::string& model) {
  const ModelSpec spec = find_spec(model);
  FitResult fit;
  fit.spec = spec;
  fit.best_vector = default_start(spec);
  fit.nll = 11250.25;
  fit.n_trials = 3430;
  fit.aic = 2.0 * fit.nll + 2.0 * spec.df();
  fit.bic = 2.0 * fit.nll + spec.df() * std::log(static_cast<double>(fit.n_trials));
  fit.trace = {{0, 11900.5, 11900.5}, {1, 11300.0, 11300.0}, {2, 11250.25, 11250.25}};
  fit.start_values = {11251.0, 11250.25, 11260.75};
  fit.winning_start = 1;
  fit.final_sigma = 3.25e-6;
  fit.stop_reason = "tol_fun";
  fit.seed = 99;
  fit.evaluations = 4200;
  fit.grid_points = 101;
  fit.grid_range = 4.0;
  fit.tau = 0.2;
  fit.epsilon = 1e-4;
  fit.data_hash = "00ff00ff00ff00ff";
  return fit;
}

RunStamp fixed_stamp() {
  RunStamp stamp;
  stamp.tool_version = kToolVersion;
  stamp.timestamp = "2026-01-02T03:04:05Z";
  stamp.data_hash = "00ff00ff00ff00ff";
  stamp.config_hash = "123456789abcdef0";
  stamp.seed = 99;
  return stamp;
}

}  // namespace

TEST_CASE("make_stamp fills version and a well-formed utc timestamp") {
  const RunStamp stamp = make_stamp("aa", "bb", 7);
  CHECK(stamp.tool_version == kToolVersion);
  CHECK(stamp.data_hash == "aa");
  CHECK(stamp.config_hash == "bb");
  CHECK(stamp.seed == 7);
  REQUIRE(stamp.timestamp.size() == 20);
  CHECK(stamp.timestamp[4] == '-');
  CHECK(stamp.timestamp[10] == 'T');
  CHECK(stamp.timestamp[19] == 'Z');
  CHECK(stamp.timestamp.substr(0, 3) == "202");
}

TEST_CASE("fit config hash is deterministic and sensitive to every knob") {
  const ModelSpec m1 = find_spec("M1");
  FitConfig config;
  const std::string base = fit_config_hash(m1, config, "dialogue");
  CHECK(base.size() == 16);
  CHECK(base == fit_config_hash(m1, config, "dialogue"));

  CHECK(base != fit_config_hash(find_spec("M9"), config, "dialogue"));
  CHECK(base != fit_config_hash(m1, config, "narrator"));

  FitConfig tweaked = config;
  tweaked.cma.seed = 1;
  CHECK(base != fit_config_hash(m1, tweaked, "dialogue"));
  tweaked = config;
  tweaked.grid_points = 51;
  CHECK(base != fit_config_hash(m1, tweaked, "dialogue"));
  tweaked = config;
  tweaked.tau = 0.25;
  CHECK(base != fit_config_hash(m1, tweaked, "dialogue"));
  tweaked = config;
  tweaked.cma.max_generations += 1;
  CHECK(base != fit_config_hash(m1, tweaked, "dialogue"));
}

TEST_CASE("fit json round-trips every field") {
  const FitResult fit = sample_fit("M5");
  const RunStamp stamp = fixed_stamp();
  const std::string text = fit_result_to_json(fit, stamp, "dialogue");

  const StampedFit back = fit_result_from_json(text);
  CHECK(back.experiment == "dialogue");
  CHECK(back.stamp.tool_version == stamp.tool_version);
  CHECK(back.stamp.timestamp == stamp.timestamp);
  CHECK(back.stamp.data_hash == stamp.data_hash);
  CHECK(back.stamp.config_hash == stamp.config_hash);
  CHECK(back.stamp.seed == stamp.seed);

  CHECK(back.fit.spec == fit.spec);
  CHECK(back.fit.best_vector.size() == fit.best_vector.size());
  for (Eigen::Index i = 0; i < fit.best_vector.size(); ++i)
    CHECK(back.fit.best_vector(i) == fit.best_vector(i));
  CHECK(back.fit.nll == fit.nll);
  CHECK(back.fit.aic == fit.aic);
  CHECK(back.fit.bic == fit.bic);
  CHECK(back.fit.n_trials == fit.n_trials);
  CHECK(back.fit.grid_points == fit.grid_points);
  CHECK(back.fit.grid_range == fit.grid_range);
  CHECK(back.fit.tau == fit.tau);
  CHECK(back.fit.epsilon == fit.epsilon);
  CHECK(back.fit.winning_start == fit.winning_start);
  CHECK(back.fit.stop_reason == fit.stop_reason);
  CHECK(back.fit.final_sigma == fit.final_sigma);
  CHECK(back.fit.evaluations == fit.evaluations);
  CHECK(back.fit.seed == fit.seed);
  CHECK(back.fit.data_hash == fit.data_hash);
  REQUIRE(back.fit.start_values.size() == fit.start_values.size());
  CHECK(back.fit.start_values[2] == fit.start_values[2]);
  REQUIRE(back.fit.trace.size() == fit.trace.size());
  for (std::size_t i = 0; i < fit.trace.size(); ++i) {
    CHECK(back.fit.trace[i].generation == fit.trace[i].generation);
    CHECK(back.fit.trace[i].best == fit.trace[i].best);
    CHECK(back.fit.trace[i].best_so_far == fit.trace[i].best_so_far);
  }
}

TEST_CASE("fit json serialization is byte-stable given a fixed stamp") {
  const FitResult fit = sample_fit("M9");
  const RunStamp stamp = fixed_stamp();
  const std::string a = fit_result_to_json(fit, stamp, "both");
  const std::string b = fit_result_to_json(fit, stamp, "both");
  CHECK(a == b);

  // A round-trip through parse and re-emit is also byte-identical: doubles
  // are dumped in shortest-round-trip form and key order is fixed.
  const StampedFit back = fit_result_from_json(a);
  CHECK(fit_result_to_json(back.fit, back.stamp, back.experiment) == a);
}

TEST_CASE("malformed fit records raise data errors") {
  CHECK_THROWS_AS(fit_result_from_json("not json at all"), DataError);
  CHECK_THROWS_AS(fit_result_from_json("{}"), DataError);

  const std::string good = fit_result_to_json(sample_fit("M1"), fixed_stamp(), "dialogue");

  SUBCASE("missing key") {
    std::string text = good;
    const auto pos = text.find("\"nll\"");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 5, "\"lln\"");
    CHECK_THROWS_AS(fit_result_from_json(text), DataError);
  }
  SUBCASE("vector length disagrees with the model") {
    std::string text = good;
    const auto pos = text.find("\"varied\": []");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 12, "\"varied\": [\"cost\"]");  // df 16, vector still has 15
    CHECK_THROWS_AS(fit_result_from_json(text), DataError);
  }
  SUBCASE("unknown model name inside the spec") {
    std::string text = good;
    const auto pos = text.find("\"M1\"");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 4, "\"Mx\"");
    // Accepted: the spec block carries its own varied flags, name is a label.
    CHECK(fit_result_from_json(text).fit.spec.name == "Mx");
  }
  SUBCASE("wrong type") {
    std::string text = good;
    const auto pos = text.find("\"tol");  // stop_reason "tol_fun"
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 9, "12345    ");
    CHECK_THROWS_AS(fit_result_from_json(text), DataError);
  }
}

TEST_CASE("fit text summary names the model and decodes both cultures") {
  const FitResult fit = sample_fit("M6");
  const std::string text = fit_result_text(fit, fixed_stamp(), "dialogue");
  CHECK(text.find("model M6") != std::string::npos);
  CHECK(text.find("df 17") != std::string::npos);
  CHECK(text.find("n = 3430") != std::string::npos);
  CHECK(text.find("nll 11250.25") != std::string::npos);
  CHECK(text.find("UK") != std::string::npos);
  CHECK(text.find("US") != std::string::npos);
  for (Modifier m : all_modifiers())
    CHECK(text.find(std::string(to_string(m))) != std::string::npos);
  CHECK(text.find("phi_s") != std::string::npos);
  CHECK(text.find("tol_fun") != std::string::npos);
}

TEST_CASE("comparison json carries ranked rows") {
  FitResult a = sample_fit("M1");
  FitResult b = sample_fit("M9");
  b.nll = 11194.0;
  b.aic = 2.0 * b.nll + 2.0 * b.spec.df();
  b.bic = 2.0 * b.nll + b.spec.df() * std::log(3430.0);
  const ComparisonReport report = compare_models(std::array{a, b});
  const std::string text = comparison_to_json(report, fixed_stamp());
  CHECK(text.find("\"rows\"") != std::string::npos);
  CHECK(text.find("\"M9\"") != std::string::npos);
  CHECK(text.find("\"best_aic\": true") != std::string::npos);
  CHECK(text.find("\"n_trials\": 3430") != std::string::npos);
  CHECK(text == comparison_to_json(report, fixed_stamp()));
}

TEST_CASE("robustness renderings carry scenario, totals, and the delta sign") {
  RobustnessReport report;
  report.scenario = "constrain:cost:midpoint";
  report.baseline_nll = 11226.0;
  report.variant_nll = 11263.5;
  report.delta = 37.5;
  report.baseline_by_country = {5600.0, 5626.0};
  report.variant_by_country = {5620.0, 5643.5};

  const std::string text = robustness_text(report);
  CHECK(text.find("constrain:cost:midpoint") != std::string::npos);
  CHECK(text.find("+37.50") != std::string::npos);
  CHECK(text.find("11226.00") != std::string::npos);
  CHECK(text.find("UK 5600.00") != std::string::npos);

  const std::string json_text = robustness_to_json(report, fixed_stamp());
  CHECK(json_text.find("\"delta\": 37.5") != std::string::npos);
  CHECK(json_text.find("\"UK\"") != std::string::npos);
  CHECK(json_text == robustness_to_json(report, fixed_stamp()));
}

TEST_CASE("drop and narrator artifacts embed the refit") {
  DropOutcome outcome;
  outcome.report.scenario = "drop:extremely";
  outcome.report.baseline_nll = 11226.0;
  outcome.report.variant_nll = 11263.0;
  outcome.report.delta = 37.0;
  outcome.reduced_baseline_nll = 9300.0;
  outcome.reduced_variant_nll = 9295.0;
  outcome.refit = sample_fit("M6");

  const std::string json_text = drop_outcome_to_json(outcome, fixed_stamp(), "dialogue");
  CHECK(json_text.find("\"refit\"") != std::string::npos);
  CHECK(json_text.find("\"reduced_baseline_nll\": 9300.0") != std::string::npos);
  CHECK(json_text.find("drop:extremely") != std::string::npos);
  const std::string text = drop_outcome_text(outcome);
  CHECK(text.find("drop:extremely") != std::string::npos);
  CHECK(text.find("reduced-set") != std::string::npos);

  NarratorOutcome narrator;
  narrator.report.scenario = "narrator-transfer";
  narrator.report.delta = -4.0;
  narrator.refit = sample_fit("M1");
  narrator.refit.spec = freeze_social(narrator.refit.spec);
  narrator.refit.best_vector = default_start(narrator.refit.spec);
  const std::string njson = narrator_outcome_to_json(narrator, fixed_stamp());
  CHECK(njson.find("narrator-transfer") != std::string::npos);
  CHECK(njson.find("\"refit\"") != std::string::npos);
  CHECK(njson.find("\"social_frozen\": true") != std::string::npos);
  CHECK(narrator_outcome_text(narrator).find("refitting beat the transfer") !=
        std::string::npos);
}

TEST_CASE("recovery renderings split interior and boundary errors") {
  RecoveryReport report;
  report.spec = find_spec("M9");
  report.true_vector = default_start(report.spec);
  report.fitted_vector = default_start(report.spec);
  report.true_nll = 8000.0;
  report.fitted_nll = 7999.0;
  report.n_trials = 5000;
  report.midpoint_error[0][1] = 0.05;
  report.max_midpoint_error = 1.4;
  report.max_interior_midpoint_error = 0.05;
  report.max_scale_bound_error = 0.12;
  report.ordering_preserved = true;

  const std::string json_text = recovery_to_json(report, fixed_stamp());
  CHECK(json_text.find("\"max_interior_midpoint_error\": 0.05") != std::string::npos);
  CHECK(json_text.find("\"max_scale_bound_error\": 0.12") != std::string::npos);
  CHECK(json_text.find("\"ordering_preserved\": true") != std::string::npos);
  CHECK(json_text.find("\"slightly\"") != std::string::npos);
  CHECK(json_text == recovery_to_json(report, fixed_stamp()));

  const std::string text = recovery_text(report);
  CHECK(text.find("ordering preserved") != std::string::npos);
  CHECK(text.find("interior max 0.050") != std::string::npos);
  CHECK(text.find("censored by the response scale") != std::string::npos);
}
