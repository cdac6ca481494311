#include "intens/report.hpp"

#include <charconv>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "intens/data.hpp"
#include "intens/error.hpp"
#include "intens/version.hpp"

namespace intens {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

const json& require(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end())
    throw DataError(std::string("fit record: missing key '") + key + "'");
  return *it;
}

ordered_json stamp_header(const RunStamp& stamp) {
  ordered_json j;
  j["tool_version"] = stamp.tool_version;
  j["timestamp"] = stamp.timestamp;
  j["seed"] = stamp.seed;
  j["data_hash"] = stamp.data_hash;
  j["config_hash"] = stamp.config_hash;
  return j;
}

RunStamp stamp_from(const json& j) {
  RunStamp stamp;
  stamp.tool_version = require(j, "tool_version").get<std::string>();
  stamp.timestamp = require(j, "timestamp").get<std::string>();
  stamp.seed = require(j, "seed").get<std::uint64_t>();
  stamp.data_hash = require(j, "data_hash").get<std::string>();
  stamp.config_hash = require(j, "config_hash").get<std::string>();
  return stamp;
}

ordered_json vector_json(const Eigen::VectorXd& v) {
  auto arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from(const json& arr, const char* key) {
  if (!arr.is_array()) throw DataError(std::string("fit record: '") + key + "' must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  Eigen::Index i = 0;
  for (const auto& x : arr) v(i++) = x.get<double>();
  return v;
}

ordered_json spec_json(const ModelSpec& spec) {
  return ordered_json::parse(model_spec_to_json(spec));
}

ordered_json fit_body(const FitResult& fit, std::string_view experiment) {
  ordered_json j;
  j["experiment"] = std::string(experiment);
  j["spec"] = spec_json(fit.spec);
  j["grid"] = ordered_json{{"points", fit.grid_points}, {"range", fit.grid_range}};
  j["semantics"] = ordered_json{{"tau", fit.tau}, {"epsilon", fit.epsilon}};
  j["n_trials"] = fit.n_trials;
  j["df"] = fit.spec.df();
  j["nll"] = fit.nll;
  j["aic"] = fit.aic;
  j["bic"] = fit.bic;
  auto slots = ordered_json::array();
  for (const auto& name : slot_names(fit.spec)) slots.push_back(name);
  j["slots"] = slots;
  j["vector"] = vector_json(fit.best_vector);
  auto starts = ordered_json::array();
  for (double v : fit.start_values) starts.push_back(v);
  j["start_values"] = starts;
  j["winning_start"] = fit.winning_start;
  j["stop_reason"] = fit.stop_reason;
  j["final_sigma"] = fit.final_sigma;
  j["evaluations"] = fit.evaluations;
  auto trace = ordered_json::array();
  for (const auto& point : fit.trace)
    trace.push_back(ordered_json::array({point.generation, point.best, point.best_so_far}));
  j["trace"] = trace;
  return j;
}

ordered_json by_country_json(const std::array<double, kCountryCount>& values) {
  ordered_json j;
  for (Country c : all_countries())
    j[std::string(to_string(c))] = values[static_cast<std::size_t>(c)];
  return j;
}

ordered_json robustness_body(const RobustnessReport& report) {
  ordered_json j;
  j["scenario"] = report.scenario;
  j["baseline_nll"] = report.baseline_nll;
  j["variant_nll"] = report.variant_nll;
  j["delta"] = report.delta;
  j["baseline_by_country"] = by_country_json(report.baseline_by_country);
  j["variant_by_country"] = by_country_json(report.variant_by_country);
  return j;
}

void merge(ordered_json& dst, const ordered_json& extra) {
  for (const auto& [key, value] : extra.items()) dst[key] = value;
}

std::ostream& fixed2(std::ostream& os) { return os << std::fixed << std::setprecision(2); }

void country_line(std::ostream& os, const char* label, double total,
                  const std::array<double, kCountryCount>& by_country) {
  os << "  " << std::left << std::setw(9) << label << std::right << fixed2 << std::setw(11)
     << total << "   (UK " << by_country[0] << ", US " << by_country[1] << ")\n";
}

}  // namespace

std::string iso8601_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", utc.tm_year + 1900,
                utc.tm_mon + 1, utc.tm_mday, utc.tm_hour, utc.tm_min, utc.tm_sec);
  return buf;
}

RunStamp make_stamp(std::string data_hash, std::string config_hash, std::uint64_t seed) {
  RunStamp stamp;
  stamp.tool_version = kToolVersion;
  stamp.timestamp = iso8601_utc_now();
  stamp.data_hash = std::move(data_hash);
  stamp.config_hash = std::move(config_hash);
  stamp.seed = seed;
  return stamp;
}

std::string fit_config_hash(const ModelSpec& spec, const FitConfig& config,
                            std::string_view experiment) {
  std::ostringstream os;
  os << "spec=" << model_spec_to_json(spec) << ";experiment=" << experiment
     << ";grid=" << config.grid_points << "x" << shortest(config.grid_range)
     << ";tau=" << shortest(config.tau) << ";epsilon=" << shortest(config.epsilon)
     << ";starts=" << config.starts << ";jitter=" << shortest(config.start_jitter)
     << ";extra_starts=" << config.extra_starts.size()
     << ";sigma0=" << shortest(config.cma.sigma0) << ";lambda=" << config.cma.lambda
     << ";max_generations=" << config.cma.max_generations
     << ";tol_fun=" << shortest(config.cma.tol_fun) << ";seed=" << config.cma.seed;
  return hex64(fnv1a64(os.str()));
}

std::string fit_result_to_json(const FitResult& fit, const RunStamp& stamp,
                               std::string_view experiment) {
  ordered_json j = stamp_header(stamp);
  merge(j, fit_body(fit, experiment));
  return j.dump(2) + "\n";
}

StampedFit fit_result_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("fit record: ") + e.what());
  }
  try {
    StampedFit out;
    out.stamp = stamp_from(j);
    out.experiment = require(j, "experiment").get<std::string>();
    try {
      out.fit.spec = model_spec_from_json(require(j, "spec").dump());
    } catch (const ConfigError& e) {
      throw DataError(std::string("fit record: ") + e.what());
    }
    const auto& grid = require(j, "grid");
    out.fit.grid_points = require(grid, "points").get<Eigen::Index>();
    out.fit.grid_range = require(grid, "range").get<double>();
    const auto& sem = require(j, "semantics");
    out.fit.tau = require(sem, "tau").get<double>();
    out.fit.epsilon = require(sem, "epsilon").get<double>();
    out.fit.n_trials = require(j, "n_trials").get<long>();
    out.fit.nll = require(j, "nll").get<double>();
    out.fit.aic = require(j, "aic").get<double>();
    out.fit.bic = require(j, "bic").get<double>();
    out.fit.best_vector = vector_from(require(j, "vector"), "vector");
    if (out.fit.best_vector.size() != out.fit.spec.df())
      throw DataError("fit record: vector length does not match the model's df");
    for (const auto& v : require(j, "start_values"))
      out.fit.start_values.push_back(v.get<double>());
    out.fit.winning_start = require(j, "winning_start").get<int>();
    out.fit.stop_reason = require(j, "stop_reason").get<std::string>();
    out.fit.final_sigma = require(j, "final_sigma").get<double>();
    out.fit.evaluations = require(j, "evaluations").get<long>();
    for (const auto& point : require(j, "trace")) {
      if (!point.is_array() || point.size() != 3)
        throw DataError("fit record: trace points must be [generation, best, best_so_far]");
      out.fit.trace.push_back(
          {point[0].get<int>(), point[1].get<double>(), point[2].get<double>()});
    }
    out.fit.seed = out.stamp.seed;
    out.fit.data_hash = out.stamp.data_hash;
    return out;
  } catch (const json::exception& e) {
    throw DataError(std::string("fit record: ") + e.what());
  }
}

std::string fit_result_text(const FitResult& fit, const RunStamp& stamp,
                            std::string_view experiment) {
  std::ostringstream os;
  std::string varied;
  for (CultureParam p : all_culture_params())
    if (fit.spec.is_varied(p)) {
      if (!varied.empty()) varied += "+";
      varied += to_string(p);
    }
  if (varied.empty()) varied = "none";

  os << "model " << fit.spec.name << "  (culture-varied: " << varied
     << ", df " << fit.spec.df() << (fit.spec.social_frozen ? ", phi_s frozen at 0" : "")
     << ")\n";
  os << experiment << " trials: n = " << fit.n_trials << ", seed " << stamp.seed;
  if (!stamp.data_hash.empty()) os << ", data " << stamp.data_hash;
  os << "\n";
  os << fixed2 << "nll " << fit.nll << "   aic " << fit.aic << "   bic " << fit.bic << "\n";
  os << "stop: " << fit.stop_reason << " (start " << fit.winning_start << " of "
     << fit.start_values.size() << " won, " << fit.evaluations << " evaluations)\n";

  const auto cultures = unpack(fit.best_vector, fit.spec, fit.tau, fit.epsilon);
  const auto& uk = cultures[0];
  const auto& us = cultures[1];
  os << "thresholds (lo, hi):          UK                 US\n";
  for (Modifier m : all_modifiers()) {
    const auto a = uk.semantics.pair(m);
    const auto b = us.semantics.pair(m);
    os << "  " << std::left << std::setw(12) << to_string(m) << std::right << "("
       << std::setw(6) << a.lo << ", " << std::setw(6) << a.hi << ")   (" << std::setw(6)
       << b.lo << ", " << std::setw(6) << b.hi << ")\n";
  }
  os << "  cost          " << std::setw(6) << uk.pragmatics.modifier_cost
     << "               " << std::setw(6) << us.pragmatics.modifier_cost << "\n";
  os << "  phi_s         " << std::setw(6) << uk.pragmatics.social_weight
     << "               " << std::setw(6) << us.pragmatics.social_weight << "\n";
  os << "  phi_i         " << std::setw(6) << uk.pragmatics.informativity_weight
     << "               " << std::setw(6) << us.pragmatics.informativity_weight << "\n";
  return os.str();
}

std::string comparison_to_json(const ComparisonReport& report, const RunStamp& stamp) {
  ordered_json j = stamp_header(stamp);
  j["n_trials"] = report.n_trials;
  auto rows = ordered_json::array();
  for (const auto& row : report.rows) {
    ordered_json r;
    r["model"] = row.name;
    r["varied"] = row.varied;
    r["df"] = row.df;
    r["nll"] = row.nll;
    r["aic"] = row.aic;
    r["bic"] = row.bic;
    r["best_aic"] = row.best_aic;
    r["best_bic"] = row.best_bic;
    rows.push_back(std::move(r));
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

std::string robustness_to_json(const RobustnessReport& report, const RunStamp& stamp) {
  ordered_json j = stamp_header(stamp);
  merge(j, robustness_body(report));
  return j.dump(2) + "\n";
}

std::string robustness_text(const RobustnessReport& report) {
  std::ostringstream os;
  os << "scenario " << report.scenario << "\n";
  country_line(os, "baseline", report.baseline_nll, report.baseline_by_country);
  country_line(os, "variant", report.variant_nll, report.variant_by_country);
  os << "  delta    " << fixed2 << std::showpos << std::setw(11) << report.delta
     << std::noshowpos << "\n";
  return os.str();
}

std::string drop_outcome_to_json(const DropOutcome& outcome, const RunStamp& stamp,
                                 std::string_view experiment) {
  ordered_json j = stamp_header(stamp);
  merge(j, robustness_body(outcome.report));
  j["reduced_baseline_nll"] = outcome.reduced_baseline_nll;
  j["reduced_variant_nll"] = outcome.reduced_variant_nll;
  j["refit"] = fit_body(outcome.refit, experiment);
  return j.dump(2) + "\n";
}

std::string drop_outcome_text(const DropOutcome& outcome) {
  std::ostringstream os;
  os << robustness_text(outcome.report);
  os << "  reduced-set baseline " << fixed2 << outcome.reduced_baseline_nll
     << ", reduced-set refit " << outcome.reduced_variant_nll << "\n";
  os << "  (scores above are on the full dataset; the refit saw the reduced one)\n";
  return os.str();
}

std::string narrator_outcome_to_json(const NarratorOutcome& outcome, const RunStamp& stamp) {
  ordered_json j = stamp_header(stamp);
  merge(j, robustness_body(outcome.report));
  j["refit"] = fit_body(outcome.refit, "narrator");
  return j.dump(2) + "\n";
}

std::string narrator_outcome_text(const NarratorOutcome& outcome) {
  std::ostringstream os;
  os << "scenario " << outcome.report.scenario
     << "  (baseline: dialogue parameters transferred; variant: narrator refit)\n";
  country_line(os, "baseline", outcome.report.baseline_nll, outcome.report.baseline_by_country);
  country_line(os, "variant", outcome.report.variant_nll, outcome.report.variant_by_country);
  os << "  delta    " << fixed2 << std::showpos << std::setw(11) << outcome.report.delta
     << std::noshowpos << "  (negative: refitting beat the transfer)\n";
  return os.str();
}

std::string recovery_to_json(const RecoveryReport& report, const RunStamp& stamp) {
  ordered_json j = stamp_header(stamp);
  j["spec"] = spec_json(report.spec);
  j["n_trials"] = report.n_trials;
  j["true_nll"] = report.true_nll;
  j["fitted_nll"] = report.fitted_nll;
  j["true_vector"] = vector_json(report.true_vector);
  j["fitted_vector"] = vector_json(report.fitted_vector);
  auto slots = ordered_json::array();
  for (const auto& name : slot_names(report.spec)) slots.push_back(name);
  j["slots"] = slots;
  ordered_json errors;
  for (Country c : all_countries()) {
    auto row = ordered_json::object();
    for (Modifier m : all_modifiers())
      row[std::string(to_string(m))] =
          report.midpoint_error[static_cast<std::size_t>(c)][static_cast<std::size_t>(m)];
    errors[std::string(to_string(c))] = std::move(row);
  }
  j["midpoint_error"] = errors;
  j["max_midpoint_error"] = report.max_midpoint_error;
  j["max_interior_midpoint_error"] = report.max_interior_midpoint_error;
  j["max_scale_bound_error"] = report.max_scale_bound_error;
  j["ordering_preserved"] = report.ordering_preserved;
  return j.dump(2) + "\n";
}

std::string recovery_text(const RecoveryReport& report) {
  std::ostringstream os;
  os << "recovery: " << report.spec.name << " on " << report.n_trials
     << " synthetic trials\n";
  os << fixed2 << "  nll of generating parameters " << report.true_nll << ", of refit "
     << report.fitted_nll << "\n";
  os << "  modifier strength ordering " << (report.ordering_preserved ? "preserved" : "BROKEN")
     << "\n";
  os << std::setprecision(3) << "  threshold midpoint error: interior max "
     << report.max_interior_midpoint_error << ", boundary-pair inner bounds max "
     << report.max_scale_bound_error << ", overall max " << report.max_midpoint_error << "\n";
  os << "  (the bare form's lower and the strongest form's upper bound are\n"
        "   censored by the response scale and excluded from the gated maxima)\n";
  os << "  per-cell midpoint error:\n";
  for (Country c : all_countries()) {
    os << "    " << to_string(c) << ":";
    for (Modifier m : all_modifiers())
      os << " " << to_string(m) << "="
         << report.midpoint_error[static_cast<std::size_t>(c)][static_cast<std::size_t>(m)];
    os << "\n";
  }
  return os.str();
}

}  // namespace intens
