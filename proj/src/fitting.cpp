#include "intens/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "intens/error.hpp"
#include "intens/rng.hpp"

namespace intens {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PragmaticParams narrator_pragmatics(PragmaticParams prag) {
  prag.social_weight = 0.0;
  return prag;
}

}  // namespace

double bin_nll(const Eigen::VectorXd& posterior, Eigen::Index bin) {
  const double mass = posterior(bin);
  if (!(mass > 0.0)) return kInf;
  return -std::log(mass);
}

double trial_nll(const TrialRecord& trial,
                 const std::array<CultureParams, kCountryCount>& cultures,
                 const PolitenessTable& pol, const StateGrid& grid) {
  if (trial.experiment == Experiment::Politeness)
    throw UsageError("trial_nll: politeness trials carry no interpretation response");
  if (std::isnan(trial.response_z))
    throw UsageError("trial_nll: trial has no z-scored response");

  const CultureParams& culture = cultures[static_cast<std::size_t>(trial.country)];
  const PragmaticParams prag = trial.experiment == Experiment::Narrator
                                   ? narrator_pragmatics(culture.pragmatics)
                                   : culture.pragmatics;
  const auto forms = utterance_forms(trial.predicate);
  const Utterance u{trial.predicate, trial.modifier};
  const auto l1 =
      pragmatic_listener(u, forms, culture.semantics, prag, pol.slice(trial.country), grid);
  return bin_nll(l1, grid.nearest_index(trial.response_z));
}

BinnedDataset BinnedDataset::from_trials(std::span<const TrialRecord> trials,
                                         const StateGrid& grid) {
  std::map<std::tuple<Country, bool, Predicate>, std::map<std::pair<Modifier, Eigen::Index>, double>>
      groups;
  long n = 0;
  for (const auto& t : trials) {
    if (t.experiment == Experiment::Politeness) continue;
    if (std::isnan(t.response_z))
      throw UsageError("binning: trial has no z-scored response");
    const bool narrator = t.experiment == Experiment::Narrator;
    groups[{t.country, narrator, t.predicate}][{t.modifier, grid.nearest_index(t.response_z)}] +=
        1.0;
    ++n;
  }

  BinnedDataset data;
  data.n_trials = n;
  for (const auto& [key, cells] : groups) {
    BinnedGroup group;
    group.country = std::get<0>(key);
    group.narrator = std::get<1>(key);
    group.predicate = std::get<2>(key);
    for (const auto& [cell, count] : cells)
      group.cells.push_back({cell.first, cell.second, count});
    data.groups.push_back(std::move(group));
  }
  return data;
}

double binned_nll(const BinnedDataset& data,
                  const std::array<CultureParams, kCountryCount>& cultures,
                  const PolitenessTable& pol, const StateGrid& grid) {
  double total = 0.0;
  for (const BinnedGroup& group : data.groups) {
    const CultureParams& culture = cultures[static_cast<std::size_t>(group.country)];
    const PragmaticParams prag =
        group.narrator ? narrator_pragmatics(culture.pragmatics) : culture.pragmatics;
    const auto table = predicate_table(group.predicate, culture.semantics, prag,
                                       pol.slice(group.country), grid);
    for (const BinnedCell& cell : group.cells) {
      const double mass = table.l1(cell.bin, static_cast<int>(cell.modifier));
      if (!(mass > 0.0)) return kInf;
      total -= cell.count * std::log(mass);
    }
  }
  return total;
}

double dataset_nll(const BinnedDataset& data, const Eigen::VectorXd& v, const ModelSpec& spec,
                   const PolitenessTable& pol, const StateGrid& grid, double tau,
                   double epsilon) {
  return binned_nll(data, unpack(v, spec, tau, epsilon), pol, grid);
}

double dataset_nll(std::span<const TrialRecord> trials, const Eigen::VectorXd& v,
                   const ModelSpec& spec, const PolitenessTable& pol, const StateGrid& grid,
                   double tau, double epsilon) {
  return dataset_nll(BinnedDataset::from_trials(trials, grid), v, spec, pol, grid, tau, epsilon);
}

Eigen::VectorXd default_start(const ModelSpec& spec) {
  CultureParams culture;
  culture.semantics.pair(Modifier::None) = {-2.0, 2.0};
  culture.semantics.pair(Modifier::Slightly) = {-1.25, 0.0};
  culture.semantics.pair(Modifier::KindOf) = {-0.75, 0.5};
  culture.semantics.pair(Modifier::Quite) = {-0.25, 1.0};
  culture.semantics.pair(Modifier::Very) = {0.25, 1.75};
  culture.semantics.pair(Modifier::Extremely) = {0.75, 2.75};
  culture.pragmatics.informativity_weight = 1.0;
  culture.pragmatics.social_weight = 0.1;
  culture.pragmatics.modifier_cost = 0.1;
  return pack({culture, culture}, spec);
}

FitResult fit_binned(const BinnedDataset& data, const ModelSpec& spec,
                     const PolitenessTable& pol, const FitConfig& config) {
  spec.validate();
  pol.validate_complete();
  if (config.starts < 1 && config.extra_starts.empty())
    throw ConfigError("fit needs at least one start");

  const auto grid = StateGrid::gaussian(config.grid_points, config.grid_range);
  const auto objective = [&](const Eigen::VectorXd& v) {
    return dataset_nll(data, v, spec, pol, grid, config.tau, config.epsilon);
  };

  const Eigen::VectorXd base_mean = default_start(spec);
  std::vector<Eigen::VectorXd> means;
  for (int k = 0; k < config.starts; ++k) {
    Eigen::VectorXd mean = base_mean;
    if (k > 0) {
      Rng jitter(config.cma.seed ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(k)));
      for (Eigen::Index i = 0; i < mean.size(); ++i)
        mean(i) += config.start_jitter * jitter.gauss();
    }
    means.push_back(std::move(mean));
  }
  for (const auto& extra : config.extra_starts) {
    if (extra.size() != base_mean.size())
      throw UsageError("extra start length does not match the model's parameter count");
    means.push_back(extra);
  }

  FitResult result;
  result.spec = spec;
  result.nll = kInf;
  for (std::size_t k = 0; k < means.size(); ++k) {
    CmaConfig cma = config.cma;
    cma.seed = config.cma.seed + k;
    const CmaResult run = cma_es(objective, means[k], cma);
    result.start_values.push_back(run.best_value);
    if (run.best_value < result.nll) {
      result.nll = run.best_value;
      result.best_vector = run.best_x;
      result.trace = run.trace;
      result.winning_start = static_cast<int>(k);
      result.final_sigma = run.final_sigma;
      result.stop_reason = run.stop_reason;
    }
    result.evaluations += run.evaluations;
  }
  if (!std::isfinite(result.nll))
    throw OptimizationError("fit: no start produced a finite likelihood");

  result.n_trials = data.n_trials;
  const double df = spec.df();
  result.aic = 2.0 * result.nll + 2.0 * df;
  result.bic = 2.0 * result.nll + df * std::log(static_cast<double>(data.n_trials));
  result.seed = config.cma.seed;
  result.grid_points = config.grid_points;
  result.grid_range = config.grid_range;
  result.tau = config.tau;
  result.epsilon = config.epsilon;
  return result;
}

FitResult fit_model(std::span<const TrialRecord> trials, const ModelSpec& spec,
                    const PolitenessTable& pol, const FitConfig& config) {
  const auto grid = StateGrid::gaussian(config.grid_points, config.grid_range);
  const auto data = BinnedDataset::from_trials(trials, grid);
  if (data.n_trials == 0) throw DataError("fit: no interpretation trials in the dataset");
  return fit_binned(data, spec, pol, config);
}

ComparisonReport compare_models(std::span<const FitResult> results) {
  if (results.size() < 2)
    throw UsageError("model comparison needs at least two fits");
  for (const auto& r : results)
    if (r.n_trials != results[0].n_trials)
      throw UsageError("fits cover different trial counts; not comparable");

  ComparisonReport report;
  report.n_trials = results[0].n_trials;
  for (const auto& r : results) {
    ComparisonRow row;
    row.name = r.spec.name;
    std::string varied;
    for (CultureParam p : all_culture_params())
      if (r.spec.is_varied(p)) {
        if (!varied.empty()) varied += "+";
        varied += to_string(p);
      }
    row.varied = varied.empty() ? "none" : varied;
    row.df = r.spec.df();
    row.nll = r.nll;
    row.aic = r.aic;
    row.bic = r.bic;
    report.rows.push_back(std::move(row));
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const auto& a, const auto& b) {
    return a.aic != b.aic ? a.aic < b.aic : a.name < b.name;
  });

  auto best_aic = std::min_element(report.rows.begin(), report.rows.end(),
                                   [](const auto& a, const auto& b) { return a.aic < b.aic; });
  auto best_bic = std::min_element(report.rows.begin(), report.rows.end(),
                                   [](const auto& a, const auto& b) { return a.bic < b.bic; });
  best_aic->best_aic = true;
  best_bic->best_bic = true;
  return report;
}

std::string comparison_text(const ComparisonReport& report) {
  std::size_t name_w = 5, varied_w = 6;
  for (const auto& row : report.rows) {
    name_w = std::max(name_w, row.name.size());
    varied_w = std::max(varied_w, row.varied.size());
  }

  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(name_w) + 2) << "model"
     << std::setw(static_cast<int>(varied_w) + 2) << "varied" << std::right << std::setw(4)
     << "df" << std::setw(12) << "log loss" << std::setw(12) << "AIC" << std::setw(12) << "BIC"
     << "\n";
  os << std::string(name_w + varied_w + 44, '-') << "\n";
  for (const auto& row : report.rows) {
    os << std::left << std::setw(static_cast<int>(name_w) + 2) << row.name
       << std::setw(static_cast<int>(varied_w) + 2) << row.varied << std::right << std::setw(4)
       << row.df << std::fixed << std::setprecision(1) << std::setw(12) << row.nll
       << std::setw(12) << row.aic << std::setw(12) << row.bic;
    if (row.best_aic) os << "  best AIC";
    if (row.best_bic) os << "  best BIC";
    os << "\n";
  }
  os << "n = " << report.n_trials << " trials\n";
  return os.str();
}

}  // namespace intens
