// Command-line front end: ingest behavioral CSVs, fit models, compare fits,
// emit per-cell predictions, and run the robustness and recovery analyses.
// Every artifact embeds tool version, seed, data hash, and config hash, so a
// result file always identifies the run that produced it.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "intens/analysis.hpp"
#include "intens/data.hpp"
#include "intens/error.hpp"
#include "intens/fitting.hpp"
#include "intens/model_spec.hpp"
#include "intens/report.hpp"
#include "intens/rsa.hpp"
#include "intens/version.hpp"

namespace fs = std::filesystem;
using namespace intens;

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

int env_thread_cap() {
  const char* raw = std::getenv("RSA_THREADS");
  if (!raw || !*raw) return 0;  // 0 = hardware concurrency
  int value = 0;
  const auto res = std::from_chars(raw, raw + std::string_view(raw).size(), value);
  if (res.ec != std::errc{} || *res.ptr != '\0' || value < 1)
    throw ConfigError("RSA_THREADS must be a positive integer");
  return value;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("short write to " + path.string());
  std::cout << "wrote " << path.string() << "\n";
}

std::string sanitize(std::string_view name) {
  std::string out;
  for (char c : name)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out.empty() ? std::string("model") : out;
}

/// `--model` takes a builtin name (M1..M9) or a path to a spec JSON file.
ModelSpec load_spec(const std::string& model) {
  try {
    return find_spec(model);
  } catch (const ConfigError&) {
    if (fs::exists(model)) return model_spec_from_json(read_file(model));
    throw;
  }
}

/// phi_s and phi_i are how the model writes its weights; the canonical slot
/// names are soc and inf, so accept both spellings.
CultureParam parse_param_arg(const std::string& name) {
  if (name == "phi_s") return CultureParam::Soc;
  if (name == "phi_i") return CultureParam::Inf;
  const auto p = parse_culture_param(name);
  if (!p)
    throw ConfigError("unknown parameter '" + name +
                      "' (thr_baseline..thr_extremely, cost, soc/phi_s, inf/phi_i)");
  return *p;
}

struct FitOptions {
  long grid_points = 101;
  double grid_range = 4.0;
  double tau = 0.2;
  double epsilon = 1e-4;
  std::uint64_t seed = 0;
  int starts = 5;
  int max_generations = 1000;
  int lambda = 0;
  double sigma0 = 0.5;
  double tol_fun = 1e-10;
};

void add_fit_options(CLI::App* cmd, FitOptions& opts) {
  cmd->add_option("--grid-points", opts.grid_points, "response grid resolution")
      ->capture_default_str();
  cmd->add_option("--grid-range", opts.grid_range, "grid half-range in z units")
      ->capture_default_str();
  cmd->add_option("--tau", opts.tau, "denotation smoothing temperature")
      ->capture_default_str();
  cmd->add_option("--epsilon", opts.epsilon, "denotation compatibility floor")
      ->capture_default_str();
  cmd->add_option("--seed", opts.seed, "optimizer seed")->capture_default_str();
  cmd->add_option("--starts", opts.starts, "independent optimizer starts")
      ->capture_default_str();
  cmd->add_option("--max-generations", opts.max_generations, "optimizer generation budget")
      ->capture_default_str();
  cmd->add_option("--lambda", opts.lambda, "population size (0 = default rule)")
      ->capture_default_str();
  cmd->add_option("--sigma0", opts.sigma0, "initial step size")->capture_default_str();
  cmd->add_option("--tol-fun", opts.tol_fun, "convergence tolerance")->capture_default_str();
}

FitConfig make_fit_config(const FitOptions& opts) {
  FitConfig config;
  config.grid_points = opts.grid_points;
  config.grid_range = opts.grid_range;
  config.tau = opts.tau;
  config.epsilon = opts.epsilon;
  config.starts = opts.starts;
  config.cma.seed = opts.seed;
  config.cma.max_generations = opts.max_generations;
  config.cma.lambda = opts.lambda;
  config.cma.sigma0 = opts.sigma0;
  config.cma.tol_fun = opts.tol_fun;
  config.cma.eval_threads = env_thread_cap();
  return config;
}

struct Ingested {
  std::vector<TrialRecord> trials;  // z-scored, degenerate participants dropped
  std::string hash;                 // digest of the raw file content as parsed
  std::vector<std::string> warnings;
};

Ingested ingest(const fs::path& path) {
  const auto raw = load_trials(path);
  Ingested out;
  out.hash = data_hash(raw);
  auto z = zscore_by_participant(raw);
  out.trials = std::move(z.trials);
  out.warnings = std::move(z.warnings);
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
  return out;
}

PolitenessTable politeness_from(const Ingested& data, bool synthetic) {
  if (synthetic) return synthetic_politeness_table();
  return build_politeness_table(filter_experiment(data.trials, Experiment::Politeness));
}

std::vector<TrialRecord> select_experiment(const Ingested& data, const std::string& which) {
  if (which == "dialogue") return filter_experiment(data.trials, Experiment::Dialogue);
  if (which == "narrator") return filter_experiment(data.trials, Experiment::Narrator);
  std::vector<TrialRecord> out = filter_experiment(data.trials, Experiment::Dialogue);
  const auto narrator = filter_experiment(data.trials, Experiment::Narrator);
  out.insert(out.end(), narrator.begin(), narrator.end());
  return out;
}

void check_hash(const StampedFit& fit, const Ingested& data) {
  if (fit.stamp.data_hash != data.hash)
    throw ConfigError("data hash mismatch: fit was made on " + fit.stamp.data_hash +
                      ", this file digests to " + data.hash);
}

// --- ingest ---------------------------------------------------------------

struct IngestArgs {
  std::string data;
  std::string out = ".";
};

void run_ingest(const IngestArgs& args) {
  const Ingested data = ingest(args.data);
  const fs::path out_dir(args.out);

  long n_dialogue = 0, n_narrator = 0, n_politeness = 0;
  std::map<std::string, int> participants;
  for (const auto& t : data.trials) {
    participants[t.participant_id] = 1;
    switch (t.experiment) {
      case Experiment::Dialogue: ++n_dialogue; break;
      case Experiment::Narrator: ++n_narrator; break;
      case Experiment::Politeness: ++n_politeness; break;
    }
  }

  nlohmann::ordered_json j;
  j["tool_version"] = kToolVersion;
  j["timestamp"] = iso8601_utc_now();
  j["data_hash"] = data.hash;
  j["n_trials"] = static_cast<long>(data.trials.size());
  j["n_participants"] = static_cast<long>(participants.size());
  j["n_dialogue"] = n_dialogue;
  j["n_narrator"] = n_narrator;
  j["n_politeness"] = n_politeness;
  j["warnings"] = data.warnings;
  write_file(out_dir / "ingest.json", j.dump(2) + "\n");

  if (n_politeness > 0) {
    const auto table =
        build_politeness_table(filter_experiment(data.trials, Experiment::Politeness));
    const auto flipped = valence_flip(table);
    std::ostringstream csv;
    csv << "country,predicate,modifier,mean_z,mean_z_valence_flipped\n";
    for (Country c : all_countries())
      for (Predicate p : all_predicates())
        for (Modifier m : all_modifiers())
          csv << to_string(c) << "," << to_string(p) << "," << to_string(m) << ","
              << shortest(table.value(c, p, m)) << "," << shortest(flipped.value(c, p, m))
              << "\n";
    write_file(out_dir / "politeness.csv", csv.str());
  }

  if (n_dialogue + n_narrator > 0) {
    std::ostringstream csv;
    csv << "participant_id,country,experiment,predicate,modifier,effect\n";
    for (Experiment e : {Experiment::Dialogue, Experiment::Narrator}) {
      const auto scores = effect_scores(filter_experiment(data.trials, e));
      for (const auto& w : scores.warnings) std::cerr << "warning: " << w << "\n";
      for (const auto& s : scores.scores)
        csv << s.participant_id << "," << to_string(s.country) << "," << to_string(e) << ","
            << to_string(s.predicate) << "," << to_string(s.modifier) << ","
            << shortest(s.effect) << "\n";
    }
    write_file(out_dir / "effects.csv", csv.str());
  }

  std::cout << "ingested " << data.trials.size() << " trials (" << n_dialogue << " dialogue, "
            << n_narrator << " narrator, " << n_politeness << " politeness) from "
            << participants.size() << " participants; digest " << data.hash << "\n";
}

// --- fit -------------------------------------------------------------------

struct FitArgs {
  std::string data;
  std::string model;
  std::string experiment = "dialogue";
  std::string out = ".";
  bool synthetic_politeness = false;
  FitOptions opts;
};

void run_fit(const FitArgs& args) {
  ModelSpec spec = load_spec(args.model);
  if (args.experiment == "narrator") spec = freeze_social(spec);

  const Ingested data = ingest(args.data);
  const PolitenessTable pol = politeness_from(data, args.synthetic_politeness);
  const auto trials = select_experiment(data, args.experiment);
  const FitConfig config = make_fit_config(args.opts);

  FitResult fit = fit_model(trials, spec, pol, config);
  fit.data_hash = data.hash;

  const RunStamp stamp =
      make_stamp(data.hash, fit_config_hash(spec, config, args.experiment), args.opts.seed);
  const std::string text = fit_result_text(fit, stamp, args.experiment);
  std::cout << text;

  const fs::path out_dir(args.out);
  const std::string base = "fit_" + sanitize(spec.name);
  write_file(out_dir / (base + ".json"), fit_result_to_json(fit, stamp, args.experiment));
  write_file(out_dir / (base + ".txt"), text);
}

// --- compare ----------------------------------------------------------------

struct CompareArgs {
  std::vector<std::string> fits;
  std::string out;
};

void run_compare(const CompareArgs& args) {
  std::vector<StampedFit> loaded;
  for (const auto& path : args.fits) loaded.push_back(fit_result_from_json(read_file(path)));

  // Same-file-twice is a foot-gun, not a comparison: drop exact duplicates.
  std::vector<StampedFit> unique;
  for (auto& f : loaded) {
    const bool dup = std::any_of(unique.begin(), unique.end(), [&](const StampedFit& u) {
      return u.fit.spec.name == f.fit.spec.name && u.fit.best_vector == f.fit.best_vector;
    });
    if (dup) {
      std::cerr << "warning: duplicate fit of " << f.fit.spec.name << " dropped\n";
      continue;
    }
    unique.push_back(std::move(f));
  }

  for (const auto& f : unique)
    if (f.stamp.data_hash != unique.front().stamp.data_hash)
      throw ConfigError("data hash mismatch: " + unique.front().stamp.data_hash + " vs " +
                        f.stamp.data_hash + "; fits compare only on identical data");

  std::vector<FitResult> fits;
  std::string config_digest;
  for (const auto& f : unique) {
    fits.push_back(f.fit);
    config_digest += f.stamp.config_hash;
    config_digest += ";";
  }

  const ComparisonReport report = compare_models(fits);
  const std::string text = comparison_text(report);
  std::cout << text;

  if (!args.out.empty()) {
    const RunStamp stamp =
        make_stamp(unique.front().stamp.data_hash, hex64(fnv1a64(config_digest)), 0);
    const fs::path out_dir(args.out);
    write_file(out_dir / "comparison.json", comparison_to_json(report, stamp));
    write_file(out_dir / "comparison.txt", text);
  }
}

// --- predict ----------------------------------------------------------------

struct PredictArgs {
  std::string fit;
  std::string data;
  std::string out = ".";
  bool svg = false;
  bool synthetic_politeness = false;
};

struct CellStat {
  double sum = 0.0;
  long n = 0;
};

std::string scatter_svg(const std::vector<std::pair<double, double>>& points) {
  // predicted (x) vs empirical (y), both in z units, fixed [-3, 3] frame
  const double lo = -3.0, hi = 3.0, size = 420.0, margin = 45.0;
  const auto sx = [&](double v) {
    return margin + (std::clamp(v, lo, hi) - lo) / (hi - lo) * size;
  };
  const auto sy = [&](double v) {
    return margin + size - (std::clamp(v, lo, hi) - lo) / (hi - lo) * size;
  };
  std::ostringstream svg;
  const double frame = size + 2 * margin;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << frame << "\" height=\""
      << frame << "\" viewBox=\"0 0 " << frame << " " << frame << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << sx(lo) << "\" y1=\"" << sy(lo) << "\" x2=\"" << sx(hi) << "\" y2=\""
      << sy(hi) << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
  for (double tick = -3.0; tick <= 3.0; tick += 1.0) {
    svg << "<text x=\"" << sx(tick) << "\" y=\"" << frame - 12
        << "\" font-size=\"11\" text-anchor=\"middle\">" << tick << "</text>\n";
    svg << "<text x=\"" << 16 << "\" y=\"" << sy(tick) + 4
        << "\" font-size=\"11\" text-anchor=\"middle\">" << tick << "</text>\n";
  }
  svg << "<text x=\"" << frame / 2 << "\" y=\"" << frame - 28
      << "\" font-size=\"12\" text-anchor=\"middle\">model predicted mean (z)</text>\n";
  svg << "<text x=\"14\" y=\"" << frame / 2
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << frame / 2
      << ")\">empirical mean (z)</text>\n";
  for (const auto& [x, y] : points)
    svg << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y)
        << "\" r=\"3.5\" fill=\"#2266aa\" fill-opacity=\"0.65\"/>\n";
  svg << "</svg>\n";
  return svg.str();
}

void run_predict(const PredictArgs& args) {
  const StampedFit fit = fit_result_from_json(read_file(args.fit));
  const Ingested data = ingest(args.data);
  check_hash(fit, data);
  const PolitenessTable pol = politeness_from(data, args.synthetic_politeness);

  const StateGrid grid = StateGrid::gaussian(fit.fit.grid_points, fit.fit.grid_range);
  const auto cultures = unpack(fit.fit.best_vector, fit.fit.spec, fit.fit.tau, fit.fit.epsilon);

  // empirical cell means over interpretation trials
  std::map<std::tuple<Experiment, Country, Predicate, Modifier>, CellStat> stats;
  bool has[kExperimentCount] = {false, false, false};
  for (const auto& t : data.trials) {
    if (t.experiment == Experiment::Politeness) continue;
    auto& cell = stats[{t.experiment, t.country, t.predicate, t.modifier}];
    cell.sum += t.response_z;
    cell.n += 1;
    has[static_cast<int>(t.experiment)] = true;
  }
  if (!has[0] && !has[1]) throw DataError("no interpretation trials in " + args.data);

  std::ostringstream pred_csv, post_csv;
  pred_csv << "country,predicate,modifier,experiment,predicted_mean_z,empirical_mean_z,n\n";
  post_csv << "country,predicate,modifier,experiment,state_z,probability\n";
  std::vector<std::pair<double, double>> points;

  for (Experiment e : {Experiment::Dialogue, Experiment::Narrator}) {
    if (!has[static_cast<int>(e)]) continue;
    for (Country c : all_countries()) {
      const CultureParams& culture = cultures[static_cast<std::size_t>(c)];
      PragmaticParams prag = culture.pragmatics;
      if (e == Experiment::Narrator) prag.social_weight = 0.0;
      for (Predicate p : all_predicates()) {
        const auto table = predicate_table(p, culture.semantics, prag, pol.slice(c), grid);
        for (Modifier m : all_modifiers()) {
          const Eigen::VectorXd posterior = table.l1.col(static_cast<int>(m));
          const double predicted = (grid.points() * posterior.array()).sum();
          const auto it = stats.find({e, c, p, m});
          pred_csv << to_string(c) << "," << to_string(p) << "," << to_string(m) << ","
                   << to_string(e) << "," << shortest(predicted) << ",";
          if (it != stats.end() && it->second.n > 0) {
            const double empirical = it->second.sum / static_cast<double>(it->second.n);
            pred_csv << shortest(empirical) << "," << it->second.n << "\n";
            points.emplace_back(predicted, empirical);
          } else {
            pred_csv << "," << 0 << "\n";
          }
          for (Eigen::Index i = 0; i < grid.size(); ++i)
            post_csv << to_string(c) << "," << to_string(p) << "," << to_string(m) << ","
                     << to_string(e) << "," << shortest(grid.points()(i)) << ","
                     << shortest(posterior(i)) << "\n";
        }
      }
    }
  }

  const fs::path out_dir(args.out);
  write_file(out_dir / "predictions.csv", pred_csv.str());
  write_file(out_dir / "posteriors.csv", post_csv.str());
  if (args.svg) write_file(out_dir / "predictions.svg", scatter_svg(points));
  std::cout << "predicted " << points.size() << " observed cells against model "
            << fit.fit.spec.name << "\n";
}

// --- robustness --------------------------------------------------------------

struct RobustnessArgs {
  std::string fit;
  std::string data;
  std::string out = ".";
  std::string drop;
  std::string constrain;
  std::string mode = "midpoint";
  bool refit = false;
  bool narrator = false;
  bool synthetic_politeness = false;
  FitOptions opts;
};

void run_robustness(const RobustnessArgs& args) {
  const int modes = (!args.drop.empty() ? 1 : 0) + (!args.constrain.empty() ? 1 : 0) +
                    (args.narrator ? 1 : 0);
  if (modes != 1)
    throw ConfigError("pick exactly one of --drop ITEM, --constrain PARAM, --narrator");

  const StampedFit loaded = fit_result_from_json(read_file(args.fit));
  const Ingested data = ingest(args.data);
  check_hash(loaded, data);
  const PolitenessTable pol = politeness_from(data, args.synthetic_politeness);
  const auto trials = select_experiment(data, loaded.experiment);
  const FitConfig config = make_fit_config(args.opts);
  const fs::path out_dir(args.out);

  if (!args.drop.empty()) {
    const DropItem item = parse_drop_item(args.drop);
    const DropOutcome outcome = drop_item_refit(trials, item, loaded.fit, pol, config);
    const RunStamp stamp = make_stamp(
        data.hash, fit_config_hash(outcome.refit.spec, config, loaded.experiment),
        args.opts.seed);
    const std::string text = drop_outcome_text(outcome);
    std::cout << text;
    const std::string base = "robustness_drop_" + sanitize(drop_item_name(item));
    write_file(out_dir / (base + ".json"),
               drop_outcome_to_json(outcome, stamp, loaded.experiment));
    write_file(out_dir / (base + ".txt"), text);
    return;
  }

  if (args.narrator) {
    const auto narrator_trials = filter_experiment(data.trials, Experiment::Narrator);
    if (narrator_trials.empty()) throw DataError("no narrator trials in " + args.data);
    const NarratorOutcome outcome = narrator_transfer(narrator_trials, loaded.fit, pol, config);
    const RunStamp stamp = make_stamp(
        data.hash, fit_config_hash(outcome.refit.spec, config, "narrator"), args.opts.seed);
    const std::string text = narrator_outcome_text(outcome);
    std::cout << text;
    write_file(out_dir / "robustness_narrator.json", narrator_outcome_to_json(outcome, stamp));
    write_file(out_dir / "robustness_narrator.txt", text);
    return;
  }

  const CultureParam param = parse_param_arg(args.constrain);
  const ConstrainMode mode =
      args.mode == "zero" ? ConstrainMode::Zero : ConstrainMode::Midpoint;
  const RobustnessReport report = constrain_and_score(loaded.fit, param, mode, trials, pol);
  const RunStamp stamp = make_stamp(
      data.hash, fit_config_hash(loaded.fit.spec, config, loaded.experiment), args.opts.seed);
  std::string text = robustness_text(report);
  const std::string base =
      "robustness_constrain_" + sanitize(std::string(to_string(param))) + "_" + args.mode;
  if (args.refit) {
    if (mode == ConstrainMode::Zero)
      throw ConfigError("--refit applies to midpoint mode only (zero is a score-only probe)");
    const FitResult refit = constrain_and_refit(loaded.fit, param, trials, pol, config);
    const RunStamp refit_stamp = make_stamp(
        data.hash, fit_config_hash(refit.spec, config, loaded.experiment), args.opts.seed);
    std::ostringstream line;
    line << "refit with shared " << to_string(param) << ": nll " << std::fixed
         << std::setprecision(2) << refit.nll << " vs baseline " << loaded.fit.nll
         << " (delta " << std::showpos << refit.nll - loaded.fit.nll << std::noshowpos
         << ")\n";
    text += line.str();
    write_file(out_dir / (base + "_refit.json"),
               fit_result_to_json(refit, refit_stamp, loaded.experiment));
  }
  std::cout << text;
  write_file(out_dir / (base + ".json"), robustness_to_json(report, stamp));
  write_file(out_dir / (base + ".txt"), text);
}

// --- recover -----------------------------------------------------------------

struct RecoverArgs {
  std::string model = "M9";
  long n = 5000;
  std::string out = ".";
  FitOptions opts;
};

void run_recover(const RecoverArgs& args) {
  const ModelSpec spec = load_spec(args.model);
  const PolitenessTable pol = synthetic_politeness_table();
  const Eigen::VectorXd truth = recovery_truth(spec);
  const FitConfig config = make_fit_config(args.opts);

  const RecoveryReport report =
      parameter_recovery(truth, spec, args.n, args.opts.seed, pol, config);

  std::ostringstream ident;
  ident << "synthetic;" << model_spec_to_json(spec) << ";n=" << args.n
        << ";seed=" << args.opts.seed;
  const RunStamp stamp = make_stamp(hex64(fnv1a64(ident.str())),
                                    fit_config_hash(spec, config, "recover"), args.opts.seed);

  const std::string text = recovery_text(report);
  std::cout << text;
  const fs::path out_dir(args.out);
  const std::string base = "recovery_" + sanitize(spec.name);
  write_file(out_dir / (base + ".json"), recovery_to_json(report, stamp));
  write_file(out_dir / (base + ".txt"), text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cross-cultural intensifier interpretation: RSA fitting and analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  IngestArgs ingest_args;
  auto* cmd_ingest = app.add_subcommand(
      "ingest", "parse and z-score a trials CSV; emit politeness and effect summaries");
  cmd_ingest->add_option("--data", ingest_args.data, "trials CSV")->required();
  cmd_ingest->add_option("--out", ingest_args.out, "output directory")->capture_default_str();

  FitArgs fit_args;
  auto* cmd_fit = app.add_subcommand("fit", "fit one model to interpretation trials");
  cmd_fit->add_option("--data", fit_args.data, "trials CSV")->required();
  cmd_fit->add_option("--model", fit_args.model, "builtin name (M1..M9) or spec JSON path")
      ->required();
  cmd_fit->add_option("--experiment", fit_args.experiment, "dialogue, narrator, or both")
      ->check(CLI::IsMember({"dialogue", "narrator", "both"}))
      ->capture_default_str();
  cmd_fit->add_option("--out", fit_args.out, "output directory")->capture_default_str();
  cmd_fit->add_flag("--synthetic-politeness", fit_args.synthetic_politeness,
                    "use the built-in synthetic politeness pattern instead of politeness trials");
  add_fit_options(cmd_fit, fit_args.opts);

  CompareArgs compare_args;
  auto* cmd_compare = app.add_subcommand("compare", "rank fit files by AIC/BIC");
  cmd_compare->add_option("fits", compare_args.fits, "two or more fit JSON files")
      ->required()
      ->expected(2, -1);
  cmd_compare->add_option("--out", compare_args.out, "output directory (optional)");

  PredictArgs predict_args;
  auto* cmd_predict = app.add_subcommand(
      "predict", "per-cell predicted vs empirical means and full posteriors");
  cmd_predict->add_option("--fit", predict_args.fit, "fit JSON file")->required();
  cmd_predict->add_option("--data", predict_args.data, "trials CSV")->required();
  cmd_predict->add_option("--out", predict_args.out, "output directory")
      ->capture_default_str();
  cmd_predict->add_flag("--svg", predict_args.svg, "also write a scatter SVG");
  cmd_predict->add_flag("--synthetic-politeness", predict_args.synthetic_politeness,
                        "use the built-in synthetic politeness pattern");

  RobustnessArgs robustness_args;
  auto* cmd_robustness = app.add_subcommand(
      "robustness", "drop-item, constrain-parameter, and narrator-transfer probes");
  cmd_robustness->add_option("--fit", robustness_args.fit, "baseline fit JSON")->required();
  cmd_robustness->add_option("--data", robustness_args.data, "trials CSV")->required();
  cmd_robustness->add_option("--out", robustness_args.out, "output directory")
      ->capture_default_str();
  cmd_robustness->add_option("--drop", robustness_args.drop,
                             "drop a predicate or modifier and refit");
  cmd_robustness->add_option("--constrain", robustness_args.constrain,
                             "force a culture-varied parameter to a shared value");
  cmd_robustness->add_option("--mode", robustness_args.mode, "midpoint or zero")
      ->check(CLI::IsMember({"midpoint", "zero"}))
      ->capture_default_str();
  cmd_robustness->add_flag("--refit", robustness_args.refit,
                           "after constraining, refit the shared-parameter model");
  cmd_robustness->add_flag("--narrator", robustness_args.narrator,
                           "score dialogue parameters on narrator trials vs a narrator refit");
  cmd_robustness->add_flag("--synthetic-politeness", robustness_args.synthetic_politeness,
                           "use the built-in synthetic politeness pattern");
  add_fit_options(cmd_robustness, robustness_args.opts);

  RecoverArgs recover_args;
  auto* cmd_recover = app.add_subcommand(
      "recover", "simulate from known parameters, refit, and report recovery error");
  cmd_recover->add_option("--model,--spec", recover_args.model,
                          "builtin name or spec JSON path")
      ->capture_default_str();
  cmd_recover->add_option("--n", recover_args.n, "synthetic trial count")
      ->capture_default_str();
  cmd_recover->add_option("--out", recover_args.out, "output directory")
      ->capture_default_str();
  add_fit_options(cmd_recover, recover_args.opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(cmd_ingest)) run_ingest(ingest_args);
    if (app.got_subcommand(cmd_fit)) run_fit(fit_args);
    if (app.got_subcommand(cmd_compare)) run_compare(compare_args);
    if (app.got_subcommand(cmd_predict)) run_predict(predict_args);
    if (app.got_subcommand(cmd_robustness)) run_robustness(robustness_args);
    if (app.got_subcommand(cmd_recover)) run_recover(recover_args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
