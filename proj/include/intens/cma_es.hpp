#ifndef INTENS_CMA_ES_HPP
#define INTENS_CMA_ES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace intens {

struct CmaConfig {
  int lambda = 0;            // population size; 0 = 4 + floor(3 ln d)
  double sigma0 = 0.5;       // initial step size in parameter space
  int max_generations = 1000;
  double tol_fun = 1e-10;    // stop when best values stagnate within this range
  std::uint64_t seed = 0;
  int eval_threads = 1;      // candidates evaluated in parallel; 0 = hardware count
  int resample_cap = 100;    // retries per candidate for non-finite objectives
  bool record_trace = true;
};

struct CmaTracePoint {
  int generation = 0;
  double best = 0.0;          // best fitness in this generation
  double best_so_far = 0.0;
};

struct CmaResult {
  Eigen::VectorXd best_x;
  double best_value = 0.0;
  std::vector<CmaTracePoint> trace;
  int generations = 0;
  long evaluations = 0;
  double final_sigma = 0.0;
  std::string stop_reason;  // "tol_fun", "max_generations", "step_collapse", "diverged"
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// (mu/mu_w, lambda) covariance matrix adaptation evolution strategy with
/// weighted recombination, cumulative step-size adaptation, and rank-one plus
/// rank-mu covariance updates. Minimizes the objective. Deterministic given
/// the seed, independent of eval_threads: all candidates of a generation are
/// sampled before any evaluation, and non-finite candidates are resampled in
/// index order afterwards.
///
/// Throws UsageError on an empty start point and OptimizationError when a
/// candidate stays non-finite past the resample cap.
CmaResult cma_es(const Objective& objective, const Eigen::VectorXd& initial_mean,
                 const CmaConfig& config);

}  // namespace intens

#endif
