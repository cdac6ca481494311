#include "intens/cma_es.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "intens/error.hpp"
#include "intens/rng.hpp"

namespace intens {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Evaluates out[i] = f(xs[i]) with a fixed index->result mapping so the
// outcome does not depend on the thread count.
void evaluate_population(const Objective& f, const std::vector<Eigen::VectorXd>& xs,
                         std::vector<double>& out, int threads) {
  const auto n = xs.size();
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(n)));

  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(xs[i]);
    return;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = static_cast<std::size_t>(t); i < n;
             i += static_cast<std::size_t>(threads))
          out[i] = f(xs[i]);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

CmaResult cma_es(const Objective& objective, const Eigen::VectorXd& initial_mean,
                 const CmaConfig& config) {
  const auto d = initial_mean.size();
  if (d < 1) throw UsageError("cma_es: empty start point");
  if (!(config.sigma0 > 0.0)) throw ConfigError("cma_es: sigma0 must be positive");

  const int lambda = config.lambda > 0
                         ? config.lambda
                         : 4 + static_cast<int>(3.0 * std::log(static_cast<double>(d)));
  if (lambda < 2) throw ConfigError("cma_es: population size must be at least 2");
  const int mu = lambda / 2;

  // log-rank recombination weights
  Eigen::VectorXd weights(mu);
  for (int i = 0; i < mu; ++i)
    weights(i) = std::log((static_cast<double>(lambda) + 1.0) / 2.0) -
                 std::log(static_cast<double>(i) + 1.0);
  weights /= weights.sum();
  const double mu_eff = 1.0 / weights.squaredNorm();

  const auto dn = static_cast<double>(d);
  const double c_sigma = (mu_eff + 2.0) / (dn + mu_eff + 5.0);
  const double d_sigma =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (dn + 1.0)) - 1.0) + c_sigma;
  const double c_c = (4.0 + mu_eff / dn) / (dn + 4.0 + 2.0 * mu_eff / dn);
  const double c_1 = 2.0 / ((dn + 1.3) * (dn + 1.3) + mu_eff);
  const double c_mu = std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) /
                                              ((dn + 2.0) * (dn + 2.0) + mu_eff));
  const double chi_n = std::sqrt(dn) * (1.0 - 1.0 / (4.0 * dn) + 1.0 / (21.0 * dn * dn));

  Eigen::VectorXd mean = initial_mean;
  double sigma = config.sigma0;
  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd p_sigma = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd p_c = Eigen::VectorXd::Zero(d);

  Rng rng(config.seed);
  auto draw = [&](Eigen::VectorXd& z) {
    for (Eigen::Index i = 0; i < d; ++i) z(i) = rng.gauss();
  };

  CmaResult result;
  result.best_value = kInf;

  std::vector<Eigen::VectorXd> zs(static_cast<std::size_t>(lambda), Eigen::VectorXd(d));
  std::vector<Eigen::VectorXd> ys(static_cast<std::size_t>(lambda), Eigen::VectorXd(d));
  std::vector<Eigen::VectorXd> xs(static_cast<std::size_t>(lambda), Eigen::VectorXd(d));
  std::vector<double> fitness(static_cast<std::size_t>(lambda), kInf);
  std::vector<int> order(static_cast<std::size_t>(lambda));

  const std::size_t window =
      10 + static_cast<std::size_t>(30 * d / lambda) + 1;  // stagnation horizon
  std::deque<double> best_history;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen_solver;

  for (int gen = 0; gen < config.max_generations; ++gen) {
    eigen_solver.compute(C);
    if (eigen_solver.info() != Eigen::Success)
      throw OptimizationError("cma_es: covariance eigendecomposition failed");
    const Eigen::MatrixXd& B = eigen_solver.eigenvectors();
    Eigen::VectorXd D = eigen_solver.eigenvalues().cwiseMax(1e-30).cwiseSqrt();

    if (!std::isfinite(sigma) || sigma * D.maxCoeff() > 1e12) {
      result.stop_reason = "diverged";
      break;
    }
    if (sigma * D.maxCoeff() < 1e-16) {
      result.stop_reason = "step_collapse";
      break;
    }

    for (int k = 0; k < lambda; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      draw(zs[ku]);
      ys[ku] = B * (D.asDiagonal() * zs[ku]);
      xs[ku] = mean + sigma * ys[ku];
    }

    evaluate_population(objective, xs, fitness, config.eval_threads);
    result.evaluations += lambda;

    for (int k = 0; k < lambda; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      int retries = 0;
      while (!std::isfinite(fitness[ku])) {
        if (++retries > config.resample_cap)
          throw OptimizationError(
              "cma_es: objective stayed non-finite after resampling; check start point "
              "and parameterization");
        draw(zs[ku]);
        ys[ku] = B * (D.asDiagonal() * zs[ku]);
        xs[ku] = mean + sigma * ys[ku];
        fitness[ku] = objective(xs[ku]);
        ++result.evaluations;
      }
    }

    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double fa = fitness[static_cast<std::size_t>(a)];
      const double fb = fitness[static_cast<std::size_t>(b)];
      return fa != fb ? fa < fb : a < b;
    });

    const auto best_k = static_cast<std::size_t>(order[0]);
    const double gen_best = fitness[best_k];
    if (gen_best < result.best_value) {
      result.best_value = gen_best;
      result.best_x = xs[best_k];
    }
    if (config.record_trace)
      result.trace.push_back({gen, gen_best, result.best_value});
    result.generations = gen + 1;

    Eigen::VectorXd y_w = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < mu; ++i)
      y_w += weights(i) * ys[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    mean += sigma * y_w;

    // C^(-1/2) * y_w through the eigenbasis
    const Eigen::VectorXd c_inv_sqrt_y =
        B * D.cwiseInverse().asDiagonal() * (B.transpose() * y_w);
    p_sigma = (1.0 - c_sigma) * p_sigma +
              std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * c_inv_sqrt_y;

    const double expected_decay =
        std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * (static_cast<double>(gen) + 1.0)));
    const bool h_sigma =
        p_sigma.norm() / expected_decay < (1.4 + 2.0 / (dn + 1.0)) * chi_n;

    p_c = (1.0 - c_c) * p_c;
    if (h_sigma) p_c += std::sqrt(c_c * (2.0 - c_c) * mu_eff) * y_w;

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < mu; ++i) {
      const Eigen::VectorXd& y = ys[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
      rank_mu.noalias() += weights(i) * y * y.transpose();
    }
    const double h_correction = h_sigma ? 0.0 : c_c * (2.0 - c_c);
    C = (1.0 - c_1 - c_mu) * C + c_1 * (p_c * p_c.transpose() + h_correction * C) +
        c_mu * rank_mu;
    C = 0.5 * (C + C.transpose().eval());

    sigma *= std::exp((c_sigma / d_sigma) * (p_sigma.norm() / chi_n - 1.0));

    best_history.push_back(gen_best);
    if (best_history.size() > window) best_history.pop_front();
    if (best_history.size() == window) {
      const auto [lo, hi] = std::minmax_element(best_history.begin(), best_history.end());
      if (*hi - *lo <= config.tol_fun) {
        result.stop_reason = "tol_fun";
        break;
      }
    }
  }

  if (result.stop_reason.empty()) result.stop_reason = "max_generations";
  result.final_sigma = sigma;
  if (!result.best_x.size()) {
    result.best_x = mean;
    result.best_value = objective(mean);
    ++result.evaluations;
  }
  return result;
}

}  // namespace intens
