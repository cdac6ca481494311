#ifndef INTENS_TESTS_ORACLES_HPP
#define INTENS_TESTS_ORACLES_HPP

// Brute-force reference implementations, written with plain loops and scalar
// arithmetic so library results can be checked against an independent path.

#include <cmath>
#include <vector>

#include "intens/grid.hpp"
#include "intens/params.hpp"
#include "intens/types.hpp"

namespace oracles {

// Prior restricted to [a, b] and renormalized; the hard-indicator limit of
// the literal listener.
inline std::vector<double> truncated_prior(const intens::StateGrid& grid, double a, double b) {
  std::vector<double> mass(static_cast<std::size_t>(grid.size()), 0.0);
  double total = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double s = grid.points()(i);
    if (s >= a && s <= b) {
      mass[static_cast<std::size_t>(i)] = grid.prior_mass()(i);
      total += grid.prior_mass()(i);
    }
  }
  for (double& m : mass) m /= total;
  return mass;
}

inline double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Full scalar re-derivation of the pragmatic listener for one utterance among
// an explicit alternative set, using nothing from the library internals.
struct ScalarModel {
  std::vector<double> points;
  std::vector<double> prior;  // normalized
  double tau = 0.2;
  double epsilon = 1e-4;
  double phi_i = 1.0;
  double phi_s = 0.0;
  double cost = 0.0;

  struct Alt {
    double lo, hi;
    double politeness;
    bool modified;
  };
  std::vector<Alt> alts;

  double denot(double s, const Alt& a) const {
    return epsilon + (1.0 - epsilon) * sig((s - a.lo) / tau) * sig((a.hi - s) / tau);
  }

  std::vector<double> literal(const Alt& a) const {
    std::vector<double> m(points.size());
    double z = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      m[i] = denot(points[i], a) * prior[i];
      z += m[i];
    }
    for (double& x : m) x /= z;
    return m;
  }

  double utility(std::size_t alt, std::size_t state) const {
    const Alt& a = alts[alt];
    const auto l0 = literal(a);
    return phi_i * std::log(l0[state]) + phi_s * a.politeness - (a.modified ? cost : 0.0);
  }

  std::vector<double> speaker(std::size_t state) const {
    std::vector<double> u(alts.size());
    double mx = -1e300;
    for (std::size_t j = 0; j < alts.size(); ++j) {
      u[j] = utility(j, state);
      mx = std::max(mx, u[j]);
    }
    double z = 0.0;
    for (double& x : u) {
      x = std::exp(x - mx);
      z += x;
    }
    for (double& x : u) x /= z;
    return u;
  }

  std::vector<double> pragmatic(std::size_t alt) const {
    std::vector<double> m(points.size());
    double z = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      m[i] = speaker(i)[alt] * prior[i];
      z += m[i];
    }
    for (double& x : m) x /= z;
    return m;
  }
};

}  // namespace oracles

#endif
