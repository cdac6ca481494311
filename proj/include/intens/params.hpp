#ifndef INTENS_PARAMS_HPP
#define INTENS_PARAMS_HPP

#include <Eigen/Dense>
#include <array>

#include "intens/types.hpp"

namespace intens {

/// Lower/upper degree bounds of a literal meaning, in z-score units.
struct ThresholdPair {
  double lo = 0.0;
  double hi = 0.0;

  double midpoint() const { return 0.5 * (lo + hi); }
  double gap() const { return hi - lo; }

  friend bool operator==(const ThresholdPair&, const ThresholdPair&) = default;
};

/// Literal-meaning parameters: one threshold pair per modifier slot (the None
/// slot holds the baseline thresholds of the bare form), plus the smoothing
/// temperature and the compatibility floor.
struct SemanticParams {
  std::array<ThresholdPair, kModifierCount> thresholds{};
  double tau = 0.2;
  double epsilon = 1e-4;

  const ThresholdPair& pair(Modifier m) const {
    return thresholds[static_cast<std::size_t>(m)];
  }
  ThresholdPair& pair(Modifier m) { return thresholds[static_cast<std::size_t>(m)]; }

  /// Throws ConfigError on lo >= hi, non-positive tau, or epsilon outside (0, 0.01).
  void validate() const;
};

/// Speaker utility weights: informativity, social value, and the per-modifier
/// production cost.
struct PragmaticParams {
  double informativity_weight = 1.0;  // phi_i >= 0
  double social_weight = 0.0;         // phi_s, unconstrained
  double modifier_cost = 0.0;         // >= 0, charged once per modifier

  void validate() const;
};

struct CultureParams {
  SemanticParams semantics;
  PragmaticParams pragmatics;
};

/// One culture's mean politeness rating per (predicate, modifier) cell,
/// z-score units. Unset cells are NaN until filled.
class SocialValues {
 public:
  SocialValues();

  /// Throws DataError if the cell was never set.
  double value(Predicate p, Modifier m) const;
  void set(Predicate p, Modifier m, double v);
  bool has(Predicate p, Modifier m) const;

 private:
  Eigen::Matrix<double, kPredicateCount, kModifierCount> values_;
};

/// Politeness ratings for both countries; the social utility term U_s(w).
class PolitenessTable {
 public:
  SocialValues& slice(Country c) { return slices_[static_cast<std::size_t>(c)]; }
  const SocialValues& slice(Country c) const { return slices_[static_cast<std::size_t>(c)]; }

  double value(Country c, Predicate p, Modifier m) const { return slice(c).value(p, m); }
  void set(Country c, Predicate p, Modifier m, double v) { slice(c).set(p, m, v); }

  /// Throws DataError naming the first missing cell.
  void validate_complete() const;

 private:
  std::array<SocialValues, kCountryCount> slices_{};
};

}  // namespace intens

#endif
