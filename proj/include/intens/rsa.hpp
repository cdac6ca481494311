#ifndef INTENS_RSA_HPP
#define INTENS_RSA_HPP

#include <Eigen/Dense>
#include <span>

#include "intens/grid.hpp"
#include "intens/params.hpp"
#include "intens/types.hpp"

namespace intens {

// All functions here are pure in their arguments and safe to call from many
// threads at once.

double sigmoid(double x);

/// Smooth double-threshold denotation:
///   epsilon + (1-epsilon) * sigmoid((s-lo)/tau) * sigmoid((hi-s)/tau)
/// Continuous in s and in the thresholds; lies in [epsilon, 1].
double denotation(double s, const Utterance& u, const SemanticParams& sem);

/// denotation evaluated at every grid point.
Eigen::ArrayXd denotation_profile(const Utterance& u, const SemanticParams& sem,
                                  const StateGrid& grid);

/// Literal listener: P(s|u) proportional to denotation(s,u) * prior(s).
/// Sums to one.
Eigen::VectorXd literal_listener(const Utterance& u, const SemanticParams& sem,
                                 const StateGrid& grid);

/// Softmax with max-subtraction; sums to one.
Eigen::VectorXd softmax(const Eigen::VectorXd& utilities);

/// Speaker utility at grid point `state`:
///   phi_i * ln P_L0(state|u) + phi_s * U_s(u) - cost(u)
/// where cost(u) is the modifier cost for modified forms and 0 for the bare form.
double speaker_utility(const Utterance& u, Eigen::Index state, const SemanticParams& sem,
                       const PragmaticParams& prag, const SocialValues& social,
                       const StateGrid& grid);

/// Utility of every alternative at every grid point; rows index states,
/// columns index alternatives.
Eigen::MatrixXd utility_matrix(std::span<const Utterance> alternatives,
                               const SemanticParams& sem, const PragmaticParams& prag,
                               const SocialValues& social, const StateGrid& grid);

/// Speaker production probabilities at grid point `state` over the
/// alternative set (softmax of utilities).
Eigen::VectorXd speaker_dist(Eigen::Index state, std::span<const Utterance> alternatives,
                             const SemanticParams& sem, const PragmaticParams& prag,
                             const SocialValues& social, const StateGrid& grid);

/// Row-wise softmax of a state-by-utterance utility matrix.
Eigen::MatrixXd speaker_matrix(const Eigen::MatrixXd& utilities);

/// Posterior over states given one speaker column: proportional to
/// speaker probability times prior, normalized.
Eigen::VectorXd posterior_over_states(const Eigen::VectorXd& speaker_column,
                                      const StateGrid& grid);

/// Pragmatic listener: inverts the speaker model by Bayes rule.
/// `u` must be a member of `alternatives`; throws UsageError otherwise.
Eigen::VectorXd pragmatic_listener(const Utterance& u, std::span<const Utterance> alternatives,
                                   const SemanticParams& sem, const PragmaticParams& prag,
                                   const SocialValues& social, const StateGrid& grid);

/// Pragmatic-listener posteriors for all six forms of one predicate,
/// one column per modifier slot. This is the unit of work in fitting.
struct PredicateTable {
  Eigen::MatrixXd l1;  // grid.size() x kModifierCount

  const Eigen::MatrixXd& posteriors() const { return l1; }
};

PredicateTable predicate_table(Predicate p, const SemanticParams& sem,
                               const PragmaticParams& prag, const SocialValues& social,
                               const StateGrid& grid);

}  // namespace intens

#endif
