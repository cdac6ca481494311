#include "intens/rsa.hpp"

#include <cassert>
#include <cmath>

#include "intens/error.hpp"

namespace intens {

double sigmoid(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double denotation(double s, const Utterance& u, const SemanticParams& sem) {
  const ThresholdPair& thr = sem.pair(u.modifier);
  return sem.epsilon + (1.0 - sem.epsilon) * sigmoid((s - thr.lo) / sem.tau) *
                           sigmoid((thr.hi - s) / sem.tau);
}

Eigen::ArrayXd denotation_profile(const Utterance& u, const SemanticParams& sem,
                                  const StateGrid& grid) {
  Eigen::ArrayXd out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    out(i) = denotation(grid.points()(i), u, sem);
  return out;
}

Eigen::VectorXd literal_listener(const Utterance& u, const SemanticParams& sem,
                                 const StateGrid& grid) {
  Eigen::ArrayXd mass = denotation_profile(u, sem, grid) * grid.prior_mass();
  const double total = mass.sum();
  // epsilon > 0 and positive prior mass make a zero total impossible
  assert(total > 0.0);
  return (mass / total).matrix();
}

Eigen::VectorXd softmax(const Eigen::VectorXd& utilities) {
  const double m = utilities.maxCoeff();
  Eigen::ArrayXd e = (utilities.array() - m).exp();
  return (e / e.sum()).matrix();
}

namespace {

double social_term(const Utterance& u, const PragmaticParams& prag,
                   const SocialValues& social) {
  const double cost = u.modified() ? prag.modifier_cost : 0.0;
  return prag.social_weight * social.value(u.predicate, u.modifier) - cost;
}

}  // namespace

double speaker_utility(const Utterance& u, Eigen::Index state, const SemanticParams& sem,
                       const PragmaticParams& prag, const SocialValues& social,
                       const StateGrid& grid) {
  const Eigen::VectorXd l0 = literal_listener(u, sem, grid);
  return prag.informativity_weight * std::log(l0(state)) + social_term(u, prag, social);
}

Eigen::MatrixXd utility_matrix(std::span<const Utterance> alternatives,
                               const SemanticParams& sem, const PragmaticParams& prag,
                               const SocialValues& social, const StateGrid& grid) {
  const auto m = static_cast<Eigen::Index>(alternatives.size());
  Eigen::MatrixXd utilities(grid.size(), m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const Utterance& u = alternatives[static_cast<std::size_t>(j)];
    const Eigen::VectorXd l0 = literal_listener(u, sem, grid);
    const double soc = social_term(u, prag, social);
    for (Eigen::Index i = 0; i < grid.size(); ++i)
      utilities(i, j) = prag.informativity_weight * std::log(l0(i)) + soc;
  }
  return utilities;
}

Eigen::VectorXd speaker_dist(Eigen::Index state, std::span<const Utterance> alternatives,
                             const SemanticParams& sem, const PragmaticParams& prag,
                             const SocialValues& social, const StateGrid& grid) {
  if (alternatives.empty()) throw UsageError("speaker_dist: empty alternative set");
  const auto m = static_cast<Eigen::Index>(alternatives.size());
  Eigen::VectorXd utilities(m);
  for (Eigen::Index j = 0; j < m; ++j)
    utilities(j) =
        speaker_utility(alternatives[static_cast<std::size_t>(j)], state, sem, prag, social, grid);
  return softmax(utilities);
}

Eigen::MatrixXd speaker_matrix(const Eigen::MatrixXd& utilities) {
  Eigen::MatrixXd s1(utilities.rows(), utilities.cols());
  for (Eigen::Index i = 0; i < utilities.rows(); ++i)
    s1.row(i) = softmax(utilities.row(i).transpose()).transpose();
  return s1;
}

Eigen::VectorXd posterior_over_states(const Eigen::VectorXd& speaker_column,
                                      const StateGrid& grid) {
  Eigen::ArrayXd mass = speaker_column.array() * grid.prior_mass();
  const double total = mass.sum();
  assert(total > 0.0);
  return (mass / total).matrix();
}

Eigen::VectorXd pragmatic_listener(const Utterance& u, std::span<const Utterance> alternatives,
                                   const SemanticParams& sem, const PragmaticParams& prag,
                                   const SocialValues& social, const StateGrid& grid) {
  Eigen::Index idx = -1;
  for (std::size_t j = 0; j < alternatives.size(); ++j)
    if (alternatives[j] == u) {
      idx = static_cast<Eigen::Index>(j);
      break;
    }
  if (idx < 0) throw UsageError("pragmatic_listener: utterance not in alternative set");

  const Eigen::MatrixXd s1 = speaker_matrix(utility_matrix(alternatives, sem, prag, social, grid));
  return posterior_over_states(s1.col(idx), grid);
}

PredicateTable predicate_table(Predicate p, const SemanticParams& sem,
                               const PragmaticParams& prag, const SocialValues& social,
                               const StateGrid& grid) {
  const auto forms = utterance_forms(p);
  const Eigen::MatrixXd s1 = speaker_matrix(utility_matrix(forms, sem, prag, social, grid));
  PredicateTable table;
  table.l1.resize(grid.size(), kModifierCount);
  for (Eigen::Index j = 0; j < kModifierCount; ++j)
    table.l1.col(j) = posterior_over_states(s1.col(j), grid);
  return table;
}

}  // namespace intens
