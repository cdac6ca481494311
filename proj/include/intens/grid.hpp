#ifndef INTENS_GRID_HPP
#define INTENS_GRID_HPP

#include <Eigen/Dense>

namespace intens {

/// Uniform discretization of the latent degree scale (z-score units) with a
/// standard-normal prior mass renormalized over the grid points.
class StateGrid {
 public:
  /// Builds an n-point grid on [-half_range, half_range] whose prior mass is
  /// the standard-normal density at each point, normalized to sum to one.
  static StateGrid gaussian(Eigen::Index n_points = 101, double half_range = 4.0);

  const Eigen::ArrayXd& points() const { return points_; }
  const Eigen::ArrayXd& prior_mass() const { return prior_mass_; }
  Eigen::Index size() const { return points_.size(); }
  double lo() const { return points_(0); }
  double hi() const { return points_(points_.size() - 1); }
  double spacing() const { return spacing_; }

  /// Index of the grid point nearest to s; out-of-range values clamp to the
  /// boundary bins.
  Eigen::Index nearest_index(double s) const;

 private:
  StateGrid(Eigen::ArrayXd points, Eigen::ArrayXd prior_mass, double spacing)
      : points_(std::move(points)), prior_mass_(std::move(prior_mass)), spacing_(spacing) {}

  Eigen::ArrayXd points_;
  Eigen::ArrayXd prior_mass_;
  double spacing_;
};

}  // namespace intens

#endif
