#include "intens/grid.hpp"

#include <cmath>

#include "intens/error.hpp"

namespace intens {

StateGrid StateGrid::gaussian(Eigen::Index n_points, double half_range) {
  if (n_points < 2) throw ConfigError("state grid needs at least 2 points");
  if (!(half_range > 0.0)) throw ConfigError("state grid half-range must be positive");

  const double spacing = 2.0 * half_range / static_cast<double>(n_points - 1);
  Eigen::ArrayXd points(n_points);
  for (Eigen::Index i = 0; i < n_points; ++i)
    points(i) = -half_range + spacing * static_cast<double>(i);

  // The 1/sqrt(2*pi) factor cancels under normalization.
  Eigen::ArrayXd mass = (-0.5 * points.square()).exp();
  mass /= mass.sum();
  return StateGrid(std::move(points), std::move(mass), spacing);
}

Eigen::Index StateGrid::nearest_index(double s) const {
  const double t = (s - points_(0)) / spacing_;
  const auto i = static_cast<Eigen::Index>(std::lround(t));
  if (i < 0) return 0;
  if (i >= points_.size()) return points_.size() - 1;
  return i;
}

}  // namespace intens
