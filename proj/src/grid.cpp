#include "svcgp/grid.hpp"

#include <string>

#include "svcgp/errors.hpp"

namespace svcgp {

Grid::Grid(const Domain& domain, int side) : domain_(domain), side_(side) {
  if (side < 1) throw ConfigError("grid side must be >= 1, got " + std::to_string(side));
  if (!(domain.x_max > domain.x_min) || !(domain.y_max > domain.y_min))
    throw ConfigError("grid domain must have positive extent");
  dx_ = domain.width() / side;
  dy_ = domain.height() / side;
  pts_.resize(size(), 2);
  for (int iy = 0; iy < side; ++iy) {
    for (int ix = 0; ix < side; ++ix) {
      const int k = iy * side + ix;
      pts_(k, 0) = domain.x_min + (ix + 0.5) * dx_;
      pts_(k, 1) = domain.y_min + (iy + 0.5) * dy_;
    }
  }
}

int Grid::nearest(double x, double y) const { return nearest_point(pts_, x, y); }

int nearest_point(const Eigen::MatrixX2d& points, double x, double y) {
  if (points.rows() == 0) throw DomainError("nearest_point: empty point set");
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < points.rows(); ++k) {
    const double dx = points(k, 0) - x;
    const double dy = points(k, 1) - y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {  // strict: keeps the lowest index on exact ties
      best_d2 = d2;
      best = k;
    }
  }
  return best;
}

GridPair::GridPair(const Domain& domain, int fine_side, int coarse_side)
    : fine(domain, fine_side), coarse(domain, coarse_side) {
  fine_to_coarse.resize(fine.size());
  coarse_to_fine.resize(coarse.size());
  for (int k = 0; k < fine.size(); ++k) {
    const int s = coarse.nearest(fine.points()(k, 0), fine.points()(k, 1));
    fine_to_coarse[k] = s;
    coarse_to_fine[s].push_back(k);
  }
}

GridPair build_grids(const GridSpec& spec) {
  if (spec.coarse_side < 2)
    throw ConfigError("build_grids: coarse side must be >= 2, got " +
                      std::to_string(spec.coarse_side));
  if (spec.fine_side < spec.coarse_side)
    throw ConfigError("build_grids: fine side must be >= coarse side");
  return GridPair(spec.extent, spec.fine_side, spec.coarse_side);
}

}  // namespace svcgp
