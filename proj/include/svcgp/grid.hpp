#pragma once

#include <Eigen/Dense>
#include <vector>

namespace svcgp {

// Axis-aligned rectangular domain.
struct Domain {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
};

// Square lattice of cell centers over a domain: along each axis the domain
// is cut into `side` equal cells and the representative point is the cell
// center, x_i = x_min + (i + 0.5) * dx.  Linear index = iy * side + ix.
class Grid {
 public:
  Grid(const Domain& domain, int side);

  int side() const { return side_; }
  int size() const { return side_ * side_; }
  const Domain& domain() const { return domain_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }

  // n x 2 matrix of cell centers, row k = (x, y) of cell k.
  const Eigen::MatrixX2d& points() const { return pts_; }
  Eigen::Vector2d point(int k) const { return pts_.row(k).transpose(); }

  // Index of the lattice point nearest to (x, y); ties resolved in favor
  // of the lowest linear index.
  int nearest(double x, double y) const;

 private:
  Domain domain_;
  int side_;
  double dx_, dy_;
  Eigen::MatrixX2d pts_;
};

// A fine grid, a coarse grid over the same domain, and the map sending each
// fine cell to its nearest coarse cell (with the inverse cell lists).
struct GridPair {
  Grid fine;
  Grid coarse;
  std::vector<int> fine_to_coarse;               // size fine.size()
  std::vector<std::vector<int>> coarse_to_fine;  // size coarse.size()

  GridPair(const Domain& domain, int fine_side, int coarse_side);
};

// Request for a coarse/fine grid pair over one extent.
struct GridSpec {
  Domain extent;
  int fine_side = 2;
  int coarse_side = 2;
};

// Validated construction: requires fine_side >= coarse_side >= 2 and an
// extent with positive area.
GridPair build_grids(const GridSpec& spec);

// Nearest row of `points` (m x 2) to (x, y), lowest index on ties.
int nearest_point(const Eigen::MatrixX2d& points, double x, double y);

}  // namespace svcgp
