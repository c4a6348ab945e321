#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "routeplace/netlist.hpp"
#include "routeplace/router.hpp"

namespace routeplace {

struct RudyMap {
  GridMap rudy_h;
  GridMap rudy_v;
};

/// RUDY demand maps. A net whose bounding box has zero width (height) is
/// widened to one grid pitch around its centre along that axis.
RudyMap compute_rudy(const Netlist &netlist, const Placement &p);

/// Soft assignment of each cell to the 3x3 block of grids around the grid that
/// contains its centre (clipped to stay in bounds). Weights are a softmax over
/// 1 / (dis + eps) with dis measured in grid pitches.
struct GeomFeature {
  static constexpr int kNeighbors = 9;
  static constexpr double kEpsilon = 1e-6;  // in grid pitches

  std::vector<double> g_h;
  std::vector<double> g_v;
  std::vector<std::array<int, kNeighbors>> grids;       // flat grid ids
  std::vector<std::array<double, kNeighbors>> weights;
  std::vector<std::array<double, kNeighbors>> dis;
};

struct GeomJacobian {
  // Derivatives with respect to the cell's lower-left position.
  std::vector<double> dgh_dx, dgh_dy, dgv_dx, dgv_dy;
};

class FeatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lower-left grid (i0, j0) of each cell's 3x3 block.
using BlockOrigins = std::vector<std::array<int, 2>>;

BlockOrigins block_origins(const GeomFeature &features, int m);

/// `blocks` pins each cell's 3x3 block instead of following its centre, which
/// keeps g_h, g_v smooth in position while a cell crosses a grid boundary.
GeomFeature geom_features(const Netlist &netlist, const Placement &p, const RudyMap &rudy,
                          const BlockOrigins *blocks = nullptr);

/// Analytic Jacobian of (g_h, g_v) with RUDY (and `blocks`, when given) held constant.
GeomJacobian geom_jacobian(const Netlist &netlist, const Placement &p, const RudyMap &rudy,
                           const BlockOrigins *blocks = nullptr);

}  // namespace routeplace
