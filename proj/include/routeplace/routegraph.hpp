#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "routeplace/features.hpp"
#include "routeplace/netlist.hpp"

namespace routeplace {

/// Row-major dense matrix; one row per vertex or edge.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Compressed adjacency: items of source s are entries[offsets[s] .. offsets[s+1]).
struct Csr {
  std::vector<int> offsets;
  std::vector<int> entries;

  int degree(int s) const { return offsets[s + 1] - offsets[s]; }
};

/// Heterogeneous graph over cells, nets and grid cells.
///
/// topo-edges: one per pin (cell, net). grid-edges: one per cell, to the grid
/// containing its centre. geom-edges: 4-neighbour grid pairs, stored once.
struct RouteGraph {
  int num_cells = 0;
  int num_nets = 0;
  int n = 0, m = 0;

  std::vector<int> topo_cell;  // indexed by topo-edge id == pin id
  std::vector<int> topo_net;
  Csr net_topo;   // net -> topo-edge ids
  Csr cell_topo;  // cell -> topo-edge ids

  std::vector<int> cell_grid;  // grid-edge id == cell id
  Csr grid_cells;              // grid -> cell ids

  std::vector<std::pair<int, int>> geom_edges;
  Csr grid_neighbors;          // grid -> adjacent grid ids

  int num_grids() const { return n * m; }
  int num_topo_edges() const { return static_cast<int>(topo_cell.size()); }
  int num_grid_edges() const { return static_cast<int>(cell_grid.size()); }
  int num_geom_edges() const { return static_cast<int>(geom_edges.size()); }

  bool operator==(const RouteGraph &) const = default;
};

inline bool operator==(const Csr &a, const Csr &b) { return a.offsets == b.offsets && a.entries == b.entries; }

struct RawFeatures {
  static constexpr int kCell = 5;      // width, height, degree, g_h, g_v
  static constexpr int kNet = 3;       // span_w, span_h, degree
  static constexpr int kGrid = 4;      // rudy_h, rudy_v, center_x, center_y
  static constexpr int kTopo = 2;      // input, output one-hot
  static constexpr int kGridEdge = 3;  // dx, dy, distance from grid centre
  static constexpr int kGh = 3;        // column of g_h in cell features
  static constexpr int kGv = 4;

  Mat cell, net, grid, topo, grid_edge;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Builds the graph in O(|P| + |V| + n*m).
RouteGraph build_routegraph(const Netlist &netlist, const Placement &p);

RawFeatures build_features(const Netlist &netlist, const Placement &p, const RouteGraph &g, const RudyMap &rudy,
                           const GeomFeature &geom);

/// Convenience: RUDY, geometric features, graph and raw features in one go.
struct GraphBundle {
  RudyMap rudy;
  GeomFeature geom;
  RouteGraph graph;
  RawFeatures features;
};
GraphBundle build_bundle(const Netlist &netlist, const Placement &p);

/// Text dump: counts and the first `k` edges of each type.
std::string dump_graph(const RouteGraph &g, int k = 10);

}  // namespace routeplace
