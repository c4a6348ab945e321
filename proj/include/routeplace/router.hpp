#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "routeplace/netlist.hpp"

namespace routeplace {

/// n x m field over the routing grid, flat index i * m + j.
struct GridMap {
  int n = 0, m = 0;
  std::vector<double> v;

  GridMap() = default;
  GridMap(int n_, int m_, double fill = 0.0) : n(n_), m(m_), v(static_cast<std::size_t>(n_) * m_, fill) {}

  double &at(int i, int j) { return v[static_cast<std::size_t>(i) * m + j]; }
  double at(int i, int j) const { return v[static_cast<std::size_t>(i) * m + j]; }
  std::size_t size() const { return v.size(); }
  double max() const;
  double sum() const;

  bool operator==(const GridMap &) const = default;
};

struct CongestionMap {
  GridMap usage_h;
  GridMap usage_v;
  double cap_h = 1.0;
  double cap_v = 1.0;

  int n() const { return usage_h.n; }
  int m() const { return usage_h.m; }
  /// Total routed wirelength in grid-edge units.
  double routed_wirelength() const { return usage_h.sum() + usage_v.sum(); }

  bool operator==(const CongestionMap &) const = default;
};

struct OverflowReport {
  double tof = 0.0;
  double mof = 0.0;
  double h_cr = 0.0;
  double v_cr = 0.0;
  GridMap of_map;
};

struct RouteStats {
  int segments = 0;
  int skipped_nets = 0;
};

class RoutingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic L-shape pattern router.
///
/// Each net is decomposed by Prim's minimum spanning tree over its pins' grid
/// locations (Manhattan distance, ties to the lower pin index). Each two-pin
/// segment takes the L whose cells would carry the lower summed overflow after
/// adding the wire, horizontal-first on ties. A wire crossing from grid i to
/// i + 1 is charged to grid i.
CongestionMap route(const Netlist &netlist, const Placement &p, RouteStats *stats = nullptr);

OverflowReport overflow_metrics(const CongestionMap &c);

/// Per-cell label: max overflow over the grids the cell rectangle overlaps.
std::vector<double> cell_labels(const Netlist &netlist, const Placement &p, const CongestionMap &c);

/// Per-grid congestion ratio max(usage_h / cap_h, usage_v / cap_v).
GridMap congestion_ratio(const CongestionMap &c);

/// Overflow of movable-cell area against target_density * bin area,
/// normalised by total movable area. Optional size overrides are used by the
/// inflation loop.
double electric_overflow(const Netlist &netlist, const Placement &p, double target_density = 1.0,
                         const std::vector<double> *widths = nullptr, const std::vector<double> *heights = nullptr);

/// Grid index range [lo, hi] overlapped with positive area by [a, b) along one axis.
std::pair<int, int> overlapped_range(double a, double b, double origin, double pitch, int count);

std::string write_congestion_map(const CongestionMap &c, std::string_view header = "congmap");
CongestionMap read_congestion_map(std::string_view text);
std::string write_overflow_report(const OverflowReport &r);

}  // namespace routeplace
