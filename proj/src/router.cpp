#include "routeplace/router.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace routeplace {

double GridMap::max() const {
  double best = v.empty() ? 0.0 : v[0];
  for (double x : v) best = std::max(best, x);
  return best;
}

double GridMap::sum() const {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

std::pair<int, int> overlapped_range(double a, double b, double origin, double pitch, int count) {
  int lo = static_cast<int>(std::floor((a - origin) / pitch));
  int hi = static_cast<int>(std::ceil((b - origin) / pitch)) - 1;
  lo = std::clamp(lo, 0, count - 1);
  hi = std::clamp(hi, 0, count - 1);
  return {lo, std::max(lo, hi)};
}

namespace {

struct GridPoint {
  int i, j;
};

double path_overflow(const CongestionMap &c, bool horizontal_first, GridPoint a, GridPoint b) {
  double cost = 0.0;
  auto h_run = [&](int row, int i0, int i1) {
    for (int i = std::min(i0, i1); i < std::max(i0, i1); ++i) cost += std::max(0.0, c.usage_h.at(i, row) + 1 - c.cap_h);
  };
  auto v_run = [&](int col, int j0, int j1) {
    for (int j = std::min(j0, j1); j < std::max(j0, j1); ++j) cost += std::max(0.0, c.usage_v.at(col, j) + 1 - c.cap_v);
  };
  if (horizontal_first) {
    h_run(a.j, a.i, b.i);
    v_run(b.i, a.j, b.j);
  } else {
    v_run(a.i, a.j, b.j);
    h_run(b.j, a.i, b.i);
  }
  return cost;
}

void commit_path(CongestionMap &c, bool horizontal_first, GridPoint a, GridPoint b) {
  auto h_run = [&](int row, int i0, int i1) {
    for (int i = std::min(i0, i1); i < std::max(i0, i1); ++i) c.usage_h.at(i, row) += 1;
  };
  auto v_run = [&](int col, int j0, int j1) {
    for (int j = std::min(j0, j1); j < std::max(j0, j1); ++j) c.usage_v.at(col, j) += 1;
  };
  if (horizontal_first) {
    h_run(a.j, a.i, b.i);
    v_run(b.i, a.j, b.j);
  } else {
    v_run(a.i, a.j, b.j);
    h_run(b.j, a.i, b.i);
  }
}

}  // namespace

CongestionMap route(const Netlist &nl, const Placement &p, RouteStats *stats) {
  const GridGeometry geo = nl.geometry();
  CongestionMap c{GridMap(nl.grid.n, nl.grid.m), GridMap(nl.grid.n, nl.grid.m), nl.grid.cap_h, nl.grid.cap_v};
  RouteStats local;
  std::vector<GridPoint> pts;
  std::vector<int> dist, parent;
  std::vector<char> in_tree;

  for (int e = 0; e < nl.num_nets(); ++e) {
    const Net &net = nl.nets[e];
    if (net.pins.empty()) {
      ++local.skipped_nets;
      continue;
    }
    pts.clear();
    for (int q : net.pins) {
      double x = pin_x(nl, p, q), y = pin_y(nl, p, q);
      if (!std::isfinite(x) || !std::isfinite(y) || x < nl.region.x0 || x > nl.region.x1 || y < nl.region.y0 ||
          y > nl.region.y1) {
        throw RoutingError("pin " + std::to_string(q) + " of net " + std::to_string(e) + " lies outside the region");
      }
      pts.push_back({geo.column(x), geo.row(y)});
    }
    const int k = static_cast<int>(pts.size());
    dist.assign(k, std::numeric_limits<int>::max());
    parent.assign(k, -1);
    in_tree.assign(k, 0);
    dist[0] = 0;
    for (int step = 0; step < k; ++step) {
      int u = -1;
      for (int q = 0; q < k; ++q) {
        if (!in_tree[q] && (u < 0 || dist[q] < dist[u])) u = q;
      }
      in_tree[u] = 1;
      if (parent[u] >= 0) {
        GridPoint a = pts[parent[u]], b = pts[u];
        bool hfirst = path_overflow(c, true, a, b) <= path_overflow(c, false, a, b);
        commit_path(c, hfirst, a, b);
        ++local.segments;
      }
      for (int q = 0; q < k; ++q) {
        if (in_tree[q]) continue;
        int d = std::abs(pts[q].i - pts[u].i) + std::abs(pts[q].j - pts[u].j);
        if (d < dist[q]) {
          dist[q] = d;
          parent[q] = u;
        }
      }
    }
  }
  if (stats) *stats = local;
  return c;
}

OverflowReport overflow_metrics(const CongestionMap &c) {
  OverflowReport r;
  r.of_map = GridMap(c.n(), c.m());
  double max_h = 0.0, max_v = 0.0;
  for (std::size_t k = 0; k < c.usage_h.size(); ++k) {
    double oh = std::max(0.0, c.usage_h.v[k] - c.cap_h);
    double ov = std::max(0.0, c.usage_v.v[k] - c.cap_v);
    r.of_map.v[k] = oh + ov;
    r.tof += oh + ov;
    r.mof = std::max(r.mof, oh + ov);
    max_h = std::max(max_h, oh);
    max_v = std::max(max_v, ov);
  }
  r.h_cr = max_h / c.cap_h;
  r.v_cr = max_v / c.cap_v;
  return r;
}

std::vector<double> cell_labels(const Netlist &nl, const Placement &p, const CongestionMap &c) {
  const OverflowReport r = overflow_metrics(c);
  const GridGeometry geo = nl.geometry();
  std::vector<double> labels(nl.cells.size(), 0.0);
  for (int v = 0; v < nl.num_cells(); ++v) {
    const Cell &cell = nl.cells[v];
    auto [i0, i1] = overlapped_range(p.x[v], p.x[v] + cell.width, nl.region.x0, geo.pitch_x(), geo.n);
    auto [j0, j1] = overlapped_range(p.y[v], p.y[v] + cell.height, nl.region.y0, geo.pitch_y(), geo.m);
    double best = 0.0;
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j) best = std::max(best, r.of_map.at(i, j));
    labels[v] = best;
  }
  return labels;
}

GridMap congestion_ratio(const CongestionMap &c) {
  GridMap out(c.n(), c.m());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out.v[k] = std::max(c.usage_h.v[k] / c.cap_h, c.usage_v.v[k] / c.cap_v);
  }
  return out;
}

double electric_overflow(const Netlist &nl, const Placement &p, double target_density,
                         const std::vector<double> *widths, const std::vector<double> *heights) {
  const GridGeometry geo = nl.geometry();
  GridMap area(geo.n, geo.m);
  double movable_area = 0.0;
  for (int v = 0; v < nl.num_cells(); ++v) {
    const Cell &cell = nl.cells[v];
    if (cell.fixed) continue;
    double w = widths ? (*widths)[v] : cell.width;
    double h = heights ? (*heights)[v] : cell.height;
    movable_area += w * h;
    double xl = p.x[v], xh = p.x[v] + w, yl = p.y[v], yh = p.y[v] + h;
    auto [i0, i1] = overlapped_range(xl, xh, geo.region.x0, geo.pitch_x(), geo.n);
    auto [j0, j1] = overlapped_range(yl, yh, geo.region.y0, geo.pitch_y(), geo.m);
    for (int i = i0; i <= i1; ++i) {
      double ox = std::min(xh, geo.hi_x(i)) - std::max(xl, geo.lo_x(i));
      if (ox <= 0) continue;
      for (int j = j0; j <= j1; ++j) {
        double oy = std::min(yh, geo.hi_y(j)) - std::max(yl, geo.lo_y(j));
        if (oy > 0) area.at(i, j) += ox * oy;
      }
    }
  }
  if (movable_area <= 0) return 0.0;
  const double cap = target_density * geo.bin_area();
  double over = 0.0;
  for (double a : area.v) over += std::max(0.0, a - cap);
  return over / movable_area;
}

std::string write_congestion_map(const CongestionMap &c, std::string_view header) {
  std::string out = std::string(header) + " " + std::to_string(c.n()) + " " + std::to_string(c.m()) + " " +
                    format_double(c.cap_h) + " " + format_double(c.cap_v) + "\n";
  for (int i = 0; i < c.n(); ++i) {
    for (int j = 0; j < c.m(); ++j) {
      out += std::to_string(i) + " " + std::to_string(j) + " " + format_double(c.usage_h.at(i, j)) + " " +
             format_double(c.usage_v.at(i, j)) + "\n";
    }
  }
  return out;
}

CongestionMap read_congestion_map(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string tag;
  int n = 0, m = 0;
  CongestionMap c;
  if (!(in >> tag >> n >> m >> c.cap_h >> c.cap_v) || (tag != "congmap" && tag != "rudymap") || n < 1 || m < 1) {
    throw RoutingError("bad congestion map header");
  }
  c.usage_h = GridMap(n, m);
  c.usage_v = GridMap(n, m);
  std::vector<char> seen(static_cast<std::size_t>(n) * m, 0);
  for (long long k = 0; k < static_cast<long long>(n) * m; ++k) {
    int i, j;
    double uh, uv;
    if (!(in >> i >> j >> uh >> uv)) throw RoutingError("congestion map truncated at entry " + std::to_string(k));
    if (i < 0 || i >= n || j < 0 || j >= m) throw RoutingError("congestion map index out of range");
    c.usage_h.at(i, j) = uh;
    c.usage_v.at(i, j) = uv;
    seen[static_cast<std::size_t>(i) * m + j] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw RoutingError("congestion map has duplicate entries");
  return c;
}

std::string write_overflow_report(const OverflowReport &r) {
  std::string out;
  out += "tof " + format_double(r.tof) + "\n";
  out += "mof " + format_double(r.mof) + "\n";
  out += "h_cr " + format_double(r.h_cr) + "\n";
  out += "v_cr " + format_double(r.v_cr) + "\n";
  return out;
}

}  // namespace routeplace
