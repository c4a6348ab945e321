#include "routeplace/routegraph.hpp"

#include <cmath>
#include <limits>

namespace routeplace {

namespace {

// Counting-sort construction of a CSR from (source, item) pairs given in item order.
Csr make_csr(int sources, const std::vector<int> &source_of_item) {
  Csr c;
  c.offsets.assign(sources + 1, 0);
  for (int s : source_of_item) ++c.offsets[s + 1];
  for (int s = 0; s < sources; ++s) c.offsets[s + 1] += c.offsets[s];
  c.entries.resize(source_of_item.size());
  std::vector<int> cursor(c.offsets.begin(), c.offsets.end() - 1);
  for (int item = 0; item < static_cast<int>(source_of_item.size()); ++item) {
    c.entries[cursor[source_of_item[item]]++] = item;
  }
  return c;
}

}  // namespace

RouteGraph build_routegraph(const Netlist &nl, const Placement &p) {
  const GridGeometry geo = nl.geometry();
  if (geo.n < 1 || geo.m < 1) throw GraphError("routing grid must be at least 1x1");
  RouteGraph g;
  g.num_cells = nl.num_cells();
  g.num_nets = nl.num_nets();
  g.n = geo.n;
  g.m = geo.m;

  g.topo_cell.resize(nl.pins.size());
  g.topo_net.resize(nl.pins.size());
  for (int q = 0; q < nl.num_pins(); ++q) {
    g.topo_cell[q] = nl.pins[q].cell;
    g.topo_net[q] = nl.pins[q].net;
  }
  g.net_topo = make_csr(g.num_nets, g.topo_net);
  g.cell_topo = make_csr(g.num_cells, g.topo_cell);

  const double tol_x = 1e-6 * nl.region.width(), tol_y = 1e-6 * nl.region.height();
  g.cell_grid.resize(g.num_cells);
  for (int v = 0; v < g.num_cells; ++v) {
    double cx = p.x[v] + 0.5 * nl.cells[v].width;
    double cy = p.y[v] + 0.5 * nl.cells[v].height;
    if (!std::isfinite(cx) || !std::isfinite(cy) || cx < nl.region.x0 - tol_x || cx > nl.region.x1 + tol_x ||
        cy < nl.region.y0 - tol_y || cy > nl.region.y1 + tol_y) {
      throw GraphError("cell " + std::to_string(v) + " centre lies outside the region");
    }
    g.cell_grid[v] = geo.column(cx) * geo.m + geo.row(cy);
  }
  g.grid_cells = make_csr(g.num_grids(), g.cell_grid);

  g.geom_edges.reserve(static_cast<std::size_t>(2 * geo.n * geo.m - geo.n - geo.m));
  for (int i = 0; i < geo.n; ++i) {
    for (int j = 0; j < geo.m; ++j) {
      int a = i * geo.m + j;
      if (i + 1 < geo.n) g.geom_edges.emplace_back(a, a + geo.m);
      if (j + 1 < geo.m) g.geom_edges.emplace_back(a, a + 1);
    }
  }
  // Both traversal directions; the neighbour entries hold grid ids.
  std::vector<int> src, dst;
  src.reserve(2 * g.geom_edges.size());
  dst.reserve(2 * g.geom_edges.size());
  for (auto [a, b] : g.geom_edges) {
    src.push_back(a);
    dst.push_back(b);
    src.push_back(b);
    dst.push_back(a);
  }
  g.grid_neighbors = make_csr(g.num_grids(), src);
  for (int &e : g.grid_neighbors.entries) e = dst[e];
  return g;
}

RawFeatures build_features(const Netlist &nl, const Placement &p, const RouteGraph &g, const RudyMap &rudy,
                           const GeomFeature &geom) {
  const GridGeometry geo = nl.geometry();
  RawFeatures f;
  f.cell.resize(g.num_cells, RawFeatures::kCell);
  for (int v = 0; v < g.num_cells; ++v) {
    f.cell(v, 0) = nl.cells[v].width;
    f.cell(v, 1) = nl.cells[v].height;
    f.cell(v, 2) = g.cell_topo.degree(v);
    f.cell(v, RawFeatures::kGh) = geom.g_h[v];
    f.cell(v, RawFeatures::kGv) = geom.g_v[v];
  }
  f.net.resize(g.num_nets, RawFeatures::kNet);
  for (int u = 0; u < g.num_nets; ++u) {
    double xl = std::numeric_limits<double>::infinity(), xh = -xl, yl = xl, yh = -xl;
    for (int k = g.net_topo.offsets[u]; k < g.net_topo.offsets[u + 1]; ++k) {
      int q = g.net_topo.entries[k];
      double x = pin_x(nl, p, q), y = pin_y(nl, p, q);
      xl = std::min(xl, x);
      xh = std::max(xh, x);
      yl = std::min(yl, y);
      yh = std::max(yh, y);
    }
    bool empty = g.net_topo.degree(u) == 0;
    f.net(u, 0) = empty ? 0.0 : xh - xl;
    f.net(u, 1) = empty ? 0.0 : yh - yl;
    f.net(u, 2) = g.net_topo.degree(u);
  }
  f.grid.resize(g.num_grids(), RawFeatures::kGrid);
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.m; ++j) {
      int c = i * g.m + j;
      f.grid(c, 0) = rudy.rudy_h.at(i, j);
      f.grid(c, 1) = rudy.rudy_v.at(i, j);
      f.grid(c, 2) = geo.center_x(i);
      f.grid(c, 3) = geo.center_y(j);
    }
  }
  f.topo.resize(g.num_topo_edges(), RawFeatures::kTopo);
  for (int q = 0; q < g.num_topo_edges(); ++q) {
    bool out = nl.pins[q].direction == PinDirection::Output;
    f.topo(q, 0) = out ? 0.0 : 1.0;
    f.topo(q, 1) = out ? 1.0 : 0.0;
  }
  f.grid_edge.resize(g.num_grid_edges(), RawFeatures::kGridEdge);
  for (int v = 0; v < g.num_cells; ++v) {
    int c = g.cell_grid[v];
    double dx = p.x[v] + 0.5 * nl.cells[v].width - geo.center_x(c / g.m);
    double dy = p.y[v] + 0.5 * nl.cells[v].height - geo.center_y(c % g.m);
    f.grid_edge(v, 0) = dx;
    f.grid_edge(v, 1) = dy;
    f.grid_edge(v, 2) = std::sqrt(dx * dx + dy * dy);
  }
  return f;
}

GraphBundle build_bundle(const Netlist &nl, const Placement &p) {
  GraphBundle b;
  b.rudy = compute_rudy(nl, p);
  b.geom = geom_features(nl, p, b.rudy);
  b.graph = build_routegraph(nl, p);
  b.features = build_features(nl, p, b.graph, b.rudy, b.geom);
  return b;
}

std::string dump_graph(const RouteGraph &g, int k) {
  std::string out = "cells " + std::to_string(g.num_cells) + "\nnets " + std::to_string(g.num_nets) + "\ngrids " +
                    std::to_string(g.num_grids()) + "\ntopo_edges " + std::to_string(g.num_topo_edges()) +
                    "\ngrid_edges " + std::to_string(g.num_grid_edges()) + "\ngeom_edges " +
                    std::to_string(g.num_geom_edges()) + "\n";
  for (int e = 0; e < std::min(k, g.num_topo_edges()); ++e) {
    out += "topo " + std::to_string(g.topo_cell[e]) + " " + std::to_string(g.topo_net[e]) + "\n";
  }
  for (int e = 0; e < std::min(k, g.num_grid_edges()); ++e) {
    out += "grid " + std::to_string(e) + " " + std::to_string(g.cell_grid[e]) + "\n";
  }
  for (int e = 0; e < std::min(k, g.num_geom_edges()); ++e) {
    out += "geom " + std::to_string(g.geom_edges[e].first) + " " + std::to_string(g.geom_edges[e].second) + "\n";
  }
  return out;
}

}  // namespace routeplace
