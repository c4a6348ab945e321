#include "routeplace/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace routeplace {

RudyMap compute_rudy(const Netlist &nl, const Placement &p) {
  const GridGeometry geo = nl.geometry();
  RudyMap out{GridMap(geo.n, geo.m), GridMap(geo.n, geo.m)};
  const double px = geo.pitch_x(), py = geo.pitch_y();
  for (const Net &net : nl.nets) {
    if (net.pins.empty()) continue;
    double xl = std::numeric_limits<double>::infinity(), xh = -xl, yl = xl, yh = -xl;
    for (int q : net.pins) {
      double x = pin_x(nl, p, q), y = pin_y(nl, p, q);
      xl = std::min(xl, x);
      xh = std::max(xh, x);
      yl = std::min(yl, y);
      yh = std::max(yh, y);
    }
    if (xh - xl <= 0) {
      double c = 0.5 * (xl + xh);
      xl = c - 0.5 * px;
      xh = c + 0.5 * px;
    }
    if (yh - yl <= 0) {
      double c = 0.5 * (yl + yh);
      yl = c - 0.5 * py;
      yh = c + 0.5 * py;
    }
    const double inv_w = 1.0 / (xh - xl), inv_h = 1.0 / (yh - yl);
    auto [i0, i1] = overlapped_range(xl, xh, geo.region.x0, px, geo.n);
    auto [j0, j1] = overlapped_range(yl, yh, geo.region.y0, py, geo.m);
    for (int i = i0; i <= i1; ++i) {
      double ox = std::min(xh, geo.hi_x(i)) - std::max(xl, geo.lo_x(i));
      if (ox <= 0) continue;
      for (int j = j0; j <= j1; ++j) {
        double oy = std::min(yh, geo.hi_y(j)) - std::max(yl, geo.lo_y(j));
        if (oy <= 0) continue;
        double area = ox * oy;
        out.rudy_h.at(i, j) += area * inv_h;
        out.rudy_v.at(i, j) += area * inv_w;
      }
    }
  }
  return out;
}

namespace {

struct CellFrame {
  double cx, cy;
  int i0, j0;  // lower-left corner of the 3x3 block
};

CellFrame frame_of(const GridGeometry &geo, const Cell &cell, double x, double y, const BlockOrigins *blocks, int v) {
  CellFrame f;
  f.cx = x + 0.5 * cell.width;
  f.cy = y + 0.5 * cell.height;
  if (blocks) {
    f.i0 = (*blocks)[v][0];
    f.j0 = (*blocks)[v][1];
  } else {
    f.i0 = std::clamp(geo.column(f.cx) - 1, 0, geo.n - 3);
    f.j0 = std::clamp(geo.row(f.cy) - 1, 0, geo.m - 3);
  }
  return f;
}

void check_grid(const GridGeometry &geo) {
  if (geo.n < 3 || geo.m < 3) throw FeatureError("geometric features need a routing grid of at least 3x3");
}

}  // namespace

BlockOrigins block_origins(const GeomFeature &gf, int m) {
  BlockOrigins out(gf.grids.size());
  for (std::size_t v = 0; v < gf.grids.size(); ++v) out[v] = {gf.grids[v][0] / m, gf.grids[v][0] % m};
  return out;
}

GeomFeature geom_features(const Netlist &nl, const Placement &p, const RudyMap &rudy, const BlockOrigins *blocks) {
  const GridGeometry geo = nl.geometry();
  check_grid(geo);
  if (blocks && blocks->size() != nl.cells.size()) throw FeatureError("one block origin per cell is required");
  const int nc = nl.num_cells();
  GeomFeature gf;
  gf.g_h.resize(nc);
  gf.g_v.resize(nc);
  gf.grids.resize(nc);
  gf.weights.resize(nc);
  gf.dis.resize(nc);
  const double px = geo.pitch_x(), py = geo.pitch_y();
  for (int v = 0; v < nc; ++v) {
    CellFrame f = frame_of(geo, nl.cells[v], p.x[v], p.y[v], blocks, v);
    std::array<double, 9> logit;
    double lmax = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 9; ++k) {
      int i = f.i0 + k / 3, j = f.j0 + k % 3;
      double u = (f.cx - geo.center_x(i)) / px, w = (f.cy - geo.center_y(j)) / py;
      gf.grids[v][k] = geo.n > 0 ? i * geo.m + j : 0;
      gf.dis[v][k] = std::sqrt(u * u + w * w);
      logit[k] = 1.0 / (gf.dis[v][k] + GeomFeature::kEpsilon);
      lmax = std::max(lmax, logit[k]);
    }
    double z = 0.0;
    for (int k = 0; k < 9; ++k) {
      gf.weights[v][k] = std::exp(logit[k] - lmax);
      z += gf.weights[v][k];
    }
    double gh = 0.0, gv = 0.0;
    for (int k = 0; k < 9; ++k) {
      gf.weights[v][k] /= z;
      gh += gf.weights[v][k] * rudy.rudy_h.v[gf.grids[v][k]];
      gv += gf.weights[v][k] * rudy.rudy_v.v[gf.grids[v][k]];
    }
    gf.g_h[v] = gh;
    gf.g_v[v] = gv;
  }
  return gf;
}

GeomJacobian geom_jacobian(const Netlist &nl, const Placement &p, const RudyMap &rudy, const BlockOrigins *blocks) {
  const GridGeometry geo = nl.geometry();
  const GeomFeature gf = geom_features(nl, p, rudy, blocks);
  const int nc = nl.num_cells();
  GeomJacobian jac{std::vector<double>(nc), std::vector<double>(nc), std::vector<double>(nc),
                   std::vector<double>(nc)};
  const double px = geo.pitch_x(), py = geo.pitch_y();
  for (int v = 0; v < nc; ++v) {
    CellFrame f = frame_of(geo, nl.cells[v], p.x[v], p.y[v], blocks, v);
    double ghx = 0, ghy = 0, gvx = 0, gvy = 0;
    for (int k = 0; k < 9; ++k) {
      int i = f.i0 + k / 3, j = f.j0 + k % 3;
      double d = gf.dis[v][k];
      // d(logit)/d(dis) * d(dis)/d(position); the subgradient of dis at 0 is 0.
      double dl_dd = -1.0 / ((d + GeomFeature::kEpsilon) * (d + GeomFeature::kEpsilon));
      double dd_dx = d > 0 ? (f.cx - geo.center_x(i)) / (px * px * d) : 0.0;
      double dd_dy = d > 0 ? (f.cy - geo.center_y(j)) / (py * py * d) : 0.0;
      double w = gf.weights[v][k];
      int g = gf.grids[v][k];
      // d(sum_k w_k r_k) = sum_k w_k (r_k - g) dlogit_k
      double sh = w * (rudy.rudy_h.v[g] - gf.g_h[v]) * dl_dd;
      double sv = w * (rudy.rudy_v.v[g] - gf.g_v[v]) * dl_dd;
      ghx += sh * dd_dx;
      ghy += sh * dd_dy;
      gvx += sv * dd_dx;
      gvy += sv * dd_dy;
    }
    jac.dgh_dx[v] = ghx;
    jac.dgh_dy[v] = ghy;
    jac.dgv_dx[v] = gvx;
    jac.dgv_dy[v] = gvy;
  }
  return jac;
}

}  // namespace routeplace
