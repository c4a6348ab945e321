#include "routeplace/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace routeplace {

namespace {

struct Span {
  double lo, hi;
};

// Overlap length of [s.lo, s.hi] with [b0, b1] and its derivative w.r.t. a shift of s.
inline void overlap_1d(Span s, double b0, double b1, double &len, double &dlen) {
  len = std::min(s.hi, b1) - std::max(s.lo, b0);
  if (len <= 0) {
    len = 0;
    dlen = 0;
    return;
  }
  dlen = (s.hi < b1 ? 1.0 : 0.0) - (s.lo > b0 ? 1.0 : 0.0);
}

}  // namespace

DensityModel::DensityModel(const LayoutRegion &region, int n, int m)
    : geo_(region, n, m), solver_((n < 2 || m < 2) ? throw DensityError("density grid must be at least 2x2") : n, m,
                                  region.width(), region.height()) {}

ObjectiveTerm DensityModel::evaluate(const Netlist &nl, const Placement &p, const std::vector<double> *widths,
                                     const std::vector<double> *heights, GridMap *psi_out) const {
  const int n = geo_.n, m = geo_.m, nc = nl.num_cells();
  const double px = geo_.pitch_x(), py = geo_.pitch_y(), bin_area = geo_.bin_area();
  const double min_w = std::numbers::sqrt2 * px, min_h = std::numbers::sqrt2 * py;

  std::vector<Span> sx(nc), sy(nc);
  std::vector<double> scale(nc);
  for (int v = 0; v < nc; ++v) {
    double w = widths ? (*widths)[v] : nl.cells[v].width;
    double h = heights ? (*heights)[v] : nl.cells[v].height;
    double cx = p.x[v] + 0.5 * w, cy = p.y[v] + 0.5 * h;
    double ew = std::max(w, min_w), eh = std::max(h, min_h);
    sx[v] = {cx - 0.5 * ew, cx + 0.5 * ew};
    sy[v] = {cy - 0.5 * eh, cy + 0.5 * eh};
    scale[v] = (w * h) / (ew * eh);
  }

  std::vector<double> rho(static_cast<std::size_t>(n) * m, 0.0);
  double len_x, len_y, dx, dy;
  for (int v = 0; v < nc; ++v) {
    auto [i0, i1] = overlapped_range(sx[v].lo, sx[v].hi, geo_.region.x0, px, n);
    auto [j0, j1] = overlapped_range(sy[v].lo, sy[v].hi, geo_.region.y0, py, m);
    for (int i = i0; i <= i1; ++i) {
      overlap_1d(sx[v], geo_.lo_x(i), geo_.hi_x(i), len_x, dx);
      if (len_x == 0) continue;
      for (int j = j0; j <= j1; ++j) {
        overlap_1d(sy[v], geo_.lo_y(j), geo_.hi_y(j), len_y, dy);
        rho[static_cast<std::size_t>(i) * m + j] += scale[v] * len_x * len_y / bin_area;
      }
    }
  }
  double mean = 0.0;
  for (double r : rho) mean += r;
  mean /= static_cast<double>(rho.size());
  for (double &r : rho) r -= mean;
  const std::vector<double> psi = solver_.solve(rho);

  ObjectiveTerm out;
  out.grad_x.assign(nc, 0.0);
  out.grad_y.assign(nc, 0.0);
  for (int v = 0; v < nc; ++v) {
    auto [i0, i1] = overlapped_range(sx[v].lo, sx[v].hi, geo_.region.x0, px, n);
    auto [j0, j1] = overlapped_range(sy[v].lo, sy[v].hi, geo_.region.y0, py, m);
    double val = 0, gx = 0, gy = 0;
    for (int i = i0; i <= i1; ++i) {
      overlap_1d(sx[v], geo_.lo_x(i), geo_.hi_x(i), len_x, dx);
      if (len_x == 0) continue;
      for (int j = j0; j <= j1; ++j) {
        overlap_1d(sy[v], geo_.lo_y(j), geo_.hi_y(j), len_y, dy);
        double ps = psi[static_cast<std::size_t>(i) * m + j];
        val += len_x * len_y * ps;
        gx += dx * len_y * ps;
        gy += len_x * dy * ps;
      }
    }
    out.value += scale[v] * val;
    if (!nl.cells[v].fixed) {
      out.grad_x[v] = 2.0 * scale[v] * gx;
      out.grad_y[v] = 2.0 * scale[v] * gy;
    }
  }
  if (psi_out) {
    *psi_out = GridMap(n, m);
    psi_out->v = psi;
  }
  return out;
}

ObjectiveTerm density(const Netlist &nl, const Placement &p, int n, int m) {
  return DensityModel(nl.region, n, m).evaluate(nl, p);
}

}  // namespace routeplace
