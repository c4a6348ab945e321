#pragma once

// Random instances, finite-difference helpers and brute-force reference
// implementations shared by the unit tests and the acceptance runner. The
// reference implementations deliberately avoid the library's helpers (grid
// range lookup, Eigen products, sorting-based ranks) so that they fail
// independently.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "routeplace/features.hpp"
#include "routeplace/gnn.hpp"
#include "routeplace/netlist.hpp"
#include "routeplace/routegraph.hpp"
#include "routeplace/router.hpp"

namespace rp_test {

using namespace routeplace;

inline double uniform(std::mt19937_64 &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64 &rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

struct RandomSpec {
  int cells = 10;
  int nets = 8;
  int max_degree = 4;
  int n = 4, m = 4;
  double width = 16.0, height = 16.0;
  double cap = 2.0;
  double fixed_fraction = 0.2;
};

/// Small random netlist with every cell inside the region and at least one pin
/// per net. Cell sizes are below one grid pitch.
inline Netlist random_netlist(std::mt19937_64 &rng, const RandomSpec &s) {
  Netlist nl;
  nl.region = {0.0, 0.0, s.width, s.height};
  nl.grid = {s.n, s.m, s.cap, s.cap};
  const double px = s.width / s.n, py = s.height / s.m;
  for (int c = 0; c < s.cells; ++c) {
    Cell cell;
    cell.width = uniform(rng, 0.2, 0.9) * px;
    cell.height = uniform(rng, 0.2, 0.9) * py;
    cell.fixed = uniform(rng, 0, 1) < s.fixed_fraction;
    if (cell.fixed) {
      cell.has_position = true;
      cell.x = uniform(rng, 0, s.width - cell.width);
      cell.y = uniform(rng, 0, s.height - cell.height);
    }
    nl.cells.push_back(cell);
  }
  for (int e = 0; e < s.nets; ++e) {
    Net net;
    int degree = uniform_int(rng, 2, s.max_degree);
    for (int k = 0; k < degree; ++k) {
      Pin pin;
      pin.cell = uniform_int(rng, 0, s.cells - 1);
      pin.net = e;
      pin.direction = k == 0 ? PinDirection::Output : PinDirection::Input;
      pin.dx = uniform(rng, 0, 1) * nl.cells[pin.cell].width;
      pin.dy = uniform(rng, 0, 1) * nl.cells[pin.cell].height;
      net.pins.push_back(static_cast<int>(nl.pins.size()));
      nl.pins.push_back(pin);
    }
    nl.nets.push_back(net);
  }
  return nl;
}

/// Fixed cells at their positions, movable cells uniformly inside the region.
inline Placement random_placement(std::mt19937_64 &rng, const Netlist &nl) {
  Placement p(nl.cells.size());
  for (int v = 0; v < nl.num_cells(); ++v) {
    const Cell &c = nl.cells[v];
    if (c.fixed) {
      p.x[v] = c.x;
      p.y[v] = c.y;
    } else {
      p.x[v] = uniform(rng, nl.region.x0, nl.region.x1 - c.width);
      p.y[v] = uniform(rng, nl.region.y0, nl.region.y1 - c.height);
    }
  }
  return p;
}

inline std::vector<double> random_unit(std::mt19937_64 &rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> u(n);
  double norm = 0;
  for (double &x : u) {
    x = g(rng);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (double &x : u) x /= norm;
  return u;
}

/// |a - b| / max(|a|, |b|, floor). The floor keeps the ratio meaningful when
/// both values are tiny compared with the function's overall gradient scale.
inline double rel_error(double a, double b, double floor = 1e-300) {
  double scale = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / scale;
}

/// Central difference of f along direction u with step h.
inline double directional_fd(const std::function<double(const std::vector<double> &)> &f, const std::vector<double> &x,
                             const std::vector<double> &u, double h) {
  std::vector<double> xp = x, xm = x;
  for (std::size_t k = 0; k < x.size(); ++k) {
    xp[k] += h * u[k];
    xm[k] -= h * u[k];
  }
  return (f(xp) - f(xm)) / (2 * h);
}

// ---------------------------------------------------------------------------
// Router, metrics and labels
// ---------------------------------------------------------------------------

inline int grid_column(const Netlist &nl, double x) {
  const double px = nl.region.width() / nl.grid.n;
  int i = 0;
  while (i + 1 < nl.grid.n && x >= nl.region.x0 + (i + 1) * px) ++i;
  return i;
}

inline int grid_row(const Netlist &nl, double y) {
  const double py = nl.region.height() / nl.grid.m;
  int j = 0;
  while (j + 1 < nl.grid.m && y >= nl.region.y0 + (j + 1) * py) ++j;
  return j;
}

/// Reference router: Prim's tree by exhaustive pair search, L-shape choice by
/// listing the grid edges of both candidate paths.
inline CongestionMap route_oracle(const Netlist &nl, const Placement &p) {
  const int n = nl.grid.n, m = nl.grid.m;
  std::vector<std::vector<double>> uh(n, std::vector<double>(m, 0.0)), uv = uh;
  struct Edge {
    bool horizontal;
    int i, j;
  };
  auto path = [](int ai, int aj, int bi, int bj, bool hfirst) {
    std::vector<Edge> edges;
    auto hrun = [&](int row, int x0, int x1) {
      for (int i = std::min(x0, x1); i < std::max(x0, x1); ++i) edges.push_back({true, i, row});
    };
    auto vrun = [&](int col, int y0, int y1) {
      for (int j = std::min(y0, y1); j < std::max(y0, y1); ++j) edges.push_back({false, col, j});
    };
    if (hfirst) {
      hrun(aj, ai, bi);
      vrun(bi, aj, bj);
    } else {
      vrun(ai, aj, bj);
      hrun(bj, ai, bi);
    }
    return edges;
  };
  for (const Net &net : nl.nets) {
    std::vector<std::pair<int, int>> pts;
    for (int q : net.pins) pts.push_back({grid_column(nl, pin_x(nl, p, q)), grid_row(nl, pin_y(nl, p, q))});
    const int k = static_cast<int>(pts.size());
    if (k == 0) continue;
    std::vector<int> order{0};  // tree nodes in insertion order
    std::vector<char> in(k, 0);
    in[0] = 1;
    while (static_cast<int>(order.size()) < k) {
      int best_q = -1, best_t = -1, best_d = std::numeric_limits<int>::max();
      for (int q = 0; q < k; ++q) {
        if (in[q]) continue;
        for (int t : order) {
          int d = std::abs(pts[q].first - pts[t].first) + std::abs(pts[q].second - pts[t].second);
          if (d < best_d || (d == best_d && q < best_q)) {
            best_d = d;
            best_q = q;
            best_t = t;
          }
        }
      }
      auto [ai, aj] = pts[best_t];
      auto [bi, bj] = pts[best_q];
      double cost[2];
      for (int h = 0; h < 2; ++h) {
        cost[h] = 0;
        for (const Edge &e : path(ai, aj, bi, bj, h == 0)) {
          double u = (e.horizontal ? uh : uv)[e.i][e.j] + 1;
          cost[h] += std::max(0.0, u - (e.horizontal ? nl.grid.cap_h : nl.grid.cap_v));
        }
      }
      for (const Edge &e : path(ai, aj, bi, bj, cost[0] <= cost[1])) (e.horizontal ? uh : uv)[e.i][e.j] += 1;
      in[best_q] = 1;
      order.push_back(best_q);
    }
  }
  CongestionMap c{GridMap(n, m), GridMap(n, m), nl.grid.cap_h, nl.grid.cap_v};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      c.usage_h.at(i, j) = uh[i][j];
      c.usage_v.at(i, j) = uv[i][j];
    }
  return c;
}

struct OverflowOracle {
  double tof = 0, mof = 0, h_cr = 0, v_cr = 0;
  std::vector<double> of;
};

inline OverflowOracle overflow_oracle(const CongestionMap &c) {
  OverflowOracle r;
  double mh = 0, mv = 0;
  for (int i = 0; i < c.n(); ++i)
    for (int j = 0; j < c.m(); ++j) {
      double oh = c.usage_h.at(i, j) > c.cap_h ? c.usage_h.at(i, j) - c.cap_h : 0.0;
      double ov = c.usage_v.at(i, j) > c.cap_v ? c.usage_v.at(i, j) - c.cap_v : 0.0;
      r.of.push_back(oh + ov);
      r.tof += oh + ov;
      if (oh + ov > r.mof) r.mof = oh + ov;
      if (oh > mh) mh = oh;
      if (ov > mv) mv = ov;
    }
  r.h_cr = mh / c.cap_h;
  r.v_cr = mv / c.cap_v;
  return r;
}

/// Overlap area of [ax0, ax1) x [ay0, ay1) with grid (i, j), computed from scratch.
inline double grid_overlap(const Netlist &nl, int i, int j, double ax0, double ax1, double ay0, double ay1) {
  const double px = nl.region.width() / nl.grid.n, py = nl.region.height() / nl.grid.m;
  double gx0 = nl.region.x0 + i * px, gx1 = i == nl.grid.n - 1 ? nl.region.x1 : nl.region.x0 + (i + 1) * px;
  double gy0 = nl.region.y0 + j * py, gy1 = j == nl.grid.m - 1 ? nl.region.y1 : nl.region.y0 + (j + 1) * py;
  double ox = std::min(ax1, gx1) - std::max(ax0, gx0);
  double oy = std::min(ay1, gy1) - std::max(ay0, gy0);
  return ox > 0 && oy > 0 ? ox * oy : 0.0;
}

inline std::vector<double> labels_oracle(const Netlist &nl, const Placement &p, const CongestionMap &c) {
  OverflowOracle r = overflow_oracle(c);
  std::vector<double> out(nl.cells.size(), 0.0);
  for (int v = 0; v < nl.num_cells(); ++v) {
    for (int i = 0; i < nl.grid.n; ++i)
      for (int j = 0; j < nl.grid.m; ++j) {
        double a = grid_overlap(nl, i, j, p.x[v], p.x[v] + nl.cells[v].width, p.y[v], p.y[v] + nl.cells[v].height);
        if (a > 0) out[v] = std::max(out[v], r.of[static_cast<std::size_t>(i) * nl.grid.m + j]);
      }
  }
  return out;
}

inline double eo_oracle(const Netlist &nl, const Placement &p, double target = 1.0) {
  const double bin = nl.region.area() / (nl.grid.n * nl.grid.m);
  double over = 0, total = 0;
  for (const Cell &c : nl.cells)
    if (!c.fixed) total += c.width * c.height;
  for (int i = 0; i < nl.grid.n; ++i)
    for (int j = 0; j < nl.grid.m; ++j) {
      double a = 0;
      for (int v = 0; v < nl.num_cells(); ++v) {
        if (nl.cells[v].fixed) continue;
        a += grid_overlap(nl, i, j, p.x[v], p.x[v] + nl.cells[v].width, p.y[v], p.y[v] + nl.cells[v].height);
      }
      over += std::max(0.0, a - target * bin);
    }
  return total > 0 ? over / total : 0.0;
}

// ---------------------------------------------------------------------------
// Features
// ---------------------------------------------------------------------------

/// RUDY by visiting every (net, grid) pair.
inline RudyMap rudy_oracle(const Netlist &nl, const Placement &p) {
  const double px = nl.region.width() / nl.grid.n, py = nl.region.height() / nl.grid.m;
  RudyMap r{GridMap(nl.grid.n, nl.grid.m), GridMap(nl.grid.n, nl.grid.m)};
  for (const Net &net : nl.nets) {
    std::vector<double> xs, ys;
    for (int q : net.pins) {
      xs.push_back(pin_x(nl, p, q));
      ys.push_back(pin_y(nl, p, q));
    }
    double x0 = *std::min_element(xs.begin(), xs.end()), x1 = *std::max_element(xs.begin(), xs.end());
    double y0 = *std::min_element(ys.begin(), ys.end()), y1 = *std::max_element(ys.begin(), ys.end());
    if (x1 == x0) {
      double c = x0;
      x0 = c - px / 2;
      x1 = c + px / 2;
    }
    if (y1 == y0) {
      double c = y0;
      y0 = c - py / 2;
      y1 = c + py / 2;
    }
    for (int i = 0; i < nl.grid.n; ++i)
      for (int j = 0; j < nl.grid.m; ++j) {
        double a = grid_overlap(nl, i, j, x0, x1, y0, y1);
        r.rudy_h.at(i, j) += a / (y1 - y0);
        r.rudy_v.at(i, j) += a / (x1 - x0);
      }
  }
  return r;
}

struct GeomOracle {
  double g_h = 0, g_v = 0;
  std::array<double, 9> weight{};
};

/// Geometric feature of one cell: the 3x3 block around its grid, shifted to
/// stay inside the grid, and a softmax over 1 / (dis + eps).
inline GeomOracle geom_oracle(const Netlist &nl, const Placement &p, const RudyMap &r, int v) {
  const double px = nl.region.width() / nl.grid.n, py = nl.region.height() / nl.grid.m;
  double cx = p.x[v] + nl.cells[v].width / 2, cy = p.y[v] + nl.cells[v].height / 2;
  int ci = grid_column(nl, cx), cj = grid_row(nl, cy);
  int i0 = ci - 1, j0 = cj - 1;
  if (i0 < 0) i0 = 0;
  if (j0 < 0) j0 = 0;
  if (i0 > nl.grid.n - 3) i0 = nl.grid.n - 3;
  if (j0 > nl.grid.m - 3) j0 = nl.grid.m - 3;
  long double logits[9], top = -1e300L;
  int ids[9];
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      int k = a * 3 + b, i = i0 + a, j = j0 + b;
      long double dx = (cx - (nl.region.x0 + (i + 0.5) * px)) / px;
      long double dy = (cy - (nl.region.y0 + (j + 0.5) * py)) / py;
      logits[k] = 1.0L / (std::sqrt(dx * dx + dy * dy) + 1e-6L);
      top = std::max(top, logits[k]);
      ids[k] = i * nl.grid.m + j;
    }
  long double z = 0;
  for (long double l : logits) z += std::exp(l - top);
  GeomOracle out;
  long double gh = 0, gv = 0;
  for (int k = 0; k < 9; ++k) {
    long double w = std::exp(logits[k] - top) / z;
    out.weight[k] = static_cast<double>(w);
    gh += w * r.rudy_h.v[ids[k]];
    gv += w * r.rudy_v.v[ids[k]];
  }
  out.g_h = static_cast<double>(gh);
  out.g_v = static_cast<double>(gv);
  return out;
}

// ---------------------------------------------------------------------------
// RouteGNN forward, written with explicit loops
// ---------------------------------------------------------------------------

using Rows = std::vector<std::vector<double>>;

inline Rows to_rows(const Mat &m) {
  Rows r(m.rows(), std::vector<double>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[i][j] = m(i, j);
  return r;
}

/// out[i] = sum_k W(i, k) x[k] (+ b[i]).
inline std::vector<double> matvec(const Mat &w, const std::vector<double> &x, const Eigen::RowVectorXd *b = nullptr) {
  std::vector<double> out(w.rows(), 0.0);
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    double s = b ? (*b)[i] : 0.0;
    for (Eigen::Index k = 0; k < w.cols(); ++k) s += w(i, k) * x[k];
    out[i] = s;
  }
  return out;
}

inline std::vector<double> mlp_oracle(const Mlp &mlp, const std::vector<double> &x) {
  std::vector<double> h = matvec(mlp.hidden.weight, x, &mlp.hidden.bias);
  for (double &t : h) t = std::tanh(t);
  return matvec(mlp.out.weight, h, &mlp.out.bias);
}

inline Rows standardized(const Mat &x, const Eigen::RowVectorXd &mean, const Eigen::RowVectorXd &sd) {
  Rows r = to_rows(x);
  for (auto &row : r)
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = (row[k] - mean[k]) / sd[k];
  return r;
}

inline std::vector<double> gnn_forward_oracle(const RouteGnn &model, const RouteGraph &g, const RawFeatures &f) {
  const GnnParams &P = model.params();
  const FeatureStats &S = model.stats();
  Rows xc = standardized(f.cell, S.cell_mean, S.cell_std);
  Rows xu = standardized(f.net, S.net_mean, S.net_std);
  Rows xg = standardized(f.grid, S.grid_mean, S.grid_std);
  Rows xt = standardized(f.topo, S.topo_mean, S.topo_std);
  Rows xe = standardized(f.grid_edge, S.edge_mean, S.edge_std);
  Rows hv, hu, hc, he_topo, he_grid;
  for (auto &r : xc) hv.push_back(mlp_oracle(P.enc_cell, r));
  for (auto &r : xu) hu.push_back(mlp_oracle(P.enc_net, r));
  for (auto &r : xg) hc.push_back(mlp_oracle(P.enc_grid, r));
  for (auto &r : xt) he_topo.push_back(mlp_oracle(P.enc_topo, r));
  for (auto &r : xe) he_grid.push_back(mlp_oracle(P.enc_grid_edge, r));

  const int V = g.num_cells, U = g.num_nets, C = g.num_grids();
  const int FV = P.dims.cell, FU = P.dims.net, FC = P.dims.grid;
  // Adjacency rebuilt from the flat edge lists rather than the CSR arrays.
  std::vector<std::vector<int>> grid_adj(C);
  for (auto [a, b] : g.geom_edges) {
    grid_adj[a].push_back(b);
    grid_adj[b].push_back(a);
  }
  for (const MessageLayer &W : P.layers) {
    Rows mu(U, std::vector<double>(FU, 0.0));
    for (int e = 0; e < g.num_topo_edges(); ++e) {
      auto a = matvec(W.topo_to_net, he_topo[e]);
      auto b = matvec(W.cell_to_net, hv[g.topo_cell[e]]);
      for (int k = 0; k < FU; ++k) mu[g.topo_net[e]][k] += a[k] * b[k];
    }
    Rows mv_topo(V, std::vector<double>(FV, 0.0));
    for (int e = 0; e < g.num_topo_edges(); ++e) {
      auto a = matvec(W.net_to_cell, hu[g.topo_net[e]]);
      for (int k = 0; k < FV; ++k) mv_topo[g.topo_cell[e]][k] += a[k];
    }
    Rows mc_grid(C, std::vector<double>(FC, 0.0)), mc_geom = mc_grid;
    for (int v = 0; v < V; ++v) {
      auto a = matvec(W.cell_to_grid, hv[v]);
      for (int k = 0; k < FC; ++k) mc_grid[g.cell_grid[v]][k] += a[k];
    }
    for (int c = 0; c < C; ++c)
      for (int nb : grid_adj[c]) {
        auto a = matvec(W.grid_to_grid, hc[nb]);
        for (int k = 0; k < FC; ++k) mc_geom[c][k] += a[k];
      }
    Rows mv_grid(V, std::vector<double>(FV, 0.0));
    for (int v = 0; v < V; ++v) {
      double gate = 0;
      for (int k = 0; k < P.dims.grid_edge; ++k) gate += W.alpha[k] * he_grid[v][k];
      auto a = matvec(W.grid_to_cell, hc[g.cell_grid[v]]);
      for (int k = 0; k < FV; ++k) mv_grid[v][k] = gate * a[k];
    }
    for (int v = 0; v < V; ++v)
      for (int k = 0; k < FV; ++k) hv[v][k] += std::tanh(std::max(mv_topo[v][k], mv_grid[v][k]));
    for (int u = 0; u < U; ++u)
      for (int k = 0; k < FU; ++k) hu[u][k] += std::tanh(mu[u][k]);
    for (int c = 0; c < C; ++c)
      for (int k = 0; k < FC; ++k) hc[c][k] += std::tanh(std::max(mc_grid[c][k], mc_geom[c][k]));
  }
  std::vector<double> out(V);
  for (int v = 0; v < V; ++v) {
    std::vector<double> in = hv[v];
    in.insert(in.end(), xc[v].begin(), xc[v].end());
    double z = mlp_oracle(P.readout, in)[0];
    out[v] = std::log(1.0 + std::exp(z));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

inline double mean_of(std::span<const double> a) {
  double s = 0;
  for (double x : a) s += x;
  return s / static_cast<double>(a.size());
}

inline double nrmse_oracle(std::span<const double> p, std::span<const double> y) {
  double s = 0, lo = y[0], hi = y[0];
  for (std::size_t k = 0; k < p.size(); ++k) {
    s += (p[k] - y[k]) * (p[k] - y[k]);
    lo = std::min(lo, y[k]);
    hi = std::max(hi, y[k]);
  }
  return std::sqrt(s / static_cast<double>(p.size())) / (hi - lo);
}

inline double ssim_oracle(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  double r = 0;
  for (double x : a) r = std::max(r, x);
  for (double x : b) r = std::max(r, x);
  double ma = mean_of(a), mb = mean_of(b);
  double saa = 0, sbb = 0, sab = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    saa += (a[k] - ma) * (a[k] - ma) / n;
    sbb += (b[k] - mb) * (b[k] - mb) / n;
    sab += (a[k] - ma) * (b[k] - mb) / n;
  }
  double c1 = 1e-4 * r * r, c2 = 9e-4 * r * r;
  return (2 * ma * mb + c1) / (ma * ma + mb * mb + c1) * (2 * sab + c2) / (saa + sbb + c2);
}

inline double pearson_oracle(std::span<const double> a, std::span<const double> b) {
  double ma = mean_of(a), mb = mean_of(b);
  double num = 0, da = 0, db = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num += (a[k] - ma) * (b[k] - mb);
    da += (a[k] - ma) * (a[k] - ma);
    db += (b[k] - mb) * (b[k] - mb);
  }
  return num / (std::sqrt(da) * std::sqrt(db));
}

/// Rank by counting: 1 + (#smaller) + (#equal - 1) / 2.
inline std::vector<double> rank_oracle(std::span<const double> a) {
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    double less = 0, equal = 0;
    for (double x : a) {
      if (x < a[i]) ++less;
      if (x == a[i]) ++equal;
    }
    r[i] = 1 + less + (equal - 1) / 2;
  }
  return r;
}

inline double spearman_oracle(std::span<const double> a, std::span<const double> b) {
  auto ra = rank_oracle(a), rb = rank_oracle(b);
  return pearson_oracle(ra, rb);
}

/// Kendall tau-b = (nc - nd) / sqrt((n0 - n1)(n0 - n2)) with tie-group counts.
inline double kendall_oracle(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      double sa = (a[i] > a[j]) - (a[i] < a[j]);
      double sb = (b[i] > b[j]) - (b[i] < b[j]);
      s += sa * sb;
    }
  auto tie_pairs = [](std::span<const double> v) {
    double t = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j) t += v[i] == v[j];
    return t;
  };
  double n0 = n * (n - 1) / 2;
  return s / std::sqrt((n0 - tie_pairs(a)) * (n0 - tie_pairs(b)));
}

/// Counts of values falling in [k w, (k + 1) w), everything beyond the last bin in it.
inline std::vector<long long> histogram_oracle(const std::vector<double> &values, double w, int bins) {
  std::vector<long long> h(bins, 0);
  for (double x : values) {
    int k = 0;
    while (k + 1 < bins && x >= (k + 1) * w) ++k;
    ++h[k];
  }
  return h;
}

}  // namespace rp_test
