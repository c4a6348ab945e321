#include "routeplace/gnn.hpp"

#include <atomic>
#include <cmath>
#include <random>

namespace routeplace {

namespace {

Dense dense_zeros(int in, int out) { return {Mat::Zero(out, in), Eigen::RowVectorXd::Zero(out)}; }

Mlp mlp_zeros(int in, int hidden, int out) { return {dense_zeros(in, hidden), dense_zeros(hidden, out)}; }

MessageLayer layer_zeros(const GnnDims &d) {
  MessageLayer l;
  l.topo_to_net = Mat::Zero(d.net, d.topo);
  l.cell_to_net = Mat::Zero(d.net, d.cell);
  l.net_to_cell = Mat::Zero(d.cell, d.net);
  l.cell_to_grid = Mat::Zero(d.grid, d.cell);
  l.grid_to_grid = Mat::Zero(d.grid, d.grid);
  l.grid_to_cell = Mat::Zero(d.cell, d.grid);
  l.alpha = Eigen::RowVectorXd::Zero(d.grid_edge);
  return l;
}

template <typename P, typename F>
void visit_impl(P &p, F &&f) {
  auto mat = [&](const std::string &name, auto &m) { f(name, m.data(), static_cast<std::size_t>(m.size())); };
  auto dense = [&](const std::string &name, auto &d) {
    mat(name + ".weight", d.weight);
    mat(name + ".bias", d.bias);
  };
  auto mlp = [&](const std::string &name, auto &m) {
    dense(name + ".hidden", m.hidden);
    dense(name + ".out", m.out);
  };
  mlp("enc_cell", p.enc_cell);
  mlp("enc_net", p.enc_net);
  mlp("enc_grid", p.enc_grid);
  mlp("enc_topo", p.enc_topo);
  mlp("enc_grid_edge", p.enc_grid_edge);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    auto &L = p.layers[l];
    std::string pre = "layer" + std::to_string(l) + ".";
    mat(pre + "topo_to_net", L.topo_to_net);
    mat(pre + "cell_to_net", L.cell_to_net);
    mat(pre + "net_to_cell", L.net_to_cell);
    mat(pre + "cell_to_grid", L.cell_to_grid);
    mat(pre + "grid_to_grid", L.grid_to_grid);
    mat(pre + "grid_to_cell", L.grid_to_cell);
    mat(pre + "alpha", L.alpha);
  }
  mlp("readout", p.readout);
}

Mat dense_forward(const Dense &d, const Mat &x) {
  Mat y = x * d.weight.transpose();
  y.rowwise() += d.bias;
  return y;
}

Mat mlp_forward(const Mlp &mlp, const Mat &x, GnnActivations::EncoderTape &tape) {
  tape.input = x;
  tape.hidden = dense_forward(mlp.hidden, x).array().tanh().matrix();
  return dense_forward(mlp.out, tape.hidden);
}

// Returns d/d input; accumulates parameter gradients into `grad` when non-null.
Mat mlp_backward(const Mlp &mlp, const GnnActivations::EncoderTape &tape, const Mat &dy, Mlp *grad) {
  if (grad) {
    grad->out.weight.noalias() += dy.transpose() * tape.hidden;
    grad->out.bias += dy.colwise().sum();
  }
  Mat dz = ((dy * mlp.out.weight).array() * (1.0 - tape.hidden.array().square())).matrix();
  if (grad) {
    grad->hidden.weight.noalias() += dz.transpose() * tape.input;
    grad->hidden.bias += dz.colwise().sum();
  }
  return dz * mlp.hidden.weight;
}

Mat standardize(const Mat &x, const Eigen::RowVectorXd &mean, const Eigen::RowVectorXd &stdev) {
  if (x.cols() != mean.size()) throw GnnError("feature width does not match the model's statistics");
  Mat out = x;
  out.rowwise() -= mean;
  out.array().rowwise() /= stdev.array();
  return out;
}

void require_finite(const Mat &m, const std::string &where) {
  if (!m.allFinite()) throw GnnError("non-finite activation in " + where);
}

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// Max-fusion backward: the larger branch takes the gradient, ties split it.
void split_max(const Mat &a, const Mat &b, const Mat &grad, Mat &ga, Mat &gb) {
  ga.resize(grad.rows(), grad.cols());
  gb.resize(grad.rows(), grad.cols());
  for (Eigen::Index k = 0; k < grad.size(); ++k) {
    double x = a.data()[k], y = b.data()[k], g = grad.data()[k];
    if (x > y) {
      ga.data()[k] = g;
      gb.data()[k] = 0.0;
    } else if (y > x) {
      ga.data()[k] = 0.0;
      gb.data()[k] = g;
    } else {
      ga.data()[k] = 0.5 * g;
      gb.data()[k] = 0.5 * g;
    }
  }
}

}  // namespace

GnnParams GnnParams::zeros(const GnnDims &d) {
  GnnParams p;
  p.dims = d;
  p.enc_cell = mlp_zeros(RawFeatures::kCell, d.cell, d.cell);
  p.enc_net = mlp_zeros(RawFeatures::kNet, d.net, d.net);
  p.enc_grid = mlp_zeros(RawFeatures::kGrid, d.grid, d.grid);
  p.enc_topo = mlp_zeros(RawFeatures::kTopo, d.topo, d.topo);
  p.enc_grid_edge = mlp_zeros(RawFeatures::kGridEdge, d.grid_edge, d.grid_edge);
  for (int l = 0; l < d.layers; ++l) p.layers.push_back(layer_zeros(d));
  p.readout = mlp_zeros(d.cell + RawFeatures::kCell, d.readout_hidden, 1);
  return p;
}

GnnParams GnnParams::glorot(const GnnDims &d, std::uint64_t seed) {
  GnnParams p = zeros(d);
  std::mt19937_64 rng(seed);
  auto fill = [&](auto &m, int fan_in, int fan_out) {
    double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      m.data()[k] = (2.0 * u - 1.0) * limit;
    }
  };
  auto fill_dense = [&](Dense &dn) { fill(dn.weight, static_cast<int>(dn.weight.cols()), static_cast<int>(dn.weight.rows())); };
  for (Mlp *m : {&p.enc_cell, &p.enc_net, &p.enc_grid, &p.enc_topo, &p.enc_grid_edge, &p.readout}) {
    fill_dense(m->hidden);
    fill_dense(m->out);
  }
  for (MessageLayer &l : p.layers) {
    for (Mat *w : {&l.topo_to_net, &l.cell_to_net, &l.net_to_cell, &l.cell_to_grid, &l.grid_to_grid, &l.grid_to_cell}) {
      fill(*w, static_cast<int>(w->cols()), static_cast<int>(w->rows()));
    }
    fill(l.alpha, d.grid_edge, 1);
  }
  return p;
}

void GnnParams::visit(const std::function<void(const std::string &, double *, std::size_t)> &f) { visit_impl(*this, f); }

void GnnParams::visit(const std::function<void(const std::string &, const double *, std::size_t)> &f) const {
  visit_impl(*this, f);
}

std::size_t GnnParams::count() const {
  std::size_t n = 0;
  visit([&](const std::string &, const double *, std::size_t k) { n += k; });
  return n;
}

std::vector<double> GnnParams::flatten() const {
  std::vector<double> out;
  out.reserve(count());
  visit([&](const std::string &, const double *d, std::size_t k) { out.insert(out.end(), d, d + k); });
  return out;
}

void GnnParams::assign(const std::vector<double> &flat) {
  if (flat.size() != count()) throw GnnError("flat parameter vector has the wrong length");
  std::size_t pos = 0;
  visit([&](const std::string &, double *d, std::size_t k) {
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos), flat.begin() + static_cast<std::ptrdiff_t>(pos + k), d);
    pos += k;
  });
}

FeatureStats FeatureStats::identity() {
  FeatureStats s;
  s.cell_mean = Eigen::RowVectorXd::Zero(RawFeatures::kCell);
  s.cell_std = Eigen::RowVectorXd::Ones(RawFeatures::kCell);
  s.net_mean = Eigen::RowVectorXd::Zero(RawFeatures::kNet);
  s.net_std = Eigen::RowVectorXd::Ones(RawFeatures::kNet);
  s.grid_mean = Eigen::RowVectorXd::Zero(RawFeatures::kGrid);
  s.grid_std = Eigen::RowVectorXd::Ones(RawFeatures::kGrid);
  s.topo_mean = Eigen::RowVectorXd::Zero(RawFeatures::kTopo);
  s.topo_std = Eigen::RowVectorXd::Ones(RawFeatures::kTopo);
  s.edge_mean = Eigen::RowVectorXd::Zero(RawFeatures::kGridEdge);
  s.edge_std = Eigen::RowVectorXd::Ones(RawFeatures::kGridEdge);
  return s;
}

FeatureStats FeatureStats::fit(const std::vector<const RawFeatures *> &sets) {
  auto pooled = [&](auto member, int cols, Eigen::RowVectorXd &mean, Eigen::RowVectorXd &stdev) {
    mean = Eigen::RowVectorXd::Zero(cols);
    Eigen::RowVectorXd sq = Eigen::RowVectorXd::Zero(cols);
    double rows = 0;
    for (const RawFeatures *f : sets) {
      const Mat &m = f->*member;
      mean += m.colwise().sum();
      rows += static_cast<double>(m.rows());
    }
    if (rows == 0) {
      stdev = Eigen::RowVectorXd::Ones(cols);
      return;
    }
    mean /= rows;
    for (const RawFeatures *f : sets) {
      Mat c = f->*member;
      c.rowwise() -= mean;
      sq += c.array().square().matrix().colwise().sum();
    }
    stdev = (sq / rows).array().sqrt().matrix();
    for (int k = 0; k < cols; ++k) {
      if (!(stdev[k] > 1e-12)) stdev[k] = 1.0;
    }
  };
  FeatureStats s;
  pooled(&RawFeatures::cell, RawFeatures::kCell, s.cell_mean, s.cell_std);
  pooled(&RawFeatures::net, RawFeatures::kNet, s.net_mean, s.net_std);
  pooled(&RawFeatures::grid, RawFeatures::kGrid, s.grid_mean, s.grid_std);
  pooled(&RawFeatures::topo, RawFeatures::kTopo, s.topo_mean, s.topo_std);
  pooled(&RawFeatures::grid_edge, RawFeatures::kGridEdge, s.edge_mean, s.edge_std);
  return s;
}

std::uint64_t RouteGnn::next_instance() {
  static std::atomic<std::uint64_t> counter{1};
  return counter++;
}

RouteGnn::RouteGnn(GnnParams params, FeatureStats stats)
    : params_(std::move(params)), stats_(std::move(stats)), instance_(next_instance()) {}

GnnActivations RouteGnn::forward(const RouteGraph &g, const RawFeatures &f) const {
  const GnnDims &d = params_.dims;
  if (f.cell.rows() != g.num_cells || f.net.rows() != g.num_nets || f.grid.rows() != g.num_grids() ||
      f.topo.rows() != g.num_topo_edges() || f.grid_edge.rows() != g.num_grid_edges()) {
    throw GnnError("feature rows do not match the graph");
  }
  GnnActivations a;
  a.token = instance_ * 0x9E3779B97F4A7C15ull ^ version_;
  a.graph = &g;

  const Mat x_cell = standardize(f.cell, stats_.cell_mean, stats_.cell_std);
  Mat h_cell = mlp_forward(params_.enc_cell, x_cell, a.enc_cell);
  Mat h_net = mlp_forward(params_.enc_net, standardize(f.net, stats_.net_mean, stats_.net_std), a.enc_net);
  Mat h_grid = mlp_forward(params_.enc_grid, standardize(f.grid, stats_.grid_mean, stats_.grid_std), a.enc_grid);
  a.h_topo = mlp_forward(params_.enc_topo, standardize(f.topo, stats_.topo_mean, stats_.topo_std), a.enc_topo);
  a.h_grid_edge =
      mlp_forward(params_.enc_grid_edge, standardize(f.grid_edge, stats_.edge_mean, stats_.edge_std), a.enc_grid_edge);
  require_finite(h_cell, "cell encoder");
  require_finite(h_net, "net encoder");
  require_finite(h_grid, "grid encoder");

  const int V = g.num_cells, U = g.num_nets, C = g.num_grids(), P = g.num_topo_edges();
  a.layers.resize(params_.layers.size());
  for (std::size_t l = 0; l < params_.layers.size(); ++l) {
    const MessageLayer &W = params_.layers[l];
    GnnActivations::LayerTape &t = a.layers[l];
    t.h_cell = h_cell;
    t.h_net = h_net;
    t.h_grid = h_grid;

    // Topological messages.
    t.q_cell = h_cell * W.cell_to_net.transpose();
    t.p_topo = a.h_topo * W.topo_to_net.transpose();
    Mat m_net = Mat::Zero(U, d.net);
    for (int e = 0; e < P; ++e) m_net.row(g.topo_net[e]) += t.p_topo.row(e).cwiseProduct(t.q_cell.row(g.topo_cell[e]));
    Mat r_net = h_net * W.net_to_cell.transpose();
    t.m_cell_topo = Mat::Zero(V, d.cell);
    for (int e = 0; e < P; ++e) t.m_cell_topo.row(g.topo_cell[e]) += r_net.row(g.topo_net[e]);

    // Route-geometrical messages.
    Mat s_cell = h_cell * W.cell_to_grid.transpose();
    t.m_grid_grid = Mat::Zero(C, d.grid);
    for (int v = 0; v < V; ++v) t.m_grid_grid.row(g.cell_grid[v]) += s_cell.row(v);
    Mat t_grid = h_grid * W.grid_to_grid.transpose();
    t.m_grid_geom = Mat::Zero(C, d.grid);
    for (int c = 0; c < C; ++c) {
      for (int k = g.grid_neighbors.offsets[c]; k < g.grid_neighbors.offsets[c + 1]; ++k) {
        t.m_grid_geom.row(c) += t_grid.row(g.grid_neighbors.entries[k]);
      }
    }
    t.k_grid = h_grid * W.grid_to_cell.transpose();
    t.edge_gate = a.h_grid_edge * W.alpha.transpose();
    t.m_cell_grid.resize(V, d.cell);
    for (int v = 0; v < V; ++v) t.m_cell_grid.row(v) = t.edge_gate[v] * t.k_grid.row(g.cell_grid[v]);

    // Fusion and residual tanh update.
    t.t_cell = t.m_cell_topo.cwiseMax(t.m_cell_grid).array().tanh().matrix();
    t.t_net = m_net.array().tanh().matrix();
    t.t_grid = t.m_grid_grid.cwiseMax(t.m_grid_geom).array().tanh().matrix();
    h_cell += t.t_cell;
    h_net += t.t_net;
    h_grid += t.t_grid;
    require_finite(h_cell, "layer " + std::to_string(l) + " cell state");
    require_finite(h_net, "layer " + std::to_string(l) + " net state");
    require_finite(h_grid, "layer " + std::to_string(l) + " grid state");
  }

  a.readout_input.resize(V, d.cell + RawFeatures::kCell);
  a.readout_input << h_cell, x_cell;
  a.readout_hidden = dense_forward(params_.readout.hidden, a.readout_input).array().tanh().matrix();
  Mat out = dense_forward(params_.readout.out, a.readout_hidden);
  a.logits = out.col(0);
  a.prediction.resize(V);
  for (int v = 0; v < V; ++v) a.prediction[v] = softplus(a.logits[v]);
  require_finite(a.prediction, "readout");
  return a;
}

GnnGradients RouteGnn::backward(const GnnActivations &a, const Eigen::VectorXd &grad_out, bool want_params) const {
  if (a.token != (instance_ * 0x9E3779B97F4A7C15ull ^ version_) || a.graph == nullptr) {
    throw GnnError("stale activations: backward must pair with a forward of the same model state");
  }
  const RouteGraph &g = *a.graph;
  const GnnDims &d = params_.dims;
  const int V = g.num_cells, U = g.num_nets, C = g.num_grids(), P = g.num_topo_edges();
  if (grad_out.size() != V) throw GnnError("gradient length does not match the cell count");

  GnnGradients out;
  if (want_params) out.params = GnnParams::zeros(d);
  GnnParams *gp = want_params ? &out.params : nullptr;

  // Readout.
  Mat d_logit(V, 1);
  for (int v = 0; v < V; ++v) d_logit(v, 0) = grad_out[v] * sigmoid(a.logits[v]);
  GnnActivations::EncoderTape readout_tape{a.readout_input, a.readout_hidden};
  Mat d_in = mlp_backward(params_.readout, readout_tape, d_logit, gp ? &gp->readout : nullptr);
  Mat dh_cell = d_in.leftCols(d.cell);
  Mat dx_cell = d_in.rightCols(RawFeatures::kCell);
  Mat dh_net = Mat::Zero(U, d.net);
  Mat dh_grid = Mat::Zero(C, d.grid);
  Mat dh_topo = Mat::Zero(P, d.topo);
  Mat dh_edge = Mat::Zero(V, d.grid_edge);

  for (int l = static_cast<int>(params_.layers.size()) - 1; l >= 0; --l) {
    const MessageLayer &W = params_.layers[l];
    const GnnActivations::LayerTape &t = a.layers[l];
    MessageLayer *gw = gp ? &gp->layers[l] : nullptr;

    Mat dm_cell = (dh_cell.array() * (1.0 - t.t_cell.array().square())).matrix();
    Mat dm_net = (dh_net.array() * (1.0 - t.t_net.array().square())).matrix();
    Mat dm_grid = (dh_grid.array() * (1.0 - t.t_grid.array().square())).matrix();
    Mat dm_cell_topo, dm_cell_grid, dm_grid_grid, dm_grid_geom;
    split_max(t.m_cell_topo, t.m_cell_grid, dm_cell, dm_cell_topo, dm_cell_grid);
    split_max(t.m_grid_grid, t.m_grid_geom, dm_grid, dm_grid_grid, dm_grid_geom);
    // Residual paths: dh_* already hold d/dH^(l) through the identity branch.

    // Grid -> cell over grid-edges, gated by alpha^T h_edge.
    Mat dk_grid = Mat::Zero(C, d.cell);
    for (int v = 0; v < V; ++v) {
      int c = g.cell_grid[v];
      double dgate = dm_cell_grid.row(v).dot(t.k_grid.row(c));
      dk_grid.row(c) += t.edge_gate[v] * dm_cell_grid.row(v);
      dh_edge.row(v) += dgate * W.alpha;
      if (gw) gw->alpha += dgate * a.h_grid_edge.row(v);
    }
    if (gw) gw->grid_to_cell.noalias() += dk_grid.transpose() * t.h_grid;
    dh_grid.noalias() += dk_grid * W.grid_to_cell;

    // Grid -> grid over geom-edges (symmetric adjacency).
    Mat dt_grid = Mat::Zero(C, d.grid);
    for (int c = 0; c < C; ++c) {
      for (int k = g.grid_neighbors.offsets[c]; k < g.grid_neighbors.offsets[c + 1]; ++k) {
        dt_grid.row(g.grid_neighbors.entries[k]) += dm_grid_geom.row(c);
      }
    }
    if (gw) gw->grid_to_grid.noalias() += dt_grid.transpose() * t.h_grid;
    dh_grid.noalias() += dt_grid * W.grid_to_grid;

    // Cell -> grid over grid-edges.
    Mat ds_cell(V, d.grid);
    for (int v = 0; v < V; ++v) ds_cell.row(v) = dm_grid_grid.row(g.cell_grid[v]);
    if (gw) gw->cell_to_grid.noalias() += ds_cell.transpose() * t.h_cell;
    dh_cell.noalias() += ds_cell * W.cell_to_grid;

    // Net -> cell over topo-edges.
    Mat dr_net = Mat::Zero(U, d.cell);
    for (int e = 0; e < P; ++e) dr_net.row(g.topo_net[e]) += dm_cell_topo.row(g.topo_cell[e]);
    if (gw) gw->net_to_cell.noalias() += dr_net.transpose() * t.h_net;
    dh_net.noalias() += dr_net * W.net_to_cell;

    // Cell -> net: sum of (W h_e) * (W h_v).
    Mat dp_topo(P, d.net);
    Mat dq_cell = Mat::Zero(V, d.net);
    for (int e = 0; e < P; ++e) {
      auto dm = dm_net.row(g.topo_net[e]);
      dp_topo.row(e) = dm.cwiseProduct(t.q_cell.row(g.topo_cell[e]));
      dq_cell.row(g.topo_cell[e]) += dm.cwiseProduct(t.p_topo.row(e));
    }
    if (gw) {
      gw->topo_to_net.noalias() += dp_topo.transpose() * a.h_topo;
      gw->cell_to_net.noalias() += dq_cell.transpose() * t.h_cell;
    }
    dh_topo.noalias() += dp_topo * W.topo_to_net;
    dh_cell.noalias() += dq_cell * W.cell_to_net;
  }

  dx_cell += mlp_backward(params_.enc_cell, a.enc_cell, dh_cell, gp ? &gp->enc_cell : nullptr);
  if (gp) {
    mlp_backward(params_.enc_net, a.enc_net, dh_net, &gp->enc_net);
    mlp_backward(params_.enc_grid, a.enc_grid, dh_grid, &gp->enc_grid);
    mlp_backward(params_.enc_topo, a.enc_topo, dh_topo, &gp->enc_topo);
    mlp_backward(params_.enc_grid_edge, a.enc_grid_edge, dh_edge, &gp->enc_grid_edge);
  }
  dx_cell.array().rowwise() /= stats_.cell_std.array();
  out.cell_features = std::move(dx_cell);
  return out;
}

double congestion_penalty(const Eigen::VectorXd &prediction, const std::vector<char> &movable) {
  double total = 0.0;
  for (Eigen::Index v = 0; v < prediction.size(); ++v) {
    if (movable[v]) total += prediction[v];
  }
  return total;
}

GridMap grid_map_from_cells(const std::vector<double> &values, const std::vector<int> &cell_grid, int n, int m) {
  GridMap sum(n, m), count(n, m);
  for (std::size_t v = 0; v < values.size(); ++v) {
    sum.v[cell_grid[v]] += values[v];
    count.v[cell_grid[v]] += 1.0;
  }
  for (std::size_t k = 0; k < sum.size(); ++k) sum.v[k] = count.v[k] > 0 ? sum.v[k] / count.v[k] : 0.0;
  return sum;
}

GridMap grid_map_from_cells(const Eigen::VectorXd &prediction, const RouteGraph &g) {
  std::vector<double> values(prediction.data(), prediction.data() + prediction.size());
  return grid_map_from_cells(values, g.cell_grid, g.n, g.m);
}

std::vector<char> movable_mask(const Netlist &nl) {
  std::vector<char> mask(nl.cells.size());
  for (std::size_t v = 0; v < mask.size(); ++v) mask[v] = nl.cells[v].fixed ? 0 : 1;
  return mask;
}

}  // namespace routeplace
