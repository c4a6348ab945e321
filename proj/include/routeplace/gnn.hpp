#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "routeplace/routegraph.hpp"

namespace routeplace {

struct GnnDims {
  int cell = 32;       // F_V
  int net = 64;        // F_U
  int grid = 16;       // F_C
  int topo = 8;        // F_Etopo
  int geom_edge = 4;   // F_Egeom: kept for checkpoint compatibility, geom-edges carry no features
  int grid_edge = 4;   // F_Egrid
  int layers = 2;      // L
  int readout_hidden = 32;

  bool operator==(const GnnDims &) const = default;
};

/// y = x W^T + b, W is out x in.
struct Dense {
  Mat weight;
  Eigen::RowVectorXd bias;
};

/// Two-layer perceptron: Dense -> tanh -> Dense.
struct Mlp {
  Dense hidden;
  Dense out;
};

struct MessageLayer {
  Mat topo_to_net;   // W_{Etopo->U}: F_U x F_Etopo
  Mat cell_to_net;   // W_{V->U}:     F_U x F_V
  Mat net_to_cell;   // W_{U->V}:     F_V x F_U
  Mat cell_to_grid;  // W_{V->C}:     F_C x F_V
  Mat grid_to_grid;  // W_{C->C}:     F_C x F_C
  Mat grid_to_cell;  // W_{C->V}:     F_V x F_C
  Eigen::RowVectorXd alpha;  // F_Egrid
};

struct GnnParams {
  GnnDims dims;
  Mlp enc_cell, enc_net, enc_grid, enc_topo, enc_grid_edge;
  std::vector<MessageLayer> layers;
  Mlp readout;

  /// Zero tensors with the shapes implied by `dims`.
  static GnnParams zeros(const GnnDims &dims);
  /// Uniform +-sqrt(6 / (fan_in + fan_out)) weights, zero biases.
  static GnnParams glorot(const GnnDims &dims, std::uint64_t seed);

  /// Visits every tensor in a fixed order as (name, data, count).
  void visit(const std::function<void(const std::string &, double *, std::size_t)> &f);
  void visit(const std::function<void(const std::string &, const double *, std::size_t)> &f) const;
  std::size_t count() const;
  std::vector<double> flatten() const;
  void assign(const std::vector<double> &flat);
};

/// Per-column standardisation of raw features, frozen at training time.
struct FeatureStats {
  Eigen::RowVectorXd cell_mean, cell_std;
  Eigen::RowVectorXd net_mean, net_std;
  Eigen::RowVectorXd grid_mean, grid_std;
  Eigen::RowVectorXd topo_mean, topo_std;
  Eigen::RowVectorXd edge_mean, edge_std;

  /// Identity transform (mean 0, std 1).
  static FeatureStats identity();
  /// Column statistics pooled over all rows of all feature sets; std floors at 1 when zero.
  static FeatureStats fit(const std::vector<const RawFeatures *> &sets);
};

class GnnError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything the reverse pass needs; produced by RouteGnn::forward.
struct GnnActivations {
  struct EncoderTape {
    Mat input, hidden;  // hidden = tanh(first layer)
  };
  struct LayerTape {
    Mat h_cell, h_net, h_grid;  // inputs to the layer
    Mat q_cell, p_topo;         // W_{V->U} h_v and W_{Etopo->U} h_e
    Mat m_cell_topo, m_cell_grid, m_grid_grid, m_grid_geom;
    Mat t_cell, t_net, t_grid;  // tanh of fused messages
    Mat k_grid;                 // W_{C->V} h_c
    Eigen::VectorXd edge_gate;  // alpha^T h_(c,v)
  };

  std::uint64_t token = 0;
  const RouteGraph *graph = nullptr;
  EncoderTape enc_cell, enc_net, enc_grid, enc_topo, enc_grid_edge;
  Mat h_topo, h_grid_edge;
  std::vector<LayerTape> layers;
  Mat readout_input;  // [H_V^(L), standardised X_V]
  Mat readout_hidden;
  Eigen::VectorXd logits;
  Eigen::VectorXd prediction;
};

struct GnnGradients {
  GnnParams params;
  Mat cell_features;  // d loss / d raw X_V
};

/// Frozen-or-trainable RouteGNN with its feature statistics.
class RouteGnn {
 public:
  RouteGnn() : RouteGnn(GnnParams::zeros(GnnDims{}), FeatureStats::identity()) {}
  RouteGnn(GnnParams params, FeatureStats stats);

  const GnnParams &params() const { return params_; }
  /// Mutable access invalidates outstanding activations.
  GnnParams &mutable_params() {
    ++version_;
    return params_;
  }
  const FeatureStats &stats() const { return stats_; }
  void set_stats(FeatureStats s) {
    ++version_;
    stats_ = std::move(s);
  }

  /// Per-cell predictions (>= 0) and the tape for backward.
  GnnActivations forward(const RouteGraph &g, const RawFeatures &f) const;
  Eigen::VectorXd predict(const RouteGraph &g, const RawFeatures &f) const { return forward(g, f).prediction; }

  /// Reverse pass for d loss / d prediction = grad_out. Parameter gradients are
  /// skipped when `want_params` is false.
  GnnGradients backward(const GnnActivations &acts, const Eigen::VectorXd &grad_out, bool want_params = true) const;

 private:
  GnnParams params_;
  FeatureStats stats_;
  std::uint64_t version_ = 1;
  static std::uint64_t next_instance();
  std::uint64_t instance_;
};

/// Sum of predictions over movable cells.
double congestion_penalty(const Eigen::VectorXd &prediction, const std::vector<char> &movable);

/// Mean prediction of the cells assigned to each grid; empty grids get 0.
GridMap grid_map_from_cells(const Eigen::VectorXd &prediction, const RouteGraph &g);
GridMap grid_map_from_cells(const std::vector<double> &values, const std::vector<int> &cell_grid, int n, int m);

std::vector<char> movable_mask(const Netlist &netlist);

// Checkpoint file: "RGNNCKPT", u32 version, dims, feature stats, f64 weights, CRC32.
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string save_checkpoint(const RouteGnn &model);
RouteGnn load_checkpoint(std::string_view bytes);

}  // namespace routeplace
