#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "routeplace/config.hpp"
#include "routeplace/gnn.hpp"
#include "routeplace/metrics.hpp"
#include "routeplace/netlist.hpp"
#include "routeplace/placer.hpp"
#include "routeplace/router.hpp"

namespace routeplace {

/// Placement captured while the baseline placer crosses an EO threshold,
/// routed and labelled by the router.
struct Snapshot {
  std::string netlist_id;
  int iteration = 0;
  double threshold = 0.0;
  double eo = 0.0;
  Placement placement;
  CongestionMap map;
  std::vector<double> labels;
};

/// Iteration indices at which a trace first drops to 0.80, 0.75, 0.70, ...
/// One index may satisfy several thresholds; it is recorded once.
std::vector<int> snapshot_indices(const std::vector<double> &eo_trace);
/// Threshold k: (80 - 5k) / 100.
double snapshot_threshold(int k);

/// Runs the placer with eta = 0 and captures a snapshot at every first
/// threshold crossing. Returns an empty list, with a logged warning, when EO
/// never reaches 0.8.
std::vector<Snapshot> collect_snapshots(const Netlist &netlist, const std::string &netlist_id, PlacerConfig cfg,
                                        std::vector<TraceRow> *trace = nullptr);

/// Per-cell values with the grid containing each cell centre, so that grid-level
/// statistics can be computed without the netlist.
struct CellValues {
  int n = 0, m = 0;
  std::vector<double> value;
  std::vector<int> grid;  // flat i * m + j

  GridMap grid_map() const;
};

CellValues make_cell_values(const Netlist &netlist, const Placement &p, std::vector<double> values);
std::string write_cell_values(const CellValues &v);
CellValues read_cell_values(std::string_view text);

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// On-disk dataset: meta.txt lists `<k> <netlist path relative to dir> <eo> <iteration> <threshold>`;
/// snap_<k>/ holds placement.pl, map.cg and labels.txt.
struct DatasetEntry {
  std::string netlist_path;  // relative to the dataset directory
  Snapshot snapshot;
};

/// Writes snapshots and the netlists they refer to (as netlists/<id>.net).
void write_dataset(const std::filesystem::path &dir, const std::vector<std::pair<const Netlist *, Snapshot>> &items);
/// Loads every entry and its netlist; netlists are shared by path.
struct Dataset {
  std::vector<Netlist> netlists;
  std::vector<std::string> netlist_ids;
  struct Item {
    int netlist = 0;
    Snapshot snapshot;
  };
  std::vector<Item> items;
};
Dataset read_dataset(const std::filesystem::path &dir);

struct TrainConfig {
  double lr = 0.0002;
  double lr_decay = 0.02;
  double weight_decay = 0.0002;
  int epochs = 100;
  int steps_per_epoch = 1;  // full-batch optimizer steps per epoch
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double val_fraction = 0.2;
  std::uint64_t seed = 1;
  GnnDims dims;

  /// Settings for desk-sized datasets of a few hundred cells per graph.
  static TrainConfig desk();
  static TrainConfig from_config(const KeyValueConfig &cfg);
  KeyValueConfig to_config() const;
  void validate() const;
};

/// A snapshot with its graph and features prepared for training.
struct TrainingSample {
  std::string netlist_id;
  RouteGraph graph;
  RawFeatures features;
  Eigen::VectorXd labels;
  std::vector<char> movable;
};

TrainingSample make_sample(const Netlist &netlist, const Snapshot &s);

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;  // at the start of the epoch
  double val_loss = 0.0;    // after the epoch's steps; NaN without a validation set
};

struct TrainResult {
  RouteGnn model;
  std::vector<EpochRecord> history;
  int best_epoch = -1;
  double best_val_loss = 0.0;
  std::vector<int> train_indices, val_indices;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mean over movable cells of (log(1 + pred) - log(1 + label))^2; fills the
/// gradient with respect to the predictions when non-null.
double sample_loss(const Eigen::VectorXd &pred, const Eigen::VectorXd &labels, const std::vector<char> &movable,
                   Eigen::VectorXd *grad = nullptr);
/// Mean sample loss over `indices`.
double dataset_loss(const RouteGnn &model, const std::vector<TrainingSample> &samples, const std::vector<int> &indices);

/// Splits distinct netlist ids into train and validation sets by seeded shuffle.
void split_by_netlist(const std::vector<TrainingSample> &samples, double val_fraction, std::uint64_t seed,
                      std::vector<int> &train, std::vector<int> &val);

/// Full-batch AdamW training; returns the parameters with the best validation
/// loss (training loss when no validation netlist exists).
TrainResult train(const std::vector<TrainingSample> &samples, const TrainConfig &cfg);

std::string write_history_csv(const std::vector<EpochRecord> &history);

/// Statistics of a model on one sample: cell level plus grid maps from the
/// cell-to-grid mean transform.
EvalStats evaluate_sample(const RouteGnn &model, const TrainingSample &s);

}  // namespace routeplace
