#include "routeplace/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "routeplace/routegraph.hpp"
#include "routeplace/util.hpp"

namespace routeplace {

namespace fs = std::filesystem;

double snapshot_threshold(int k) { return (80.0 - 5.0 * k) / 100.0; }

namespace {

constexpr int kThresholdCount = 16;  // 0.80 down to 0.05

// Advances the threshold cursor past every threshold `eo` satisfies; returns
// true when at least one was crossed.
bool crosses(double eo, int &k) {
  bool crossed = false;
  while (k < kThresholdCount && eo <= snapshot_threshold(k)) {
    ++k;
    crossed = true;
  }
  return crossed;
}

}  // namespace

std::vector<int> snapshot_indices(const std::vector<double> &eo_trace) {
  std::vector<int> out;
  int k = 0;
  for (std::size_t i = 0; i < eo_trace.size(); ++i) {
    if (crosses(eo_trace[i], k)) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<Snapshot> collect_snapshots(const Netlist &nl, const std::string &netlist_id, PlacerConfig cfg,
                                        std::vector<TraceRow> *trace) {
  cfg.eta = 0.0;
  cfg.inflation.enabled = false;
  std::vector<Snapshot> out;
  int k = 0;
  auto observer = [&](const TraceRow &row, const Placement &p) {
    int before = k;
    if (!crosses(row.eo, k)) return;
    Snapshot s;
    s.netlist_id = netlist_id;
    s.iteration = row.iter;
    s.threshold = snapshot_threshold(before);
    s.eo = row.eo;
    s.placement = p;
    s.map = route(nl, p);
    s.labels = cell_labels(nl, p, s.map);
    out.push_back(std::move(s));
  };
  PlaceResult res = place(nl, cfg, nullptr, observer);
  if (out.empty()) log_error("collect: EO never reached 0.8 for '" + netlist_id + "'; no snapshots taken");
  if (trace) *trace = std::move(res.trace);
  return out;
}

GridMap CellValues::grid_map() const { return grid_map_from_cells(value, grid, n, m); }

CellValues make_cell_values(const Netlist &nl, const Placement &p, std::vector<double> values) {
  if (values.size() != nl.cells.size()) throw DatasetError("one value per cell is required");
  const GridGeometry geo = nl.geometry();
  CellValues out;
  out.n = geo.n;
  out.m = geo.m;
  out.value = std::move(values);
  out.grid.resize(nl.cells.size());
  for (int v = 0; v < nl.num_cells(); ++v) {
    const Cell &c = nl.cells[v];
    out.grid[v] = geo.column(p.x[v] + 0.5 * c.width) * geo.m + geo.row(p.y[v] + 0.5 * c.height);
  }
  return out;
}

std::string write_cell_values(const CellValues &v) {
  std::string out = "cellvalues " + std::to_string(v.value.size()) + " " + std::to_string(v.n) + " " +
                    std::to_string(v.m) + "\n";
  for (std::size_t k = 0; k < v.value.size(); ++k) {
    out += format_double(v.value[k]) + " " + std::to_string(v.grid[k] / v.m) + " " + std::to_string(v.grid[k] % v.m) +
           "\n";
  }
  return out;
}

CellValues read_cell_values(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string tag;
  long long count = 0;
  CellValues out;
  if (!(in >> tag >> count >> out.n >> out.m) || tag != "cellvalues" || count < 0 || out.n < 1 || out.m < 1) {
    throw DatasetError("cell value file: expected header 'cellvalues <count> <n> <m>'");
  }
  out.value.resize(count);
  out.grid.resize(count);
  for (long long k = 0; k < count; ++k) {
    std::string value;
    int i = 0, j = 0;
    if (!(in >> value >> i >> j)) {
      throw DatasetError("cell value file: expected " + std::to_string(count) + " rows, got " + std::to_string(k));
    }
    try {
      std::size_t used = 0;
      out.value[k] = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception &) {
      throw DatasetError("cell value file: bad number '" + value + "' on row " + std::to_string(k + 1));
    }
    if (i < 0 || i >= out.n || j < 0 || j >= out.m) {
      throw DatasetError("cell value file: grid index out of range on row " + std::to_string(k + 1));
    }
    out.grid[k] = i * out.m + j;
  }
  std::string extra;
  if (in >> extra) throw DatasetError("cell value file: trailing data after " + std::to_string(count) + " rows");
  return out;
}

void write_dataset(const fs::path &dir, const std::vector<std::pair<const Netlist *, Snapshot>> &items) {
  fs::create_directories(dir / "netlists");
  std::map<std::string, const Netlist *> written;
  std::string meta;
  for (std::size_t k = 0; k < items.size(); ++k) {
    const auto &[nl, s] = items[k];
    std::string rel = "netlists/" + s.netlist_id + ".net";
    if (auto it = written.find(s.netlist_id); it == written.end()) {
      write_file_atomic(dir / rel, serialize_netlist(*nl));
      written[s.netlist_id] = nl;
    } else if (!(*it->second == *nl)) {
      throw DatasetError("two different netlists share the id '" + s.netlist_id + "'");
    }
    fs::path snap = dir / ("snap_" + std::to_string(k));
    fs::create_directories(snap);
    write_file_atomic(snap / "placement.pl", write_placement(s.placement));
    write_file_atomic(snap / "map.cg", write_congestion_map(s.map));
    write_file_atomic(snap / "labels.txt", write_cell_values(make_cell_values(*nl, s.placement, s.labels)));
    meta += std::to_string(k) + " " + rel + " " + format_double(s.eo) + " " + std::to_string(s.iteration) + " " +
            format_double(s.threshold) + "\n";
  }
  write_file_atomic(dir / "meta.txt", meta);
}

Dataset read_dataset(const fs::path &dir) {
  Dataset ds;
  std::map<std::string, int> by_path;
  std::istringstream meta(read_file(dir / "meta.txt"));
  std::string line;
  int lineno = 0;
  while (std::getline(meta, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    int k = 0, iteration = 0;
    std::string rel;
    double eo = 0, threshold = 0;
    if (!(row >> k >> rel >> eo >> iteration >> threshold)) {
      throw DatasetError("meta.txt line " + std::to_string(lineno) + ": expected '<k> <netlist> <eo> <iter> <threshold>'");
    }
    auto it = by_path.find(rel);
    if (it == by_path.end()) {
      ds.netlists.push_back(parse_netlist(read_file(dir / rel)));
      ds.netlist_ids.push_back(fs::path(rel).stem().string());
      it = by_path.emplace(rel, static_cast<int>(ds.netlists.size()) - 1).first;
    }
    const Netlist &nl = ds.netlists[it->second];
    fs::path snap = dir / ("snap_" + std::to_string(k));
    Dataset::Item item;
    item.netlist = it->second;
    Snapshot &s = item.snapshot;
    s.netlist_id = ds.netlist_ids[it->second];
    s.iteration = iteration;
    s.threshold = threshold;
    s.eo = eo;
    s.placement = read_placement(read_file(snap / "placement.pl"), nl.num_cells());
    s.map = read_congestion_map(read_file(snap / "map.cg"));
    CellValues labels = read_cell_values(read_file(snap / "labels.txt"));
    if (labels.value.size() != nl.cells.size()) {
      throw DatasetError("snap_" + std::to_string(k) + "/labels.txt: cell count differs from the netlist");
    }
    s.labels = std::move(labels.value);
    ds.items.push_back(std::move(item));
  }
  if (ds.items.empty()) throw DatasetError("dataset '" + dir.string() + "' has no snapshots");
  return ds;
}

TrainConfig TrainConfig::desk() {
  TrainConfig c;
  c.lr = 0.005;
  c.steps_per_epoch = 4;
  return c;
}

TrainConfig TrainConfig::from_config(const KeyValueConfig &kv) {
  kv.reject_unknown({"preset", "lr", "lr_decay", "weight_decay", "epochs", "steps_per_epoch", "beta1", "beta2",
                     "adam_eps", "val_fraction", "seed", "cell_dim", "net_dim", "grid_dim", "topo_dim",
                     "grid_edge_dim", "layers", "readout_hidden"});
  std::string preset = kv.get_string("preset", "desk");
  if (preset != "desk" && preset != "standard") throw ConfigError("preset must be 'desk' or 'standard'");
  TrainConfig c = preset == "desk" ? desk() : TrainConfig{};
  c.lr = kv.get_double("lr", c.lr);
  c.lr_decay = kv.get_double("lr_decay", c.lr_decay);
  c.weight_decay = kv.get_double("weight_decay", c.weight_decay);
  c.epochs = static_cast<int>(kv.get_int("epochs", c.epochs));
  c.steps_per_epoch = static_cast<int>(kv.get_int("steps_per_epoch", c.steps_per_epoch));
  c.beta1 = kv.get_double("beta1", c.beta1);
  c.beta2 = kv.get_double("beta2", c.beta2);
  c.adam_eps = kv.get_double("adam_eps", c.adam_eps);
  c.val_fraction = kv.get_double("val_fraction", c.val_fraction);
  c.seed = kv.get_u64("seed", c.seed);
  c.dims.cell = static_cast<int>(kv.get_int("cell_dim", c.dims.cell));
  c.dims.net = static_cast<int>(kv.get_int("net_dim", c.dims.net));
  c.dims.grid = static_cast<int>(kv.get_int("grid_dim", c.dims.grid));
  c.dims.topo = static_cast<int>(kv.get_int("topo_dim", c.dims.topo));
  c.dims.grid_edge = static_cast<int>(kv.get_int("grid_edge_dim", c.dims.grid_edge));
  c.dims.layers = static_cast<int>(kv.get_int("layers", c.dims.layers));
  c.dims.readout_hidden = static_cast<int>(kv.get_int("readout_hidden", c.dims.readout_hidden));
  c.validate();
  return c;
}

KeyValueConfig TrainConfig::to_config() const {
  KeyValueConfig kv;
  kv.set("lr", format_double(lr));
  kv.set("lr_decay", format_double(lr_decay));
  kv.set("weight_decay", format_double(weight_decay));
  kv.set("epochs", std::to_string(epochs));
  kv.set("steps_per_epoch", std::to_string(steps_per_epoch));
  kv.set("beta1", format_double(beta1));
  kv.set("beta2", format_double(beta2));
  kv.set("adam_eps", format_double(adam_eps));
  kv.set("val_fraction", format_double(val_fraction));
  kv.set("seed", std::to_string(seed));
  kv.set("cell_dim", std::to_string(dims.cell));
  kv.set("net_dim", std::to_string(dims.net));
  kv.set("grid_dim", std::to_string(dims.grid));
  kv.set("topo_dim", std::to_string(dims.topo));
  kv.set("grid_edge_dim", std::to_string(dims.grid_edge));
  kv.set("layers", std::to_string(dims.layers));
  kv.set("readout_hidden", std::to_string(dims.readout_hidden));
  return kv;
}

void TrainConfig::validate() const {
  if (!(lr >= 0) || !std::isfinite(lr)) throw ConfigError("lr must be finite and >= 0");
  if (!(lr_decay >= 0 && lr_decay < 1)) throw ConfigError("lr_decay must be in [0, 1)");
  if (!(weight_decay >= 0)) throw ConfigError("weight_decay must be >= 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (steps_per_epoch < 1) throw ConfigError("steps_per_epoch must be >= 1");
  if (!(val_fraction >= 0 && val_fraction < 1)) throw ConfigError("val_fraction must be in [0, 1)");
  if (dims.cell < 1 || dims.net < 1 || dims.grid < 1 || dims.topo < 1 || dims.grid_edge < 1 || dims.layers < 0 ||
      dims.readout_hidden < 1) {
    throw ConfigError("network dimensions must be positive");
  }
}

TrainingSample make_sample(const Netlist &nl, const Snapshot &s) {
  GraphBundle b = build_bundle(nl, s.placement);
  TrainingSample t;
  t.netlist_id = s.netlist_id;
  t.graph = std::move(b.graph);
  t.features = std::move(b.features);
  t.labels = Eigen::Map<const Eigen::VectorXd>(s.labels.data(), static_cast<Eigen::Index>(s.labels.size()));
  t.movable = movable_mask(nl);
  return t;
}

double sample_loss(const Eigen::VectorXd &pred, const Eigen::VectorXd &labels, const std::vector<char> &movable,
                   Eigen::VectorXd *grad) {
  int count = 0;
  for (char c : movable) count += c ? 1 : 0;
  if (grad) *grad = Eigen::VectorXd::Zero(pred.size());
  if (count == 0) return 0.0;
  double total = 0.0;
  for (Eigen::Index v = 0; v < pred.size(); ++v) {
    if (!movable[v]) continue;
    double r = std::log1p(pred[v]) - std::log1p(labels[v]);
    total += r * r;
    if (grad) (*grad)[v] = 2.0 * r / (1.0 + pred[v]) / count;
  }
  return total / count;
}

double dataset_loss(const RouteGnn &model, const std::vector<TrainingSample> &samples, const std::vector<int> &indices) {
  if (indices.empty()) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  for (int k : indices) {
    const TrainingSample &s = samples[k];
    total += sample_loss(model.predict(s.graph, s.features), s.labels, s.movable);
  }
  return total / static_cast<double>(indices.size());
}

void split_by_netlist(const std::vector<TrainingSample> &samples, double val_fraction, std::uint64_t seed,
                      std::vector<int> &train, std::vector<int> &val) {
  std::vector<std::string> ids;
  for (const TrainingSample &s : samples) ids.push_back(s.netlist_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::mt19937_64 rng(seed);
  for (std::size_t k = ids.size(); k > 1; --k) std::swap(ids[k - 1], ids[rng() % k]);
  std::size_t n_val = static_cast<std::size_t>(std::ceil(val_fraction * static_cast<double>(ids.size())));
  if (ids.size() < 2) n_val = 0;
  n_val = std::min(n_val, ids.size() - 1);
  std::vector<std::string> val_ids(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_val));
  train.clear();
  val.clear();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    bool is_val = std::find(val_ids.begin(), val_ids.end(), samples[k].netlist_id) != val_ids.end();
    (is_val ? val : train).push_back(static_cast<int>(k));
  }
}

TrainResult train(const std::vector<TrainingSample> &samples, const TrainConfig &cfg) {
  cfg.validate();
  if (samples.empty()) throw TrainingError("training needs at least one snapshot");
  TrainResult res;
  split_by_netlist(samples, cfg.val_fraction, cfg.seed, res.train_indices, res.val_indices);

  std::vector<const RawFeatures *> sets;
  for (int k : res.train_indices) sets.push_back(&samples[k].features);
  RouteGnn model(GnnParams::glorot(cfg.dims, cfg.seed), FeatureStats::fit(sets));

  std::vector<double> theta = model.params().flatten();
  std::vector<double> m1(theta.size(), 0.0), m2(theta.size(), 0.0), best = theta;
  double best_loss = std::numeric_limits<double>::infinity();
  const double inv_count = 1.0 / static_cast<double>(res.train_indices.size());
  long long t = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = cfg.lr * std::pow(1.0 - cfg.lr_decay, epoch);
    for (int step = 0; step < cfg.steps_per_epoch; ++step) {
      std::vector<double> grad(theta.size(), 0.0);
      double loss = 0.0;
      for (int k : res.train_indices) {
        const TrainingSample &s = samples[k];
        GnnActivations acts = model.forward(s.graph, s.features);
        Eigen::VectorXd g;
        loss += sample_loss(acts.prediction, s.labels, s.movable, &g) * inv_count;
        std::vector<double> gk = model.backward(acts, g, true).params.flatten();
        for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += gk[i] * inv_count;
      }
      if (!std::isfinite(loss)) throw TrainingError("non-finite training loss at epoch " + std::to_string(epoch));
      if (step == 0) rec.train_loss = loss;

      ++t;
      const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
      const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
      for (std::size_t i = 0; i < theta.size(); ++i) {
        m1[i] = cfg.beta1 * m1[i] + (1.0 - cfg.beta1) * grad[i];
        m2[i] = cfg.beta2 * m2[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        double update = (m1[i] / c1) / (std::sqrt(m2[i] / c2) + cfg.adam_eps);
        theta[i] -= rec.lr * (update + cfg.weight_decay * theta[i]);
      }
      model.mutable_params().assign(theta);
    }
    const std::vector<int> &sel = res.val_indices.empty() ? res.train_indices : res.val_indices;
    double sel_loss = dataset_loss(model, samples, sel);
    if (!std::isfinite(sel_loss)) throw TrainingError("non-finite loss at epoch " + std::to_string(epoch));
    rec.val_loss = res.val_indices.empty() ? std::numeric_limits<double>::quiet_NaN() : sel_loss;
    if (sel_loss < best_loss) {
      best_loss = sel_loss;
      best = theta;
      res.best_epoch = epoch;
    }
    log_debug("epoch " + std::to_string(epoch) + " train " + format_double(rec.train_loss) + " select " +
              format_double(sel_loss));
    res.history.push_back(rec);
  }
  model.mutable_params().assign(best);
  res.best_val_loss = best_loss;
  res.model = std::move(model);
  return res;
}

std::string write_history_csv(const std::vector<EpochRecord> &history) {
  std::string out = "epoch,lr,train_loss,val_loss\n";
  for (const EpochRecord &r : history) {
    out += std::to_string(r.epoch) + "," + format_double(r.lr) + "," + format_double(r.train_loss) + "," +
           (std::isnan(r.val_loss) ? std::string("nan") : format_double(r.val_loss)) + "\n";
  }
  return out;
}

EvalStats evaluate_sample(const RouteGnn &model, const TrainingSample &s) {
  Eigen::VectorXd pred = model.predict(s.graph, s.features);
  std::vector<double> p(pred.data(), pred.data() + pred.size());
  std::vector<double> y(s.labels.data(), s.labels.data() + s.labels.size());
  return eval_stats(p, y, grid_map_from_cells(p, s.graph.cell_grid, s.graph.n, s.graph.m),
                    grid_map_from_cells(y, s.graph.cell_grid, s.graph.n, s.graph.m));
}

}  // namespace routeplace
