#include "routeplace/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>

#include "routeplace/gnn.hpp"
#include "routeplace/metrics.hpp"
#include "routeplace/placer.hpp"
#include "routeplace/report.hpp"
#include "routeplace/router.hpp"
#include "routeplace/synthetic.hpp"
#include "routeplace/trainer.hpp"
#include "routeplace/util.hpp"

namespace routeplace {

namespace fs = std::filesystem;

namespace {

/// Collects outputs and writes them, each with its manifest, once the
/// subcommand has succeeded.
class Outputs {
 public:
  Outputs(std::string subcommand, std::string config, std::string seed) {
    manifest_.subcommand = std::move(subcommand);
    manifest_.config = std::move(config);
    manifest_.seed = std::move(seed);
  }
  void input(const fs::path &p) { manifest_.add_input(p); }
  void add(const fs::path &p, std::string content) { files_.emplace_back(p, std::move(content)); }
  void commit(std::chrono::steady_clock::time_point start) {
    for (const auto &[p, c] : files_) manifest_.add_output(p, c);
    manifest_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto &[p, c] : files_) {
      if (p.has_parent_path()) fs::create_directories(p.parent_path());
      write_file_atomic(p, c);
      write_file_atomic(manifest_path(p), manifest_.to_string());
    }
  }

 private:
  RunManifest manifest_;
  std::vector<std::pair<fs::path, std::string>> files_;
};

KeyValueConfig load_config(const std::string &path) {
  return path.empty() ? KeyValueConfig{} : KeyValueConfig::parse(read_file(path));
}

Netlist load_netlist(const std::string &path) { return parse_netlist(read_file(path)); }

struct Options {
  std::string spec, netlist, placement, out, report, config, data, model, pred, labels, trace, heatmap_dir, feedback;
  std::string history;
  std::vector<std::string> netlists, maps, traces, run_labels;
  std::uint64_t seed = 0;
  std::optional<double> eta, exponent;
  std::optional<int> num_adjust;
  bool inflate = false;
  double bin_width = 1.0;
};

}  // namespace

int dispatch(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Routability-driven analytical placement with a learned congestion model", "routeplace"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  Options o;
  auto existing = CLI::ExistingFile;

  auto *gen = app.add_subcommand("gen", "Generate a seeded synthetic netlist");
  gen->add_option("--spec", o.spec, "Generator spec (key = value)")->required()->check(existing);
  gen->add_option("--seed", o.seed, "Random seed")->required();
  gen->add_option("-o,--output", o.out, "Output netlist")->required();

  auto *route_cmd = app.add_subcommand("route", "Route a placement and report overflow");
  route_cmd->add_option("--netlist", o.netlist)->required()->check(existing);
  route_cmd->add_option("--placement", o.placement)->required()->check(existing);
  route_cmd->add_option("-o,--output", o.out, "Congestion map")->required();
  route_cmd->add_option("--report", o.report, "Overflow report");

  auto *collect = app.add_subcommand("collect", "Collect training snapshots from baseline placement runs");
  collect->add_option("--netlist", o.netlists, "Netlist (repeatable)")->required()->check(existing);
  collect->add_option("--config", o.config, "Placer config")->check(existing);
  collect->add_option("--seed", o.seed)->required();
  collect->add_option("-o,--output", o.out, "Dataset directory")->required();

  auto *train_cmd = app.add_subcommand("train", "Train RouteGNN on a dataset directory");
  train_cmd->add_option("--data", o.data)->required()->check(CLI::ExistingDirectory);
  train_cmd->add_option("--config", o.config, "Training config")->check(existing);
  train_cmd->add_option("--seed", o.seed, "Overrides the config seed");
  train_cmd->add_option("-o,--output", o.out, "Model checkpoint")->required();
  train_cmd->add_option("--history", o.history, "Per-epoch loss CSV");

  auto *predict = app.add_subcommand("predict", "Predict per-cell congestion");
  predict->add_option("--model", o.model)->required()->check(existing);
  predict->add_option("--netlist", o.netlist)->required()->check(existing);
  predict->add_option("--placement", o.placement)->required()->check(existing);
  predict->add_option("-o,--output", o.out)->required();

  auto *eval = app.add_subcommand("eval", "Compare predictions against labels");
  eval->add_option("--pred", o.pred)->required()->check(existing);
  eval->add_option("--labels", o.labels)->required()->check(existing);
  eval->add_option("--report", o.report)->required();

  auto *place_cmd = app.add_subcommand("place", "Run global placement");
  place_cmd->add_option("--netlist", o.netlist)->required()->check(existing);
  place_cmd->add_option("--config", o.config, "Placer config")->check(existing);
  place_cmd->add_option("--model", o.model, "RouteGNN checkpoint")->check(existing);
  place_cmd->add_option("--eta", o.eta, "Congestion weight");
  place_cmd->add_flag("--inflate", o.inflate, "Enable the cell inflation loop");
  place_cmd->add_option("--exponent", o.exponent);
  place_cmd->add_option("--num-adjust", o.num_adjust);
  place_cmd->add_option("--feedback", o.feedback)->check(CLI::IsMember({"router", "gnn"}));
  place_cmd->add_option("--seed", o.seed)->required();
  place_cmd->add_option("-o,--output", o.out, "Placement file")->required();
  place_cmd->add_option("--trace", o.trace, "Trace CSV");

  auto *report = app.add_subcommand("report", "Compare congestion maps and draw overflow heatmaps");
  report->add_option("--map", o.maps, "Congestion map (repeatable)")->required()->check(existing);
  report->add_option("--label", o.run_labels, "Label per map");
  report->add_option("--trace", o.traces, "Trace CSV per map")->check(existing);
  report->add_option("--bin-width", o.bin_width);
  report->add_option("--heatmap-dir", o.heatmap_dir, "Directory for <label>.ppm overflow heatmaps");
  report->add_option("-o,--output", o.out)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForVersion &) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::Success &) {
    const CLI::App *active = &app;
    for (const CLI::App *sub : app.get_subcommands()) active = sub;
    out << active->help();
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "usage error: " << e.what() << " (see --help)\n";
    return kExitUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  const std::string seed = std::to_string(o.seed);
  try {
    if (*gen) {
      KeyValueConfig kv = load_config(o.spec);
      SyntheticSpec spec = SyntheticSpec::from_config(kv);
      spec.seed = o.seed;
      Netlist nl = generate_synthetic(spec);
      Outputs outs("gen", spec.to_config().to_string(), seed);
      outs.input(o.spec);
      outs.add(o.out, serialize_netlist(nl));
      outs.commit(start);
    } else if (*route_cmd) {
      Netlist nl = load_netlist(o.netlist);
      Placement p = read_placement(read_file(o.placement), nl.num_cells());
      CongestionMap map = route(nl, p);
      Outputs outs("route", "", "");
      outs.input(o.netlist);
      outs.input(o.placement);
      outs.add(o.out, write_congestion_map(map));
      OverflowReport r = overflow_metrics(map);
      std::string text = write_overflow_report(r) + "routed_wl " + format_double(map.routed_wirelength()) + "\n";
      if (!o.report.empty()) outs.add(o.report, text);
      outs.commit(start);
      out << text;
    } else if (*collect) {
      PlacerConfig cfg = PlacerConfig::from_config(load_config(o.config));
      cfg.seed = o.seed;
      std::vector<Netlist> nls;
      for (const std::string &path : o.netlists) nls.push_back(load_netlist(path));
      std::vector<std::pair<const Netlist *, Snapshot>> items;
      for (std::size_t k = 0; k < nls.size(); ++k) {
        std::string id = fs::path(o.netlists[k]).stem().string();
        for (Snapshot &s : collect_snapshots(nls[k], id, cfg)) items.emplace_back(&nls[k], std::move(s));
      }
      if (items.empty()) throw DatasetError("no snapshots collected; placement never reached EO 0.8");
      write_dataset(o.out, items);
      RunManifest m;
      m.subcommand = "collect";
      m.config = cfg.to_config().to_string();
      m.seed = seed;
      for (const std::string &path : o.netlists) m.add_input(path);
      fs::path meta = fs::path(o.out) / "meta.txt";
      m.add_output(meta, read_file(meta));
      m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      write_file_atomic(manifest_path(meta), m.to_string());
      out << "collected " << items.size() << " snapshots\n";
    } else if (*train_cmd) {
      KeyValueConfig kv = load_config(o.config);
      TrainConfig cfg = TrainConfig::from_config(kv);
      if (train_cmd->count("--seed")) cfg.seed = o.seed;
      Dataset ds = read_dataset(o.data);
      std::vector<TrainingSample> samples;
      for (const Dataset::Item &it : ds.items) samples.push_back(make_sample(ds.netlists[it.netlist], it.snapshot));
      TrainResult res = train(samples, cfg);
      Outputs outs("train", cfg.to_config().to_string(), std::to_string(cfg.seed));
      outs.input(fs::path(o.data) / "meta.txt");
      if (!o.config.empty()) outs.input(o.config);
      outs.add(o.out, save_checkpoint(res.model));
      if (!o.history.empty()) outs.add(o.history, write_history_csv(res.history));
      outs.commit(start);
      out << "best epoch " << res.best_epoch << " loss " << format_double(res.best_val_loss) << "\n";
    } else if (*predict) {
      RouteGnn model = load_checkpoint(read_file(o.model));
      Netlist nl = load_netlist(o.netlist);
      Placement p = read_placement(read_file(o.placement), nl.num_cells());
      GraphBundle b = build_bundle(nl, p);
      Eigen::VectorXd pred = model.predict(b.graph, b.features);
      Outputs outs("predict", "", "");
      outs.input(o.model);
      outs.input(o.netlist);
      outs.input(o.placement);
      outs.add(o.out, write_cell_values(
                          make_cell_values(nl, p, std::vector<double>(pred.data(), pred.data() + pred.size()))));
      outs.commit(start);
    } else if (*eval) {
      CellValues pred = read_cell_values(read_file(o.pred));
      CellValues labels = read_cell_values(read_file(o.labels));
      if (pred.value.size() != labels.value.size()) {
        throw std::invalid_argument("prediction and label files have different cell counts");
      }
      if (pred.n != labels.n || pred.m != labels.m) throw std::invalid_argument("prediction and label grids differ");
      GridMap label_map = grid_map_from_cells(labels.value, labels.grid, labels.n, labels.m);
      GridMap pred_map = grid_map_from_cells(pred.value, labels.grid, labels.n, labels.m);
      EvalStats s = eval_stats(pred.value, labels.value, pred_map, label_map);
      std::string text = "nrmse " + (s.nrmse_infinite ? std::string("inf") : format_double(s.nrmse)) + "\n" +
                         "ssim " + format_double(s.ssim) + "\n" + "pearson " + format_double(s.pearson) + "\n" +
                         "spearman " + format_double(s.spearman) + "\n" + "kendall " + format_double(s.kendall) +
                         "\n";
      Outputs outs("eval", "", "");
      outs.input(o.pred);
      outs.input(o.labels);
      outs.add(o.report, text);
      outs.commit(start);
      out << text;
    } else if (*place_cmd) {
      PlacerConfig cfg = PlacerConfig::from_config(load_config(o.config));
      cfg.seed = o.seed;
      if (o.eta) cfg.eta = *o.eta;
      if (o.inflate) cfg.inflation.enabled = true;
      if (o.exponent) cfg.inflation.exponent = *o.exponent;
      if (o.num_adjust) cfg.inflation.num_adjust = *o.num_adjust;
      if (!o.feedback.empty()) {
        cfg.inflation.feedback = o.feedback == "gnn" ? InflationFeedback::Gnn : InflationFeedback::Router;
      }
      std::optional<RouteGnn> model;
      if (!o.model.empty()) model = load_checkpoint(read_file(o.model));
      if (cfg.eta > 0 && !model) throw PlacementError("--eta > 0 needs --model");
      Netlist nl = load_netlist(o.netlist);
      PlaceResult res = place(nl, cfg, model ? &*model : nullptr);
      Outputs outs("place", cfg.to_config().to_string(), seed);
      outs.input(o.netlist);
      if (!o.config.empty()) outs.input(o.config);
      if (!o.model.empty()) outs.input(o.model);
      outs.add(o.out, write_placement(res.placement));
      if (!o.trace.empty()) outs.add(o.trace, write_trace_csv(res.trace));
      outs.commit(start);
      if (!res.converged) log_info("place: stopped at the iteration limit before reaching the target EO");
      out << "hpwl " << format_double(hpwl(nl, res.placement)) << " iterations " << res.trace.size() << "\n";
    } else if (*report) {
      if (!o.run_labels.empty() && o.run_labels.size() != o.maps.size()) {
        throw std::invalid_argument("give one --label per --map");
      }
      if (!o.traces.empty() && o.traces.size() != o.maps.size()) {
        throw std::invalid_argument("give one --trace per --map");
      }
      std::vector<ReportRun> runs;
      Outputs outs("report", "bin_width = " + format_double(o.bin_width) + "\n", "");
      for (std::size_t k = 0; k < o.maps.size(); ++k) {
        ReportRun r;
        r.label = o.run_labels.empty() ? "run" + std::to_string(k) : o.run_labels[k];
        r.map = read_congestion_map(read_file(o.maps[k]));
        outs.input(o.maps[k]);
        if (!o.traces.empty()) {
          r.trace = read_trace_csv(read_file(o.traces[k]));
          outs.input(o.traces[k]);
        }
        runs.push_back(std::move(r));
      }
      std::string text = comparison_report(runs, o.bin_width);
      outs.add(o.out, text);
      if (!o.heatmap_dir.empty()) {
        double top = 0.0;
        std::vector<OverflowReport> of;
        for (const ReportRun &r : runs) {
          of.push_back(overflow_metrics(r.map));
          top = std::max(top, of.back().of_map.max());
        }
        for (std::size_t k = 0; k < runs.size(); ++k) {
          outs.add(fs::path(o.heatmap_dir) / (runs[k].label + ".ppm"), heatmap_ppm(of[k].of_map, top));
        }
      }
      outs.commit(start);
      out << text;
    }
  } catch (const IoError &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError &e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NetlistError &e) {
    err << "netlist error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitOk;
}

int dispatch(int argc, char **argv) {
  tune_allocator();
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace routeplace
