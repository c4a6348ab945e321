#pragma once

// Drives the command-line tool through a full gen -> place -> collect -> train
// -> place -> route -> predict -> eval -> report pipeline inside a scratch
// directory, and inspects the artifacts it leaves behind.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "routeplace/util.hpp"

#ifndef ROUTEPLACE_BIN
#error "ROUTEPLACE_BIN must name the command-line tool"
#endif

namespace rp_test {

namespace fs = std::filesystem;

/// Runs the tool in `dir` with stdout and stderr appended to dir/cli.log.
inline int run_cli(const fs::path &dir, const std::string &args) {
  std::string cmd = "cd '" + dir.string() + "' && '" ROUTEPLACE_BIN "' " + args + " >> cli.log 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

inline void write_text(const fs::path &path, const std::string &text) {
  std::ofstream(path, std::ios::binary) << text;
}

struct PipelineSpec {
  int cells = 200;
  int train_netlists = 2;
  int epochs = 5;
  double eta = 0.3;
};

/// Returns the first failing step, or an empty string when every step exits 0.
inline std::string run_pipeline(const fs::path &dir, const PipelineSpec &s) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_text(dir / "gen.txt", "cell_count = " + std::to_string(s.cells) + "\nnet_count = " +
                                  std::to_string(s.cells * 9 / 10) + "\ngrid_n = 8\ngrid_m = 8\ncap_h = 3\ncap_v = 3\n");
  write_text(dir / "train.txt", "epochs = " + std::to_string(s.epochs) + "\nval_fraction = 0.3\n");
  write_text(dir / "place.txt", "eta_start_eo = 0.8\n");
  std::string collect = "collect --seed 1 -o ds";
  for (int k = 0; k <= s.train_netlists; ++k) {
    std::string seed = std::to_string(k + 1);
    if (run_cli(dir, "gen --spec gen.txt --seed " + seed + " -o n" + seed + ".net")) return "gen";
    if (k > 0) collect += " --netlist n" + seed + ".net";
  }
  const std::string eta = std::to_string(s.eta);
  const std::pair<std::string, std::string> steps[] = {
      {"place baseline", "place --netlist n1.net --seed 1 -o base.pl --trace base.csv"},
      {"collect", collect},
      {"train", "train --data ds --config train.txt --seed 1 -o model.ckpt --history history.csv"},
      {"place eta", "place --netlist n1.net --seed 1 --model model.ckpt --eta " + eta +
                        " --config place.txt -o eta.pl --trace eta.csv"},
      {"route baseline", "route --netlist n1.net --placement base.pl -o base.cg --report base.txt"},
      {"route eta", "route --netlist n1.net --placement eta.pl -o eta.cg --report eta.txt"},
      {"predict", "predict --model model.ckpt --netlist ds/netlists/n2.net --placement ds/snap_0/placement.pl "
                  "-o pred.txt"},
      {"eval", "eval --pred pred.txt --labels ds/snap_0/labels.txt --report eval.txt"},
      {"report", "report --map base.cg --map eta.cg --label baseline --label routeplacer --trace base.csv "
                 "--trace eta.csv --heatmap-dir heat -o report.txt"},
  };
  for (const auto &[name, args] : steps) {
    if (run_cli(dir, args) != 0) return name;
  }
  return "";
}

/// sha256 of every artifact under `dir` except manifests (they hold wall time)
/// and the log.
inline std::map<std::string, std::string> artifact_hashes(const fs::path &dir) {
  std::map<std::string, std::string> out;
  for (const auto &e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const fs::path &p = e.path();
    if (p.extension() == ".manifest" || p.filename() == "cli.log") continue;
    out[fs::relative(p, dir).string()] = routeplace::sha256_hex(routeplace::read_file(p));
  }
  return out;
}

/// Checks every `input = <path> sha256:<hex>` and `output = ...` line of every
/// manifest under `dir`. Returns the number of manifests; `bad` counts entries
/// whose file is missing or whose hash differs.
inline int verify_manifests(const fs::path &dir, int &bad) {
  int manifests = 0;
  bad = 0;
  for (const auto &e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".manifest") continue;
    ++manifests;
    std::istringstream in(routeplace::read_file(e.path()));
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("input = ", 0) != 0 && line.rfind("output = ", 0) != 0) continue;
      std::istringstream row(line.substr(line.find('=') + 2));
      std::string path, hash;
      row >> path >> hash;
      fs::path file = dir / path;
      if (!fs::exists(file) || "sha256:" + routeplace::sha256_hex(routeplace::read_file(file)) != hash) ++bad;
    }
  }
  return manifests;
}

}  // namespace rp_test
