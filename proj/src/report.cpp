#include "routeplace/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace routeplace {

std::vector<TraceRow> read_trace_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.rfind("iter,hpwl,eo,wl,density,congestion,lambda_d,gamma", 0) != 0) {
    throw ReportError("trace file: missing header 'iter,hpwl,eo,wl,density,congestion,lambda_d,gamma'");
  }
  std::vector<TraceRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    TraceRow r;
    if (!(row >> r.iter >> r.hpwl >> r.eo >> r.wl >> r.density >> r.congestion >> r.lambda_d >> r.gamma)) {
      throw ReportError("trace file line " + std::to_string(lineno) + ": expected 8 numeric columns");
    }
    rows.push_back(r);
  }
  return rows;
}

std::string heatmap_ppm(const GridMap &map, double scale_max) {
  if (scale_max <= 0) scale_max = std::max(0.0, map.max());
  std::string out = "P3\n" + std::to_string(map.n) + " " + std::to_string(map.m) + "\n255\n";
  for (int j = map.m - 1; j >= 0; --j) {
    for (int i = 0; i < map.n; ++i) {
      double t = scale_max > 0 ? std::clamp(map.at(i, j) / scale_max, 0.0, 1.0) : 0.0;
      int fade = static_cast<int>(std::lround(255.0 * (1.0 - t)));
      out += "255 " + std::to_string(fade) + " " + std::to_string(fade) + (i + 1 == map.n ? "\n" : " ");
    }
  }
  return out;
}

std::vector<long long> histogram(const GridMap &map, double width, int bins) {
  if (!(width > 0) || bins < 1) throw ReportError("histogram needs a positive bin width and at least one bin");
  std::vector<long long> counts(bins, 0);
  for (double v : map.v) {
    double k = std::floor(std::max(0.0, v) / width);
    counts[static_cast<std::size_t>(std::min<double>(k, bins - 1))] += 1;
  }
  return counts;
}

std::string comparison_report(const std::vector<ReportRun> &runs, double bin_width) {
  if (runs.empty()) throw ReportError("report needs at least one congestion map");
  std::vector<OverflowReport> of;
  for (const ReportRun &r : runs) {
    if (r.map.n() != runs[0].map.n() || r.map.m() != runs[0].map.m()) {
      throw ReportError("map '" + r.label + "' is " + std::to_string(r.map.n()) + "x" + std::to_string(r.map.m()) +
                        " but '" + runs[0].label + "' is " + std::to_string(runs[0].map.n()) + "x" +
                        std::to_string(runs[0].map.m()));
    }
    of.push_back(overflow_metrics(r.map));
  }

  std::string out = "# run tof mof h_cr v_cr routed_wl final_hpwl iterations\n";
  for (std::size_t k = 0; k < runs.size(); ++k) {
    out += runs[k].label + " " + format_double(of[k].tof) + " " + format_double(of[k].mof) + " " +
           format_double(of[k].h_cr) + " " + format_double(of[k].v_cr) + " " +
           format_double(runs[k].map.routed_wirelength());
    if (runs[k].trace.empty()) {
      out += " - -\n";
    } else {
      out += " " + format_double(runs[k].trace.back().hpwl) + " " + std::to_string(runs[k].trace.size()) + "\n";
    }
  }

  out += "# difference against " + runs[0].label + ": run tof_delta max_abs_of_delta routed_wl_ratio\n";
  for (std::size_t k = 1; k < runs.size(); ++k) {
    double max_abs = 0.0;
    for (std::size_t g = 0; g < of[k].of_map.size(); ++g) {
      max_abs = std::max(max_abs, std::abs(of[k].of_map.v[g] - of[0].of_map.v[g]));
    }
    double wl0 = runs[0].map.routed_wirelength();
    out += runs[k].label + " " + format_double(of[k].tof - of[0].tof) + " " + format_double(max_abs) + " " +
           (wl0 > 0 ? format_double(runs[k].map.routed_wirelength() / wl0) : std::string("-")) + "\n";
  }

  double top = 0.0;
  for (const OverflowReport &r : of) top = std::max(top, r.of_map.max());
  int bins = static_cast<int>(std::floor(top / bin_width)) + 1;
  out += "# overflow histogram, bin width " + format_double(bin_width) + ": lo hi";
  for (const ReportRun &r : runs) out += " " + r.label;
  out += "\n";
  std::vector<std::vector<long long>> counts;
  for (const OverflowReport &r : of) counts.push_back(histogram(r.of_map, bin_width, bins));
  for (int b = 0; b < bins; ++b) {
    out += format_double(b * bin_width) + " " + format_double((b + 1) * bin_width);
    for (const auto &c : counts) out += " " + std::to_string(c[b]);
    out += "\n";
  }
  return out;
}

}  // namespace routeplace
