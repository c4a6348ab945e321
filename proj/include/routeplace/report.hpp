#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "routeplace/placer.hpp"
#include "routeplace/router.hpp"

namespace routeplace {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<TraceRow> read_trace_csv(std::string_view text);

/// Plain (ASCII) PPM of a grid map: white at 0, pure red at `scale_max`.
/// Columns run along x, the top image row is the highest grid row.
/// scale_max <= 0 uses the map maximum.
std::string heatmap_ppm(const GridMap &map, double scale_max = 0.0);

/// Counts of values in [k * width, (k + 1) * width) for k < bins; the last bin
/// also takes everything above it.
std::vector<long long> histogram(const GridMap &map, double width, int bins);

struct ReportRun {
  std::string label;
  CongestionMap map;
  std::vector<TraceRow> trace;  // may be empty
};

/// Side-by-side TOF / MOF / H-CR / V-CR table, differences against the first
/// run, and an overflow histogram shared by all runs.
std::string comparison_report(const std::vector<ReportRun> &runs, double bin_width = 1.0);

}  // namespace routeplace
