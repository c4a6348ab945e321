#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "routeplace/config.hpp"
#include "routeplace/density.hpp"
#include "routeplace/gnn.hpp"
#include "routeplace/nag.hpp"
#include "routeplace/netlist.hpp"
#include "routeplace/wirelength.hpp"

namespace routeplace {

enum class InflationFeedback { Router, Gnn };

struct InflationConfig {
  bool enabled = false;
  double exponent = 1.5;
  int num_adjust = 3;
  double trigger_eo = 0.2;
  InflationFeedback feedback = InflationFeedback::Router;
};

struct PlacerConfig {
  // Wirelength smoothing schedule, in grid pitches: gamma_start at EO = 1
  // decaying geometrically to gamma_end at EO = stop_eo.
  double gamma_start = 5.0;
  double gamma_end = 0.1;
  double lambda_d = 0.0;          // initial density weight; <= 0 picks it from gradient norms
  double lambda_ratio = 1e-3;     // auto weight = ratio * |grad WL|_1 / |grad D|_1
  double hpwl_ref = 350000.0;     // denominator of the lambda update exponent
  double eta = 0.0;               // congestion weight
  double eta_start_eo = 1.0;      // congestion term active once EO < this; 1.0 means from the start
  double trust_region = 0.5;      // per-iteration move cap in pitches while the congestion term is active
  double target_density = 1.0;
  int max_iters = 1000;
  double stop_eo = 0.1;
  int density_n = 0;              // density bins; 0 uses the routing grid
  int density_m = 0;
  double initial_step = 0.1;      // first step moves the largest-gradient cell this many pitches
  NagConfig nag;
  InflationConfig inflation;
  std::uint64_t seed = 1;

  static PlacerConfig from_config(const KeyValueConfig &cfg);
  KeyValueConfig to_config() const;
};

struct TraceRow {
  int iter = 0;
  double hpwl = 0, eo = 0, wl = 0, density = 0, congestion = 0, lambda_d = 0, gamma = 0;
};

struct PlaceResult {
  Placement placement;
  std::vector<TraceRow> trace;
  bool converged = false;
  int inflation_rounds = 0;
};

/// Density-weight multiplier after an iteration:
///   1.05 * max(0.999^epoch, 0.98)       if delta_hpwl < 0
///   1.05 * 1.05^(-delta_hpwl / hpwl_ref) otherwise
double lambda_multiplier(double delta_hpwl, int epoch, double hpwl_ref = 350000.0);
double lambda_update(double lambda_d, double delta_hpwl, int epoch, double hpwl_ref = 350000.0);

struct CongestionTerm {
  double value = 0.0;
  std::vector<double> grad_x, grad_y;
  Eigen::VectorXd prediction;
  std::vector<int> cell_grid;
};

/// RouteGNN penalty over movable cells and its positional gradient through the
/// geometric features (J^T * dL/dX_V restricted to g_h, g_v).
CongestionTerm congestion_term(const Netlist &netlist, const Placement &p, const RouteGnn &model,
                               bool want_gradient = true);

/// Same penalty with the graph, RUDY, the 3x3 feature blocks and every feature
/// except g_h, g_v frozen at `reference`; g_h and g_v are recomputed from `p`. Value and gradient are
/// consistent, which the placer's line search relies on.
CongestionTerm congestion_term_frozen(const Netlist &netlist, const Placement &p, const RouteGnn &model,
                                      const GraphBundle &reference, bool want_gradient = true);

/// Per-cell size multiplier max(1, sqrt(max over overlapped grids of congestion^exponent)).
std::vector<double> inflation_ratios(const Netlist &netlist, const Placement &p, const std::vector<double> &widths,
                                     const std::vector<double> &heights, const GridMap &congestion, double exponent);

/// Congestion map the inflation loop consumes from RouteGNN: 1 + mean cell
/// prediction per grid / mean capacity.
GridMap gnn_congestion_map(const Netlist &netlist, const Placement &p, const RouteGnn &model);

class PlacementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using IterationObserver = std::function<void(const TraceRow &row, const Placement &p)>;

/// Analytical global placer minimising WL + lambda_D * D + eta * L with NAG.
/// Works on cell centres so temporary inflation keeps pins in place.
class GlobalPlacer {
 public:
  GlobalPlacer(const Netlist &netlist, PlacerConfig cfg, const RouteGnn *model = nullptr);

  /// Movable cells at the fixed-pin centroid plus seeded jitter.
  void initialize();
  /// Iterates until EO <= target or the global iteration budget is spent.
  /// Returns true if the target was reached.
  bool run_until(double target_eo, const IterationObserver &observer = {});

  Placement placement() const;  // lower-left corners with original sizes
  double electric_overflow_now() const;
  const std::vector<TraceRow> &trace() const { return trace_; }
  int iterations() const { return state_.iteration; }

  /// Multiply movable cell sizes (inflation); sizes never shrink.
  void scale_sizes(const std::vector<double> &ratios);
  const std::vector<double> &widths() const { return widths_; }
  const std::vector<double> &heights() const { return heights_; }
  Placement inflated_placement() const;  // lower-left corners with current sizes

 private:
  struct Eval {
    double wl = 0, density = 0, congestion = 0;
  };
  double gamma_for(double eo) const;
  Placement lower_left(const std::vector<double> &centers, bool inflated) const;
  double evaluate(const std::vector<double> &centers, std::vector<double> *grad, Eval *parts);
  void project(std::vector<double> &centers) const;
  bool congestion_active(double eo) const;
  void refresh_congestion_reference();
  void rescale_step_for_congestion();

  const Netlist &nl_;
  PlacerConfig cfg_;
  const RouteGnn *model_;
  DensityModel density_;
  std::vector<double> widths_, heights_;
  NagState state_;
  double lambda_ = 0.0;
  double gamma_ = 1.0;
  double eo_ = 1.0;
  double hpwl_ = 0.0;
  bool congestion_on_ = false;
  std::optional<GraphBundle> reference_;  // features frozen for the current iteration
  bool initialized_ = false;
  std::vector<TraceRow> trace_;
};

/// Plain placement (inflation disabled) or the inflate-and-replace loop when
/// cfg.inflation.enabled. A model is required when eta > 0 or when the
/// inflation feedback is Gnn.
PlaceResult place(const Netlist &netlist, const PlacerConfig &cfg, const RouteGnn *model = nullptr,
                  const IterationObserver &observer = {});

std::string write_trace_csv(const std::vector<TraceRow> &trace);

}  // namespace routeplace
